//! Scalar performance metrics: association probabilities, the interference
//! Laplace transform, conditional and overall SINR coverage, mean achievable
//! rate, Voronoi-cell power consumption, throughput and energy efficiency.
//!
//! Events are named after the association outcome:
//!
//! | event | model           | serving set         |
//! |-------|-----------------|---------------------|
//! | `A_m` | non-cooperative | nearest MBS         |
//! | `A_s` | non-cooperative | nearest SBS         |
//! | `B_m` | cooperative     | nearest MBS         |
//! | `B_s` | cooperative     | `k` nearest SBSs    |

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{self, CoopConditioning, GeometryError};
use crate::model::ValidatedScenario;
use crate::montecarlo::{self, Computed, McMetric, SimSettings};
use crate::quadrature::{self, QuadratureError, QuadratureSettings, TailMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("total power is zero; energy efficiency is undefined")]
    DegeneratePower,
}

impl AnalyticError {
    /// True when the failure is a numerical tolerance miss rather than an
    /// unsupported input.
    pub fn is_tolerance(&self) -> bool {
        matches!(
            self,
            AnalyticError::Quadrature(QuadratureError::ToleranceNotMet { .. })
                | AnalyticError::Geometry(GeometryError::Quadrature(QuadratureError::ToleranceNotMet { .. }))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AssociationModel {
    #[serde(rename = "noncoop")]
    NonCooperative,
    #[serde(rename = "coop")]
    Cooperative,
}

impl AssociationModel {
    pub fn id(self) -> &'static str {
        match self {
            AssociationModel::NonCooperative => "noncoop",
            AssociationModel::Cooperative => "coop",
        }
    }

    pub fn events(self) -> [Event; 2] {
        match self {
            AssociationModel::NonCooperative => [Event::MacroNonCoop, Event::SmallNonCoop],
            AssociationModel::Cooperative => [Event::MacroCoop, Event::ClusterCoop],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tier {
    Macro,
    Small,
}

/// Association event: which model, and which tier serves the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Event {
    /// `A_m`
    MacroNonCoop,
    /// `A_s`
    SmallNonCoop,
    /// `B_m`
    MacroCoop,
    /// `B_s`
    ClusterCoop,
}

impl Event {
    pub const ALL: [Event; 4] = [Event::MacroNonCoop, Event::SmallNonCoop, Event::MacroCoop, Event::ClusterCoop];

    pub fn id(self) -> &'static str {
        match self {
            Event::MacroNonCoop => "A_m",
            Event::SmallNonCoop => "A_s",
            Event::MacroCoop => "B_m",
            Event::ClusterCoop => "B_s",
        }
    }

    pub fn model(self) -> AssociationModel {
        match self {
            Event::MacroNonCoop | Event::SmallNonCoop => AssociationModel::NonCooperative,
            Event::MacroCoop | Event::ClusterCoop => AssociationModel::Cooperative,
        }
    }

    pub fn tier(self) -> Tier {
        match self {
            Event::MacroNonCoop | Event::MacroCoop => Tier::Macro,
            Event::SmallNonCoop | Event::ClusterCoop => Tier::Small,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Conditional coverage per serving tier plus the association-weighted mix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageReport {
    pub theta: f64,
    pub p_assoc_sbs: f64,
    pub p_cov_mbs: f64,
    pub p_cov_sbs: f64,
    pub p_cov_overall: f64,
}

impl CoverageReport {
    pub fn new(theta: f64, p_assoc_sbs: f64, p_cov_mbs: f64, p_cov_sbs: f64) -> Self {
        let p_cov_overall = (1.0 - p_assoc_sbs) * p_cov_mbs + p_assoc_sbs * p_cov_sbs;
        Self { theta, p_assoc_sbs, p_cov_mbs, p_cov_sbs, p_cov_overall }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSettings {
    pub one_dim: QuadratureSettings,
    pub two_dim: QuadratureSettings,
    /// Initial number of log-spaced θ nodes for coverage curves.
    pub rate_grid_points: usize,
    /// Stop refining a curve once the rate moves by less than this (bit/s/Hz).
    pub rate_refine_tol: f64,
    /// Monte Carlo settings used where no deterministic path exists (k > 2).
    pub fallback: SimSettings,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        Self {
            one_dim: QuadratureSettings::one_dim(),
            two_dim: QuadratureSettings::two_dim(),
            rate_grid_points: 200,
            rate_refine_tol: 1e-3,
            fallback: SimSettings { n_reps: 20_000, ..SimSettings::default() },
        }
    }
}

/// `1 / (1 + (λ_m/λ_s)(P_m/P_s)^{2/α})`.
pub fn assoc_prob_sbs_noncoop(s: &ValidatedScenario) -> f64 {
    1.0 / (1.0 + s.macro_tier.density / s.small_tier.density / s.power_ratio_pow())
}

/// `P(Σ_{j≤k} P_s r_{s,j}^{-α} > P_m r_m^{-α})` as the ordered-domain integral
/// of `e^{-πλ_m η^{2/α}} f_Γ(r)`; `k ∈ {1, 2}` only.
pub(crate) fn assoc_prob_sbs_coop_quadrature(
    s: &ValidatedScenario,
    q1: &QuadratureSettings,
    q2: &QuadratureSettings,
) -> Result<f64, GeometryError> {
    let lam_m = s.macro_tier.density;
    let inv_alpha = 1.0 / s.alpha;
    let p = geometry::integrate_cluster(
        s.k,
        s.small_tier.density,
        s.small_tier.density,
        |r| geometry::void_probability(lam_m, geometry::eta(s, r).powf(inv_alpha)),
        q1,
        q2,
    )?;
    Ok(p.clamp(0.0, 1.0))
}

/// Cluster association probability. Quadrature for `k ≤ 2`; a flagged Monte
/// Carlo estimate otherwise.
pub fn assoc_prob_sbs_coop(s: &ValidatedScenario, settings: &AnalyticSettings) -> Result<Computed, AnalyticError> {
    if s.k <= 2 {
        Ok(Computed::Quadrature(assoc_prob_sbs_coop_quadrature(s, &settings.one_dim, &settings.two_dim)?))
    } else {
        let est = montecarlo::estimate(McMetric::AssocSbs, s, AssociationModel::Cooperative, &settings.fallback);
        Ok(Computed::MonteCarlo(est))
    }
}

pub fn assoc_prob_sbs(
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &AnalyticSettings,
) -> Result<f64, AnalyticError> {
    match model {
        AssociationModel::NonCooperative => Ok(assoc_prob_sbs_noncoop(s)),
        AssociationModel::Cooperative => Ok(assoc_prob_sbs_coop(s, settings)?.value()),
    }
}

/// `F(y, α) = ∫_y^∞ μ/(1+μ^α) dμ`; closed form `½ tan⁻¹(y⁻²)` at α = 4.
pub fn f_integral(y: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        return 0.5 * (1.0 / (y * y)).atan();
    }
    if y.is_infinite() {
        return 0.0;
    }
    let q = QuadratureSettings { rel_tol: 1e-10, ..QuadratureSettings::one_dim() };
    let scale = y.max(1.0);
    match quadrature::integrate_semi_infinite(|m| m / (1.0 + m.powf(alpha)), y, TailMap::Rational { scale }, &q) {
        Ok(est) => est.value,
        // The integrand is smooth and monotone; a miss still carries a usable value.
        Err(e) => e.best_estimate().unwrap_or(f64::NAN),
    }
}

/// `ρ(θ) = 2 θ^{2/α} F(θ^{-1/α}, α)`: the interference exponent per unit of
/// `π λ r²` once the serving link's exclusion radius has been factored out.
fn interference_exponent(theta: f64, alpha: f64) -> f64 {
    2.0 * theta.powf(2.0 / alpha) * f_integral(theta.powf(-1.0 / alpha), alpha)
}

/// Laplace transform of the two-tier interference at `lap_s`, with tier `i`'s
/// interferers restricted to outside radius `d_i`:
///
/// `L_I(s) = ∏_i exp(-2πλ_i (sP_i)^{2/α} F((sP_i)^{-1/α} d_i, α))`.
pub fn interference_laplace(s: &ValidatedScenario, lap_s: f64, d_m: f64, d_s: f64) -> f64 {
    if lap_s == 0.0 {
        return 1.0;
    }
    let alpha = s.alpha;
    let tier = |lambda: f64, power: f64, d: f64| {
        let sp = lap_s * power;
        -2.0 * PI * lambda * sp.powf(2.0 / alpha) * f_integral(sp.powf(-1.0 / alpha) * d, alpha)
    };
    (tier(s.macro_tier.density, s.macro_tier.tx_power, d_m) + tier(s.small_tier.density, s.small_tier.tx_power, d_s))
        .exp()
}

/// Coverage of a user whose single serving BS has power `p_serv` at distance
/// `r`, given interferer exclusion radii.
#[inline]
fn single_link_coverage(s: &ValidatedScenario, theta: f64, p_serv: f64, r: f64, d_m: f64, d_s: f64) -> f64 {
    let lap = theta * r.powf(s.alpha) / p_serv;
    (-lap * s.sigma2).exp() * interference_laplace(s, lap, d_m, d_s)
}

/// `P_n(A_m)`: exclusion radii `d_m = r`, `d_s = ω^{-2/α} r`.
pub fn coverage_mbs_noncoop(s: &ValidatedScenario, theta: f64, settings: &AnalyticSettings) -> Result<f64, AnalyticError> {
    let shrink = s.omega_squared().powf(-1.0 / s.alpha);
    let decay = geometry::macro_event_decay(s) * (1.0 + interference_exponent(theta, s.alpha));
    let p_m = s.macro_tier.tx_power;
    let est = quadrature::integrate_semi_infinite(
        |r| {
            let pdf = geometry::cond_pdf_mbs_noncoop(s, r);
            if pdf == 0.0 {
                return 0.0;
            }
            single_link_coverage(s, theta, p_m, r, r, shrink * r) * pdf
        },
        0.0,
        TailMap::Gaussian { lambda: decay },
        &settings.one_dim,
    )?;
    Ok(est.value.clamp(0.0, 1.0))
}

/// `P_n(A_s)`: exclusion radii `d_m = ω^{2/α} r`, `d_s = r`.
pub fn coverage_sbs_noncoop(s: &ValidatedScenario, theta: f64, settings: &AnalyticSettings) -> Result<f64, AnalyticError> {
    let grow = s.omega_squared().powf(1.0 / s.alpha);
    let decay = geometry::small_event_decay(s) * (1.0 + interference_exponent(theta, s.alpha));
    let p_s = s.small_tier.tx_power;
    let est = quadrature::integrate_semi_infinite(
        |r| {
            let pdf = geometry::cond_pdf_sbs_noncoop(s, r);
            if pdf == 0.0 {
                return 0.0;
            }
            single_link_coverage(s, theta, p_s, r, grow * r, r) * pdf
        },
        0.0,
        TailMap::Gaussian { lambda: decay },
        &settings.one_dim,
    )?;
    Ok(est.value.clamp(0.0, 1.0))
}

pub fn coverage_overall_noncoop(
    s: &ValidatedScenario,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<CoverageReport, AnalyticError> {
    Ok(CoverageReport::new(
        theta,
        assoc_prob_sbs_noncoop(s),
        coverage_mbs_noncoop(s, theta, settings)?,
        coverage_sbs_noncoop(s, theta, settings)?,
    ))
}

/// `P_n(B_m)`: the `A_m` integrand with `f_Rcm` in place of `f_Rm`, keeping the
/// small-tier exclusion radius at `ω^{-2/α} r` (an approximation: the true
/// constraint on the cluster is stronger than on its nearest member).
pub fn coverage_mbs_coop(s: &ValidatedScenario, theta: f64, settings: &AnalyticSettings) -> Result<f64, AnalyticError> {
    let cond = CoopConditioning::new(s, &settings.one_dim, &settings.two_dim)?;
    coverage_mbs_coop_with(s, &cond, theta, settings)
}

fn coverage_mbs_coop_with(
    s: &ValidatedScenario,
    cond: &CoopConditioning,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<f64, AnalyticError> {
    let shrink = s.omega_squared().powf(-1.0 / s.alpha);
    let decay = geometry::macro_event_decay(s) * (1.0 + interference_exponent(theta, s.alpha));
    let p_m = s.macro_tier.tx_power;
    let failure = std::cell::RefCell::new(None);
    let est = quadrature::integrate_semi_infinite(
        |r| match cond.mbs_pdf(r) {
            Ok(0.0) => 0.0,
            Ok(pdf) => single_link_coverage(s, theta, p_m, r, r, shrink * r) * pdf,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        TailMap::Gaussian { lambda: decay },
        &settings.one_dim,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(est?.value.clamp(0.0, 1.0))
}

/// `P_n(B_s)`: ordered-domain integral with signal power `Σ P_s r_j^{-α}`,
/// `d_m = η^{1/α}` and `d_s = r_{s,k}`. Falls back to Monte Carlo for `k > 2`.
pub fn coverage_sbs_coop(s: &ValidatedScenario, theta: f64, settings: &AnalyticSettings) -> Result<Computed, AnalyticError> {
    if s.k > 2 {
        let est = montecarlo::estimate(
            McMetric::Coverage { theta, tier: Tier::Small },
            s,
            AssociationModel::Cooperative,
            &settings.fallback,
        );
        return Ok(Computed::MonteCarlo(est));
    }
    let cond = CoopConditioning::new(s, &settings.one_dim, &settings.two_dim)?;
    Ok(Computed::Quadrature(coverage_sbs_coop_with(s, &cond, theta, settings)?))
}

fn coverage_sbs_coop_with(
    s: &ValidatedScenario,
    cond: &CoopConditioning,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<f64, AnalyticError> {
    match s.k {
        2 => coverage_pair_scaled(s, cond.p_sbs_co(), theta, settings),
        _ => coverage_sbs_coop_direct(s, cond.p_sbs_co(), theta, settings),
    }
}

/// `P_n(B_s)` straight from the ordered-domain integral over `(r₁, …, r_k)`.
fn coverage_sbs_coop_direct(
    s: &ValidatedScenario,
    p_sbs_co: f64,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<f64, AnalyticError> {
    let alpha = s.alpha;
    let p_s = s.small_tier.tx_power;
    let inv_alpha = 1.0 / alpha;
    let rho = interference_exponent(theta, alpha);
    let lam_s = s.small_tier.density;
    // η^{2/α} ≥ ω^{4/α} r₁² 2^{-2/α}, and the MBS side contributes λ_m η^{2/α}(1 + ρ).
    let shrink = 2f64.powf(-2.0 / alpha);
    let decay = lam_s + s.macro_tier.density * s.omega_squared().powf(2.0 / alpha) * shrink * (1.0 + rho);
    let value = geometry::integrate_cluster(
        s.k,
        lam_s,
        decay,
        |r| {
            let signal: f64 = r.iter().map(|&x| p_s * x.powf(-alpha)).sum();
            let lap = theta / signal;
            let d_m = geometry::eta(s, r).powf(inv_alpha);
            let d_s = r[r.len() - 1];
            let cov = (-lap * s.sigma2).exp() * interference_laplace(s, lap, d_m, d_s);
            cov * geometry::void_probability(s.macro_tier.density, d_m)
        },
        &settings.one_dim,
        &settings.two_dim,
    )?;
    Ok((value / p_sbs_co).clamp(0.0, 1.0))
}

/// `P_n(B_s)` for a two-member cluster in the coordinates `r₁ = t r₂`.
///
/// With `c(t) = t² (1 + t^α)^{-2/α}` every exponent of the integrand is
/// `-π r₂² A(t)`, where
///
/// `A(t) = λ_s + λ_m ω^{4/α} c (1 + ρ) + 2 λ_s θ^{2/α} c F(θ^{-1/α} (1 + t^α)^{1/α} / t, α)`,
///
/// so the `r₂` integral is `∫ r₂³ e^{-π A r₂²} dr₂ = 1/(2π² A²)` when σ² = 0,
/// leaving a 1-D integral over `t ∈ (0, 1)`. With noise the `r₂` integral is
/// done numerically.
fn coverage_pair_scaled(
    s: &ValidatedScenario,
    p_sbs_co: f64,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<f64, AnalyticError> {
    let alpha = s.alpha;
    let lam_s = s.small_tier.density;
    let macro_weight = s.macro_tier.density * s.omega_squared().powf(2.0 / alpha) * (1.0 + interference_exponent(theta, alpha));
    let theta_pow = theta.powf(2.0 / alpha);
    let theta_root = theta.powf(-1.0 / alpha);
    let noise = theta * s.sigma2 / s.small_tier.tx_power;
    let failure = std::cell::RefCell::new(None);
    let est = quadrature::integrate(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            let spread = 1.0 + t.powf(alpha);
            let c = t * t * spread.powf(-2.0 / alpha);
            let y = theta_root * spread.powf(1.0 / alpha) / t;
            let a = lam_s + macro_weight * c + 2.0 * lam_s * theta_pow * c * f_integral(y, alpha);
            let radial = if noise == 0.0 {
                1.0 / (2.0 * PI * PI * a * a)
            } else {
                // e^{-lap σ²} with lap = θ r₂^α t^α / (P_s (1 + t^α)).
                let b = noise * t.powf(alpha) / spread;
                match quadrature::integrate_semi_infinite(
                    |r| r * r * r * (-PI * a * r * r - b * r.powf(alpha)).exp(),
                    0.0,
                    TailMap::Gaussian { lambda: a },
                    &settings.one_dim,
                ) {
                    Ok(e) => e.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            };
            (2.0 * PI * lam_s).powi(2) * t * radial
        },
        0.0,
        1.0,
        &settings.one_dim,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok((est?.value / p_sbs_co).clamp(0.0, 1.0))
}

pub fn coverage_overall_coop(
    s: &ValidatedScenario,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<CoverageReport, AnalyticError> {
    let cond = CoopConditioning::new(s, &settings.one_dim, &settings.two_dim)?;
    Ok(CoverageReport::new(
        theta,
        cond.p_sbs_co(),
        coverage_mbs_coop_with(s, &cond, theta, settings)?,
        coverage_sbs_coop_with(s, &cond, theta, settings)?,
    ))
}

pub fn coverage_overall(
    s: &ValidatedScenario,
    model: AssociationModel,
    theta: f64,
    settings: &AnalyticSettings,
) -> Result<CoverageReport, AnalyticError> {
    match model {
        AssociationModel::NonCooperative => coverage_overall_noncoop(s, theta, settings),
        AssociationModel::Cooperative => coverage_overall_coop(s, theta, settings),
    }
}

/// Coverage evaluator for one event, holding whatever the event needs
/// precomputed (cluster association probability for the cooperative events).
pub struct EventCoverage {
    scenario: ValidatedScenario,
    event: Event,
    settings: AnalyticSettings,
    cond: Option<CoopConditioning>,
}

impl EventCoverage {
    pub fn new(s: &ValidatedScenario, event: Event, settings: &AnalyticSettings) -> Result<Self, AnalyticError> {
        let cond = match event.model() {
            AssociationModel::Cooperative => Some(CoopConditioning::new(s, &settings.one_dim, &settings.two_dim)?),
            AssociationModel::NonCooperative => None,
        };
        Ok(Self { scenario: *s, event, settings: *settings, cond })
    }

    pub fn event(&self) -> Event {
        self.event
    }

    pub fn at(&self, theta: f64) -> Result<f64, AnalyticError> {
        let s = &self.scenario;
        let st = &self.settings;
        match (self.event, &self.cond) {
            (Event::MacroNonCoop, _) => coverage_mbs_noncoop(s, theta, st),
            (Event::SmallNonCoop, _) => coverage_sbs_noncoop(s, theta, st),
            (Event::MacroCoop, Some(c)) => coverage_mbs_coop_with(s, c, theta, st),
            (Event::ClusterCoop, Some(c)) => coverage_sbs_coop_with(s, c, theta, st),
            _ => unreachable!("cooperative events always carry conditioning"),
        }
    }
}

/// A coverage function tabulated on a log-spaced θ grid and interpolated with
/// a monotone (Fritsch–Carlson) cubic in `ln θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    log_theta: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// Lowest tabulated threshold (−60 dB); below it coverage is taken as linear
/// between 1 and the first node.
const CURVE_THETA_MIN: f64 = 1e-6;
/// Upper search limit for the truncation point (150 dB).
const CURVE_THETA_CAP: f64 = 1e15;

impl CoverageCurve {
    /// Tabulates `cov` on `n` log-spaced nodes spanning `[θ_lo, θ_hi]`.
    pub fn from_fn<F, E>(cov: F, theta_lo: f64, theta_hi: f64, n: usize) -> Result<Self, E>
    where
        F: Fn(f64) -> Result<f64, E> + Sync,
        E: Send,
    {
        let n = n.max(2);
        let (a, b) = (theta_lo.ln(), theta_hi.ln());
        let log_theta: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let values = log_theta.par_iter().map(|&u| cov(u.exp())).collect::<Result<Vec<_>, E>>()?;
        Ok(Self::from_nodes(log_theta, values))
    }

    fn from_nodes(log_theta: Vec<f64>, values: Vec<f64>) -> Self {
        let slopes = pchip_slopes(&log_theta, &values);
        Self { log_theta, values, slopes }
    }

    /// Doubles the node density, evaluating `cov` only at the new midpoints.
    fn refined<F, E>(&self, cov: F) -> Result<Self, E>
    where
        F: Fn(f64) -> Result<f64, E> + Sync,
        E: Send,
    {
        let mids: Vec<f64> = self.log_theta.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mid_values = mids.par_iter().map(|&u| cov(u.exp())).collect::<Result<Vec<_>, E>>()?;
        let mut log_theta = Vec::with_capacity(self.log_theta.len() + mids.len());
        let mut values = Vec::with_capacity(log_theta.capacity());
        for i in 0..self.log_theta.len() {
            log_theta.push(self.log_theta[i]);
            values.push(self.values[i]);
            if i < mids.len() {
                log_theta.push(mids[i]);
                values.push(mid_values[i]);
            }
        }
        Ok(Self::from_nodes(log_theta, values))
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_theta.iter().map(|u| u.exp())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn theta_max(&self) -> f64 {
        self.log_theta[self.log_theta.len() - 1].exp()
    }

    /// Interpolated coverage at `theta`, clamped to the tabulated range.
    pub fn eval(&self, theta: f64) -> f64 {
        let u = theta.ln();
        let n = self.log_theta.len();
        if u <= self.log_theta[0] {
            return self.values[0];
        }
        if u >= self.log_theta[n - 1] {
            return self.values[n - 1];
        }
        let i = self.log_theta.partition_point(|&x| x <= u) - 1;
        self.hermite(i, u)
    }

    fn hermite(&self, i: usize, u: f64) -> f64 {
        let h = self.log_theta[i + 1] - self.log_theta[i];
        let t = (u - self.log_theta[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * h * self.slopes[i] + h01 * self.values[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// `(1/ln2) ∫₀^∞ P(θ)/(1+θ) dθ` over the interpolant.
    ///
    /// Below the first node the coverage is averaged between 1 and the first
    /// value; beyond the last node a power-law tail fitted to the last segment
    /// is added in closed form.
    pub fn rate(&self) -> f64 {
        // 8-point Gauss–Legendre on each segment in u = ln θ.
        const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329_0, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
        const W: [f64; 4] = [0.362_683_783_378_362_0, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
        let n = self.log_theta.len();
        let theta0 = self.log_theta[0].exp();
        let mut total = 0.5 * (1.0 + self.values[0]) * theta0.ln_1p();
        for i in 0..n - 1 {
            let (a, b) = (self.log_theta[i], self.log_theta[i + 1]);
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            let mut seg = 0.0;
            for (x, w) in X.iter().zip(W) {
                for u in [c - h * x, c + h * x] {
                    let e = u.exp();
                    seg += w * self.hermite(i, u) * e / (1.0 + e);
                }
            }
            total += seg * h;
        }
        total += self.tail();
        total / LN_2
    }

    fn tail(&self) -> f64 {
        let n = self.log_theta.len();
        let (p1, p0) = (self.values[n - 1], self.values[n - 2]);
        if p1 <= 0.0 || p0 <= 0.0 {
            return 0.0;
        }
        let beta = -(p1.ln() - p0.ln()) / (self.log_theta[n - 1] - self.log_theta[n - 2]);
        if beta <= 0.0 {
            return 0.0;
        }
        // ∫_{θ_n}^∞ p1 (θ/θ_n)^{-β} θ^{-1} dθ, with 1/(1+θ) ≈ 1/θ out here.
        p1 / beta
    }
}

/// Fritsch–Carlson monotone slopes.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m
}

/// Builds a coverage curve whose upper end is where `P(θ)/(1+θ)` falls below
/// `truncation_epsilon` times its peak, then doubles the node density until
/// the rate moves by less than `rate_refine_tol`.
pub fn coverage_curve<F, E>(cov: F, settings: &AnalyticSettings) -> Result<CoverageCurve, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: Send,
{
    let eps = settings.one_dim.truncation_epsilon;
    let peak = cov(CURVE_THETA_MIN)? / (1.0 + CURVE_THETA_MIN);
    let mut theta_hi = 1e3;
    while theta_hi < CURVE_THETA_CAP {
        let v = cov(theta_hi)?;
        if v / (1.0 + theta_hi) < eps * peak {
            break;
        }
        theta_hi *= 10.0;
    }
    let mut curve = CoverageCurve::from_fn(&cov, CURVE_THETA_MIN, theta_hi, settings.rate_grid_points)?;
    let mut rate = curve.rate();
    loop {
        let finer = curve.refined(&cov)?;
        let finer_rate = finer.rate();
        let done = (finer_rate - rate).abs() < settings.rate_refine_tol || finer.log_theta.len() > 6400;
        curve = finer;
        rate = finer_rate;
        if done {
            return Ok(curve);
        }
    }
}

/// `(1/ln2) ∫₀^∞ P_n(θ)/(1+θ) dθ` for a cheap coverage function, by direct
/// adaptive quadrature.
pub fn mean_rate<F: Fn(f64) -> f64>(cov: F, q: &QuadratureSettings) -> Result<f64, AnalyticError> {
    let est = quadrature::integrate_semi_infinite(|t| cov(t) / (1.0 + t), 0.0, TailMap::Rational { scale: 1.0 }, q)?;
    Ok(est.value.max(0.0) / LN_2)
}

/// Per-event rates and their association-weighted mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub p_assoc_sbs: f64,
    pub tau_mbs: f64,
    pub tau_sbs: f64,
    pub tau: f64,
}

/// Rate for one event via its tabulated coverage curve.
pub fn event_rate(s: &ValidatedScenario, event: Event, settings: &AnalyticSettings) -> Result<f64, AnalyticError> {
    let ev = EventCoverage::new(s, event, settings)?;
    Ok(coverage_curve(|t| ev.at(t), settings)?.rate())
}

/// `τ = (1 − P_sbs) τ_mbs + P_sbs τ_sbs` for the chosen model.
pub fn mean_rate_mixture(
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &AnalyticSettings,
) -> Result<RateReport, AnalyticError> {
    let [mbs, sbs] = model.events();
    let p = assoc_prob_sbs(s, model, settings)?;
    let tau_mbs = event_rate(s, mbs, settings)?;
    let tau_sbs = event_rate(s, sbs, settings)?;
    Ok(RateReport { p_assoc_sbs: p, tau_mbs, tau_sbs, tau: (1.0 - p) * tau_mbs + p * tau_sbs })
}

/// Power drawn in one macro Voronoi cell, split by tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBreakdown {
    pub mbs: f64,
    pub sbs: f64,
    pub total: f64,
}

/// Load-dependent power of the cell given the SBS association probability.
///
/// MBS: `P_ms + n P_max (1 − p)/N`. SBS: `n p P_s` (non-cooperative) or
/// `k n p (P_s + P_bkh)` (cooperative).
pub fn power_breakdown(s: &ValidatedScenario, model: AssociationModel, p_assoc_sbs: f64) -> PowerBreakdown {
    let pm = &s.power_model;
    let load = if pm.n_max > 0.0 { pm.n_users * (1.0 - p_assoc_sbs) / pm.n_max } else { 0.0 };
    let mbs = pm.p_static + pm.p_max * load;
    let sbs = match model {
        AssociationModel::NonCooperative => pm.n_users * p_assoc_sbs * s.small_tier.tx_power,
        AssociationModel::Cooperative => {
            s.k as f64 * pm.n_users * p_assoc_sbs * (s.small_tier.tx_power + pm.p_backhaul)
        }
    };
    PowerBreakdown { mbs, sbs, total: mbs + sbs }
}

pub fn power_total(s: &ValidatedScenario, model: AssociationModel, settings: &AnalyticSettings) -> Result<f64, AnalyticError> {
    let p = assoc_prob_sbs(s, model, settings)?;
    Ok(power_breakdown(s, model, p).total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiency {
    /// `R = n τ B` (bit/s).
    pub throughput: f64,
    /// Total cell power (W).
    pub power: f64,
    /// `R / P` (bit/J).
    pub ee: f64,
}

/// Throughput and energy efficiency from a rate and a total power.
pub fn efficiency(s: &ValidatedScenario, tau: f64, power: f64) -> Result<Efficiency, AnalyticError> {
    if power <= 0.0 {
        return Err(AnalyticError::DegeneratePower);
    }
    let throughput = s.power_model.n_users * tau * s.bandwidth;
    Ok(Efficiency { throughput, power, ee: throughput / power })
}

pub fn throughput_and_ee(
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &AnalyticSettings,
) -> Result<Efficiency, AnalyticError> {
    let rate = mean_rate_mixture(s, model, settings)?;
    let power = power_breakdown(s, model, rate.p_assoc_sbs).total;
    efficiency(s, rate.tau, power)
}

/// Interference-limited (α = 4, σ² = 0) overall non-cooperative coverage in
/// closed form: `1 / (1 + √θ tan⁻¹√θ)`.
pub fn coverage_closed_form_alpha4(theta: f64) -> f64 {
    let r = theta.sqrt();
    1.0 / (1.0 + r * r.atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{db_to_linear, ScenarioConfig};
    use approx::assert_relative_eq;

    fn fig2() -> ValidatedScenario {
        ScenarioConfig::default().resolve().unwrap()
    }

    fn st() -> AnalyticSettings {
        AnalyticSettings::default()
    }

    fn db_grid() -> impl Iterator<Item = f64> {
        (-10..=20).step_by(2).map(|db| db_to_linear(db as f64))
    }

    #[test]
    fn symmetric_tiers_split_evenly() {
        let s = fig2().with(|raw| raw.small_tier = raw.macro_tier).unwrap();
        assert_relative_eq!(assoc_prob_sbs_noncoop(&s), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn fig2_association_probability() {
        // 1 / (1 + (1/50)·√50)
        let expect = 1.0 / (1.0 + 50f64.sqrt() / 50.0);
        assert_relative_eq!(assoc_prob_sbs_noncoop(&fig2()), expect, max_relative = 1e-14);
        assert!((expect - 0.8761).abs() < 1e-4);
    }

    #[test]
    fn dense_small_tier_takes_everyone() {
        let s = fig2().with(|raw| raw.small_tier.density = raw.macro_tier.density * 1e6).unwrap();
        assert!((assoc_prob_sbs_noncoop(&s) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn coop_association_k1_is_closed_form() {
        let s = fig2().with(|raw| raw.k = 1).unwrap();
        let co = assoc_prob_sbs_coop(&s, &st()).unwrap().value();
        assert!((co - assoc_prob_sbs_noncoop(&s)).abs() < 1e-6);
    }

    #[test]
    fn cluster_offloads_more_than_single_cell() {
        for alpha in [3.0, 4.0] {
            let s2 = fig2().with(|raw| raw.alpha = alpha).unwrap();
            let s1 = s2.with(|raw| raw.k = 1).unwrap();
            let p2 = assoc_prob_sbs_coop(&s2, &st()).unwrap().value();
            let p1 = assoc_prob_sbs_coop(&s1, &st()).unwrap().value();
            assert!(p2 >= p1, "alpha={alpha}: {p2} < {p1}");
        }
    }

    #[test]
    fn f_integral_closed_forms() {
        assert_relative_eq!(f_integral(0.0, 4.0), PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(f_integral(1.0, 4.0), PI / 8.0, max_relative = 1e-15);
    }

    #[test]
    fn f_integral_alpha4_closed_form_matches_quadrature() {
        for y in [0.0, 0.3, 1.0, 2.5] {
            let q = quadrature::integrate_semi_infinite(
                |m| m / (1.0 + m.powi(4)),
                y,
                TailMap::Rational { scale: 1.0 },
                &QuadratureSettings::one_dim(),
            )
            .unwrap();
            assert_relative_eq!(f_integral(y, 4.0), q.value, max_relative = 1e-8);
        }
    }

    #[test]
    fn f_integral_alpha3_matches_riemann_sum() {
        // Oracle: μ = y + v/(1−v) on v ∈ (0,1), 10⁷-point midpoint sum.
        for y in [0.2, 1.0, 3.0] {
            let n = 10_000_000usize;
            let h = 1.0 / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let v = (i as f64 + 0.5) * h;
                let m = y + v / (1.0 - v);
                sum += m / (1.0 + m * m * m) / ((1.0 - v) * (1.0 - v));
            }
            let oracle = sum * h;
            assert!((f_integral(y, 3.0) - oracle).abs() < 1e-6, "y={y}: {} vs {oracle}", f_integral(y, 3.0));
        }
    }

    #[test]
    fn laplace_at_zero_is_one_and_decreasing() {
        let s = fig2();
        assert_eq!(interference_laplace(&s, 0.0, 100.0, 50.0), 1.0);
        let mut prev = 1.0;
        for i in 1..20 {
            let v = interference_laplace(&s, 1e4 * 1.6f64.powi(i), 100.0, 50.0);
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn interference_limited_tiers_have_equal_coverage() {
        let s = fig2();
        for theta in db_grid() {
            let m = coverage_mbs_noncoop(&s, theta, &st()).unwrap();
            let sb = coverage_sbs_noncoop(&s, theta, &st()).unwrap();
            assert!((m - sb).abs() < 1e-6, "theta={theta}: {m} vs {sb}");
        }
    }

    #[test]
    fn overall_noncoop_matches_closed_form_at_unit_threshold() {
        let r = coverage_overall_noncoop(&fig2(), 1.0, &st()).unwrap();
        assert!((r.p_cov_overall - 1.0 / (1.0 + 1f64.atan())).abs() < 1e-6);
        assert!((r.p_cov_overall - 0.5601).abs() < 1e-4);
    }

    #[test]
    fn coverage_limits() {
        let s = fig2();
        assert!(coverage_mbs_noncoop(&s, db_to_linear(60.0), &st()).unwrap() < 0.01);
        assert!(coverage_sbs_noncoop(&s, db_to_linear(60.0), &st()).unwrap() < 0.01);
        assert!(coverage_overall_noncoop(&s, db_to_linear(-40.0), &st()).unwrap().p_cov_overall > 0.99);
    }

    #[test]
    fn noise_lowers_coverage() {
        let s = fig2();
        let noisy = s.with(|raw| raw.sigma2 = 1e-12).unwrap();
        let a = coverage_mbs_noncoop(&s, 1.0, &st()).unwrap();
        let b = coverage_mbs_noncoop(&noisy, 1.0, &st()).unwrap();
        assert!(b < a);
    }

    #[test]
    fn report_mixture_identity() {
        let r = CoverageReport::new(1.0, 0.3, 0.6, 0.8);
        assert_eq!(r.p_cov_overall, 0.7 * 0.6 + 0.3 * 0.8);
    }

    #[test]
    fn cluster_coverage_beats_single_cell() {
        let s2 = fig2();
        let s1 = s2.with(|raw| raw.k = 1).unwrap();
        for theta in db_grid() {
            let c2 = coverage_sbs_coop(&s2, theta, &st()).unwrap().value();
            let c1 = coverage_sbs_coop(&s1, theta, &st()).unwrap().value();
            assert!(c2 > c1, "theta={theta}: {c2} <= {c1}");
        }
    }

    #[test]
    fn scaled_pair_coverage_matches_direct_double_integral() {
        let st = st();
        for s in [fig2(), fig2().with(|raw| raw.alpha = 3.0).unwrap(), fig2().with(|raw| raw.sigma2 = 1e-11).unwrap()] {
            let p = assoc_prob_sbs_coop(&s, &st).unwrap().value();
            for theta in [0.1, 1.0, 10.0] {
                let fast = coverage_pair_scaled(&s, p, theta, &st).unwrap();
                let direct = coverage_sbs_coop_direct(&s, p, theta, &st).unwrap();
                assert!((fast - direct).abs() < 1e-5, "alpha={} theta={theta}: {fast} vs {direct}", s.alpha);
            }
        }
    }

    #[test]
    fn coop_macro_coverage_is_non_increasing() {
        let s = fig2();
        let cond = CoopConditioning::new(&s, &st().one_dim, &st().two_dim).unwrap();
        let mut prev = 1.0;
        for theta in db_grid() {
            let v = coverage_mbs_coop_with(&s, &cond, theta, &st()).unwrap();
            assert!(v <= prev + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn rate_of_zero_and_step_coverage() {
        let q = QuadratureSettings::one_dim();
        assert_eq!(mean_rate(|_| 0.0, &q).unwrap(), 0.0);
        let step = mean_rate(|t| if t < 1.0 { 1.0 } else { 0.0 }, &q).unwrap();
        assert!((step - 1.0).abs() < 1e-7, "{step}");
    }

    #[test]
    fn curve_rate_matches_direct_quadrature() {
        let direct = mean_rate(coverage_closed_form_alpha4, &QuadratureSettings::one_dim()).unwrap();
        let curve = coverage_curve(|t| Ok::<_, ()>(coverage_closed_form_alpha4(t)), &st()).unwrap();
        assert!((curve.rate() - direct).abs() < 1e-4, "{} vs {direct}", curve.rate());
        // Interpolant reproduces the nodes and is monotone between them.
        let mut prev = 1.0;
        for i in 0..2000 {
            let theta = 10f64.powf(-6.0 + i as f64 * 0.007);
            let v = curve.eval(theta);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn power_model_edge_cases() {
        let s = fig2().with(|raw| raw.power_model.n_users = 0.0).unwrap();
        for model in [AssociationModel::NonCooperative, AssociationModel::Cooperative] {
            assert_eq!(power_breakdown(&s, model, 0.7).total, s.power_model.p_static);
        }
        let s = fig2();
        let pm = s.power_model;
        let all_macro = power_breakdown(&s, AssociationModel::NonCooperative, 0.0).total;
        assert_relative_eq!(all_macro, pm.p_static + pm.n_users * pm.p_max / pm.n_max, max_relative = 1e-15);
        let s1 = s.with(|raw| {
            raw.k = 1;
            raw.power_model.p_backhaul = 0.0;
        })
        .unwrap();
        let a = power_breakdown(&s1, AssociationModel::NonCooperative, 0.4).total;
        let b = power_breakdown(&s1, AssociationModel::Cooperative, 0.4).total;
        assert_eq!(a, b);
    }

    #[test]
    fn throughput_arithmetic_and_degenerate_power() {
        let s = fig2().with(|raw| {
            raw.power_model.n_users = 10.0;
            raw.bandwidth = 20e6;
        })
        .unwrap();
        let e = efficiency(&s, 1.0, 10.0).unwrap();
        assert_eq!(e.throughput, 2e8);
        assert_eq!(e.ee, 2e7);
        let e2 = efficiency(&s, 1.0, 20.0).unwrap();
        assert_relative_eq!(e2.ee, e.ee / 2.0);
        assert_eq!(efficiency(&s, 1.0, 0.0), Err(AnalyticError::DegeneratePower));
    }
}
