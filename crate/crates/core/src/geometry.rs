//! Distance distributions of the typical user's serving BS or BS cluster.
//!
//! All densities are per metre. The typical user sits at the origin; `r_m` is
//! the distance to the nearest MBS and `r_{s,1} ≤ … ≤ r_{s,k}` are the distances
//! to the `k` nearest SBSs.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

use crate::analytic;
use crate::model::ValidatedScenario;
use crate::montecarlo::{self, Computed};
use crate::quadrature::{self, QuadratureError, QuadratureSettings, TailMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("distances must be positive and finite, got {0:?}")]
    NonPositive(Vec<f64>),
    #[error("distances must be sorted nearest-first, got {0:?}")]
    Unordered(Vec<f64>),
    #[error("distance vector has {got} entries but the cluster size is {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("closed-form g(r) needs k=2 and alpha=4 (got k={k}, alpha={alpha}); use g_generic")]
    UnsupportedSpecialCase { k: usize, alpha: f64 },
    #[error("analytic cooperative path supports k in {{1, 2}}, got k={0}; use the Monte Carlo estimator")]
    UnsupportedClusterSize(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Distances of the `k` nearest small cells, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector(Vec<f64>);

impl DistanceVector {
    /// Rejects non-positive or out-of-order input; never reorders.
    pub fn new(r: Vec<f64>) -> Result<Self, GeometryError> {
        if r.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(GeometryError::NonPositive(r));
        }
        if r.windows(2).any(|w| w[1] < w[0]) {
            return Err(GeometryError::Unordered(r));
        }
        Ok(Self(r))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distance of the farthest cluster member, `r_{s,k}`.
    pub fn farthest(&self) -> f64 {
        *self.0.last().expect("distance vector is non-empty")
    }
}

/// `e^{-πλr²}`: probability that a disk of radius `r` holds no point.
#[inline]
pub fn void_probability(lambda: f64, r: f64) -> f64 {
    (-PI * lambda * r * r).exp()
}

/// Nearest-neighbour distance density `2πλr·e^{-πλr²}`.
#[inline]
pub fn nearest_distance_pdf(lambda: f64, r: f64) -> f64 {
    2.0 * PI * lambda * r * void_probability(lambda, r)
}

/// Joint density of the `k` nearest distances:
/// `(2πλ)^k e^{-πλ r_k²} ∏ r_j` on the ordered domain.
pub fn joint_ordered_pdf(lambda: f64, dv: &DistanceVector) -> f64 {
    joint_ordered_pdf_raw(lambda, dv.as_slice())
}

#[inline]
pub(crate) fn joint_ordered_pdf_raw(lambda: f64, r: &[f64]) -> f64 {
    let k = r.len() as i32;
    let last = r[r.len() - 1];
    (2.0 * PI * lambda).powi(k) * void_probability(lambda, last) * r.iter().product::<f64>()
}

/// `η = P_m / (P_s Σ r_j^{-α})`: the macro distance at which the MBS would
/// match the cluster's aggregate RSS is `η^{1/α}`.
#[inline]
pub fn eta(s: &ValidatedScenario, r: &[f64]) -> f64 {
    let sum: f64 = r.iter().map(|&x| x.powf(-s.alpha)).sum();
    s.macro_tier.tx_power / (s.small_tier.tx_power * sum)
}

/// Decay rate of the serving-MBS distance given the MBS wins a 1-vs-1 RSS
/// comparison: `λ_m + λ_s (P_s/P_m)^{2/α}`.
pub(crate) fn macro_event_decay(s: &ValidatedScenario) -> f64 {
    s.macro_tier.density + s.small_tier.density * s.power_ratio_pow()
}

/// Small-tier analogue of [`macro_event_decay`].
pub(crate) fn small_event_decay(s: &ValidatedScenario) -> f64 {
    s.small_tier.density + s.macro_tier.density / s.power_ratio_pow()
}

/// Serving-MBS distance density given the user associates with the MBS in the
/// non-cooperative model.
pub fn cond_pdf_mbs_noncoop(s: &ValidatedScenario, r: f64) -> f64 {
    let p = analytic::assoc_prob_sbs_noncoop(s);
    2.0 * PI * s.macro_tier.density * r / (1.0 - p) * (-PI * r * r * macro_event_decay(s)).exp()
}

/// Serving-SBS distance density given the user associates with the SBS in the
/// non-cooperative model.
pub fn cond_pdf_sbs_noncoop(s: &ValidatedScenario, r: f64) -> f64 {
    let p = analytic::assoc_prob_sbs_noncoop(s);
    2.0 * PI * s.small_tier.density * r / p * (-PI * r * r * small_event_decay(s)).exp()
}

/// Closed form of `g(r)` for a two-member cluster with α = 4, written as a
/// φ-integral over `(0, π/4)`:
///
/// `g(r) = ∫ [(πλ_s/sinφ + ω r⁻²) / ((cosφ/r)² ω)] · exp(-πλ_s r² / (ω sinφ)) dφ`
///
/// where `1/sinφ` is the reciprocal (not arcsine). The integrand vanishes
/// smoothly at φ → 0; the open Kronrod rule never evaluates the endpoint.
pub fn g_special(s: &ValidatedScenario, r: f64) -> Result<f64, GeometryError> {
    g_special_with(s, r, &QuadratureSettings::one_dim())
}

pub fn g_special_with(s: &ValidatedScenario, r: f64, q: &QuadratureSettings) -> Result<f64, GeometryError> {
    if s.k != 2 || s.alpha != 4.0 {
        return Err(GeometryError::UnsupportedSpecialCase { k: s.k, alpha: s.alpha });
    }
    if r <= 0.0 {
        return Ok(1.0);
    }
    let omega = s.omega();
    let lambda = s.small_tier.density;
    let inv_r2 = 1.0 / (r * r);
    let integrand = |phi: f64| {
        let sin = phi.sin();
        let cos = phi.cos();
        let numer = PI * lambda / sin + omega * inv_r2;
        let denom = cos * cos * inv_r2 * omega;
        let e = (-PI * lambda * r * r / (omega * sin)).exp();
        if e == 0.0 {
            0.0
        } else {
            numer / denom * e
        }
    };
    let est = quadrature::integrate(integrand, 0.0, FRAC_PI_4, q)?;
    Ok(est.value.clamp(0.0, 1.0))
}

/// `g(r) = P(P_m r^{-α}/P_s > Σ_{j≤k} r_{s,j}^{-α})` from its definition.
///
/// * `k = 1`: `e^{-πλ_s (P_s/P_m)^{2/α} r²}`.
/// * `k = 2`: the ordered double integral of the indicator against the joint
///   density, with the `r₂` bound solved analytically so only a smooth 1-D
///   integral over `r₁` remains.
/// * `k > 2`: Monte Carlo estimate with its standard error.
pub fn g_generic(s: &ValidatedScenario, r: f64) -> Result<Computed, GeometryError> {
    g_generic_with(s, r, &QuadratureSettings::one_dim())
}

pub fn g_generic_with(s: &ValidatedScenario, r: f64, q: &QuadratureSettings) -> Result<Computed, GeometryError> {
    match s.k {
        1 => Ok(Computed::Quadrature(void_probability(s.small_tier.density * s.power_ratio_pow(), r))),
        2 => g_pair(s, r, q).map(Computed::Quadrature),
        _ => Ok(Computed::MonteCarlo(montecarlo::estimate_g(s, r, &montecarlo::GSettings::default()))),
    }
}

/// Two-member cluster, any α. With `c = ω² r^{-α}` the event is
/// `r₁^{-α} + r₂^{-α} < c`, which needs `r₁ > r_min = c^{-1/α}` and
/// `r₂ > L(r₁) = (c - r₁^{-α})^{-1/α}`. For `r₁ ≥ r_c = (2/c)^{1/α}` the
/// ordering constraint `r₂ > r₁` is the binding one, which leaves
///
/// `g = ∫_{r_min}^{r_c} 2πλ r₁ e^{-πλ L(r₁)²} dr₁ + e^{-πλ r_c²}`.
fn g_pair(s: &ValidatedScenario, r: f64, q: &QuadratureSettings) -> Result<f64, GeometryError> {
    if r <= 0.0 {
        return Ok(1.0);
    }
    let alpha = s.alpha;
    let lambda = s.small_tier.density;
    let w2 = s.omega_squared();
    let r_min = r * w2.powf(-1.0 / alpha);
    let r_c = r * (2.0 / w2).powf(1.0 / alpha);
    let body = quadrature::integrate(
        |r1| {
            // L = r₁ (ω² (r₁/r)^α − 1)^{-1/α}, arranged to avoid cancellation.
            let excess = w2 * (r1 / r).powf(alpha) - 1.0;
            if excess <= 0.0 {
                return 0.0;
            }
            let l = r1 * excess.powf(-1.0 / alpha);
            2.0 * PI * lambda * r1 * void_probability(lambda, l)
        },
        r_min,
        r_c,
        q,
    )?;
    Ok((body.value + void_probability(lambda, r_c)).clamp(0.0, 1.0))
}

/// Dispatches to [`g_special`] for (k=2, α=4) and to [`g_generic`] otherwise.
/// Fails for `k > 2`, which has no deterministic path.
pub fn g_analytic(s: &ValidatedScenario, r: f64, q: &QuadratureSettings) -> Result<f64, GeometryError> {
    match s.k {
        2 if s.alpha == 4.0 => g_special_with(s, r, q),
        1 | 2 => Ok(g_generic_with(s, r, q)?.value()),
        k => Err(GeometryError::UnsupportedClusterSize(k)),
    }
}

/// Integrates `h(r)·f_Γ(r)` over the ordered domain for `k ∈ {1, 2}`.
///
/// `decay` is the Gaussian decay rate used for the `u = e^{-πλr²}` maps; pass
/// `λ_s` unless the integrand is known to decay faster.
pub(crate) fn integrate_cluster<H: Fn(&[f64]) -> f64>(
    k: usize,
    lambda_s: f64,
    decay: f64,
    h: H,
    q1: &QuadratureSettings,
    q2: &QuadratureSettings,
) -> Result<f64, GeometryError> {
    // `decay` must not exceed the true Gaussian decay rate of the integrand in
    // r₁. Along r₂ only the joint density's own e^{-πλ_s r₂²} is guaranteed.
    let map = TailMap::Gaussian { lambda: decay };
    let inner = TailMap::Gaussian { lambda: lambda_s };
    match k {
        1 => {
            let est = quadrature::integrate_semi_infinite(
                |r| {
                    let v = [r];
                    let pdf = joint_ordered_pdf_raw(lambda_s, &v);
                    if pdf == 0.0 {
                        0.0
                    } else {
                        h(&v) * pdf
                    }
                },
                0.0,
                map,
                q1,
            )?;
            Ok(est.value)
        }
        2 => {
            let est = quadrature::integrate_ordered_2d(
                |r1, r2| {
                    let v = [r1, r2];
                    let pdf = joint_ordered_pdf_raw(lambda_s, &v);
                    if pdf == 0.0 {
                        0.0
                    } else {
                        h(&v) * pdf
                    }
                },
                map,
                inner,
                q2,
            )?;
            Ok(est.value)
        }
        k => Err(GeometryError::UnsupportedClusterSize(k)),
    }
}

/// Conditional densities of the cooperative model, sharing one evaluation of
/// the cluster association probability.
#[derive(Debug, Clone)]
pub struct CoopConditioning {
    scenario: ValidatedScenario,
    p_sbs_co: f64,
    q1: QuadratureSettings,
}

impl CoopConditioning {
    pub fn new(
        s: &ValidatedScenario,
        q1: &QuadratureSettings,
        q2: &QuadratureSettings,
    ) -> Result<Self, GeometryError> {
        if s.k > 2 {
            return Err(GeometryError::UnsupportedClusterSize(s.k));
        }
        let p_sbs_co = analytic::assoc_prob_sbs_coop_quadrature(s, q1, q2)?;
        Ok(Self { scenario: *s, p_sbs_co, q1: *q1 })
    }

    pub fn p_sbs_co(&self) -> f64 {
        self.p_sbs_co
    }

    /// `f_{r_m}(r) g(r) / (1 − P_sbs_co)`.
    pub fn mbs_pdf(&self, r: f64) -> Result<f64, GeometryError> {
        let s = &self.scenario;
        let g = g_analytic(s, r, &self.q1)?;
        Ok(nearest_distance_pdf(s.macro_tier.density, r) * g / (1.0 - self.p_sbs_co))
    }

    /// `e^{-πλ_m η^{2/α}} f_Γ(r) / P_sbs_co`.
    pub fn sbs_pdf(&self, dv: &DistanceVector) -> Result<f64, GeometryError> {
        let s = &self.scenario;
        if dv.len() != s.k {
            return Err(GeometryError::WrongLength { expected: s.k, got: dv.len() });
        }
        Ok(self.sbs_pdf_raw(dv.as_slice()))
    }

    pub(crate) fn sbs_pdf_raw(&self, r: &[f64]) -> f64 {
        let s = &self.scenario;
        let eta = eta(s, r);
        void_probability(s.macro_tier.density, eta.powf(1.0 / s.alpha))
            * joint_ordered_pdf_raw(s.small_tier.density, r)
            / self.p_sbs_co
    }
}

pub fn cond_pdf_mbs_coop(s: &ValidatedScenario, r: f64) -> Result<f64, GeometryError> {
    CoopConditioning::new(s, &QuadratureSettings::one_dim(), &QuadratureSettings::two_dim())?.mbs_pdf(r)
}

pub fn cond_pdf_sbs_coop(s: &ValidatedScenario, dv: &DistanceVector) -> Result<f64, GeometryError> {
    CoopConditioning::new(s, &QuadratureSettings::one_dim(), &QuadratureSettings::two_dim())?.sbs_pdf(dv)
}
