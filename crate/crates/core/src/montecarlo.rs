//! Brute-force Monte Carlo oracle.
//!
//! Each replication drops both tiers as PPPs on a disk around the typical user,
//! draws Rayleigh fading for every link, applies the RSS association rule of
//! each model and records the resulting SINR. Replication `i` always uses the
//! ChaCha8 stream `i` under the run seed, and replications are reduced in
//! fixed-size chunks in index order, so results depend only on the seed and
//! the scenario, never on the worker count or scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{AssociationModel, Tier};
use crate::model::ValidatedScenario;

/// Replications per reduction chunk.
const CHUNK: u64 = 1024;

/// Below this many contributing samples an estimate is reported as inconclusive.
pub const MIN_CONCLUSIVE_SAMPLES: u64 = 1000;

/// How the cooperative cluster's signals combine at the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Combining {
    /// Independent complex Gaussian amplitudes with uniform phases:
    /// `|Σ √(P_s h_j) r_j^{-α/2} e^{iφ_j}|²`. In law this is an Exp(1) fade on
    /// `Σ P_s r_j^{-α}`.
    #[default]
    PowerSum,
    /// Phase-aligned amplitudes: `(Σ √(P_s h_j) r_j^{-α/2})²`.
    Coherent,
}

impl Combining {
    pub fn id(self) -> &'static str {
        match self {
            Combining::PowerSum => "power-sum",
            Combining::Coherent => "coherent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSettings {
    /// Simulation disk radius (m); `None` picks [`default_radius`].
    pub radius_max: Option<f64>,
    pub n_reps: u64,
    pub seed: u64,
    pub n_workers: usize,
    pub combining: Combining,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            radius_max: None,
            n_reps: 100_000,
            seed: 0x5EED_2017,
            n_workers: default_workers(),
            combining: Combining::PowerSum,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// `10 · max((πλ_m)^{-1/2}, (πλ_s)^{-1/2})`.
pub fn default_radius(s: &ValidatedScenario) -> f64 {
    let mean_gap = |lambda: f64| (PI * lambda).powf(-0.5);
    10.0 * mean_gap(s.macro_tier.density).max(mean_gap(s.small_tier.density))
}

impl SimSettings {
    pub fn radius(&self, s: &ValidatedScenario) -> f64 {
        self.radius_max.unwrap_or_else(|| default_radius(s))
    }
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n_reps`.
    pub stderr: f64,
    /// Samples contributing to the mean (for conditional metrics, the number
    /// of replications in which the conditioning event occurred).
    pub n_reps: u64,
    pub seed: u64,
    pub metric_id: String,
    /// Realizations redrawn because a tier had too few points in the disk.
    pub resamples: u64,
}

impl McEstimate {
    pub fn is_conclusive(&self) -> bool {
        self.n_reps >= MIN_CONCLUSIVE_SAMPLES
    }

    /// True when the standard error exceeds the requested tolerance.
    pub fn insufficient(&self, tol: f64) -> bool {
        !(self.stderr <= tol) || !self.is_conclusive()
    }

    /// `(analytic − mean) / stderr`; zero when both agree exactly.
    pub fn z_score(&self, analytic: f64) -> f64 {
        let d = analytic - self.mean;
        if d == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY.copysign(d)
        } else {
            d / self.stderr
        }
    }
}

/// A value that came either from deterministic quadrature or from the Monte
/// Carlo fallback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Computed {
    Quadrature(f64),
    MonteCarlo(McEstimate),
}

impl Computed {
    pub fn value(&self) -> f64 {
        match self {
            Computed::Quadrature(v) => *v,
            Computed::MonteCarlo(e) => e.mean,
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Computed::MonteCarlo(_))
    }

    pub fn stderr(&self) -> Option<f64> {
        match self {
            Computed::Quadrature(_) => None,
            Computed::MonteCarlo(e) => Some(e.stderr),
        }
    }
}

/// Quantities the oracle can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum McMetric {
    /// Frequency of the small tier winning association.
    AssocSbs,
    /// `P(SINR > θ | serving tier)`.
    Coverage { theta: f64, tier: Tier },
    /// `P(SINR > θ)`.
    CoverageOverall { theta: f64 },
    /// `E[log₂(1 + SINR)]`.
    Rate,
    /// `P(ω² r^{-α} > Σ_{j≤k} r_{s,j}^{-α})` for fixed `r`.
    G { r: f64 },
    /// `E[e^{-s I}]` with tier interferers restricted to beyond `d_m`, `d_s`.
    Laplace { s: f64, d_m: f64, d_s: f64 },
}

impl McMetric {
    pub fn id(&self, model: AssociationModel) -> String {
        match self {
            McMetric::AssocSbs => format!("assoc_sbs_{}", model.id()),
            McMetric::Coverage { theta, tier } => {
                let tier = match tier {
                    Tier::Macro => "mbs",
                    Tier::Small => "sbs",
                };
                format!("coverage_{tier}_{}@{theta:e}", model.id())
            }
            McMetric::CoverageOverall { theta } => format!("coverage_overall_{}@{theta:e}", model.id()),
            McMetric::Rate => format!("rate_{}", model.id()),
            McMetric::G { r } => format!("g@{r:e}"),
            McMetric::Laplace { s, d_m, d_s } => format!("laplace@{s:e},{d_m:e},{d_s:e}"),
        }
    }
}

/// Streaming mean/variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// RNG for replication `rep` of a run.
pub fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Squared distance of a point uniform on the disk of radius `radius`.
#[inline]
fn uniform_r2<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> f64 {
    // (0, 1] so no point sits exactly on the user.
    let u = 1.0 - rng.random::<f64>();
    radius * radius * u
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite Poisson mean");
    d.sample(rng) as u64
}

/// Homogeneous PPP of density `lambda` on the disk of radius `radius` centred
/// at the user, as Cartesian points.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let n = poisson_count(lambda * PI * radius * radius, rng);
    (0..n)
        .map(|_| {
            let r = uniform_r2(radius, rng).sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

/// Exact distances of the `k` nearest points of an unbounded PPP, nearest
/// first: `r_j² = Σ_{i≤j} E_i / (πλ)` with `E_i ~ Exp(1)`.
pub fn nearest_distances<R: Rng + ?Sized>(lambda: f64, k: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    (0..k)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            acc += e;
            (acc / (PI * lambda)).sqrt()
        })
        .collect()
}

/// `r^{-α}` from `r²`, with fast paths for the common exponents.
#[inline]
fn path_gain(r2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (r2 * r2)
    } else if alpha == 3.0 {
        1.0 / (r2 * r2.sqrt())
    } else {
        r2.powf(-0.5 * alpha)
    }
}

/// A BS as seen from the user: squared distance and faded received power.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Link {
    r2: f64,
    rx: f64,
}

fn drop_tier<R: Rng + ?Sized>(
    lambda: f64,
    power: f64,
    alpha: f64,
    radius: f64,
    rng: &mut R,
    out: &mut Vec<Link>,
) {
    out.clear();
    let n = poisson_count(lambda * PI * radius * radius, rng);
    out.reserve(n as usize);
    for _ in 0..n {
        let r2 = uniform_r2(radius, rng);
        let h: f64 = Exp1.sample(rng);
        out.push(Link { r2, rx: power * h * path_gain(r2, alpha) });
    }
}

/// Everything one realization says about both association models.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// Distance to the nearest MBS.
    pub r_macro: f64,
    /// Distances to the `k` nearest SBSs, nearest first.
    pub r_small: Vec<f64>,
    pub winner_noncoop: Tier,
    pub winner_coop: Tier,
    pub sinr_noncoop: f64,
    /// Cooperative SINR under power-sum combining.
    pub sinr_coop_power_sum: f64,
    /// Cooperative SINR under phase-aligned combining.
    pub sinr_coop_coherent: f64,
    pub resamples: u64,
}

impl Realization {
    pub fn winner(&self, model: AssociationModel) -> Tier {
        match model {
            AssociationModel::NonCooperative => self.winner_noncoop,
            AssociationModel::Cooperative => self.winner_coop,
        }
    }

    pub fn sinr(&self, model: AssociationModel, combining: Combining) -> f64 {
        match (model, combining) {
            (AssociationModel::NonCooperative, _) => self.sinr_noncoop,
            (AssociationModel::Cooperative, Combining::PowerSum) => self.sinr_coop_power_sum,
            (AssociationModel::Cooperative, Combining::Coherent) => self.sinr_coop_coherent,
        }
    }
}

/// Reusable per-worker buffers.
#[derive(Debug, Default)]
pub struct Scratch {
    macro_links: Vec<Link>,
    small_links: Vec<Link>,
}

/// Draws one realization, resampling until the disk holds at least one MBS
/// and `k` SBSs.
pub fn draw_realization<R: Rng + ?Sized>(
    s: &ValidatedScenario,
    radius: f64,
    rng: &mut R,
    scratch: &mut Scratch,
) -> Realization {
    let k = s.k;
    let alpha = s.alpha;
    let mut resamples = 0;
    loop {
        drop_tier(s.macro_tier.density, s.macro_tier.tx_power, alpha, radius, rng, &mut scratch.macro_links);
        drop_tier(s.small_tier.density, s.small_tier.tx_power, alpha, radius, rng, &mut scratch.small_links);
        if !scratch.macro_links.is_empty() && scratch.small_links.len() >= k {
            break;
        }
        resamples += 1;
    }
    let macros = &mut scratch.macro_links;
    let smalls = &mut scratch.small_links;

    let nearest_m = macros
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.r2.total_cmp(&b.1.r2))
        .map(|(i, _)| i)
        .expect("at least one MBS");
    macros.swap(0, nearest_m);
    let serving_m = macros[0];
    let other_m: f64 = macros[1..].iter().map(|l| l.rx).sum();

    if smalls.len() > k {
        smalls.select_nth_unstable_by(k - 1, |a, b| a.r2.total_cmp(&b.r2));
    }
    let (cluster, rest) = smalls.split_at_mut(k);
    cluster.sort_unstable_by(|a, b| a.r2.total_cmp(&b.r2));
    let other_s: f64 = rest.iter().map(|l| l.rx).sum();
    let cluster_rx: f64 = cluster.iter().map(|l| l.rx).sum();

    // Association uses mean RSS, without fading.
    let mean_rss_m = s.macro_tier.tx_power * path_gain(serving_m.r2, alpha);
    let gains: Vec<f64> = cluster.iter().map(|l| path_gain(l.r2, alpha)).collect();
    let mean_rss_s1 = s.small_tier.tx_power * gains[0];
    let mean_rss_cluster = s.small_tier.tx_power * gains.iter().sum::<f64>();

    let noise = s.sigma2;
    let all_s = other_s + cluster_rx;

    let (winner_noncoop, sinr_noncoop) = if mean_rss_s1 > mean_rss_m {
        (Tier::Small, cluster[0].rx / (other_m + serving_m.rx + all_s - cluster[0].rx + noise))
    } else {
        (Tier::Macro, serving_m.rx / (other_m + all_s + noise))
    };

    let (winner_coop, sinr_coop_power_sum, sinr_coop_coherent) = if mean_rss_cluster > mean_rss_m {
        let interference = other_m + serving_m.rx + other_s + noise;
        // Amplitudes √(rx_j); independent uniform phases for the power-sum mode.
        let (mut re, mut im, mut aligned) = (0.0, 0.0, 0.0);
        for l in cluster.iter() {
            let a = l.rx.sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            re += a * phi.cos();
            im += a * phi.sin();
            aligned += a;
        }
        (Tier::Small, (re * re + im * im) / interference, aligned * aligned / interference)
    } else {
        let v = serving_m.rx / (other_m + all_s + noise);
        (Tier::Macro, v, v)
    };

    Realization {
        r_macro: serving_m.r2.sqrt(),
        r_small: cluster.iter().map(|l| l.r2.sqrt()).collect(),
        winner_noncoop,
        winner_coop,
        sinr_noncoop,
        sinr_coop_power_sum,
        sinr_coop_coherent,
        resamples,
    }
}

/// Outcome of one realization under one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub winner: Tier,
    /// Linear SINR.
    pub sinr: f64,
    /// `log₂(1 + SINR)` (bit/s/Hz).
    pub rate: f64,
}

pub fn simulate_realization<R: Rng + ?Sized>(
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &SimSettings,
    rng: &mut R,
) -> Outcome {
    let real = draw_realization(s, settings.radius(s), rng, &mut Scratch::default());
    let sinr = real.sinr(model, settings.combining);
    Outcome { winner: real.winner(model), sinr, rate: sinr.ln_1p() / std::f64::consts::LN_2 }
}

/// Runs `n` replications split into fixed chunks on a pool of `workers`
/// threads. `step` scores one replication into `m` accumulators; the chunk
/// results are merged in index order.
fn run<F>(n: u64, seed: u64, workers: usize, m: usize, step: F) -> (Vec<Moments>, u64)
where
    F: Fn(&mut ChaCha8Rng, &mut Scratch, &mut [Moments]) -> u64 + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let chunk = |c: u64| {
        let mut acc = vec![Moments::default(); m];
        let mut scratch = Scratch::default();
        let mut resamples = 0;
        for rep in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let mut rng = rep_rng(seed, rep);
            resamples += step(&mut rng, &mut scratch, &mut acc);
        }
        (acc, resamples)
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build();
    let parts: Vec<(Vec<Moments>, u64)> = match pool {
        Ok(pool) => pool.install(|| (0..n_chunks).into_par_iter().map(chunk).collect()),
        Err(_) => (0..n_chunks).map(chunk).collect(),
    };
    let mut total = vec![Moments::default(); m];
    let mut resamples = 0;
    for (acc, r) in &parts {
        for (t, a) in total.iter_mut().zip(acc) {
            t.merge(a);
        }
        resamples += r;
    }
    (total, resamples)
}

fn finish(acc: &Moments, seed: u64, metric_id: String, resamples: u64) -> McEstimate {
    McEstimate { mean: acc.mean, stderr: acc.stderr(), n_reps: acc.n, seed, metric_id, resamples }
}

/// Estimates one metric.
pub fn estimate(metric: McMetric, s: &ValidatedScenario, model: AssociationModel, settings: &SimSettings) -> McEstimate {
    estimate_many(&[metric], s, model, settings).pop().expect("one metric in, one estimate out")
}

/// Estimates several metrics from one shared set of replications.
pub fn estimate_many(
    metrics: &[McMetric],
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &SimSettings,
) -> Vec<McEstimate> {
    let probes: Vec<Probe> =
        metrics.iter().map(|&metric| Probe { metric, model, combining: settings.combining }).collect();
    estimate_probes(&probes, s, settings)
}

/// A metric under a given model and combining mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub metric: McMetric,
    pub model: AssociationModel,
    pub combining: Combining,
}

impl Probe {
    pub fn new(metric: McMetric, model: AssociationModel) -> Self {
        Self { metric, model, combining: Combining::PowerSum }
    }

    pub fn id(&self) -> String {
        match (self.model, self.combining) {
            (AssociationModel::Cooperative, Combining::Coherent) => format!("{}[coherent]", self.metric.id(self.model)),
            _ => self.metric.id(self.model),
        }
    }
}

/// Estimates every probe from one shared set of replications, so both models
/// and both combining modes see identical realizations. `settings.combining`
/// is ignored in favour of each probe's own mode.
pub fn estimate_probes(probes: &[Probe], s: &ValidatedScenario, settings: &SimSettings) -> Vec<McEstimate> {
    let mut out: Vec<Option<McEstimate>> = vec![None; probes.len()];
    let realization_based: Vec<usize> = probes
        .iter()
        .enumerate()
        .filter(|(_, p)| !matches!(p.metric, McMetric::G { .. } | McMetric::Laplace { .. }))
        .map(|(i, _)| i)
        .collect();

    if !realization_based.is_empty() {
        let radius = settings.radius(s);
        let selected: Vec<Probe> = realization_based.iter().map(|&i| probes[i]).collect();
        let (acc, resamples) = run(settings.n_reps, settings.seed, settings.n_workers, selected.len(), |rng, scratch, acc| {
            let real = draw_realization(s, radius, rng, scratch);
            for (a, p) in acc.iter_mut().zip(&selected) {
                let winner = real.winner(p.model);
                let sinr = real.sinr(p.model, p.combining);
                match p.metric {
                    McMetric::AssocSbs => a.push(if winner == Tier::Small { 1.0 } else { 0.0 }),
                    McMetric::Coverage { theta, tier } => {
                        if winner == tier {
                            a.push(if sinr > theta { 1.0 } else { 0.0 });
                        }
                    }
                    McMetric::CoverageOverall { theta } => a.push(if sinr > theta { 1.0 } else { 0.0 }),
                    McMetric::Rate => a.push(sinr.ln_1p() / std::f64::consts::LN_2),
                    McMetric::G { .. } | McMetric::Laplace { .. } => unreachable!(),
                }
            }
            real.resamples
        });
        for ((&i, a), p) in realization_based.iter().zip(&acc).zip(&selected) {
            out[i] = Some(finish(a, settings.seed, p.id(), resamples));
        }
    }

    for (i, p) in probes.iter().enumerate() {
        match p.metric {
            McMetric::G { r } => {
                let g = GSettings { n_samples: settings.n_reps, seed: settings.seed, n_workers: settings.n_workers };
                out[i] = Some(estimate_g(s, r, &g));
            }
            McMetric::Laplace { s: lap_s, d_m, d_s } => {
                out[i] = Some(estimate_laplace(s, lap_s, d_m, d_s, settings).with_id(p.id()));
            }
            _ => {}
        }
    }
    out.into_iter().map(|e| e.expect("every metric estimated")).collect()
}

impl McEstimate {
    fn with_id(mut self, id: String) -> Self {
        self.metric_id = id;
        self
    }
}

/// Settings for the `g(r)` frequency estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GSettings {
    pub n_samples: u64,
    pub seed: u64,
    pub n_workers: usize,
}

impl Default for GSettings {
    fn default() -> Self {
        Self { n_samples: 1_000_000, seed: 0x5EED_2017, n_workers: default_workers() }
    }
}

/// Frequency of `P_m r^{-α} > P_s Σ_{j≤k} r_{s,j}^{-α}` over exact draws of
/// the `k` nearest SBS distances.
pub fn estimate_g(s: &ValidatedScenario, r: f64, settings: &GSettings) -> McEstimate {
    let threshold = s.omega_squared() * r.powf(-s.alpha);
    let lambda = s.small_tier.density;
    let k = s.k;
    let alpha = s.alpha;
    let (acc, _) = run(settings.n_samples, settings.seed, settings.n_workers, 1, |rng, _, acc| {
        let mut sum = 0.0;
        let mut cum = 0.0;
        for _ in 0..k {
            let e: f64 = Exp1.sample(rng);
            cum += e;
            sum += path_gain(cum / (PI * lambda), alpha);
        }
        acc[0].push(if threshold > sum { 1.0 } else { 0.0 });
        0
    });
    finish(&acc[0], settings.seed, format!("g@{r:e}"), 0)
}

/// `E[exp(-s I)]` where `I` sums faded power from MBSs beyond `d_m` and SBSs
/// beyond `d_s`. The disk radius is raised to at least `10·max(d_m, d_s)`.
pub fn estimate_laplace(s: &ValidatedScenario, lap_s: f64, d_m: f64, d_s: f64, settings: &SimSettings) -> McEstimate {
    let radius = settings.radius(s).max(10.0 * d_m.max(d_s));
    let alpha = s.alpha;
    let (acc, _) = run(settings.n_reps, settings.seed, settings.n_workers, 1, |rng, scratch, acc| {
        let mut interference = 0.0;
        drop_tier(s.macro_tier.density, s.macro_tier.tx_power, alpha, radius, rng, &mut scratch.macro_links);
        interference += scratch.macro_links.iter().filter(|l| l.r2 > d_m * d_m).map(|l| l.rx).sum::<f64>();
        drop_tier(s.small_tier.density, s.small_tier.tx_power, alpha, radius, rng, &mut scratch.small_links);
        interference += scratch.small_links.iter().filter(|l| l.r2 > d_s * d_s).map(|l| l.rx).sum::<f64>();
        acc[0].push((-lap_s * interference).exp());
        0
    });
    finish(&acc[0], settings.seed, format!("laplace@{lap_s:e}"), 0)
}

/// Serving distances collected over `n` replications, split by the winning
/// tier of `model`: MBS distances, and SBS cluster distance vectors.
pub fn serving_distances(
    s: &ValidatedScenario,
    model: AssociationModel,
    settings: &SimSettings,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let radius = settings.radius(s);
    let mut scratch = Scratch::default();
    let mut mbs = Vec::new();
    let mut sbs = Vec::new();
    for rep in 0..settings.n_reps {
        let mut rng = rep_rng(settings.seed, rep);
        let real = draw_realization(s, radius, &mut rng, &mut scratch);
        match real.winner(model) {
            Tier::Macro => mbs.push(real.r_macro),
            Tier::Small => sbs.push(real.r_small),
        }
    }
    (mbs, sbs)
}
