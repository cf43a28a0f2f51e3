//! Scenario builders shared by the integration tests.
#![allow(dead_code)]

use hetcoop::model::{PowerValue, ScenarioConfig, ValidatedScenario};

pub struct Cfg(pub ScenarioConfig);

impl Cfg {
    pub fn new() -> Self {
        Cfg(ScenarioConfig::default())
    }
    pub fn alpha(mut self, a: f64) -> Self {
        self.0.alpha = Some(a);
        self
    }
    pub fn ratio(mut self, r: f64) -> Self {
        self.0.lambda_s_ratio = Some(r);
        self
    }
    pub fn lambda_m(mut self, l: f64) -> Self {
        self.0.lambda_m = Some(l);
        self
    }
    pub fn powers(mut self, p_m: f64, p_s: f64) -> Self {
        self.0.p_m = Some(PowerValue::Watts(p_m));
        self.0.p_s = Some(PowerValue::Watts(p_s));
        self
    }
    pub fn sigma2(mut self, v: f64) -> Self {
        self.0.sigma2 = Some(v);
        self
    }
    pub fn k(mut self, k: usize) -> Self {
        self.0.k = Some(k);
        self
    }
    pub fn backhaul(mut self, p: f64) -> Self {
        self.0.p_backhaul = Some(p);
        self
    }
    pub fn build(self) -> ValidatedScenario {
        self.0.resolve().expect("test scenario is valid")
    }
}

/// α=4, λ_s=50λ_m, P_m=50, P_s=1, σ²=0, k=2.
pub fn fig2() -> ValidatedScenario {
    Cfg::new().alpha(4.0).ratio(50.0).powers(50.0, 1.0).sigma2(0.0).k(2).build()
}

/// α=3, P_m=50, P_s=2 at the given density ratio.
pub fn fig5(ratio: f64) -> ValidatedScenario {
    Cfg::new().alpha(3.0).ratio(ratio).powers(50.0, 2.0).sigma2(0.0).k(2).build()
}

/// θ grid −10, −8, …, 20 dB as linear ratios.
pub fn theta_grid() -> Vec<f64> {
    (0..16).map(|i| hetcoop::model::db_to_linear(-10.0 + 2.0 * i as f64)).collect()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Pearson χ² goodness-of-fit at the 1% level. `probs` must partition the
/// whole support, so they sum to one up to quadrature error.
pub fn chi_square_passes(observed: &[u64], probs: &[f64], label: &str) -> bool {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    assert_eq!(observed.len(), probs.len());
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-4, "{label}: cell probabilities sum to {total}");
    let n = observed.iter().sum::<u64>() as f64;
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * n;
        assert!(e >= 5.0, "{label}: expected count {e} too small for χ²");
        stat += (o as f64 - e).powi(2) / e;
    }
    let crit = ChiSquared::new((probs.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    println!("{label}: chi2 = {stat:.2} (crit {crit:.2}, {} cells, n = {n})", probs.len());
    stat < crit
}

/// Counts of `xs` in `[edges[i], edges[i+1])`.
pub fn histogram(xs: &[f64], edges: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() - 1];
    for &x in xs {
        if let Some(i) = edges.windows(2).position(|w| x >= w[0] && x < w[1]) {
            counts[i] += 1;
        }
    }
    counts
}
