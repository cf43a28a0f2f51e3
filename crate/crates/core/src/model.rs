//! Scenario parameters for the two-tier macro/small-cell network.
//!
//! Every quantity is stored in linear SI units: densities in BS/m², powers in
//! W, distances in m, bandwidth in Hz. Conversions from dB happen at the
//! config/CLI boundary (see [`db_to_linear`]).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Density and transmit power of one tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierParams {
    /// BS per m².
    pub density: f64,
    /// Transmit power in W.
    pub tx_power: f64,
}

/// Load-dependent power consumption constants for one macro Voronoi cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModelParams {
    /// Users in the Voronoi cell.
    pub n_users: f64,
    /// User count at which the MBS is fully loaded.
    pub n_max: f64,
    /// Maximum MBS output power (W).
    pub p_max: f64,
    /// MBS static power (W).
    pub p_static: f64,
    /// Backhaul power per cooperating SBS (W).
    pub p_backhaul: f64,
}

impl Default for PowerModelParams {
    fn default() -> Self {
        Self {
            n_users: defaults::N_USERS,
            n_max: defaults::N_MAX,
            p_max: defaults::P_MAX,
            p_static: defaults::P_STATIC,
            p_backhaul: defaults::P_BACKHAUL,
        }
    }
}

/// Full parameterization of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub macro_tier: TierParams,
    pub small_tier: TierParams,
    /// Path-loss exponent, shared by both tiers.
    pub alpha: f64,
    /// Noise power σ² (W).
    pub sigma2: f64,
    /// Number of nearest SBSs forming the cooperative cluster.
    pub k: usize,
    /// Shared system bandwidth (Hz).
    pub bandwidth: f64,
    pub power_model: PowerModelParams,
}

/// Values used when a config omits a key.
pub mod defaults {
    /// Macro density (500²π)⁻¹ BS/m², i.e. one MBS per disk of radius 500 m.
    pub const LAMBDA_M: f64 = 1.0 / (500.0 * 500.0 * std::f64::consts::PI);
    pub const LAMBDA_S_RATIO: f64 = 50.0;
    pub const ALPHA: f64 = 4.0;
    pub const P_M: f64 = 50.0;
    pub const P_S: f64 = 1.0;
    pub const SIGMA2: f64 = 0.0;
    pub const K: usize = 2;
    pub const BANDWIDTH_HZ: f64 = 20e6;
    pub const N_USERS: f64 = 30.0;
    pub const N_MAX: f64 = 100.0;
    pub const P_MAX: f64 = 40.0;
    pub const P_STATIC: f64 = 20.0;
    pub const P_BACKHAUL: f64 = 1.0;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("alpha: path-loss exponent must exceed 2 (got {0}); interference diverges otherwise")]
    DivergentInterference(f64),
    #[error("{key}: density must be positive and finite (got {value})")]
    InvalidDensity { key: &'static str, value: f64 },
    #[error("{key}: transmit power must be positive and finite (got {value})")]
    InvalidPower { key: &'static str, value: f64 },
    #[error("sigma2: noise power must be non-negative and finite (got {0})")]
    InvalidNoise(f64),
    #[error("k: cluster size must be at least 1")]
    InvalidClusterSize,
    #[error("bandwidth_hz: must be non-negative and finite (got {0})")]
    InvalidBandwidth(f64),
    #[error("n_users: must lie in [0, n_max] (got n_users={n_users}, n_max={n_max})")]
    InvalidLoad { n_users: f64, n_max: f64 },
    #[error("{key}: must be non-negative and finite (got {value})")]
    InvalidPowerModel { key: &'static str, value: f64 },
}

/// A scenario whose invariants have been checked. Immutable; cheap to copy
/// and share between threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedScenario(Scenario);

impl std::ops::Deref for ValidatedScenario {
    type Target = Scenario;

    fn deref(&self) -> &Scenario {
        &self.0
    }
}

impl ValidatedScenario {
    pub fn into_inner(self) -> Scenario {
        self.0
    }

    /// Returns a copy with `f` applied to the raw parameters, re-validated.
    pub fn with(&self, f: impl FnOnce(&mut Scenario)) -> Result<ValidatedScenario, ModelError> {
        let mut raw = self.0;
        f(&mut raw);
        validate_scenario(raw)
    }

    /// ω = (P_m/P_s)^{1/2}.
    pub fn omega(&self) -> f64 {
        self.omega_squared().sqrt()
    }

    /// ω² = P_m/P_s, computed directly rather than by squaring [`Self::omega`].
    pub fn omega_squared(&self) -> f64 {
        self.macro_tier.tx_power / self.small_tier.tx_power
    }

    /// λ_s/λ_m.
    pub fn density_ratio(&self) -> f64 {
        self.small_tier.density / self.macro_tier.density
    }

    /// (P_s/P_m)^{2/α}: scales the small-tier density in the macro-serving
    /// exclusion region.
    pub fn power_ratio_pow(&self) -> f64 {
        (self.small_tier.tx_power / self.macro_tier.tx_power).powf(2.0 / self.alpha)
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

pub fn validate_scenario(raw: Scenario) -> Result<ValidatedScenario, ModelError> {
    // NaN fails the comparison and is rejected along with alpha <= 2.
    if !(raw.alpha > 2.0) || !raw.alpha.is_finite() {
        return Err(ModelError::DivergentInterference(raw.alpha));
    }
    if !positive(raw.macro_tier.density) {
        return Err(ModelError::InvalidDensity { key: "lambda_m", value: raw.macro_tier.density });
    }
    if !positive(raw.small_tier.density) {
        return Err(ModelError::InvalidDensity {
            key: "lambda_s_ratio",
            value: raw.small_tier.density,
        });
    }
    if !positive(raw.macro_tier.tx_power) {
        return Err(ModelError::InvalidPower { key: "p_m", value: raw.macro_tier.tx_power });
    }
    if !positive(raw.small_tier.tx_power) {
        return Err(ModelError::InvalidPower { key: "p_s", value: raw.small_tier.tx_power });
    }
    if !non_negative(raw.sigma2) {
        return Err(ModelError::InvalidNoise(raw.sigma2));
    }
    if raw.k < 1 {
        return Err(ModelError::InvalidClusterSize);
    }
    if !non_negative(raw.bandwidth) {
        return Err(ModelError::InvalidBandwidth(raw.bandwidth));
    }
    let pm = &raw.power_model;
    for (key, value) in [
        ("n_users", pm.n_users),
        ("n_max", pm.n_max),
        ("p_max", pm.p_max),
        ("p_static", pm.p_static),
        ("p_backhaul", pm.p_backhaul),
    ] {
        if !non_negative(value) {
            return Err(ModelError::InvalidPowerModel { key, value });
        }
    }
    if pm.n_users > pm.n_max {
        return Err(ModelError::InvalidLoad { n_users: pm.n_users, n_max: pm.n_max });
    }
    Ok(ValidatedScenario(raw))
}

/// θ_linear = 10^{θ_dB/10}.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Where a parameter value came from; echoed in output provenance headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Pinned by a published reference scenario.
    Paper,
    /// Filled from [`defaults`] because nothing supplied it.
    Default,
    /// Supplied by the user's config file.
    Config,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Paper => "paper",
            Origin::Default => "default",
            Origin::Config => "config",
        })
    }
}

/// A power value in a config file: a bare number is watts, a string may carry
/// a `W`, `dBW` or `dBm` unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerValue {
    Watts(f64),
    Text(String),
}

impl PowerValue {
    pub fn to_watts(&self) -> Result<f64, String> {
        match self {
            PowerValue::Watts(w) => Ok(*w),
            PowerValue::Text(s) => {
                let t = s.trim();
                let lower = t.to_ascii_lowercase();
                let (num, scale): (&str, fn(f64) -> f64) = if let Some(n) = lower.strip_suffix("dbm") {
                    (n, |v| db_to_linear(v) * 1e-3)
                } else if let Some(n) = lower.strip_suffix("dbw") {
                    (n, db_to_linear)
                } else if let Some(n) = lower.strip_suffix('w') {
                    (n, |v| v)
                } else {
                    (lower.as_str(), |v| v)
                };
                num.trim()
                    .parse::<f64>()
                    .map(scale)
                    .map_err(|_| format!("cannot parse power value {t:?}"))
            }
        }
    }
}

/// On-disk scenario description. Every key is optional; missing keys fall back
/// to [`defaults`]. TOML and JSON share this schema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub alpha: Option<f64>,
    pub lambda_m: Option<f64>,
    pub lambda_s_ratio: Option<f64>,
    pub p_m: Option<PowerValue>,
    pub p_s: Option<PowerValue>,
    pub sigma2: Option<f64>,
    pub k: Option<usize>,
    pub bandwidth_hz: Option<f64>,
    pub n_users: Option<f64>,
    pub n_max: Option<f64>,
    pub p_max: Option<f64>,
    pub p_static: Option<f64>,
    pub p_backhaul: Option<f64>,
}

/// Config keys in the order they are reported.
pub const CONFIG_KEYS: [&str; 13] = [
    "alpha",
    "lambda_m",
    "lambda_s_ratio",
    "p_m",
    "p_s",
    "sigma2",
    "k",
    "bandwidth_hz",
    "n_users",
    "n_max",
    "p_max",
    "p_static",
    "p_backhaul",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{key}: {message}")]
    Field { key: &'static str, message: String },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

impl ScenarioConfig {
    /// Which keys this config sets explicitly.
    pub fn is_set(&self, key: &str) -> bool {
        match key {
            "alpha" => self.alpha.is_some(),
            "lambda_m" => self.lambda_m.is_some(),
            "lambda_s_ratio" => self.lambda_s_ratio.is_some(),
            "p_m" => self.p_m.is_some(),
            "p_s" => self.p_s.is_some(),
            "sigma2" => self.sigma2.is_some(),
            "k" => self.k.is_some(),
            "bandwidth_hz" => self.bandwidth_hz.is_some(),
            "n_users" => self.n_users.is_some(),
            "n_max" => self.n_max.is_some(),
            "p_max" => self.p_max.is_some(),
            "p_static" => self.p_static.is_some(),
            "p_backhaul" => self.p_backhaul.is_some(),
            _ => false,
        }
    }

    /// Resolves defaults and absolute densities, then validates.
    pub fn resolve(&self) -> Result<ValidatedScenario, ConfigError> {
        let power = |key: &'static str, v: &Option<PowerValue>, default: f64| match v {
            None => Ok(default),
            Some(p) => p.to_watts().map_err(|message| ConfigError::Field { key, message }),
        };
        let lambda_m = self.lambda_m.unwrap_or(defaults::LAMBDA_M);
        let ratio = self.lambda_s_ratio.unwrap_or(defaults::LAMBDA_S_RATIO);
        let raw = Scenario {
            macro_tier: TierParams { density: lambda_m, tx_power: power("p_m", &self.p_m, defaults::P_M)? },
            small_tier: TierParams {
                density: lambda_m * ratio,
                tx_power: power("p_s", &self.p_s, defaults::P_S)?,
            },
            alpha: self.alpha.unwrap_or(defaults::ALPHA),
            sigma2: self.sigma2.unwrap_or(defaults::SIGMA2),
            k: self.k.unwrap_or(defaults::K),
            bandwidth: self.bandwidth_hz.unwrap_or(defaults::BANDWIDTH_HZ),
            power_model: PowerModelParams {
                n_users: self.n_users.unwrap_or(defaults::N_USERS),
                n_max: self.n_max.unwrap_or(defaults::N_MAX),
                p_max: self.p_max.unwrap_or(defaults::P_MAX),
                p_static: self.p_static.unwrap_or(defaults::P_STATIC),
                p_backhaul: self.p_backhaul.unwrap_or(defaults::P_BACKHAUL),
            },
        };
        if !positive(ratio) {
            return Err(ModelError::InvalidDensity { key: "lambda_s_ratio", value: ratio }.into());
        }
        Ok(validate_scenario(raw)?)
    }

    /// Sets a scalar key from a number; used by parameter sweeps.
    pub fn set_scalar(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        match key {
            "alpha" => self.alpha = Some(value),
            "lambda_m" => self.lambda_m = Some(value),
            "lambda_s_ratio" => self.lambda_s_ratio = Some(value),
            "p_m" => self.p_m = Some(PowerValue::Watts(value)),
            "p_s" => self.p_s = Some(PowerValue::Watts(value)),
            "sigma2" => self.sigma2 = Some(value),
            "k" => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(ConfigError::Field { key: "k", message: format!("not a cluster size: {value}") });
                }
                self.k = Some(value as usize)
            }
            "bandwidth_hz" => self.bandwidth_hz = Some(value),
            "n_users" => self.n_users = Some(value),
            "n_max" => self.n_max = Some(value),
            "p_max" => self.p_max = Some(value),
            "p_static" => self.p_static = Some(value),
            "p_backhaul" => self.p_backhaul = Some(value),
            _ => {
                return Err(ConfigError::Field {
                    key: "parameter",
                    message: format!("{key:?} is not a sweepable scalar key"),
                })
            }
        }
        Ok(())
    }

    /// Renders the resolved scenario back to config-key form.
    pub fn resolved_values(s: &ValidatedScenario) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", s.alpha),
            ("lambda_m", s.macro_tier.density),
            ("lambda_s_ratio", s.density_ratio()),
            ("p_m", s.macro_tier.tx_power),
            ("p_s", s.small_tier.tx_power),
            ("sigma2", s.sigma2),
            ("k", s.k as f64),
            ("bandwidth_hz", s.bandwidth),
            ("n_users", s.power_model.n_users),
            ("n_max", s.power_model.n_max),
            ("p_max", s.power_model.p_max),
            ("p_static", s.power_model.p_static),
            ("p_backhaul", s.power_model.p_backhaul),
        ]
    }
}
