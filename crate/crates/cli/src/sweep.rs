//! `hetcoop sweep`: one config key over a grid, one column per metric.

use hetcoop::analytic::{AssociationModel, Event};
use hetcoop::model::{db_to_linear, CONFIG_KEYS};

use crate::args::SweepArgs;
use crate::evaluator::{analytic_settings, Evaluator};
use crate::provenance::{num, Loaded, Provenance};
use crate::{parse_list, Cli, CliError, Rendered};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    AssocSbs,
    CoverageMbs,
    CoverageSbs,
    CoverageOverall,
    Rate,
    Power,
    Throughput,
    Efficiency,
}

/// A sweepable metric, e.g. `p_cov_overall_co`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    pub quantity: Quantity,
    pub model: AssociationModel,
}

impl Metric {
    pub fn parse(id: &str) -> Result<Self, CliError> {
        let unknown = || CliError::Config(format!("unknown metric {id:?}"));
        let (stem, model) = if let Some(s) = id.strip_suffix("_noncoop").or_else(|| id.strip_suffix("_no")) {
            (s, AssociationModel::NonCooperative)
        } else if let Some(s) = id.strip_suffix("_coop").or_else(|| id.strip_suffix("_co")) {
            (s, AssociationModel::Cooperative)
        } else {
            return Err(unknown());
        };
        let quantity = match stem {
            "p_sbs" => Quantity::AssocSbs,
            "p_cov_mbs" => Quantity::CoverageMbs,
            "p_cov_sbs" => Quantity::CoverageSbs,
            "p_cov_overall" => Quantity::CoverageOverall,
            "tau" => Quantity::Rate,
            "power" => Quantity::Power,
            "throughput" => Quantity::Throughput,
            "ee" => Quantity::Efficiency,
            _ => return Err(unknown()),
        };
        Ok(Self { quantity, model })
    }

    pub fn needs_theta(&self) -> bool {
        matches!(self.quantity, Quantity::CoverageMbs | Quantity::CoverageSbs | Quantity::CoverageOverall)
    }

    pub fn eval(&self, ev: &mut Evaluator, theta: f64) -> Result<f64, CliError> {
        let [mbs, sbs]: [Event; 2] = self.model.events();
        match self.quantity {
            Quantity::AssocSbs => ev.assoc(self.model),
            Quantity::CoverageMbs => ev.coverage(mbs, theta),
            Quantity::CoverageSbs => ev.coverage(sbs, theta),
            Quantity::CoverageOverall => ev.overall(self.model, theta),
            Quantity::Rate => Ok(ev.rate(self.model)?.tau),
            Quantity::Power => Ok(ev.power(self.model)?.total),
            Quantity::Throughput => Ok(ev.efficiency(self.model)?.throughput),
            Quantity::Efficiency => Ok(ev.efficiency(self.model)?.ee),
        }
    }
}

/// Non-empty and strictly monotone.
pub fn check_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Config("grid: must not be empty".into()));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(CliError::Config("grid: values must be strictly monotone".into()));
    }
    Ok(())
}

pub fn run(args: &SweepArgs, cli: &Cli) -> Result<Rendered, CliError> {
    let base = Loaded::from_path(args.config.as_deref())?;
    let param = args.param.as_str();
    if !CONFIG_KEYS.contains(&param) {
        return Err(CliError::Config(format!("parameter: {param:?} is not a sweepable scalar key")));
    }
    let grid = parse_list(&args.grid)?;
    check_grid(&grid)?;
    let names: Vec<&str> = args.metrics.split(',').map(str::trim).filter(|m| !m.is_empty()).collect();
    if names.is_empty() {
        return Err(CliError::Config("metrics: at least one metric id is required".into()));
    }
    let metrics = names.iter().map(|n| Metric::parse(n)).collect::<Result<Vec<_>, _>>()?;
    let theta = match (args.theta, args.theta_db) {
        (Some(t), _) => t,
        (None, Some(db)) => db_to_linear(db),
        (None, None) => 1.0,
    };
    let st = analytic_settings(cli);

    let mut rows = String::new();
    let mut used_mc = false;
    let mut first = None;
    for &v in &grid {
        let point = base.with_scalar(param, v)?;
        let s = point.resolve()?;
        first.get_or_insert(s);
        let mut ev = Evaluator::new(s, st);
        let mut cells = vec![num(v)];
        for m in &metrics {
            cells.push(num(m.eval(&mut ev, theta)?));
        }
        used_mc |= ev.used_monte_carlo();
        rows.push_str(&cells.join(","));
        rows.push('\n');
    }

    let s0 = base.resolve()?;
    let mut prov = Provenance::new("sweep", &base, &s0, used_mc.then_some(st.fallback.seed))
        .note(format!("config source: {}", base.source))
        .note(format!("sweep {param} over [{}]", grid.iter().map(|&g| num(g)).collect::<Vec<_>>().join(", ")));
    if metrics.iter().any(Metric::needs_theta) {
        prov = prov.note(format!("theta = {} (linear)", num(theta)));
    }
    let mut body = prov.csv();
    body.push_str(param);
    for n in &names {
        body.push(',');
        body.push_str(n);
    }
    body.push('\n');
    body.push_str(&rows);
    Ok(Rendered::ok(body))
}
