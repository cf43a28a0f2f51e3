//! Lazily cached analytic evaluation of one scenario.

use std::collections::HashMap;

use hetcoop::analytic::{
    self, AnalyticSettings, AssociationModel, Efficiency, Event, EventCoverage, PowerBreakdown, RateReport,
};
use hetcoop::model::ValidatedScenario;
use hetcoop::montecarlo::{Computed, SimSettings};

use crate::{Cli, CliError};

/// Analytic settings with the Monte Carlo fallback seeded from the CLI flags.
pub fn analytic_settings(cli: &Cli) -> AnalyticSettings {
    let mut st = AnalyticSettings::default();
    st.fallback = SimSettings {
        seed: cli.seed.unwrap_or(st.fallback.seed),
        n_workers: cli.workers.unwrap_or(st.fallback.n_workers),
        ..st.fallback
    };
    st
}

pub struct Evaluator {
    pub s: ValidatedScenario,
    pub st: AnalyticSettings,
    assoc_co: Option<Computed>,
    events: HashMap<Event, EventCoverage>,
    rates: HashMap<AssociationModel, RateReport>,
}

impl Evaluator {
    pub fn new(s: ValidatedScenario, st: AnalyticSettings) -> Self {
        Self { s, st, assoc_co: None, events: HashMap::new(), rates: HashMap::new() }
    }

    /// Whether any value so far came from the Monte Carlo fallback.
    pub fn used_monte_carlo(&self) -> bool {
        self.assoc_co.as_ref().is_some_and(Computed::is_monte_carlo)
    }

    pub fn assoc_computed(&mut self, model: AssociationModel) -> Result<Computed, CliError> {
        match model {
            AssociationModel::NonCooperative => Ok(Computed::Quadrature(analytic::assoc_prob_sbs_noncoop(&self.s))),
            AssociationModel::Cooperative => {
                if self.assoc_co.is_none() {
                    self.assoc_co = Some(analytic::assoc_prob_sbs_coop(&self.s, &self.st)?);
                }
                Ok(self.assoc_co.clone().expect("just filled"))
            }
        }
    }

    pub fn assoc(&mut self, model: AssociationModel) -> Result<f64, CliError> {
        Ok(self.assoc_computed(model)?.value())
    }

    pub fn coverage(&mut self, event: Event, theta: f64) -> Result<f64, CliError> {
        if !self.events.contains_key(&event) {
            let ev = EventCoverage::new(&self.s, event, &self.st)?;
            self.events.insert(event, ev);
        }
        Ok(self.events[&event].at(theta)?)
    }

    pub fn overall(&mut self, model: AssociationModel, theta: f64) -> Result<f64, CliError> {
        let [mbs, sbs] = model.events();
        let p = self.assoc(model)?;
        Ok((1.0 - p) * self.coverage(mbs, theta)? + p * self.coverage(sbs, theta)?)
    }

    pub fn rate(&mut self, model: AssociationModel) -> Result<RateReport, CliError> {
        if let Some(r) = self.rates.get(&model) {
            return Ok(*r);
        }
        let p = self.assoc(model)?;
        let [mbs, sbs] = model.events();
        let mut curve_rate = |event: Event| -> Result<f64, CliError> {
            if !self.events.contains_key(&event) {
                let ev = EventCoverage::new(&self.s, event, &self.st)?;
                self.events.insert(event, ev);
            }
            let ev = &self.events[&event];
            Ok(analytic::coverage_curve(|t| ev.at(t), &self.st)?.rate())
        };
        let tau_mbs = curve_rate(mbs)?;
        let tau_sbs = curve_rate(sbs)?;
        let r = RateReport { p_assoc_sbs: p, tau_mbs, tau_sbs, tau: (1.0 - p) * tau_mbs + p * tau_sbs };
        self.rates.insert(model, r);
        Ok(r)
    }

    pub fn power(&mut self, model: AssociationModel) -> Result<PowerBreakdown, CliError> {
        let p = self.assoc(model)?;
        Ok(analytic::power_breakdown(&self.s, model, p))
    }

    pub fn efficiency(&mut self, model: AssociationModel) -> Result<Efficiency, CliError> {
        let tau = self.rate(model)?.tau;
        let power = self.power(model)?.total;
        Ok(analytic::efficiency(&self.s, tau, power)?)
    }
}
