//! `hetcoop eval`: one scenario, JSON report.

use hetcoop::analytic::{AssociationModel, Event};
use hetcoop::model::db_to_linear;
use hetcoop::montecarlo::Computed;
use serde_json::{json, Map, Value};

use crate::args::EvalArgs;
use crate::evaluator::{analytic_settings, Evaluator};
use crate::provenance::{Loaded, Provenance};
use crate::{parse_list, Cli, CliError, Rendered};

pub fn run(args: &EvalArgs, cli: &Cli) -> Result<Rendered, CliError> {
    let loaded = Loaded::from_path(args.config.as_deref())?;
    let s = loaded.resolve()?;
    let thetas_db = parse_list(&args.theta_db)?;
    let models = args.model.models();
    let mut ev = Evaluator::new(s, analytic_settings(cli));

    let mut association = Map::new();
    let mut power = Map::new();
    for &m in &models {
        let p = ev.assoc_computed(m)?;
        association.insert(m.id().into(), computed_json(&p));
        let b = ev.power(m)?;
        power.insert(m.id().into(), json!({ "mbs": b.mbs, "sbs": b.sbs, "total": b.total }));
    }

    let mut report = Map::new();
    report.insert("association".into(), Value::Object(association));
    report.insert("power".into(), Value::Object(power));

    if !thetas_db.is_empty() {
        let mut rows = Vec::with_capacity(thetas_db.len());
        for &db in &thetas_db {
            let theta = db_to_linear(db);
            let mut row = Map::new();
            if cli.linear {
                row.insert("theta".into(), json!(theta));
            } else {
                row.insert("theta_db".into(), json!(db));
            }
            for &m in &models {
                for e in m.events() {
                    row.insert(e.id().into(), json!(ev.coverage(e, theta)?));
                }
                row.insert(format!("overall_{}", m.id()), json!(ev.overall(m, theta)?));
            }
            rows.push(Value::Object(row));
        }
        report.insert("coverage".into(), Value::Array(rows));

        let mut rates = Map::new();
        let mut efficiency = Map::new();
        for &m in &models {
            let r = ev.rate(m)?;
            let [mbs, sbs] = m.events();
            rates.insert(
                m.id().into(),
                json!({ event_key(mbs): r.tau_mbs, event_key(sbs): r.tau_sbs, "tau": r.tau }),
            );
            let e = ev.efficiency(m)?;
            efficiency.insert(
                m.id().into(),
                json!({ "throughput_bps": e.throughput, "power_w": e.power, "ee_bit_per_j": e.ee }),
            );
        }
        report.insert("rate".into(), Value::Object(rates));
        report.insert("efficiency".into(), Value::Object(efficiency));
    }

    let seed = ev.used_monte_carlo().then_some(ev.st.fallback.seed);
    let mut prov = Provenance::new("eval", &loaded, &s, seed).note(format!("config source: {}", loaded.source));
    if models.contains(&AssociationModel::Cooperative) && s.k > 2 {
        prov = prov.note("k > 2: cooperative association probability is a Monte Carlo estimate");
    }
    report.insert("provenance".into(), prov.json());

    let mut body = serde_json::to_string_pretty(&Value::Object(report)).expect("JSON values serialize");
    body.push('\n');
    Ok(Rendered::ok(body))
}

fn event_key(e: Event) -> String {
    format!("tau_{}", e.id())
}

fn computed_json(c: &Computed) -> Value {
    match c {
        Computed::Quadrature(v) => json!({ "p_sbs": v, "source": "quadrature" }),
        Computed::MonteCarlo(e) => json!({
            "p_sbs": e.mean,
            "source": "monte-carlo",
            "stderr": e.stderr,
            "n_reps": e.n_reps,
            "seed": e.seed,
        }),
    }
}
