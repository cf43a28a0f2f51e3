//! `hetcoop figure`: built-in presets for the six result figures.
//!
//! Values pinned by the published reference scenarios are tagged `paper`;
//! anything chosen here is tagged `default`.

use hetcoop::analytic::{AssociationModel, Event};
use hetcoop::model::{db_to_linear, ScenarioConfig};

use crate::args::FigureArgs;
use crate::evaluator::{analytic_settings, Evaluator};
use crate::provenance::{num, Loaded, Provenance};
use crate::{parse_list, Cli, CliError, Rendered};

pub const FIGURE_IDS: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

/// λ_s/λ_m axis shared by the density figures.
pub const RATIO_GRID: [f64; 16] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];

/// θ axis (dB) for the threshold figures.
pub const THETA_DB_AXIS: &str = "-10:20:1";

/// Macro powers plotted in the density/power coverage figure.
pub const FIG4_P_M: [f64; 3] = [20.0, 50.0, 80.0];
/// Threshold of the density/power coverage figure (linear).
pub const FIG4_THETA: f64 = 5.0;

/// Users per cell, full-load users and MBS max power for the EE figure.
pub const FIG7_N_USERS: f64 = 1.0;
pub const FIG7_N_MAX: f64 = 100.0;
pub const FIG7_P_MAX: f64 = 40.0;

const COMMON: [&str; 3] = ["lambda_m", "sigma2", "k"];

fn cfg(alpha: Option<f64>, ratio: Option<f64>, p_m: Option<f64>, p_s: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::default();
    c.alpha = alpha;
    c.lambda_s_ratio = ratio;
    c.p_m = p_m.map(hetcoop::model::PowerValue::Watts);
    c.p_s = Some(hetcoop::model::PowerValue::Watts(p_s));
    c.sigma2 = Some(0.0);
    c.k = Some(2);
    c
}

fn paper(extra: &[&'static str]) -> Vec<&'static str> {
    COMMON.iter().chain(extra).copied().collect()
}

/// The scenario behind a figure, with its origin tags.
pub fn preset(id: &str) -> Result<Loaded, CliError> {
    let loaded = match id {
        "fig2" => Loaded::tagged(
            cfg(Some(4.0), Some(50.0), Some(50.0), 1.0),
            &paper(&["alpha", "lambda_s_ratio", "p_m", "p_s"]),
            id,
        ),
        "fig3" => Loaded::tagged(cfg(None, Some(50.0), Some(50.0), 1.0), &paper(&["lambda_s_ratio", "p_m", "p_s"]), id),
        "fig4" => Loaded::tagged(cfg(None, None, None, 1.0), &paper(&["p_s"]), id),
        "fig5" => Loaded::tagged(cfg(Some(3.0), None, Some(50.0), 2.0), &paper(&["alpha", "p_m", "p_s"]), id),
        "fig6" => {
            let mut c = cfg(Some(4.0), None, Some(50.0), 2.0);
            c.bandwidth_hz = Some(20e6);
            Loaded::tagged(c, &paper(&["alpha", "p_m", "p_s", "bandwidth_hz"]), id)
        }
        "fig7" => {
            let mut c = cfg(Some(4.0), None, Some(50.0), 2.0);
            c.bandwidth_hz = Some(20e6);
            c.p_static = Some(20.0);
            c.p_backhaul = Some(1.0);
            c.n_users = Some(FIG7_N_USERS);
            c.n_max = Some(FIG7_N_MAX);
            c.p_max = Some(FIG7_P_MAX);
            Loaded::tagged(c, &paper(&["alpha", "p_m", "p_s", "bandwidth_hz", "p_static", "p_backhaul"]), id)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown figure id {other:?}; expected one of {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(loaded)
}

/// Header row and data rows of a figure.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

pub fn table(id: &str, cli: &Cli) -> Result<(Loaded, Table), CliError> {
    let loaded = preset(id)?;
    let st = analytic_settings(cli);
    let theta_col = if cli.linear { "theta" } else { "theta_db" };
    let theta_axis = |f: &mut dyn FnMut(f64) -> Result<Vec<f64>, CliError>| -> Result<Vec<Vec<f64>>, CliError> {
        parse_list(THETA_DB_AXIS)?
            .into_iter()
            .map(|db| {
                let x = if cli.linear { db_to_linear(db) } else { db };
                let mut row = vec![x];
                row.extend(f(db_to_linear(db))?);
                Ok(row)
            })
            .collect()
    };
    let ratio_axis = |loaded: &Loaded, f: &mut dyn FnMut(&mut Evaluator) -> Result<Vec<f64>, CliError>| {
        RATIO_GRID
            .iter()
            .map(|&ratio| {
                let s = loaded.with_scalar("lambda_s_ratio", ratio)?.resolve()?;
                let mut ev = Evaluator::new(s, st);
                let mut row = vec![ratio];
                row.extend(f(&mut ev)?);
                Ok(row)
            })
            .collect::<Result<Vec<_>, CliError>>()
    };
    let cols = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let ratio_note = format!(
        "lambda_s_ratio swept over [{}]",
        RATIO_GRID.iter().map(|&r| num(r)).collect::<Vec<_>>().join(", ")
    );
    use AssociationModel::{Cooperative as Co, NonCooperative as No};

    let table = match id {
        "fig2" => {
            let mut ev = Evaluator::new(loaded.resolve()?, st);
            let rows = theta_axis(&mut |t| Event::ALL.iter().map(|&e| ev.coverage(e, t)).collect())?;
            Table { columns: cols(&[theta_col, "A_m", "A_s", "B_m", "B_s"]), rows, notes: vec![] }
        }
        "fig3" => {
            let mut ev = Evaluator::new(loaded.resolve()?, st);
            let rows = theta_axis(&mut |t| Ok(vec![ev.overall(No, t)?, ev.overall(Co, t)?]))?;
            Table { columns: cols(&[theta_col, "p_cov_overall_no", "p_cov_overall_co"]), rows, notes: vec![] }
        }
        "fig4" => {
            let per_pm: Vec<Loaded> =
                FIG4_P_M.iter().map(|&pm| loaded.with_scalar("p_m", pm)).collect::<Result<_, _>>()?;
            let mut rows = Vec::new();
            for &ratio in &RATIO_GRID {
                let mut row = vec![ratio];
                for l in &per_pm {
                    let s = l.with_scalar("lambda_s_ratio", ratio)?.resolve()?;
                    row.push(Evaluator::new(s, st).overall(Co, FIG4_THETA)?);
                }
                rows.push(row);
            }
            let mut columns = vec!["lambda_s_ratio".to_string()];
            columns.extend(FIG4_P_M.iter().map(|pm| format!("p_cov_overall_co_pm{}", num(*pm))));
            Table {
                columns,
                rows,
                notes: vec![
                    ratio_note,
                    format!("theta = {} (linear) [paper]", num(FIG4_THETA)),
                    format!(
                        "p_m curves at [{}] W [default]",
                        FIG4_P_M.iter().map(|&p| num(p)).collect::<Vec<_>>().join(", ")
                    ),
                ],
            }
        }
        "fig5" => Table {
            columns: cols(&["lambda_s_ratio", "p_sbs_no", "p_sbs_co"]),
            rows: ratio_axis(&loaded, &mut |ev| Ok(vec![ev.assoc(No)?, ev.assoc(Co)?]))?,
            notes: vec![ratio_note],
        },
        "fig6" => Table {
            columns: cols(&["lambda_s_ratio", "tau_no", "tau_co", "rate_no_bps", "rate_co_bps"]),
            rows: ratio_axis(&loaded, &mut |ev| {
                let (a, b) = (ev.rate(No)?.tau, ev.rate(Co)?.tau);
                let bw = ev.s.bandwidth;
                Ok(vec![a, b, a * bw, b * bw])
            })?,
            notes: vec![ratio_note],
        },
        "fig7" => Table {
            columns: cols(&["lambda_s_ratio", "ee_no", "ee_co", "power_no", "power_co"]),
            rows: ratio_axis(&loaded, &mut |ev| {
                let (a, b) = (ev.efficiency(No)?, ev.efficiency(Co)?);
                Ok(vec![a.ee, b.ee, a.power, b.power])
            })?,
            notes: vec![ratio_note, "n_users, n_max and p_max are not given for this figure; see README".into()],
        },
        _ => unreachable!("preset() rejected unknown ids"),
    };
    Ok((loaded, table))
}

pub fn run(args: &FigureArgs, cli: &Cli) -> Result<Rendered, CliError> {
    let (loaded, table) = table(&args.id, cli)?;
    let s = loaded.resolve()?;
    let mut prov = Provenance::new(&format!("figure {}", args.id), &loaded, &s, None);
    for n in &table.notes {
        prov = prov.note(n.clone());
    }
    let mut body = prov.csv();
    body.push_str(&table.columns.join(","));
    body.push('\n');
    for row in &table.rows {
        body.push_str(&row.iter().map(|&v| num(v)).collect::<Vec<_>>().join(","));
        body.push('\n');
    }
    Ok(Rendered::ok(body))
}
