//! Check execution, report serialization, and parameter sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use corrtherm::laws::{self, EquilibriumVerdict, LawReport, DEFAULT_IDENTITY_TOL, DEFAULT_LAW_TOL};
use corrtherm::optimize::{maximize_anomalous_flow, maximize_cop, SearchResult};
use corrtherm::process::{planar_rotation, Transition};
use corrtherm::states::correlated_thermal_pair;
use corrtherm::{BipartiteLayout, Error};

use crate::scenario::{BuiltScenario, CheckName, Objective, Scenario, ScenarioKind};

/// Everything a run produced; serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub reports: Vec<LawReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<EquilibriumVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchResult>,
    pub all_passed: bool,
}

fn run_check(
    check: CheckName,
    built: &BuiltScenario,
    tol: Option<f64>,
) -> anyhow::Result<LawReport> {
    let transition = || -> anyhow::Result<&Transition> {
        built
            .transition
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("check {check:?} needs a transition in this scenario"))
    };
    let law_tol = tol.unwrap_or(DEFAULT_LAW_TOL);
    let identity_tol = tol.unwrap_or(DEFAULT_IDENTITY_TOL);
    let report = match check {
        CheckName::FirstLaw => laws::first_law_report_with_tol(transition()?, identity_tol)?,
        CheckName::InfoSecondLaw => laws::info_second_law_report_with_tol(transition()?, law_tol)?,
        CheckName::LandauerGeneralized => laws::landauer_report_with_tol(transition()?, law_tol)?,
        CheckName::LandauerClassic => {
            laws::classic_landauer_report_with_tol(transition()?, law_tol)?
        }
        CheckName::Clausius => laws::clausius_report_with_tol(transition()?, law_tol)?,
        CheckName::Cop => laws::cop_report_with_tol(transition()?, law_tol)?,
        CheckName::ClausiusChain => laws::clausius_chain_report_with_tol(transition()?, law_tol)?,
        CheckName::Zeroth => {
            let setup = built
                .zeroth
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("check zeroth needs a zeroth-kind scenario"))?;
            laws::zeroth_report_with_tol(
                &setup.rho,
                &setup.dims,
                &setup.hamiltonians,
                setup.temperature,
                identity_tol,
            )?
        }
    };
    Ok(report)
}

/// Runs every requested check and collects the equilibrium verdict for
/// zeroth scenarios.
pub fn run_scenario(scenario: &Scenario, tol: Option<f64>) -> anyhow::Result<RunReport> {
    let built = scenario.build()?;
    let mut reports = Vec::new();
    for &check in &built.checks {
        reports.push(run_check(check, &built, tol)?);
    }
    let equilibrium = match &built.zeroth {
        Some(setup) => Some(laws::zeroth_law_check(
            &setup.rho,
            &setup.dims,
            &setup.hamiltonians,
            setup.temperature,
        )?),
        None => None,
    };
    let all_passed = reports.iter().all(|r| r.verdict);
    Ok(RunReport {
        scenario: scenario.clone(),
        reports,
        equilibrium,
        search: None,
        all_passed,
    })
}

/// Runs the unitary search requested by the scenario and folds the
/// search's own certification reports into the outcome. Searches always
/// certify at their fixed internal tolerance; `--tol` does not apply.
pub fn run_optimize(scenario: &Scenario) -> anyhow::Result<RunReport> {
    let built = scenario.build()?;
    let setup = match &built.two_bath {
        Some(setup) => setup,
        None => bail!("optimize needs a two_bath scenario"),
    };
    let cfg = scenario.optimizer.unwrap_or_default();
    let search = match scenario.objective {
        Objective::AnomalousFlow => maximize_anomalous_flow(
            &setup.rho, &setup.h_a, &setup.h_b, setup.t_a, setup.t_b, &cfg,
        )?,
        Objective::Cop => maximize_cop(
            &setup.rho, &setup.h_a, &setup.h_b, setup.t_a, setup.t_b, &cfg,
        )?,
    };
    let mut reports = vec![search.clausius.clone()];
    if let Some(cop) = &search.cop {
        reports.push(cop.clone());
    }
    let all_passed = reports.iter().all(|r| r.verdict);
    Ok(RunReport {
        scenario: scenario.clone(),
        reports,
        equilibrium: None,
        search: Some(search),
        all_passed,
    })
}

/// One row of a sweep CSV.
struct SweepRow {
    value: f64,
    heat_from_cold: f64,
    delta_mi_nats: f64,
    clausius_slack: f64,
    cop: Option<f64>,
    carnot_slack: Option<f64>,
}

fn evaluate_two_bath_row(t: &Transition, value: f64, tol: Option<f64>) -> anyhow::Result<SweepRow> {
    let law_tol = tol.unwrap_or(DEFAULT_LAW_TOL);
    let clausius = laws::clausius_report_with_tol(t, law_tol)?;
    if !clausius.verdict {
        bail!(
            "Clausius bound failed at swept value {value}: slack {:.3e}",
            clausius.slack
        );
    }
    let (cop, carnot_slack) = match laws::cop_report_with_tol(t, law_tol) {
        Ok(report) => {
            if !report.verdict {
                bail!(
                    "Carnot bound failed at swept value {value}: slack {:.3e}",
                    report.slack
                );
            }
            (Some(report.quantities["cop"]), Some(report.slack))
        }
        Err(Error::CopUndefined { .. }) => (None, None),
        Err(other) => return Err(other.into()),
    };
    Ok(SweepRow {
        value,
        heat_from_cold: clausius.quantities["heat_extracted_from_first"],
        delta_mi_nats: clausius.quantities["delta_mutual_information_nats"],
        clausius_slack: clausius.slack,
        cop,
        carnot_slack,
    })
}

/// Parses `start:stop:steps`; `stop` may be the keyword `max` when the
/// swept parameter is `alpha`.
fn parse_range(range: &str, allow_max: bool) -> anyhow::Result<(f64, Option<f64>, usize)> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        bail!("--range must look like start:stop:steps, got {range:?}");
    }
    let start: f64 = parts[0]
        .parse()
        .with_context(|| format!("range start {:?}", parts[0]))?;
    let stop: Option<f64> = if parts[1] == "max" {
        if !allow_max {
            bail!("range stop \"max\" is only valid when sweeping alpha");
        }
        None
    } else {
        Some(
            parts[1]
                .parse()
                .with_context(|| format!("range stop {:?}", parts[1]))?,
        )
    };
    let steps: usize = parts[2]
        .parse()
        .with_context(|| format!("range steps {:?}", parts[2]))?;
    if steps < 2 {
        bail!("--range needs at least 2 steps");
    }
    Ok((start, stop, steps))
}

fn grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64)
        .collect()
}

/// Sweeps one numeric parameter of a two-bath scenario and renders one
/// CSV row per grid point, in grid order.
pub fn run_sweep(
    scenario: &Scenario,
    param: &str,
    range: &str,
    tol: Option<f64>,
) -> anyhow::Result<String> {
    if scenario.kind != ScenarioKind::TwoBath {
        bail!("sweep supports two_bath scenarios, got {:?}", scenario.kind);
    }
    let base = scenario.build()?;
    let setup = base.two_bath.as_ref().expect("two_bath scenario");
    let cfg = scenario.optimizer.unwrap_or_default();

    let mut rows = Vec::new();
    match param {
        "theta" => {
            let (start, stop, steps) = parse_range(range, false)?;
            let stop = stop.expect("numeric stop");
            for theta in grid(start, stop, steps) {
                let t = Transition::from_unitary(
                    setup.rho.clone(),
                    &planar_rotation(4, 1, 2, theta),
                    BipartiteLayout::new(2, 2),
                    setup.h_a.clone(),
                    setup.h_b.clone(),
                    Some(setup.t_a),
                    setup.t_b,
                )?;
                rows.push(evaluate_two_bath_row(&t, theta, tol)?);
            }
        }
        "alpha" | "t_a" | "t_b" => {
            let (start, stop, steps) = parse_range(range, param == "alpha")?;
            let stop = match stop {
                Some(v) => v,
                None => setup.alpha,
            };
            for value in grid(start, stop, steps) {
                let (alpha, t_a, t_b) = match param {
                    "alpha" => (value, setup.t_a, setup.t_b),
                    "t_a" => (setup.alpha, value, setup.t_b),
                    _ => (setup.alpha, setup.t_a, value),
                };
                let rho = correlated_thermal_pair(&setup.h_a, &setup.h_b, t_a, t_b, alpha)
                    .with_context(|| format!("swept value {value}"))?;
                let search = maximize_anomalous_flow(&rho, &setup.h_a, &setup.h_b, t_a, t_b, &cfg)?;
                let clausius = &search.clausius;
                let (cop, carnot_slack) = match &search.cop {
                    Some(report) => (Some(report.quantities["cop"]), Some(report.slack)),
                    None => (None, None),
                };
                rows.push(SweepRow {
                    value,
                    heat_from_cold: search.best_objective,
                    delta_mi_nats: clausius.quantities["delta_mutual_information_nats"],
                    clausius_slack: clausius.slack,
                    cop,
                    carnot_slack,
                });
            }
        }
        other => bail!("unknown sweep parameter {other:?}; use theta, alpha, t_a, or t_b"),
    }

    let mut csv = String::from("param,delta_q_a,delta_i_nats,clausius_slack,cop,carnot_slack\n");
    for row in rows {
        let cop = row.cop.map(|v| v.to_string()).unwrap_or_default();
        let carnot = row.carnot_slack.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.value, row.heat_from_cold, row.delta_mi_nats, row.clausius_slack, cop, carnot
        )
        .expect("write to string");
    }
    Ok(csv)
}

/// Renders the law reports as a summary CSV table.
pub fn summary_csv(report: &RunReport) -> String {
    let mut csv = String::from("law,lhs,rhs,slack,tol,verdict\n");
    for r in &report.reports {
        let law = serde_json::to_value(r.law)
            .expect("law serializes")
            .as_str()
            .expect("law is a string")
            .to_string();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            law,
            r.lhs,
            r.rhs,
            r.slack,
            r.tol,
            if r.verdict { "pass" } else { "fail" }
        )
        .expect("write to string");
    }
    csv
}

/// Writes `report.json` and `summary.csv` into `out`, returning the paths.
pub fn write_outputs(report: &RunReport, out: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;
    let json_path = out.join("report.json");
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(&json_path, &json)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    let csv_path = out.join("summary.csv");
    std::fs::write(&csv_path, summary_csv(report))
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    Ok((json_path, csv_path))
}

/// Human-readable per-report lines for stdout.
pub fn print_summary(report: &RunReport) {
    for r in &report.reports {
        println!(
            "{:<22} {}  slack {:+.3e} (tol {:.0e})",
            format!("{:?}", r.law),
            if r.verdict { "PASS" } else { "FAIL" },
            r.slack,
            r.tol
        );
        println!("    {}", r.narrative);
    }
    if let Some(eq) = &report.equilibrium {
        println!(
            "equilibrium: {} (work witness {:+.9e})",
            if eq.in_equilibrium { "yes" } else { "NO" },
            eq.work_witness.value
        );
        for reason in &eq.reasons {
            println!("    reason: {reason:?}");
        }
    }
    if let Some(search) = &report.search {
        println!(
            "search: best objective {:+.9e} after {} recorded iterations",
            search.best_objective,
            search.trace.len()
        );
    }
}
