//! CSV and JSON writers. All floating values are printed with 17
//! significant digits so files round-trip losslessly and rerunning a
//! command reproduces its outputs byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use sirnc::solver::{ControlTrajectory, CostateTrajectory, StateTrajectory};

use crate::CliError;

pub const CSV_HEADER: &str = "t,S,I,R,S_star,I_star,R_star,alpha,eta,mu,nu,\
                              p_S,p_I,p_R,p_Sstar,p_Istar,p_Rstar,r0_regime";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders one trajectory as CSV: time, compartments, controls, adjoints
/// (blank without a costate solve), and the regime-dependent reproductive
/// ratio. Compartment values are clamped at zero on output; the integrator
/// only ever produces negative values within its round-off tolerance.
pub fn trajectory_csv(
    state: &StateTrajectory<f64>,
    control: &ControlTrajectory<f64>,
    costate: Option<&CostateTrajectory<f64>>,
    r0: &[f64],
) -> Result<String, CliError> {
    let n = state.len();
    if control.len() != n || r0.len() != n || costate.is_some_and(|pc| pc.len() != n) {
        return Err(CliError::from(sirnc::Error::GridMismatch));
    }
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for k in 0..n {
        let t = state.grid().time(k);
        let x = state[k].clamped_nonneg().to_array();
        let u = control[k].to_array();
        write!(out, "{}", fmt(t)).unwrap();
        for v in x {
            write!(out, ",{}", fmt(v)).unwrap();
        }
        for v in u {
            write!(out, ",{}", fmt(v)).unwrap();
        }
        match costate {
            Some(pc) => {
                for v in pc[k].to_array() {
                    write!(out, ",{}", fmt(v)).unwrap();
                }
            }
            None => out.push_str(",,,,,,"),
        }
        writeln!(out, ",{}", fmt(r0[k])).unwrap();
    }
    Ok(out)
}

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

/// Summary of one optimization run.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub cost_uncontrolled: f64,
    pub cost_optimal: f64,
    pub relative_reduction: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RunSummary {
    pub fn from_report(report: &sirnc::scenarios::ScenarioReport<f64>) -> Self {
        Self {
            label: report.label.clone(),
            cost_uncontrolled: report.cost_uncontrolled,
            cost_optimal: report.cost_optimal,
            relative_reduction: report.relative_reduction,
            iterations: report.result.iterations,
            converged: report.result.converged,
        }
    }
}

/// Aggregate emitted by `sweep`: one summary per knob value, input order.
#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub knob: String,
    pub values: Vec<f64>,
    pub runs: Vec<RunSummary>,
}
