//! Subcommand implementations.

use std::path::{Path, PathBuf};

use sirnc::analysis::{
    classify_stability, compute_dfes, reproductive_ratio, Dfe, DfeKind, Stability, TheoremCase,
};
use sirnc::model::ControlVec;
use sirnc::scenarios::{
    builtin_scenario, r0_timeseries, run_scenario, sweep, Overrides, ScenarioConfig, ScenarioId,
    SweepKnob,
};
use sirnc::solver::{fbs_solve, integrate_forward, total_cost, ControlMask, Trajectory};

use crate::config::RunConfig;
use crate::output::{
    to_pretty_json, trajectory_csv, write_file, RunSummary, SweepSummary,
};
use crate::{CliError, ControlOverrides, MaskFlags};

fn effective_config(
    path: &Path,
    overrides: &ControlOverrides,
    dump: Option<&Path>,
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(v) = overrides.alpha {
        cfg.control.alpha = v;
    }
    if let Some(v) = overrides.eta {
        cfg.control.eta = v;
    }
    if let Some(v) = overrides.mu {
        cfg.control.mu = v;
    }
    if let Some(v) = overrides.nu {
        cfg.control.nu = v;
    }
    cfg.validate()?;
    if let Some(dump_path) = dump {
        write_file(dump_path, &cfg.to_json())?;
    }
    Ok(cfg)
}

pub fn cmd_simulate(
    config: &Path,
    overrides: &ControlOverrides,
    output: &Path,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = effective_config(config, overrides, dump)?;
    let grid = cfg.grid.build()?;
    let u = Trajectory::constant(grid, cfg.control);
    let x = integrate_forward(cfg.x0, &u, cfg.params)?;
    let r0 = r0_timeseries(&x, &u, cfg.params)?;
    write_file(output, &trajectory_csv(&x, &u, None, &r0)?)
}

pub fn cmd_optimize(
    config: &Path,
    mask_flags: &MaskFlags,
    output: &Path,
    summary: &Path,
    strict: bool,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = effective_config(config, &ControlOverrides::default(), dump)?;
    let grid = cfg.grid.build()?;
    let mask = mask_flags.apply_to(cfg.mask);

    let u0 = Trajectory::constant(grid, ControlVec::zero());
    let x0_run = integrate_forward(cfg.x0, &u0, cfg.params)?;
    let cost_uncontrolled = total_cost(&x0_run, &u0, cfg.weights)?;

    let result = fbs_solve(cfg.x0, cfg.params, cfg.weights, grid, &cfg.fbs.build(), mask)?;
    let r0 = r0_timeseries(&result.state, &result.control, cfg.params)?;
    write_file(
        output,
        &trajectory_csv(&result.state, &result.control, Some(&result.costate), &r0)?,
    )?;

    let relative_reduction = if cost_uncontrolled > 0.0 {
        (cost_uncontrolled - result.total_cost) / cost_uncontrolled
    } else {
        0.0
    };
    let run = RunSummary {
        label: "optimize".to_string(),
        cost_uncontrolled,
        cost_optimal: result.total_cost,
        relative_reduction,
        iterations: result.iterations,
        converged: result.converged,
    };
    write_file(summary, &to_pretty_json(&run))?;

    if strict && !result.converged {
        return Err(CliError::Unconverged(result.iterations));
    }
    Ok(())
}

/// Which equilibria `analyze` should report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfeFilter {
    All,
    ComplianceOnly,
    Mixed,
}

impl std::str::FromStr for DfeFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Self::All),
            "compliance-only" => Ok(Self::ComplianceOnly),
            "mixed" => Ok(Self::Mixed),
            _ => Err(format!(
                "unknown equilibrium kind `{s}` (expected all, compliance-only, or mixed)"
            )),
        }
    }
}

impl DfeFilter {
    fn admits(self, kind: DfeKind) -> bool {
        match self {
            Self::All => true,
            Self::ComplianceOnly => kind == DfeKind::ComplianceOnly,
            Self::Mixed => matches!(kind, DfeKind::MixedXiZero | DfeKind::MixedXiPositive),
        }
    }
}

/// Stability verdict of one equilibrium; absent when the classification
/// theorem's case hypotheses do not cover it (for example the
/// compliance-only point once the mixed equilibrium has branched off).
#[derive(Debug, serde::Serialize)]
struct StabilityView {
    classification: Stability,
    theorem_case: TheoremCase,
    h5_satisfied: bool,
    h5_eigenvalues: [f64; 6],
}

#[derive(Debug, serde::Serialize)]
struct DfeReport {
    dfe: Dfe<f64>,
    r0: f64,
    stability: Option<StabilityView>,
}

pub fn cmd_analyze(
    config: &Path,
    overrides: &ControlOverrides,
    filter: DfeFilter,
    output: Option<&Path>,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = effective_config(config, overrides, dump)?;
    let dfes = compute_dfes(cfg.params, cfg.control)?;
    let mut reports = Vec::new();
    for dfe in dfes.into_iter().filter(|dfe| filter.admits(dfe.kind)) {
        let r0 = reproductive_ratio(dfe, cfg.params, cfg.control)?;
        let stability = match classify_stability(dfe, cfg.params, cfg.control) {
            Ok(report) => Some(StabilityView {
                classification: report.classification,
                theorem_case: report.theorem_case,
                h5_satisfied: report.h5_satisfied,
                h5_eigenvalues: report.h5_eigenvalues,
            }),
            Err(sirnc::Error::HypothesisViolation(_)) => None,
            Err(e) => return Err(e.into()),
        };
        reports.push(DfeReport { dfe, r0, stability });
    }
    if reports.is_empty() {
        return Err(CliError::config(
            "no disease-free equilibrium of the requested kind exists under these parameters"
                .to_string(),
        ));
    }
    let text = to_pretty_json(&reports);
    print!("{text}");
    if let Some(path) = output {
        write_file(path, &text)?;
    }
    Ok(())
}

fn scenario_config(
    id: ScenarioId,
    c1: Option<f64>,
    c2: Option<f64>,
    xi: Option<f64>,
    mask_flags: &MaskFlags,
) -> Result<ScenarioConfig<f64>, CliError> {
    let overrides = Overrides {
        c1,
        c2,
        xi,
        mask: Some(mask_flags.apply_to(ControlMask::default())),
    };
    builtin_scenario(id, &overrides).map_err(CliError::from)
}

fn report_csv(report: &sirnc::scenarios::ScenarioReport<f64>) -> Result<String, CliError> {
    trajectory_csv(
        &report.result.state,
        &report.result.control,
        Some(&report.result.costate),
        &report.r0_series,
    )
}

pub fn cmd_scenario(
    id: &str,
    c1: Option<f64>,
    c2: Option<f64>,
    xi: Option<f64>,
    mask_flags: &MaskFlags,
    outdir: &Path,
    strict: bool,
) -> Result<(), CliError> {
    let id: ScenarioId = id.parse()?;
    let cfg = scenario_config(id, c1, c2, xi, mask_flags)?;
    let report = run_scenario(&cfg)?;
    write_file(&outdir.join(format!("{id}.csv")), &report_csv(&report)?)?;
    let summary = RunSummary::from_report(&report);
    write_file(&outdir.join(format!("{id}.json")), &to_pretty_json(&summary))?;
    if strict && !report.result.converged {
        return Err(CliError::Unconverged(report.result.iterations));
    }
    Ok(())
}

pub fn cmd_sweep(
    id: &str,
    knob: &str,
    values: &str,
    mask_flags: &MaskFlags,
    outdir: &Path,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let id: ScenarioId = id.parse()?;
    let knob: SweepKnob = knob.parse()?;
    let values: Vec<f64> = values
        .split(',')
        .filter(|chunk| !chunk.trim().is_empty())
        .map(|chunk| {
            chunk
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::config(format!("bad sweep value `{chunk}`: {e}")))
        })
        .collect::<Result<_, _>>()?;

    if let Some(n) = jobs {
        // Ignore the error if a global pool already exists (repeat calls in
        // one process); solves are deterministic regardless of thread count.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let base = scenario_config(id, None, None, None, mask_flags)?;
    let reports = sweep(&base, knob, &values)?;

    let mut runs = Vec::with_capacity(reports.len());
    for (i, report) in reports.iter().enumerate() {
        let path: PathBuf = outdir.join(format!("{id}_{knob}_{i:02}.csv"));
        write_file(&path, &report_csv(report)?)?;
        runs.push(RunSummary::from_report(report));
    }
    let aggregate = SweepSummary {
        scenario: id.to_string(),
        knob: knob.to_string(),
        values,
        runs,
    };
    write_file(
        &outdir.join(format!("{id}_{knob}_sweep.json")),
        &to_pretty_json(&aggregate),
    )
}
