//! Built-in experiment configurations, cost-reduction reports, the
//! regime-dependent reproductive-ratio time series, and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{mixed_dfe_threshold, reproductive_ratio, Dfe, DfeKind};
use crate::error::{Error, Result};
use crate::model::{ControlVec, CostWeights, ModelParams, State};
use crate::scalar::Scalar;
use crate::solver::{
    fbs_solve, integrate_forward, total_cost, ControlMask, ControlTrajectory, FbsResult,
    FbsSettings, Grid, StateTrajectory, Trajectory,
};

/// The three built-in experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ScenarioId {
    S1,
    S2,
    S3,
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Self::S1),
            "S2" => Ok(Self::S2),
            "S3" => Ok(Self::S3),
            _ => Err(Error::UnknownScenario(s.to_string())),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
        })
    }
}

/// Adjustable knobs of a built-in scenario; everything else is fixed by the
/// scenario definition.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides<F> {
    pub c1: Option<F>,
    pub c2: Option<F>,
    pub xi: Option<F>,
    pub mask: Option<ControlMask>,
}

/// A fully specified experiment: model, objective, start state, grid, solver
/// tuning, and control availability.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<F> {
    pub label: String,
    pub params: ModelParams<F>,
    pub weights: CostWeights<F>,
    pub x0: State<F>,
    pub grid: Grid<F>,
    pub fbs: FbsSettings<F>,
    pub mask: ControlMask,
}

impl<F: Scalar> ScenarioConfig<F> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.weights.validate()?;
        self.x0.validate(&self.params)?;
        self.fbs.validate()?;
        Ok(())
    }
}

/// Outcome of one scenario run: the do-nothing cost, the optimized cost, the
/// relative reduction, the reproductive-ratio series along the optimal
/// control, and the full solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport<F> {
    pub label: String,
    pub cost_uncontrolled: F,
    pub cost_optimal: F,
    /// `(J0 - J*) / J0`; zero when the uncontrolled cost vanishes.
    pub relative_reduction: F,
    pub r0_series: Vec<F>,
    pub result: FbsResult<F>,
}

/// Builds one of the three built-in configurations, applying `overrides`.
///
/// Shared settings: recruitment `b = 0.01`, exit `delta = 0.01`,
/// recovery `gamma = 0.2`, treatment bound `eta_bar = 0.1`, unit control
/// weights `c3..c6 = 1`, horizon `T = 100` at `dt = 0.1`, start state
/// `(0.69, 0.01, 0, 0.29, 0.01, 0)`, default sweep tuning. The scenarios
/// differ in transmission, recruitment noncompliance, and the
/// noncompliance-spread bound:
///
/// | id | beta | xi  | mu_bar | nu_bar | c1 | c2   |
/// |----|------|-----|--------|--------|----|------|
/// | S1 | 0.4  | 0   | 0.1    | 0.1    | 1  | 0.1  |
/// | S2 | 0.6  | 0.3 | 0.2    | 0.1    | 1  | 0.01 |
/// | S3 | 0.4  | 0   | 0.5    | 0.1    | 1  | 0.1  |
pub fn builtin_scenario<F: Scalar>(
    id: ScenarioId,
    overrides: &Overrides<F>,
) -> Result<ScenarioConfig<F>> {
    let mut params = ModelParams {
        b: F::lit(0.01),
        delta: F::lit(0.01),
        beta: F::lit(0.4),
        gamma: F::lit(0.2),
        eta_bar: F::lit(0.1),
        xi: F::zero(),
        mu_bar: F::lit(0.1),
        nu_bar: F::lit(0.1),
    };
    let one = F::one();
    let mut weights = CostWeights::new(one, F::lit(0.1), one, one, one, one);
    match id {
        ScenarioId::S1 => {}
        ScenarioId::S2 => {
            params.beta = F::lit(0.6);
            params.xi = F::lit(0.3);
            params.mu_bar = F::lit(0.2);
            weights.c2 = F::lit(0.01);
        }
        ScenarioId::S3 => {
            params.mu_bar = F::lit(0.5);
        }
    }

    if let Some(c1) = overrides.c1 {
        weights.c1 = c1;
    }
    if let Some(c2) = overrides.c2 {
        weights.c2 = c2;
    }
    if let Some(xi) = overrides.xi {
        params.xi = xi;
    }

    let config = ScenarioConfig {
        label: id.to_string(),
        params,
        weights,
        x0: State::new(
            F::lit(0.69),
            F::lit(0.01),
            F::zero(),
            F::lit(0.29),
            F::lit(0.01),
            F::zero(),
        ),
        grid: Grid::new(F::lit(100.0), F::lit(0.1))?,
        fbs: FbsSettings::default(),
        mask: overrides.mask.unwrap_or_default(),
    };
    config.validate()?;
    Ok(config)
}

/// Runs one configuration: solves the do-nothing trajectory and the optimal
/// control, and reports both costs, their relative reduction, and the
/// reproductive-ratio series along the optimal control.
pub fn run_scenario<F: Scalar>(cfg: &ScenarioConfig<F>) -> Result<ScenarioReport<F>> {
    cfg.validate()?;
    let u0 = Trajectory::constant(cfg.grid, ControlVec::zero());
    let x_uncontrolled = integrate_forward(cfg.x0, &u0, cfg.params)?;
    let cost_uncontrolled = total_cost(&x_uncontrolled, &u0, cfg.weights)?;

    let result = fbs_solve(cfg.x0, cfg.params, cfg.weights, cfg.grid, &cfg.fbs, cfg.mask)?;
    let r0_series = r0_timeseries(&result.state, &result.control, cfg.params)?;

    let relative_reduction = if cost_uncontrolled > F::zero() {
        (cost_uncontrolled - result.total_cost) / cost_uncontrolled
    } else {
        F::zero()
    };
    Ok(ScenarioReport {
        label: cfg.label.clone(),
        cost_uncontrolled,
        cost_optimal: result.total_cost,
        relative_reduction,
        r0_series,
        result,
    })
}

/// Reproductive ratio at each node, evaluated at the disease-free
/// equilibrium the instantaneous control values select.
///
/// With the capacity `b/delta` strictly below the threshold
/// `(nu(t)+delta)/(mu_bar-mu(t))`, noncompliance dies out and the ratio is
/// taken at `(b/delta, 0)`; otherwise at the mixed point
/// `(threshold, b/delta - threshold)`. A saturated `mu(t) = mu_bar` pushes
/// the threshold to infinity and therefore always selects the first regime.
pub fn r0_timeseries<F: Scalar>(
    state: &StateTrajectory<F>,
    control: &ControlTrajectory<F>,
    params: ModelParams<F>,
) -> Result<Vec<F>> {
    if state.grid() != control.grid() {
        return Err(Error::GridMismatch);
    }
    let cap = params.capacity();
    control
        .iter()
        .map(|&u| {
            let threshold = mixed_dfe_threshold(params, u);
            let dfe = if cap < threshold {
                Dfe::new(DfeKind::ComplianceOnly, cap, F::zero())
            } else {
                Dfe::new(DfeKind::MixedXiZero, threshold, cap - threshold)
            };
            reproductive_ratio(dfe, params, u)
        })
        .collect()
}

/// Which scalar a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SweepKnob {
    C1,
    C2,
    Xi,
}

impl FromStr for SweepKnob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "xi" => Ok(Self::Xi),
            _ => Err(Error::UnknownKnob(s.to_string())),
        }
    }
}

impl fmt::Display for SweepKnob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::C1 => "c1",
            Self::C2 => "c2",
            Self::Xi => "xi",
        })
    }
}

/// Runs `base` once per knob value. Solves are independent (no warm starts)
/// and may execute in parallel; reports come back in input order.
pub fn sweep<F: Scalar>(
    base: &ScenarioConfig<F>,
    knob: SweepKnob,
    values: &[F],
) -> Result<Vec<ScenarioReport<F>>> {
    values
        .par_iter()
        .map(|&v| {
            let mut cfg = base.clone();
            match knob {
                SweepKnob::C1 => cfg.weights.c1 = v,
                SweepKnob::C2 => cfg.weights.c2 = v,
                SweepKnob::Xi => cfg.params.xi = v,
            }
            cfg.label = format!("{} {knob}={v}", base.label);
            run_scenario(&cfg)
        })
        .collect()
}
