//! Compartmental dynamics for an SIR epidemic in a population split into
//! compliant (`S`, `I`, `R`) and noncompliant (`S*`, `I*`, `R*`) groups.
//!
//! Noncompliance spreads by mass-action contact with the noncompliant
//! population `N* = S* + I* + R*`, in parallel with the disease itself.
//! Four time-dependent policy controls act on the flows:
//!
//! * `alpha` — transmission reduction among the compliant (social distancing),
//! * `eta`  — extra recovery effort for compliant infected (treatment),
//! * `mu`   — suppression of the noncompliance contagion (counter-messaging),
//! * `nu`   — direct recruitment of noncompliant back to compliance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Model rate constants and control bounds.
///
/// `xi` is the noncompliant fraction of inflowing (newly susceptible)
/// population; `b` and `delta` are inflow and outflow rates, so the total
/// population relaxes toward `b/delta`. The bounds `eta_bar`, `mu_bar`,
/// `nu_bar` cap the corresponding controls; `alpha` is always capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<F> {
    /// Population inflow rate.
    pub b: F,
    /// Population outflow (removal) rate.
    pub delta: F,
    /// Disease transmission rate.
    pub beta: F,
    /// Baseline recovery rate.
    pub gamma: F,
    /// Upper bound for the treatment control `eta`.
    pub eta_bar: F,
    /// Noncompliant fraction of the population inflow, in `[0, 1]`.
    pub xi: F,
    /// Maximum spread rate of noncompliance; the control `mu <= mu_bar`
    /// reduces the effective rate to `mu_bar - mu`.
    pub mu_bar: F,
    /// Upper bound for the compliance-recruitment control `nu`.
    pub nu_bar: F,
}

impl<F: Scalar> ModelParams<F> {
    /// Carrying capacity `b/delta` of the total population.
    pub fn capacity(&self) -> F {
        self.b / self.delta
    }

    /// Checks positivity/sign constraints and the standing assumption
    /// `b/delta >= 1` (the population is normalized to at least unit size).
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("b", self.b),
            ("delta", self.delta),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("eta_bar", self.eta_bar),
            ("xi", self.xi),
            ("mu_bar", self.mu_bar),
            ("nu_bar", self.nu_bar),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        for (name, v) in [
            ("b", self.b),
            ("delta", self.delta),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if v <= F::zero() {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("eta_bar", self.eta_bar),
            ("mu_bar", self.mu_bar),
            ("nu_bar", self.nu_bar),
        ] {
            if v < F::zero() {
                return Err(Error::InvalidParams(format!("{name} must be nonnegative")));
            }
        }
        if self.xi < F::zero() || self.xi > F::one() {
            return Err(Error::InvalidParams("xi must lie in [0, 1]".into()));
        }
        if self.capacity() < F::one() {
            return Err(Error::InvalidParams(
                "b/delta must be at least 1 (normalized population)".into(),
            ));
        }
        Ok(())
    }
}

/// Compartment occupancies `(S, I, R, S*, I*, R*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State<F> {
    #[serde(rename = "S")]
    pub s: F,
    #[serde(rename = "I")]
    pub i: F,
    #[serde(rename = "R")]
    pub r: F,
    #[serde(rename = "S_star")]
    pub s_star: F,
    #[serde(rename = "I_star")]
    pub i_star: F,
    #[serde(rename = "R_star")]
    pub r_star: F,
}

/// Time derivative of a [`State`]; same component layout.
pub type StateDerivative<F> = State<F>;

/// Component names in storage order, used for diagnostics and CSV columns.
pub const COMPONENT_NAMES: [&str; 6] = ["S", "I", "R", "S_star", "I_star", "R_star"];

impl<F: Scalar> State<F> {
    pub fn new(s: F, i: F, r: F, s_star: F, i_star: F, r_star: F) -> Self {
        Self { s, i, r, s_star, i_star, r_star }
    }

    pub fn zero() -> Self {
        let z = F::zero();
        Self::new(z, z, z, z, z, z)
    }

    pub fn to_array(self) -> [F; 6] {
        [self.s, self.i, self.r, self.s_star, self.i_star, self.r_star]
    }

    pub fn from_array(a: [F; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    /// Size of the noncompliant population, `N* = S* + I* + R*`.
    pub fn n_star(&self) -> F {
        self.s_star + self.i_star + self.r_star
    }

    /// Total infected population `I + I*`.
    pub fn infected(&self) -> F {
        self.i + self.i_star
    }

    /// Total population across all six compartments.
    pub fn total(&self) -> F {
        self.s + self.i + self.r + self.s_star + self.i_star + self.r_star
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Validates an *entry-point* state: finite, componentwise nonnegative
    /// (round-off down to `-1e-12` is tolerated), and total at most the
    /// carrying capacity `b/delta` (up to round-off).
    pub fn validate(&self, params: &ModelParams<F>) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidState("state has a non-finite component".into()));
        }
        let tol = F::lit(1e-12);
        for (name, v) in COMPONENT_NAMES.iter().zip(self.to_array()) {
            if v < -tol {
                return Err(Error::InvalidState(format!("{name} is negative ({v})")));
            }
        }
        let cap = params.capacity();
        let slack = F::lit(1e-9) * cap.max(F::one());
        if self.total() > cap + slack {
            return Err(Error::InvalidState(format!(
                "total population {} exceeds b/delta = {}",
                self.total(),
                cap
            )));
        }
        Ok(())
    }

    /// Copy with tiny negative round-off clamped to zero, for reporting.
    pub fn clamped_nonneg(self) -> Self {
        Self::from_array(self.to_array().map(|v| v.max(F::zero())))
    }

    /// Explicit Euler step `self + dt * deriv`.
    pub(crate) fn euler_step(self, deriv: StateDerivative<F>, dt: F) -> Self {
        let x = self.to_array();
        let d = deriv.to_array();
        Self::from_array([
            x[0] + dt * d[0],
            x[1] + dt * d[1],
            x[2] + dt * d[2],
            x[3] + dt * d[3],
            x[4] + dt * d[4],
            x[5] + dt * d[5],
        ])
    }
}

/// Control four-vector `(alpha, eta, mu, nu)`.
///
/// Admissible controls live in the box `[0,1] x [0,eta_bar] x [0,mu_bar]
/// x [0,nu_bar]` determined by [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlVec<F> {
    pub alpha: F,
    pub eta: F,
    pub mu: F,
    pub nu: F,
}

impl<F: Scalar> ControlVec<F> {
    pub fn new(alpha: F, eta: F, mu: F, nu: F) -> Self {
        Self { alpha, eta, mu, nu }
    }

    pub fn zero() -> Self {
        let z = F::zero();
        Self::new(z, z, z, z)
    }

    pub fn to_array(self) -> [F; 4] {
        [self.alpha, self.eta, self.mu, self.nu]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Checks membership in the admissible box.
    pub fn validate(&self, params: &ModelParams<F>) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::ControlOutOfBounds(
                "control has a non-finite component".into(),
            ));
        }
        let bounds = [
            ("alpha", self.alpha, F::one()),
            ("eta", self.eta, params.eta_bar),
            ("mu", self.mu, params.mu_bar),
            ("nu", self.nu, params.nu_bar),
        ];
        for (name, v, hi) in bounds {
            if v < F::zero() || v > hi {
                return Err(Error::ControlOutOfBounds(format!(
                    "{name} = {v} outside [0, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Projects componentwise onto the admissible box.
    pub fn clamped(self, params: &ModelParams<F>) -> Self {
        Self::new(
            self.alpha.clip(F::zero(), F::one()),
            self.eta.clip(F::zero(), params.eta_bar),
            self.mu.clip(F::zero(), params.mu_bar),
            self.nu.clip(F::zero(), params.nu_bar),
        )
    }
}

/// Weights of the running cost
/// `c1 (I + I*) + c2 N* + (c3 alpha^2 + c4 eta^2 + c5 mu^2 + c6 nu^2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostWeights<F> {
    pub c1: F,
    pub c2: F,
    pub c3: F,
    pub c4: F,
    pub c5: F,
    pub c6: F,
}

impl<F: Scalar> CostWeights<F> {
    pub fn new(c1: F, c2: F, c3: F, c4: F, c5: F, c6: F) -> Self {
        Self { c1, c2, c3, c4, c5, c6 }
    }

    /// State weights must be nonnegative; quadratic control weights must be
    /// strictly positive (they divide the control projections).
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("c5", self.c5),
            ("c6", self.c6),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidWeights(format!("{name} must be finite")));
            }
        }
        if self.c1 < F::zero() || self.c2 < F::zero() {
            return Err(Error::InvalidWeights("c1 and c2 must be nonnegative".into()));
        }
        for (name, v) in [("c3", self.c3), ("c4", self.c4), ("c5", self.c5), ("c6", self.c6)] {
            if v <= F::zero() {
                return Err(Error::InvalidWeights(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Vector field of the compliance-structured SIR system.
///
/// Rejects non-finite inputs and controls outside the admissible box;
/// tiny negative compartments from integrator round-off are tolerated.
pub fn rhs<F: Scalar>(
    x: State<F>,
    u: ControlVec<F>,
    params: ModelParams<F>,
) -> Result<StateDerivative<F>> {
    if !x.is_finite() {
        return Err(Error::InvalidState("state has a non-finite component".into()));
    }
    u.validate(&params)?;
    Ok(rhs_unchecked(x, u, params))
}

/// `rhs` without validation, for integrator inner loops.
///
/// Each pairwise flow is computed once and reused with opposite signs, so the
/// population balance `sum(dx) = b - delta * sum(x)` holds to round-off.
pub(crate) fn rhs_unchecked<F: Scalar>(
    x: State<F>,
    u: ControlVec<F>,
    params: ModelParams<F>,
) -> StateDerivative<F> {
    let ModelParams { b, delta, beta, gamma, xi, mu_bar, .. } = params;
    let n_star = x.n_star();
    let infected = x.infected();
    let spread = mu_bar - u.mu; // effective noncompliance spread rate

    // Flows between paired compartments.
    let infect_c = beta * (F::one() - u.alpha) * x.s * infected; // S  -> I
    let infect_n = beta * x.s_star * infected; //                   S* -> I*
    let recover_c = (gamma + u.eta) * x.i; //                       I  -> R
    let recover_n = gamma * x.i_star; //                            I* -> R*
    let defect_s = spread * x.s * n_star; //                        S  -> S*
    let defect_i = spread * x.i * n_star; //                        I  -> I*
    let defect_r = spread * x.r * n_star; //                        R  -> R*
    let return_s = u.nu * x.s_star; //                              S* -> S
    let return_i = u.nu * x.i_star; //                              I* -> I
    let return_r = u.nu * x.r_star; //                              R* -> R

    State {
        s: (F::one() - xi) * b - infect_c - defect_s + return_s - delta * x.s,
        i: infect_c - recover_c - defect_i + return_i - delta * x.i,
        r: recover_c - defect_r + return_r - delta * x.r,
        s_star: xi * b - infect_n + defect_s - return_s - delta * x.s_star,
        i_star: infect_n - recover_n + defect_i - return_i - delta * x.i_star,
        r_star: recover_n + defect_r - return_r - delta * x.r_star,
    }
}

/// Total population at time `t` given initial total `n0`:
/// `N(t) = b/delta + (n0 - b/delta) exp(-delta t)`.
pub fn population_closed_form<F: Scalar>(t: F, n0: F, params: ModelParams<F>) -> F {
    let cap = params.capacity();
    cap + (n0 - cap) * (-params.delta * t).exp()
}

/// Running cost
/// `c1 (I + I*) + c2 N* + (c3 alpha^2 + c4 eta^2 + c5 mu^2 + c6 nu^2) / 2`.
pub fn running_cost<F: Scalar>(x: State<F>, u: ControlVec<F>, w: CostWeights<F>) -> F {
    let half = F::lit(0.5);
    let quad = w.c3 * u.alpha * u.alpha
        + w.c4 * u.eta * u.eta
        + w.c5 * u.mu * u.mu
        + w.c6 * u.nu * u.nu;
    w.c1 * x.infected() + w.c2 * x.n_star() + half * quad
}
