//! Forward state integration, the adjoint (costate) system, the pointwise
//! control projection, and the cost functional.

use crate::error::{Error, Result};
use crate::model::{
    rhs_unchecked, running_cost, ControlVec, CostWeights, ModelParams, State, COMPONENT_NAMES,
};
use crate::scalar::Scalar;

use super::grid::{ControlTrajectory, CostateTrajectory, StateTrajectory, Trajectory};
use super::CostateVec;

/// Components more negative than this abort integration: genuine blow-up
/// rather than round-off.
const NEGATIVITY_TOL: f64 = 1e-9;

/// Integrates the state forward from `x0` with explicit Euler steps, reading
/// the control at the left node of each step.
///
/// Fails with `NonFiniteState` on overflow and `NegativityBreach` if a
/// compartment drops below `-1e-9`; round-off-scale negatives are carried.
pub fn integrate_forward<F: Scalar>(
    x0: State<F>,
    u: &ControlTrajectory<F>,
    params: ModelParams<F>,
) -> Result<StateTrajectory<F>> {
    params.validate()?;
    x0.validate(&params)?;
    for uk in u.iter() {
        uk.validate(&params)?;
    }
    let grid = u.grid();
    let dt = grid.dt();
    let neg_tol = F::lit(-NEGATIVITY_TOL);

    let mut values = Vec::with_capacity(grid.n_nodes());
    values.push(x0);
    let mut x = x0;
    for k in 0..grid.n_steps() {
        let d = rhs_unchecked(x, u[k], params);
        x = x.euler_step(d, dt);
        if !x.is_finite() {
            return Err(Error::NonFiniteState { node: k + 1 });
        }
        for (name, v) in COMPONENT_NAMES.iter().zip(x.to_array()) {
            if v < neg_tol {
                return Err(Error::NegativityBreach {
                    node: k + 1,
                    component: name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        values.push(x);
    }
    Trajectory::from_values(grid, values)
}

/// Adjoint rates `dp/dt = -dH/dx` for the Hamiltonian
/// `H = <p, f(x, u)> + r(x, u)`.
pub fn costate_rhs<F: Scalar>(
    x: State<F>,
    pc: CostateVec<F>,
    u: ControlVec<F>,
    params: ModelParams<F>,
    w: CostWeights<F>,
) -> CostateVec<F> {
    let ModelParams { beta, gamma, delta, mu_bar, .. } = params;
    let spread = mu_bar - u.mu;
    let n_star = x.n_star();
    let infected = x.infected();
    let contact_c = beta * (F::one() - u.alpha); // compliant-side contact rate

    let ds = pc.p_s - pc.p_s_star;
    let di = pc.p_i - pc.p_i_star;
    let dr = pc.p_r - pc.p_r_star;
    // Sensitivity of the noncompliance flows to the noncompliant population,
    // shared by all three starred equations.
    let shared = spread * (x.s * ds + x.i * di + x.r * dr);

    CostateVec {
        p_s: contact_c * infected * (pc.p_s - pc.p_i) + spread * n_star * ds + delta * pc.p_s,
        p_i: contact_c * x.s * (pc.p_s - pc.p_i)
            + beta * x.s_star * (pc.p_s_star - pc.p_i_star)
            + (gamma + u.eta) * (pc.p_i - pc.p_r)
            + spread * n_star * di
            + delta * pc.p_i
            - w.c1,
        p_r: spread * n_star * dr + delta * pc.p_r,
        p_s_star: beta * infected * (pc.p_s_star - pc.p_i_star)
            + u.nu * (pc.p_s_star - pc.p_s)
            + shared
            + delta * pc.p_s_star
            - w.c2,
        p_i_star: contact_c * x.s * (pc.p_s - pc.p_i)
            + beta * x.s_star * (pc.p_s_star - pc.p_i_star)
            + gamma * (pc.p_i_star - pc.p_r_star)
            + u.nu * (pc.p_i_star - pc.p_i)
            + shared
            + delta * pc.p_i_star
            - w.c1
            - w.c2,
        p_r_star: u.nu * (pc.p_r_star - pc.p_r) + shared + delta * pc.p_r_star - w.c2,
    }
}

/// Control-problem Hamiltonian `<p, f(x, u)> + r(x, u)`.
pub fn hamiltonian<F: Scalar>(
    x: State<F>,
    pc: CostateVec<F>,
    u: ControlVec<F>,
    params: ModelParams<F>,
    w: CostWeights<F>,
) -> F {
    let d = rhs_unchecked(x, u, params).to_array();
    let p = pc.to_array();
    let mut h = running_cost(x, u, w);
    for k in 0..6 {
        h = h + p[k] * d[k];
    }
    h
}

/// Integrates the adjoint system backward from the transversality condition
/// `p(T) = 0` with explicit (in reverse time) Euler steps, sampling state and
/// control at the right node of each step.
pub fn integrate_costate_backward<F: Scalar>(
    x: &StateTrajectory<F>,
    u: &ControlTrajectory<F>,
    params: ModelParams<F>,
    w: CostWeights<F>,
) -> Result<CostateTrajectory<F>> {
    if x.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    params.validate()?;
    w.validate()?;
    let grid = x.grid();
    let dt = grid.dt();
    let n = grid.n_nodes();

    let mut values = vec![CostateVec::zero(); n];
    let mut pc = CostateVec::zero();
    for k in (0..n - 1).rev() {
        let d = costate_rhs(x[k + 1], pc, u[k + 1], params, w);
        pc = pc.euler_step_back(d, dt);
        if !pc.is_finite() {
            return Err(Error::NonFiniteState { node: k });
        }
        values[k] = pc;
    }
    Trajectory::from_values(grid, values)
}

/// Pointwise minimizer of the Hamiltonian over the admissible control box:
/// the stationary value of each control channel, clamped to its bounds.
pub fn project_optimal_controls<F: Scalar>(
    x: State<F>,
    pc: CostateVec<F>,
    params: ModelParams<F>,
    w: CostWeights<F>,
) -> ControlVec<F> {
    let ModelParams { beta, eta_bar, mu_bar, nu_bar, .. } = params;
    let z = F::zero();
    let alpha = beta * x.s * x.infected() * (pc.p_i - pc.p_s) / w.c3;
    let eta = x.i * (pc.p_i - pc.p_r) / w.c4;
    let mu = (x.s * (pc.p_s_star - pc.p_s)
        + x.i * (pc.p_i_star - pc.p_i)
        + x.r * (pc.p_r_star - pc.p_r))
        * x.n_star()
        / w.c5;
    let nu = (x.s_star * (pc.p_s_star - pc.p_s)
        + x.i_star * (pc.p_i_star - pc.p_i)
        + x.r_star * (pc.p_r_star - pc.p_r))
        / w.c6;
    ControlVec {
        alpha: alpha.clip(z, F::one()),
        eta: eta.clip(z, eta_bar),
        mu: mu.clip(z, mu_bar),
        nu: nu.clip(z, nu_bar),
    }
}

/// Total cost `J = integral of r(x, u) dt`, as a left-endpoint Riemann sum on
/// the trajectory grid (matching the forward integrator's sampling).
pub fn total_cost<F: Scalar>(
    x: &StateTrajectory<F>,
    u: &ControlTrajectory<F>,
    w: CostWeights<F>,
) -> Result<F> {
    if x.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    let dt = x.grid().dt();
    let mut acc = F::zero();
    for k in 0..x.grid().n_steps() {
        acc = acc + running_cost(x[k], u[k], w) * dt;
    }
    Ok(acc)
}
