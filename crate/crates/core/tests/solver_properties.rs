//! Discretization and optimality checks for the sweep solver: exact
//! population balance, first-order convergence to the closed-form total,
//! finite-difference verification of the adjoint system and the control
//! projection, and bitwise determinism of repeated solves.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sirnc::model::population_closed_form;
use sirnc::scenarios::{builtin_scenario, Overrides, ScenarioId};
use sirnc::solver::{
    costate_rhs, fbs_solve, hamiltonian, integrate_forward, project_optimal_controls, Grid,
    Trajectory,
};
use sirnc::{Controls64, Costate64, Params64, State64, Weights64};

fn balanced_params() -> Params64 {
    Params64 {
        b: 0.01,
        delta: 0.01,
        beta: 0.4,
        gamma: 0.2,
        eta_bar: 0.1,
        xi: 0.0,
        mu_bar: 0.1,
        nu_bar: 0.1,
    }
}

/// With recruitment balancing exit (`b = delta`, unit start mass), every node
/// of the forward solution carries total population 1 to round-off, for a
/// spread of constant controls.
#[test]
fn population_is_conserved_when_recruitment_balances_exit() {
    let p = balanced_params();
    let x0 = State64::new(0.69, 0.01, 0.0, 0.29, 0.01, 0.0);
    let grid = Grid::new(100.0, 0.1).unwrap();
    let controls = [
        Controls64::zero(),
        Controls64::new(1.0, 0.1, 0.1, 0.1),
        Controls64::new(0.5, 0.05, 0.0, 0.1),
        Controls64::new(0.0, 0.1, 0.1, 0.0),
    ];
    for u in controls {
        let traj = integrate_forward(x0, &Trajectory::constant(grid, u), p).unwrap();
        for (k, x) in traj.iter().enumerate() {
            assert!(
                (x.total() - 1.0).abs() <= 1e-12,
                "total drifted to {} at node {k} under u = {u:?}",
                x.total()
            );
        }
    }
}

/// With unbalanced recruitment the discrete total deviates from the
/// closed-form relaxation `N(t) = b/delta + (N0 - b/delta) e^{-delta t}` by
/// O(dt): halving the step cuts the worst-case deviation at observed order
/// at least 0.9.
#[test]
fn population_deviation_from_closed_form_converges_first_order() {
    let p = Params64 { b: 0.02, ..balanced_params() };
    let x0 = State64::new(0.69, 0.01, 0.0, 0.29, 0.01, 0.0);
    let u = Controls64::new(0.3, 0.02, 0.05, 0.04);
    let n0 = x0.total();

    let sup_err = |dt: f64| -> f64 {
        let grid = Grid::new(100.0, dt).unwrap();
        let traj = integrate_forward(x0, &Trajectory::constant(grid, u), p).unwrap();
        traj.iter()
            .enumerate()
            .map(|(k, x)| (x.total() - population_closed_form(grid.time(k), n0, p)).abs())
            .fold(0.0, f64::max)
    };

    let errs = [sup_err(0.1), sup_err(0.05), sup_err(0.025)];
    assert!(errs[0] > 0.0, "no discretization error to measure");
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(
            order >= 0.9,
            "observed order {order} < 0.9 (errors {errs:?})"
        );
    }
}

fn sample_state(rng: &mut StdRng) -> State64 {
    State64::from_array(std::array::from_fn(|_| rng.gen_range(0.0..1.5)))
}

fn sample_costate(rng: &mut StdRng) -> Costate64 {
    Costate64::from_array(std::array::from_fn(|_| rng.gen_range(-5.0..5.0)))
}

fn sample_weights(rng: &mut StdRng) -> Weights64 {
    Weights64::new(
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.5..3.0),
    )
}

/// The adjoint rates equal `-dH/dx` by central differences at 100 random
/// points, to 1e-6 relative. The Hamiltonian is quadratic in the state, so
/// the central difference is exact up to round-off.
#[test]
fn adjoint_rates_match_the_negative_state_gradient_of_the_hamiltonian() {
    let mut rng = StdRng::seed_from_u64(0xad_01);
    for case in 0..100 {
        let p = {
            let delta = rng.gen_range(0.005..0.05);
            Params64 {
                b: delta * rng.gen_range(1.0..3.0),
                delta,
                beta: rng.gen_range(0.05..0.6),
                gamma: rng.gen_range(0.05..0.5),
                eta_bar: rng.gen_range(0.01..0.5),
                xi: rng.gen_range(0.0..1.0),
                mu_bar: rng.gen_range(0.02..0.5),
                nu_bar: rng.gen_range(0.01..0.5),
            }
        };
        let u = Controls64 {
            alpha: rng.gen_range(0.0..1.0),
            eta: rng.gen_range(0.0..p.eta_bar),
            mu: rng.gen_range(0.0..p.mu_bar),
            nu: rng.gen_range(0.0..p.nu_bar),
        };
        let x = sample_state(&mut rng);
        let pc = sample_costate(&mut rng);
        let w = sample_weights(&mut rng);

        let rates = costate_rhs(x, pc, u, p, w).to_array();
        for j in 0..6 {
            let h = 1e-5 * (1.0 + x.to_array()[j].abs());
            let mut xp = x.to_array();
            let mut xm = x.to_array();
            xp[j] += h;
            xm[j] -= h;
            let grad = (hamiltonian(State64::from_array(xp), pc, u, p, w)
                - hamiltonian(State64::from_array(xm), pc, u, p, w))
                / (2.0 * h);
            assert!(
                (rates[j] + grad).abs() <= 1e-6 * (1.0 + grad.abs()),
                "case {case}: adjoint rate {} vs -dH/dx_{j} = {} differ",
                rates[j],
                -grad
            );
        }
    }
}

/// Wherever the projected control lands strictly inside the admissible box,
/// it is a stationary point of the Hamiltonian: the central-difference
/// control gradient vanishes to 1e-6 relative.
#[test]
fn interior_projected_controls_zero_the_control_gradient() {
    let mut rng = StdRng::seed_from_u64(0xad_02);
    let mut interior_channels = 0usize;
    for _ in 0..100 {
        let delta = rng.gen_range(0.005..0.05);
        let p = Params64 {
            b: delta * rng.gen_range(1.0..3.0),
            delta,
            beta: rng.gen_range(0.05..0.6),
            gamma: rng.gen_range(0.05..0.5),
            eta_bar: rng.gen_range(0.01..0.5),
            xi: rng.gen_range(0.0..1.0),
            mu_bar: rng.gen_range(0.02..0.5),
            nu_bar: rng.gen_range(0.01..0.5),
        };
        // Small costate gaps keep most stationary points inside the box.
        let x = sample_state(&mut rng);
        let pc = Costate64::from_array(std::array::from_fn(|_| rng.gen_range(-0.05..0.05)));
        let w = sample_weights(&mut rng);

        let u = project_optimal_controls(x, pc, p, w);
        let caps = [1.0, p.eta_bar, p.mu_bar, p.nu_bar];
        let h_at = |u: Controls64| hamiltonian(x, pc, u, p, w);
        let channels: [fn(&mut Controls64, f64); 4] = [
            |c, v| c.alpha = v,
            |c, v| c.eta = v,
            |c, v| c.mu = v,
            |c, v| c.nu = v,
        ];
        for (j, set) in channels.into_iter().enumerate() {
            let v = u.to_array()[j];
            let margin = 1e-9 * (1.0 + caps[j]);
            if v <= margin || v >= caps[j] - margin {
                continue; // clipped channel: gradient need not vanish
            }
            interior_channels += 1;
            let h = 1e-5 * (1.0 + v.abs());
            let mut up = u;
            let mut um = u;
            set(&mut up, v + h);
            set(&mut um, v - h);
            let grad = (h_at(up) - h_at(um)) / (2.0 * h);
            let scale = 1.0 + h_at(u).abs();
            assert!(
                grad.abs() <= 1e-6 * scale,
                "channel {j}: control gradient {grad} nonzero at interior projection {v}"
            );
        }
    }
    assert!(
        interior_channels >= 50,
        "only {interior_channels} interior channels sampled"
    );
}

/// Two solves of the same configuration produce bitwise-identical control
/// iterates: the sweep is deterministic.
#[test]
fn repeated_solves_are_bitwise_identical() {
    let cfg = builtin_scenario::<f64>(ScenarioId::S1, &Overrides::default()).unwrap();
    let a = fbs_solve(cfg.x0, cfg.params, cfg.weights, cfg.grid, &cfg.fbs, cfg.mask).unwrap();
    let b = fbs_solve(cfg.x0, cfg.params, cfg.weights, cfg.grid, &cfg.fbs, cfg.mask).unwrap();
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.total_cost.to_bits(), b.total_cost.to_bits());
    for (ua, ub) in a.control.iter().zip(b.control.iter()) {
        for (va, vb) in ua.to_array().iter().zip(ub.to_array().iter()) {
            assert_eq!(va.to_bits(), vb.to_bits());
        }
    }
}
