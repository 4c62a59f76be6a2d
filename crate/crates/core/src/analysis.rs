//! Disease-free equilibria, reproductive ratios, and stability
//! classification for the compliance-structured SIR model with the control
//! frozen at a constant value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ControlVec, ModelParams};
use crate::scalar::Scalar;

/// Which disease-free equilibrium a point is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DfeKind {
    /// `(b/delta, 0)`: everyone compliant. Exists only for `xi = 0`.
    ComplianceOnly,
    /// Mixed equilibrium for `xi = 0`, present when the capacity exceeds
    /// `(nu + delta) / (mu_bar - mu)`.
    MixedXiZero,
    /// The unique equilibrium for `xi > 0`; always mixed.
    MixedXiPositive,
}

/// A disease-free equilibrium `(s, s*)`: infected and recovered compartments
/// empty, susceptibles split into compliant `s` and noncompliant `s*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dfe<F> {
    pub kind: DfeKind,
    pub s: F,
    pub s_star: F,
}

impl<F: Scalar> Dfe<F> {
    pub fn new(kind: DfeKind, s: F, s_star: F) -> Self {
        Self { kind, s, s_star }
    }

    /// Residuals of the two susceptible equilibrium equations at this point.
    pub fn equilibrium_residual(&self, params: ModelParams<F>, u: ControlVec<F>) -> (F, F) {
        let ModelParams { b, delta, xi, mu_bar, .. } = params;
        let spread = mu_bar - u.mu;
        let cross = spread * self.s * self.s_star;
        let r1 = (F::one() - xi) * b - cross + u.nu * self.s_star - delta * self.s;
        let r2 = xi * b + cross - u.nu * self.s_star - delta * self.s_star;
        (r1, r2)
    }

    /// Checks finiteness and `0 <= s, s* <= b/delta` (up to round-off).
    pub fn validate(&self, params: &ModelParams<F>) -> Result<()> {
        if !self.s.is_finite() || !self.s_star.is_finite() {
            return Err(Error::InvalidState("DFE has a non-finite component".into()));
        }
        let cap = params.capacity();
        let slack = F::lit(1e-9) * cap.max(F::one());
        for (name, v) in [("s", self.s), ("s_star", self.s_star)] {
            if v < -slack || v > cap + slack {
                return Err(Error::InvalidState(format!(
                    "DFE component {name} = {v} outside [0, b/delta]"
                )));
            }
        }
        Ok(())
    }
}

/// Is the noncompliance spread effectively switched off (`mu` at or within
/// round-off of `mu_bar`)? In that regime the mixed `xi = 0` equilibrium
/// disappears and the `xi > 0` equilibrium takes its analytic limit form.
fn mu_saturated<F: Scalar>(params: ModelParams<F>, u: ControlVec<F>) -> bool {
    let spread = params.mu_bar - u.mu;
    spread <= (u.nu + params.delta) * F::epsilon()
}

/// Capacity threshold `(nu + delta) / (mu_bar - mu)` separating the two
/// `xi = 0` regimes; `+inf` when `mu` saturates `mu_bar`.
pub fn mixed_dfe_threshold<F: Scalar>(params: ModelParams<F>, u: ControlVec<F>) -> F {
    (u.nu + params.delta) / (params.mu_bar - u.mu)
}

/// Computes every disease-free equilibrium of the control-frozen system.
///
/// For `xi = 0` the compliance-only point `(b/delta, 0)` always exists and a
/// mixed point appears once the capacity crosses [`mixed_dfe_threshold`].
/// For `xi > 0` there is a single mixed equilibrium, the positive root of a
/// quadratic; it is evaluated in a rationalized, subtraction-free form so no
/// cancellation occurs anywhere in the admissible parameter range.
pub fn compute_dfes<F: Scalar>(
    params: ModelParams<F>,
    u: ControlVec<F>,
) -> Result<Vec<Dfe<F>>> {
    params.validate()?;
    u.validate(&params)?;

    let ModelParams { b, delta, xi, mu_bar, .. } = params;
    let cap = params.capacity();
    let spread = mu_bar - u.mu;
    let recruit = u.nu + delta;

    if xi == F::zero() {
        let mut out = vec![Dfe::new(DfeKind::ComplianceOnly, cap, F::zero())];
        let threshold = mixed_dfe_threshold(params, u); // +inf when saturated
        if !mu_saturated(params, u) && cap > threshold {
            out.push(Dfe::new(
                DfeKind::MixedXiZero,
                threshold,
                cap - threshold,
            ));
        }
        return Ok(out);
    }

    let (s, s_star) = if mu_saturated(params, u) {
        // Limit mu -> mu_bar: the equilibrium equations become linear.
        let s_star = xi * b / recruit;
        let s = b * ((F::one() - xi) * delta + u.nu) / (delta * recruit);
        (s, s_star)
    } else {
        // s* solves  s*^2 - (A - B) s* - C/4 = 0  with A = b/delta,
        // B = (nu+delta)/spread, C = 4 xi b / spread; the positive root is
        // s* = (A - B + D)/2, D = sqrt((A-B)^2 + C). Both s and s* are
        // evaluated via forms whose numerators and denominators are sums of
        // nonnegative terms:
        //   s  = (4AB - C) / (2 (A + B + D)),  4AB - C = 4b((1-xi)delta+nu)
        //                                               / (delta * spread)
        //   s* = (A - B + D)/2                 if A >= B
        //   s* = C / (2 (B - A + D))           otherwise  (rationalized)
        let two = F::lit(2.0);
        let four = F::lit(4.0);
        let a = cap;
        let bb = recruit / spread;
        let c = four * xi * b / spread;
        let d = ((a - bb) * (a - bb) + c).sqrt();
        let s_num = four * b * ((F::one() - xi) * delta + u.nu) / (delta * spread);
        let s = s_num / (two * (a + bb + d));
        let s_star = if a >= bb { (a - bb + d) / two } else { c / (two * (bb - a + d)) };
        (s, s_star)
    };
    Ok(vec![Dfe::new(DfeKind::MixedXiPositive, s, s_star)])
}

/// Next-generation matrix pair at a DFE: `f` holds the new-infection rates,
/// `v` the transition rates of the infected compartments `(I, I*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NgmPair<F> {
    pub f: [[F; 2]; 2],
    pub v: [[F; 2]; 2],
}

impl<F: Scalar> NgmPair<F> {
    /// `det(v)`; strictly positive for admissible inputs, so `v` is invertible.
    pub fn v_det(&self) -> F {
        self.v[0][0] * self.v[1][1] - self.v[0][1] * self.v[1][0]
    }
}

/// Builds the next-generation matrices at a DFE with the control frozen.
pub fn ngm_at<F: Scalar>(
    dfe: Dfe<F>,
    params: ModelParams<F>,
    u: ControlVec<F>,
) -> Result<NgmPair<F>> {
    params.validate()?;
    u.validate(&params)?;
    dfe.validate(&params)?;
    let ModelParams { beta, gamma, delta, mu_bar, .. } = params;
    let pressure = (mu_bar - u.mu) * dfe.s_star;
    let fc = beta * (F::one() - u.alpha) * dfe.s;
    let fn_ = beta * dfe.s_star;
    Ok(NgmPair {
        f: [[fc, fc], [fn_, fn_]],
        v: [
            [gamma + u.eta + delta + pressure, -u.nu],
            [-pressure, gamma + u.nu + delta],
        ],
    })
}

/// Spectral radius of `f v^-1` computed directly from the 2x2 eigenvalue
/// formula. Independent route to the reproductive ratio, used to cross-check
/// the closed form.
pub fn spectral_radius<F: Scalar>(ngm: &NgmPair<F>) -> F {
    let det_v = ngm.v_det();
    // v^-1 = adj(v) / det(v)
    let vi = [
        [ngm.v[1][1] / det_v, -ngm.v[0][1] / det_v],
        [-ngm.v[1][0] / det_v, ngm.v[0][0] / det_v],
    ];
    let row = |r: usize, c: usize| ngm.f[r][0] * vi[0][c] + ngm.f[r][1] * vi[1][c];
    let k = [[row(0, 0), row(0, 1)], [row(1, 0), row(1, 1)]];
    let tr = k[0][0] + k[1][1];
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let four = F::lit(4.0);
    let half = F::lit(0.5);
    let disc = tr * tr - four * det;
    if disc >= F::zero() {
        let root = disc.sqrt();
        (half * (tr + root)).abs().max((half * (tr - root)).abs())
    } else {
        // Complex pair; modulus is sqrt(det).
        det.sqrt()
    }
}

/// Reproductive ratio at a DFE under a frozen control, in closed form:
///
/// ```text
///         beta [ (1-alpha)(gamma+nu+delta+m) s + (gamma+eta+nu+delta+m) s* ]
/// R0 = ------------------------------------------------------------------- ,
///               (gamma+delta)(gamma+eta+nu+delta+m) + eta nu
/// ```
///
/// with `m = (mu_bar - mu) s*`. Agrees with the spectral radius of the
/// next-generation matrix `f v^-1` (see [`spectral_radius`]).
pub fn reproductive_ratio<F: Scalar>(
    dfe: Dfe<F>,
    params: ModelParams<F>,
    u: ControlVec<F>,
) -> Result<F> {
    params.validate()?;
    u.validate(&params)?;
    dfe.validate(&params)?;
    let ModelParams { beta, gamma, delta, mu_bar, .. } = params;
    let m = (mu_bar - u.mu) * dfe.s_star;
    let gnd = gamma + u.nu + delta;
    let num = beta * ((F::one() - u.alpha) * (gnd + m) * dfe.s + (gnd + u.eta + m) * dfe.s_star);
    let den = (gamma + delta) * (gnd + u.eta + m) + u.eta * u.nu;
    Ok(num / den)
}

/// Verdict of the linearized analysis at a DFE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    /// `R0 < 1` and all auxiliary eigenvalues positive: locally stable.
    Stable,
    /// `R0 > 1`: the infection invades.
    Unstable,
    /// Within margin of the threshold, or the eigenvalue hypothesis fails at
    /// the boundary; the theorem is silent here.
    Marginal,
}

/// Which case of the classification theorem applies, keyed to the inflow
/// split `xi` and the capacity regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremCase {
    /// `xi = 0`, capacity at most the mixed-DFE threshold: compliance-only.
    CaseI,
    /// `xi = 0`, capacity above the threshold: mixed equilibrium.
    CaseII,
    /// `xi > 0`: the unique mixed equilibrium.
    CaseIII,
}

/// Output of [`classify_stability`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport<F> {
    pub dfe: Dfe<F>,
    pub r0: F,
    pub classification: Stability,
    /// Real parts of the six eigenvalues of the comparison matrix used by the
    /// stability argument: two from its leading 2x2 block, then
    /// `delta, delta, delta+nu+(mu_bar-mu)s*, delta+nu+(mu_bar-mu)(s*-s)`.
    pub h5_eigenvalues: [F; 6],
    /// Whether all six eigenvalues clear the positivity margin.
    pub h5_satisfied: bool,
    pub theorem_case: TheoremCase,
}

/// Margin for classification decisions: `R0` within this distance of 1, or an
/// eigenvalue within this distance of 0, is reported as `Marginal` rather
/// than forced into a side.
const CLASSIFY_MARGIN: f64 = 1e-9;

/// Classifies the local stability of a DFE under a frozen control.
///
/// The hypotheses of the classification theorem must hold for the supplied
/// equilibrium kind — `xi` regime, capacity ordering against
/// [`mixed_dfe_threshold`], and the point actually being an equilibrium —
/// otherwise `HypothesisViolation` is returned. Exactly on the capacity
/// boundary the auxiliary eigenvalue hits zero and the verdict is
/// [`Stability::Marginal`].
pub fn classify_stability<F: Scalar>(
    dfe: Dfe<F>,
    params: ModelParams<F>,
    u: ControlVec<F>,
) -> Result<StabilityReport<F>> {
    params.validate()?;
    u.validate(&params)?;
    dfe.validate(&params)?;

    let ModelParams { b, delta, gamma, xi, mu_bar, .. } = params;
    let cap = params.capacity();
    let threshold = mixed_dfe_threshold(params, u);

    let theorem_case = match dfe.kind {
        DfeKind::ComplianceOnly => {
            if xi != F::zero() {
                return Err(Error::HypothesisViolation(
                    "compliance-only DFE requires xi = 0".into(),
                ));
            }
            if cap > threshold {
                return Err(Error::HypothesisViolation(format!(
                    "compliance-only case requires b/delta <= (nu+delta)/(mu_bar-mu) = {threshold}, got {cap}"
                )));
            }
            TheoremCase::CaseI
        }
        DfeKind::MixedXiZero => {
            if xi != F::zero() {
                return Err(Error::HypothesisViolation(
                    "mixed xi = 0 DFE requires xi = 0".into(),
                ));
            }
            if mu_saturated(params, u) {
                return Err(Error::HypothesisViolation(
                    "mixed xi = 0 DFE requires mu < mu_bar".into(),
                ));
            }
            if cap < threshold {
                return Err(Error::HypothesisViolation(format!(
                    "mixed case requires b/delta >= (nu+delta)/(mu_bar-mu) = {threshold}, got {cap}"
                )));
            }
            TheoremCase::CaseII
        }
        DfeKind::MixedXiPositive => {
            if xi <= F::zero() {
                return Err(Error::HypothesisViolation(
                    "mixed xi > 0 DFE requires xi > 0".into(),
                ));
            }
            TheoremCase::CaseIII
        }
    };

    // The classification only speaks about equilibria.
    let (r1, r2) = dfe.equilibrium_residual(params, u);
    let res_tol = F::lit(1e-8) * (F::one() + b.abs());
    if r1.abs() > res_tol || r2.abs() > res_tol {
        return Err(Error::HypothesisViolation(format!(
            "point is not an equilibrium (residuals {r1}, {r2})"
        )));
    }

    // Eigenvalues of the comparison matrix: its leading 2x2 block is the
    // infected-compartment transition matrix `v`, whose eigenvalues are real
    // because the off-diagonal product nu * (mu_bar - mu) s* is nonnegative.
    let pressure = (mu_bar - u.mu) * dfe.s_star;
    let a = gamma + u.eta + delta + pressure;
    let d = gamma + u.nu + delta;
    let half = F::lit(0.5);
    let four = F::lit(4.0);
    let root = ((a - d) * (a - d) + four * u.nu * pressure).sqrt();
    let block_lo = half * (a + d - root);
    let block_hi = half * (a + d + root);
    let lambda3 = delta + u.nu + pressure;
    let lambda4 = delta + u.nu + (mu_bar - u.mu) * (dfe.s_star - dfe.s);
    let eigenvalues = [block_lo, block_hi, delta, delta, lambda3, lambda4];

    let margin = F::lit(CLASSIFY_MARGIN);
    let h5_satisfied = eigenvalues.iter().all(|&l| l > margin);

    let r0 = reproductive_ratio(dfe, params, u)?;
    let classification = if !h5_satisfied {
        Stability::Marginal
    } else if r0 < F::one() - margin {
        Stability::Stable
    } else if r0 > F::one() + margin {
        Stability::Unstable
    } else {
        Stability::Marginal
    };

    Ok(StabilityReport {
        dfe,
        r0,
        classification,
        h5_eigenvalues: eigenvalues,
        h5_satisfied,
        theorem_case,
    })
}
