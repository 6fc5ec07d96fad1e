//! Jacobi polynomials, their normalisation constants, and Gauss–Jacobi quadrature.
//!
//! Every series in this crate is a sum of `P_n^{(α,β)}(cos ρ)` terms, so this
//! module is the numerical floor under everything else. Evaluation uses the
//! ascending three-term recurrence, which is stable on `[-1, 1]`; gamma ratios
//! go through `ln Γ` so that large degrees with large `α` do not overflow.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Inputs this far outside `[-1, 1]` are clamped rather than rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// Exponents of the weight `(1 - x)^α (1 + x)^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::ParameterDomain(format!("alpha = {alpha} must exceed -1")));
        }
        if !(beta.is_finite() && beta > -1.0) {
            return Err(Error::ParameterDomain(format!("beta = {beta} must exceed -1")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The pair with `α` and `β` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

fn check_x(x: f64) -> Result<f64> {
    if !(-1.0 - CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Fills `out[k] = P_k^{(α,β)}(x)` for `k = 0..out.len()`. No range checks.
pub(crate) fn jacobi_fill(params: JacobiParams, x: f64, out: &mut [f64]) {
    let (a, b) = (params.alpha, params.beta);
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    let ab = a + b;
    let a2b2 = a * a - b * b;
    for n in 2..out.len() {
        let nf = n as f64;
        let c = 2.0 * nf + ab;
        let denom = 2.0 * nf * (nf + ab) * (c - 2.0);
        let p1 = (c - 1.0) * (c * (c - 2.0) * x + a2b2);
        let p2 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * c;
        out[n] = (p1 * out[n - 1] - p2 * out[n - 2]) / denom;
    }
}

/// `P_0(x), ..., P_{max_degree}(x)` in one recurrence pass.
pub fn jacobi_all(max_degree: usize, params: JacobiParams, x: f64) -> Result<Vec<f64>> {
    let x = check_x(x)?;
    let mut out = vec![0.0; max_degree + 1];
    jacobi_fill(params, x, &mut out);
    Ok(out)
}

/// `P_n^{(α,β)}(x)` by the ascending three-term recurrence.
pub fn jacobi_eval(n: usize, params: JacobiParams, x: f64) -> Result<f64> {
    Ok(jacobi_all(n, params, x)?[n])
}

/// `P_n^{(α,β)}(1) = Γ(n+α+1) / (Γ(n+1) Γ(α+1))`.
pub fn jacobi_at_one(n: usize, params: JacobiParams) -> f64 {
    let a = params.alpha;
    let nf = n as f64;
    (ln_gamma(nf + a + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(a + 1.0)).exp()
}

/// `R_n(x) = P_n(x) / P_n(1)`, bounded by one in magnitude when `α ≥ β, α ≥ -1/2`.
pub fn jacobi_normalized(n: usize, params: JacobiParams, x: f64) -> Result<f64> {
    Ok(jacobi_eval(n, params, x)? / jacobi_at_one(n, params))
}

/// Squared weighted L² norm `∫ P_j² (1-x)^α (1+x)^β dx`.
pub fn jacobi_norm_constant(j: usize, params: JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let jf = j as f64;
    let s = a + b + 1.0;
    let log2 = std::f64::consts::LN_2 * s;
    if j == 0 {
        // (2j+s)^{-1} Γ(j+s)^{-1} collapses to Γ(s+1)^{-1}; avoids 0·∞ when s = 0.
        return (log2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(s + 1.0)).exp();
    }
    (log2 - (2.0 * jf + s).ln() + ln_gamma(jf + a + 1.0) + ln_gamma(jf + b + 1.0)
        - ln_gamma(jf + 1.0)
        - ln_gamma(jf + s))
        .exp()
}

/// Total mass `∫ (1-x)^α (1+x)^β dx` of the weight.
pub fn weight_mass(params: JacobiParams) -> f64 {
    jacobi_norm_constant(0, params)
}

/// Gauss–Jacobi nodes and weights for `∫ f(x) (1-x)^α (1+x)^β dx`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub params: JacobiParams,
    pub order: usize,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Diagonal and off-diagonal of the symmetric Jacobi matrix for the
/// orthonormal Jacobi recurrence.
fn jacobi_matrix_entries(order: usize, params: JacobiParams) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (params.alpha, params.beta);
    let ab = a + b;
    let mut diag = Vec::with_capacity(order);
    let mut off = Vec::with_capacity(order.saturating_sub(1));
    diag.push((b - a) / (ab + 2.0));
    for k in 1..order {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        diag.push((b * b - a * a) / (c * (c + 2.0)));
    }
    for k in 1..order {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let sq = if k == 1 {
            // (k+α+β)/(2k+α+β-1) is 1 at k = 1; cancelling it keeps α+β = -1 finite.
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
        };
        off.push(sq.sqrt());
    }
    (diag, off)
}

/// Gauss–Jacobi rule of the given order.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix.
/// Weights are taken from the Christoffel sum `1 / Σ_j P_j(x_k)² / h_j`
/// rather than from squared eigenvector components, which keeps the small
/// weights near `±1` accurate in relative terms.
pub fn gauss_jacobi(order: usize, params: JacobiParams) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    let numeric_err = |what: &str| {
        Error::Numeric(format!(
            "gauss_jacobi(order = {order}, alpha = {}, beta = {}): {what}",
            params.alpha, params.beta
        ))
    };
    let (diag, off) = jacobi_matrix_entries(order, params);
    let mut mat = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        mat[(i, i)] = diag[i];
    }
    for (i, &v) in off.iter().enumerate() {
        mat[(i, i + 1)] = v;
        mat[(i + 1, i)] = v;
    }
    let eig = SymmetricEigen::try_new(mat, f64::EPSILON, 10_000 + 100 * order)
        .ok_or_else(|| numeric_err("eigen-solver did not converge"))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));

    let norms: Vec<f64> = (0..order).map(|j| jacobi_norm_constant(j, params)).collect();
    let mut buf = vec![0.0; order];
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            jacobi_fill(params, x.clamp(-1.0, 1.0), &mut buf);
            1.0 / buf.iter().zip(&norms).map(|(p, h)| p * p / h).sum::<f64>()
        })
        .collect();

    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(numeric_err("nodes not strictly increasing"));
    }
    if nodes.iter().any(|x| !(x.abs() < 1.0)) {
        return Err(numeric_err("node outside (-1, 1)"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(numeric_err("non-positive weight"));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        params,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    /// The hypergeometric sum `(α+1)_n/n! · Σ (-n)_k (n+s)_k / ((α+1)_k k!) ((1-x)/2)^k`,
    /// `s = α+β+1`, kept independent of the recurrence.
    fn explicit_sum(n: usize, a: f64, b: f64, x: f64) -> f64 {
        let nf = n as f64;
        let lead: f64 = (0..n).map(|i| (a + 1.0 + i as f64) / (i as f64 + 1.0)).product();
        let mut acc = 0.0;
        let mut term = 1.0;
        for k in 0..=n {
            acc += term;
            let kf = k as f64;
            term *= (kf - nf) * (nf + a + b + 1.0 + kf) / ((a + 1.0 + kf) * (kf + 1.0)) * (1.0 - x) / 2.0;
        }
        lead * acc
    }

    const GEOMETRIC_PAIRS: [(f64, f64); 5] = [(0.0, 0.0), (0.5, -0.5), (1.0, 0.0), (3.0, 1.0), (7.0, 3.0)];

    #[test]
    fn spot_values() {
        assert_eq!(jacobi_eval(0, p(3.7, 0.2), 0.3).unwrap(), 1.0);
        assert_relative_eq!(jacobi_eval(1, p(0.0, 0.0), 0.5).unwrap(), 0.5);
        assert_relative_eq!(jacobi_eval(2, p(7.0, 3.0), 1.0).unwrap(), 36.0, max_relative = 1e-14);
        assert_relative_eq!(jacobi_at_one(5, p(0.0, 0.0)), 1.0, max_relative = 1e-14);
        assert_relative_eq!(jacobi_at_one(1, p(2.5, 0.0)), 3.5, max_relative = 1e-14);
        assert_relative_eq!(jacobi_at_one(2, p(7.0, 3.0)), 36.0, max_relative = 1e-13);
        assert_relative_eq!(jacobi_normalized(1, p(0.0, 0.0), 0.25).unwrap(), 0.25);
        let r = jacobi_normalized(2, p(7.0, 3.0), -1.0).unwrap();
        assert_relative_eq!(r, jacobi_eval(2, p(7.0, 3.0), -1.0).unwrap() / 36.0, max_relative = 1e-13);
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        let ps = [(3.7, 0.2), (-0.5, -0.5), (0.0, -0.5), (7.0, 3.0), (-0.9, 2.0)];
        for &(a, b) in &ps {
            for n in 0..=5 {
                for i in 0..=20 {
                    let x = -1.0 + 0.1 * i as f64;
                    let rec = jacobi_eval(n, p(a, b), x).unwrap();
                    let sum = explicit_sum(n, a, b, x);
                    // The explicit sum cancels near the zeros, so compare on the scale of the sup norm.
                    let scale = sum.abs().max(jacobi_at_one(n, p(a, b)).abs()).max(1.0);
                    assert!(
                        (rec - sum).abs() <= 1e-12 * scale,
                        "n={n} a={a} b={b} x={x}: {rec} vs {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn at_one_matches_recurrence() {
        for &(a, b) in &GEOMETRIC_PAIRS {
            for n in 0..=50 {
                assert_relative_eq!(
                    jacobi_at_one(n, p(a, b)),
                    jacobi_eval(n, p(a, b), 1.0).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn normalized_is_bounded() {
        for &(a, b) in GEOMETRIC_PAIRS.iter().chain([(-0.5, -0.5), (0.0, -0.5)].iter()) {
            for n in 0..=50 {
                for i in 0..200 {
                    let x = -1.0 + 2.0 * i as f64 / 199.0;
                    let r = jacobi_normalized(n, p(a, b), x).unwrap();
                    assert!(r.abs() <= 1.0 + 1e-10, "n={n} ({a},{b}) x={x}: {r}");
                }
            }
        }
    }

    #[test]
    fn reflection_symmetry() {
        for &(a, b) in &GEOMETRIC_PAIRS {
            for n in 0..=30 {
                for i in 0..=10 {
                    let x = -1.0 + 0.2 * i as f64;
                    let lhs = jacobi_eval(n, p(a, b), -x).unwrap();
                    let rhs = (-1f64).powi(n as i32) * jacobi_eval(n, p(b, a), x).unwrap();
                    let scale = jacobi_at_one(n, p(a, b)).max(jacobi_at_one(n, p(b, a)));
                    assert!((lhs - rhs).abs() <= 1e-12 * scale, "n={n} ({a},{b}) x={x}");
                }
            }
        }
    }

    #[test]
    fn clamp_and_domain_errors() {
        assert!(jacobi_eval(3, p(0.0, 0.0), 1.0 + 5e-13).is_ok());
        assert!(matches!(jacobi_eval(3, p(0.0, 0.0), 1.0 + 1e-9), Err(Error::Domain(_))));
        assert!(matches!(jacobi_eval(3, p(0.0, 0.0), f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(JacobiParams::new(-1.0, 0.0), Err(Error::ParameterDomain(_))));
        assert!(matches!(JacobiParams::new(0.0, -1.5), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn norm_constants() {
        assert_relative_eq!(jacobi_norm_constant(0, p(0.0, 0.0)), 2.0, max_relative = 1e-14);
        assert_relative_eq!(jacobi_norm_constant(1, p(0.0, 0.0)), 2.0 / 3.0, max_relative = 1e-14);
        // Chebyshev first kind: h_0 = π, h_j = π/2.
        assert_relative_eq!(jacobi_norm_constant(0, p(-0.5, -0.5)), std::f64::consts::PI, max_relative = 1e-14);
    }

    #[test]
    fn low_order_gauss_legendre() {
        let r1 = gauss_jacobi(1, p(0.0, 0.0)).unwrap();
        assert!(r1.nodes[0].abs() < 1e-15);
        assert_relative_eq!(r1.weights[0], 2.0, max_relative = 1e-14);
        let r2 = gauss_jacobi(2, p(0.0, 0.0)).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -s, max_relative = 1e-14);
        assert_relative_eq!(r2.nodes[1], s, max_relative = 1e-14);
        assert_relative_eq!(r2.weights[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r2.weights[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn chebyshev_case_is_finite() {
        // α + β = -1 exercises the cancelled first off-diagonal.
        let rule = gauss_jacobi(6, p(-0.5, -0.5)).unwrap();
        for (k, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let expect = -((2 * k + 1) as f64 * std::f64::consts::PI / 12.0).cos();
            assert!((x - expect).abs() < 1e-14);
            assert_relative_eq!(w, std::f64::consts::PI / 6.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn weights_sum_to_mass_and_integrate_monomials() {
        for &(a, b) in GEOMETRIC_PAIRS.iter().chain([(-0.5, -0.5), (3.7, 0.2)].iter()) {
            let pr = p(a, b);
            for order in [1usize, 3, 8, 26] {
                let rule = gauss_jacobi(order, pr).unwrap();
                let mass: f64 = rule.weights.iter().sum();
                assert_relative_eq!(mass, weight_mass(pr), max_relative = 1e-12);
                // Exactness via orthogonality: ∫ P_i P_j w = δ_ij h_j for i + j ≤ 2K-1.
                for i in 0..order.min(6) {
                    for j in 0..order.min(6) {
                        if i + j > 2 * order - 1 {
                            continue;
                        }
                        let v = rule.integrate(|x| {
                            jacobi_eval(i, pr, x).unwrap() * jacobi_eval(j, pr, x).unwrap()
                        });
                        let target = if i == j { jacobi_norm_constant(j, pr) } else { 0.0 };
                        assert!((v - target).abs() <= 1e-10 * jacobi_norm_constant(i.max(j), pr));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_order_rejected() {
        assert!(gauss_jacobi(0, p(0.0, 0.0)).is_err());
    }
}
