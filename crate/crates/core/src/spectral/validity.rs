//! Admissibility checks for coefficient sequences.
//!
//! Invalid models are data, not errors: every problem found becomes a
//! [`Violation`]. For real-valued lag domains the checks run on a probe grid
//! and are necessary conditions only.

use std::fmt;

use serde::{Serialize, Serializer};

use super::{CovarianceSeries, Model, SpatialModel, SpatioTemporalModel, TemporalKernel};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, PSD_TOLERANCE, SYMMETRY_TOLERANCE};
use crate::specialfn::jacobi_at_one;

/// Relative tolerance for the block lag matrices `[B_n(t_i - t_j)]`.
pub const BLOCK_TOLERANCE: f64 = 1e-9;
/// Probe lags used when none are given.
pub const DEFAULT_PROBE_LAGS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Asymmetric,
    Indefinite,
    Divergent,
}

/// Where a violation was found: a single coefficient or a time lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LagLabel {
    Spatial,
    Lag(f64),
}

impl fmt::Display for LagLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LagLabel::Spatial => f.write_str("spatial"),
            LagLabel::Lag(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for LagLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LagLabel::Spatial => s.serialize_str("spatial"),
            LagLabel::Lag(t) => s.serialize_f64(*t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub degree: usize,
    pub lag: LagLabel,
    pub kind: ViolationKind,
    /// Asymmetry, negative eigenvalue size, or the non-finite partial sum.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self { valid: violations.is_empty(), violations }
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn check_symmetric(b: &Mat, degree: usize, lag: LagLabel, out: &mut Vec<Violation>) {
    let asym = linalg::asymmetry(b);
    if asym > SYMMETRY_TOLERANCE * linalg::max_abs(b).max(1.0) {
        out.push(Violation { degree, lag, kind: ViolationKind::Asymmetric, magnitude: asym });
    }
}

/// Flags `b` if `λ_min < -tol · max(1, λ_max)`.
fn check_psd(b: &Mat, tol: f64, degree: usize, lag: LagLabel, out: &mut Vec<Violation>) {
    let (lo, hi) = linalg::eigen_range(b).unwrap_or((f64::NAN, f64::NAN));
    if !(lo >= -tol * linalg::eigen_scale(hi)) {
        out.push(Violation { degree, lag, kind: ViolationKind::Indefinite, magnitude: -lo });
    }
}

fn check_convergence<M: CovarianceSeries + ?Sized>(model: &M, out: &mut Vec<Violation>) {
    let geom = model.space().geom;
    let mut sum = 0.0;
    for n in 0..=model.max_degree() {
        sum += linalg::spectral_norm(&model.coeff_unchecked(n, 0.0)) * jacobi_at_one(n, geom);
        if !sum.is_finite() {
            out.push(Violation { degree: n, lag: LagLabel::Spatial, kind: ViolationKind::Divergent, magnitude: sum });
            return;
        }
    }
    if let Some(tail) = model.tail() {
        let rest = tail.sum_from(model.max_degree() + 1);
        if !(sum + rest).is_finite() {
            let degree = model.max_degree() + 1;
            out.push(Violation { degree, lag: LagLabel::Spatial, kind: ViolationKind::Divergent, magnitude: sum + rest });
        }
    }
}

/// Symmetry and nonnegative-definiteness of every `B_n`, plus convergence.
pub fn validate_spatial(model: &SpatialModel) -> ValidityReport {
    let mut v = Vec::new();
    for (n, b) in model.coeffs().iter().enumerate() {
        check_symmetric(b, n, LagLabel::Spatial, &mut v);
        check_psd(b, PSD_TOLERANCE, n, LagLabel::Spatial, &mut v);
    }
    check_convergence(model, &mut v);
    ValidityReport::from_violations(v)
}

/// Necessary conditions on a probe grid of lags.
///
/// For each degree: `B_n(-t) = B_n(t)ᵀ` at every probe `t`, and the block
/// matrix `[B_n(t_i - t_j)]` over the probes is nonnegative-definite. Base
/// coefficients that are covariances themselves (separable, MA(1) and frozen
/// kernels) are checked individually as well.
pub fn validate_spatiotemporal(model: &SpatioTemporalModel, probe_lags: &[f64]) -> Result<ValidityReport> {
    if !probe_lags.contains(&0.0) {
        return Err(Error::Usage("probe lags must include 0".into()));
    }
    let domain = model.lag_domain();
    for &t in probe_lags {
        domain.check(t)?;
    }
    let mut grid: Vec<f64> = probe_lags.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    for (i, a) in grid.iter().enumerate() {
        for b in &grid[..i] {
            domain.check(a - b)?;
        }
    }

    let m = model.dim();
    let k = grid.len();
    let mut v = Vec::new();
    for n in 0..=model.max_degree() {
        if !matches!(model.kernel(), TemporalKernel::LagTable(_)) {
            let b = &model.base()[n];
            check_symmetric(b, n, LagLabel::Spatial, &mut v);
            check_psd(b, PSD_TOLERANCE, n, LagLabel::Spatial, &mut v);
        }
        for &t in &grid {
            if t < 0.0 {
                continue;
            }
            let plus = model.coeff_unchecked(n, t);
            let minus = model.coeff_unchecked(n, -t);
            let dev = linalg::max_abs(&(&minus - plus.transpose()));
            let scale = linalg::max_abs(&plus).max(linalg::max_abs(&minus)).max(1.0);
            if dev > SYMMETRY_TOLERANCE * scale {
                v.push(Violation { degree: n, lag: LagLabel::Lag(t), kind: ViolationKind::Asymmetric, magnitude: dev });
            }
        }
        let mut block = Mat::zeros(k * m, k * m);
        for (i, ti) in grid.iter().enumerate() {
            for (j, tj) in grid.iter().enumerate() {
                block.view_mut((i * m, j * m), (m, m)).copy_from(&model.coeff_unchecked(n, ti - tj));
            }
        }
        let span = grid[k - 1] - grid[0];
        check_psd(&block, BLOCK_TOLERANCE, n, LagLabel::Lag(span), &mut v);
    }
    check_convergence(model, &mut v);
    Ok(ValidityReport::from_violations(v))
}

/// Dispatches on the model kind; `probe_lags` is ignored for spatial models.
pub fn validate(model: &Model, probe_lags: &[f64]) -> Result<ValidityReport> {
    match model {
        Model::Spatial(m) => Ok(validate_spatial(m)),
        Model::SpatioTemporal(m) => validate_spatiotemporal(m, probe_lags),
    }
}
