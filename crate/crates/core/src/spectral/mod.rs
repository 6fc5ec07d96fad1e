//! Covariance matrix functions given by Jacobi series.
//!
//! A spatial model is a finite list of coefficients `B_0..B_N` with
//! `C(ρ) = Σ B_n P_n(cos ρ)`. A spatio-temporal model attaches a temporal
//! kernel producing `B_n(t)` with `C(ρ; t) = Σ B_n(t) P_n(cos ρ)`.
//!
//! Lags follow `cov(Z(x₁; t₁), Z(x₂; t₂)) = C(ρ(x₁, x₂); t₁ - t₂)`.

mod io;
mod validity;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::spaces::SpaceParams;
use crate::specialfn::{gauss_jacobi, jacobi_all, jacobi_at_one, jacobi_norm_constant};

pub use io::{model_hash, model_to_json, model_to_string, parse_model, read_model};
pub use validity::{
    validate, validate_spatial, validate_spatiotemporal, LagLabel, ValidityReport, Violation, ViolationKind,
    BLOCK_TOLERANCE, DEFAULT_PROBE_LAGS,
};

/// Geometric envelope `‖B_n‖ P_n(1) ≤ c rⁿ` for degrees beyond the stored ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEnvelope {
    c: f64,
    r: f64,
}

impl TailEnvelope {
    pub fn new(c: f64, r: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Config(format!("tail constant c = {c} must be finite and >= 0")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Config(format!("tail ratio r = {r} must lie in (0, 1)")));
        }
        Ok(Self { c, r })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `Σ_{n ≥ first} c rⁿ`.
    pub fn sum_from(&self, first: usize) -> f64 {
        self.c * self.r.powf(first as f64) / (1.0 - self.r)
    }
}

/// Which time lags a model accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LagDomain {
    /// Purely spatial: only lag 0.
    Spatial,
    Integers,
    Reals,
}

impl LagDomain {
    pub fn check(self, t: f64) -> Result<()> {
        let ok = match self {
            LagDomain::Spatial => t == 0.0,
            LagDomain::Integers => t.is_finite() && t.fract() == 0.0,
            LagDomain::Reals => t.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Usage(format!("lag {t} is not admissible for a model on the {self:?} lag domain")))
        }
    }
}

fn check_coeffs(coeffs: &[Mat]) -> Result<usize> {
    let first = coeffs.first().ok_or_else(|| Error::Config("a model needs at least B_0".into()))?;
    let m = first.nrows();
    if m == 0 {
        return Err(Error::Config("field dimension m must be positive".into()));
    }
    for (n, b) in coeffs.iter().enumerate() {
        if b.shape() != (m, m) {
            return Err(Error::Config(format!("B_{n} has shape {:?}, expected {m}x{m}", b.shape())));
        }
        if !linalg::is_finite(b) {
            return Err(Error::Config(format!("B_{n} has non-finite entries")));
        }
    }
    Ok(m)
}

/// Spatial covariance model `C(ρ) = Σ_{n ≤ N} B_n P_n(cos ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialModel {
    space: SpaceParams,
    m: usize,
    coeffs: Vec<Mat>,
    tail: Option<TailEnvelope>,
}

impl SpatialModel {
    /// Checks shapes only; validity is reported by [`validate_spatial`].
    pub fn new(space: SpaceParams, coeffs: Vec<Mat>, tail: Option<TailEnvelope>) -> Result<Self> {
        let m = check_coeffs(&coeffs)?;
        Ok(Self { space, m, coeffs, tail })
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }
}

/// Stationary scalar correlation `r(t)` with `r(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarCorrelation {
    /// `φ^|t|` on integer lags.
    Ar1 { phi: f64 },
    /// `exp(-θ |t|)` on real lags.
    Exponential { theta: f64 },
}

impl ScalarCorrelation {
    pub fn ar1(phi: f64) -> Result<Self> {
        if !(phi > -1.0 && phi < 1.0) {
            return Err(Error::Config(format!("AR(1) coefficient {phi} must lie in (-1, 1)")));
        }
        Ok(ScalarCorrelation::Ar1 { phi })
    }

    pub fn exponential(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Config(format!("exponential rate {theta} must be positive")));
        }
        Ok(ScalarCorrelation::Exponential { theta })
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarCorrelation::Ar1 { phi } => phi.powi(t.abs() as i32),
            ScalarCorrelation::Exponential { theta } => (-theta * t.abs()).exp(),
        }
    }

    pub fn domain(&self) -> LagDomain {
        match self {
            ScalarCorrelation::Ar1 { .. } => LagDomain::Integers,
            ScalarCorrelation::Exponential { .. } => LagDomain::Reals,
        }
    }
}

/// Explicit per-degree coefficients at nonzero integer lags; unlisted lags are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LagTable {
    lags: Vec<i64>,
    /// `coeffs[k][n] = B_n(lags[k])`.
    coeffs: Vec<Vec<Mat>>,
}

impl LagTable {
    pub fn new(lags: Vec<i64>, coeffs: Vec<Vec<Mat>>) -> Result<Self> {
        if lags.len() != coeffs.len() {
            return Err(Error::Config(format!("{} lags but {} coefficient lists", lags.len(), coeffs.len())));
        }
        for (i, &l) in lags.iter().enumerate() {
            if l == 0 {
                return Err(Error::Config("lag 0 comes from the base coefficients, not the table".into()));
            }
            if lags[..i].contains(&l) {
                return Err(Error::Config(format!("lag {l} listed twice")));
            }
        }
        Ok(Self { lags, coeffs })
    }

    pub fn lags(&self) -> &[i64] {
        &self.lags
    }

    pub fn coeffs(&self) -> &[Vec<Mat>] {
        &self.coeffs
    }

    fn get(&self, n: usize, lag: i64) -> Option<&Mat> {
        self.lags.iter().position(|&l| l == lag).map(|k| &self.coeffs[k][n])
    }

    /// Largest absolute lag with a stored coefficient.
    pub fn max_lag(&self) -> i64 {
        self.lags.iter().map(|l| l.abs()).max().unwrap_or(0)
    }
}

/// Turns base coefficients into lag-dependent coefficients `B_n(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TemporalKernel {
    /// `B_n(t) = B_n` for every lag: a field frozen in time.
    PureSpatial,
    /// `B_n(t) = r(t) B_n`.
    Separable(ScalarCorrelation),
    /// First-order vector moving average `ε(t) + Φ ε(t-1)` with `cov ε = Σ_n`
    /// (the base coefficients): `B_n(0) = Σ_n + Φ Σ_n Φᵀ`, `B_n(1) = Φ Σ_n`,
    /// `B_n(-1) = Σ_n Φᵀ`, zero beyond.
    VectorMa1 { phi: Mat },
    /// Lag 0 from the base coefficients, other lags from the table.
    LagTable(LagTable),
}

impl TemporalKernel {
    pub fn name(&self) -> &'static str {
        match self {
            TemporalKernel::PureSpatial => "pure_spatial",
            TemporalKernel::Separable(_) => "separable",
            TemporalKernel::VectorMa1 { .. } => "ma1",
            TemporalKernel::LagTable(_) => "lag_table",
        }
    }

    pub fn domain(&self) -> LagDomain {
        match self {
            TemporalKernel::PureSpatial => LagDomain::Reals,
            TemporalKernel::Separable(r) => r.domain(),
            TemporalKernel::VectorMa1 { .. } | TemporalKernel::LagTable(_) => LagDomain::Integers,
        }
    }
}

/// Spatio-temporal model `C(ρ; t) = Σ_{n ≤ N} B_n(t) P_n(cos ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatioTemporalModel {
    space: SpaceParams,
    m: usize,
    base: Vec<Mat>,
    kernel: TemporalKernel,
    tail: Option<TailEnvelope>,
}

impl SpatioTemporalModel {
    pub fn new(
        space: SpaceParams,
        base: Vec<Mat>,
        kernel: TemporalKernel,
        tail: Option<TailEnvelope>,
    ) -> Result<Self> {
        let m = check_coeffs(&base)?;
        match &kernel {
            TemporalKernel::VectorMa1 { phi } => {
                if phi.shape() != (m, m) || !linalg::is_finite(phi) {
                    return Err(Error::Config(format!("MA(1) matrix must be a finite {m}x{m} matrix")));
                }
            }
            TemporalKernel::LagTable(table) => {
                for (k, per_degree) in table.coeffs.iter().enumerate() {
                    if per_degree.len() != base.len() {
                        return Err(Error::Config(format!(
                            "lag {} lists {} degrees, expected {}",
                            table.lags[k],
                            per_degree.len(),
                            base.len()
                        )));
                    }
                    if per_degree.iter().any(|b| b.shape() != (m, m) || !linalg::is_finite(b)) {
                        return Err(Error::Config(format!("lag {} has a malformed coefficient", table.lags[k])));
                    }
                }
            }
            _ => {}
        }
        Ok(Self { space, m, base, kernel, tail })
    }

    /// Base coefficients (for the MA(1) kernel these are the innovation covariances `Σ_n`).
    pub fn base(&self) -> &[Mat] {
        &self.base
    }

    pub fn kernel(&self) -> &TemporalKernel {
        &self.kernel
    }
}

/// Anything expressible as `Σ_{n ≤ N} B_n(t) P_n(cos ρ)`.
pub trait CovarianceSeries {
    fn space(&self) -> &SpaceParams;
    /// Field dimension `m`.
    fn dim(&self) -> usize;
    /// Largest stored degree `N`.
    fn max_degree(&self) -> usize;
    fn lag_domain(&self) -> LagDomain;
    fn tail(&self) -> Option<TailEnvelope>;
    /// `B_n(t)` without range or lag checks.
    fn coeff_unchecked(&self, n: usize, t: f64) -> Mat;

    /// `B_n(t)`.
    fn coeff(&self, n: usize, t: f64) -> Result<Mat> {
        if n > self.max_degree() {
            return Err(Error::Range(format!("degree {n} exceeds the stored maximum {}", self.max_degree())));
        }
        self.lag_domain().check(t)?;
        Ok(self.coeff_unchecked(n, t))
    }
}

impl CovarianceSeries for SpatialModel {
    fn space(&self) -> &SpaceParams {
        &self.space
    }
    fn dim(&self) -> usize {
        self.m
    }
    fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    fn lag_domain(&self) -> LagDomain {
        LagDomain::Spatial
    }
    fn tail(&self) -> Option<TailEnvelope> {
        self.tail
    }
    fn coeff_unchecked(&self, n: usize, _t: f64) -> Mat {
        self.coeffs[n].clone()
    }
}

impl CovarianceSeries for SpatioTemporalModel {
    fn space(&self) -> &SpaceParams {
        &self.space
    }
    fn dim(&self) -> usize {
        self.m
    }
    fn max_degree(&self) -> usize {
        self.base.len() - 1
    }
    fn lag_domain(&self) -> LagDomain {
        self.kernel.domain()
    }
    fn tail(&self) -> Option<TailEnvelope> {
        self.tail
    }
    fn coeff_unchecked(&self, n: usize, t: f64) -> Mat {
        let b = &self.base[n];
        match &self.kernel {
            TemporalKernel::PureSpatial => b.clone(),
            TemporalKernel::Separable(r) => b * r.value(t),
            TemporalKernel::VectorMa1 { phi } => {
                if t == 0.0 {
                    b + phi * b * phi.transpose()
                } else if t == 1.0 {
                    phi * b
                } else if t == -1.0 {
                    b * phi.transpose()
                } else {
                    Mat::zeros(self.m, self.m)
                }
            }
            TemporalKernel::LagTable(table) => {
                if t == 0.0 {
                    b.clone()
                } else {
                    table.get(n, t as i64).cloned().unwrap_or_else(|| Mat::zeros(self.m, self.m))
                }
            }
        }
    }
}

/// A model read from a file: spatial or spatio-temporal.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Spatial(SpatialModel),
    SpatioTemporal(SpatioTemporalModel),
}

impl Model {
    fn series(&self) -> &dyn CovarianceSeries {
        match self {
            Model::Spatial(m) => m,
            Model::SpatioTemporal(m) => m,
        }
    }
}

impl CovarianceSeries for Model {
    fn space(&self) -> &SpaceParams {
        self.series().space()
    }
    fn dim(&self) -> usize {
        self.series().dim()
    }
    fn max_degree(&self) -> usize {
        self.series().max_degree()
    }
    fn lag_domain(&self) -> LagDomain {
        self.series().lag_domain()
    }
    fn tail(&self) -> Option<TailEnvelope> {
        self.series().tail()
    }
    fn coeff_unchecked(&self, n: usize, t: f64) -> Mat {
        self.series().coeff_unchecked(n, t)
    }
}

impl From<SpatialModel> for Model {
    fn from(m: SpatialModel) -> Self {
        Model::Spatial(m)
    }
}

impl From<SpatioTemporalModel> for Model {
    fn from(m: SpatioTemporalModel) -> Self {
        Model::SpatioTemporal(m)
    }
}

/// Tolerance for `ρ` slightly outside `[0, π]` from rounding.
const RHO_TOLERANCE: f64 = 1e-12;

fn check_trunc<M: CovarianceSeries + ?Sized>(model: &M, trunc: usize) -> Result<()> {
    if trunc > model.max_degree() {
        return Err(Error::Range(format!(
            "truncation {trunc} exceeds the stored maximum degree {}",
            model.max_degree()
        )));
    }
    Ok(())
}

/// Partial sum `Σ_{n ≤ trunc} B_n(t) P_n(cos ρ)`.
pub fn eval_cov<M: CovarianceSeries + ?Sized>(model: &M, rho: f64, t: f64, trunc: usize) -> Result<Mat> {
    if !(-RHO_TOLERANCE..=std::f64::consts::PI + RHO_TOLERANCE).contains(&rho) {
        return Err(Error::Domain(format!("distance {rho} outside [0, π]")));
    }
    eval_cov_cos(model, rho.cos(), t, trunc)
}

/// [`eval_cov`] taking `cos ρ` directly.
pub fn eval_cov_cos<M: CovarianceSeries + ?Sized>(model: &M, cos_rho: f64, t: f64, trunc: usize) -> Result<Mat> {
    check_trunc(model, trunc)?;
    model.lag_domain().check(t)?;
    let p = jacobi_all(trunc, model.space().geom, cos_rho)?;
    let m = model.dim();
    let mut c = Mat::zeros(m, m);
    for (n, pn) in p.iter().enumerate() {
        c += model.coeff_unchecked(n, t) * *pn;
    }
    Ok(c)
}

/// `(C(ρ; t) + C(ρ; -t)) / 2`.
pub fn eval_cov_symmetrized<M: CovarianceSeries + ?Sized>(model: &M, rho: f64, t: f64, trunc: usize) -> Result<Mat> {
    let plus = eval_cov(model, rho, t, trunc)?;
    let minus = eval_cov(model, rho, -t, trunc)?;
    Ok((plus + minus) * 0.5)
}

/// Bound on `‖C(ρ; 0) - partial sum through N‖` in operator norm.
///
/// Stored degrees beyond `N` contribute `‖B_n(0)‖ P_n(1)`; the envelope
/// covers every degree past the stored ones.
pub fn truncation_bound<M: CovarianceSeries + ?Sized>(model: &M, n: usize) -> f64 {
    let geom = model.space().geom;
    let stored: f64 = (n + 1..=model.max_degree())
        .map(|k| linalg::spectral_norm(&model.coeff_unchecked(k, 0.0)) * jacobi_at_one(k, geom))
        .sum();
    let tail = model.tail().map_or(0.0, |e| e.sum_from(n.max(model.max_degree()) + 1));
    stored + tail
}

/// Angular power spectrum `B_n / dim H_n`.
pub fn angular_power_spectrum(model: &SpatialModel, n: usize) -> Result<Mat> {
    let b = model.coeff(n, 0.0)?;
    Ok(b / model.space.dim_eigenspace(n))
}

/// Recovers `B_0..B_N` from a covariance function by Gauss–Jacobi quadrature.
///
/// `B_n = h_n⁻¹ Σ_k w_k C(arccos x_k) P_n(x_k)`, exact when `C` is a Jacobi
/// series of degree at most `N` and `order ≥ N + 1`.
pub fn recover_coefficients<F>(cov: F, space: &SpaceParams, m: usize, max_degree: usize, order: usize) -> Result<SpatialModel>
where
    F: Fn(f64) -> Mat,
{
    if order < max_degree + 1 {
        return Err(Error::Usage(format!("quadrature order {order} must be at least N + 1 = {}", max_degree + 1)));
    }
    let rule = gauss_jacobi(order, space.geom)?;
    let mut coeffs = vec![Mat::zeros(m, m); max_degree + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let c = cov(x.clamp(-1.0, 1.0).acos());
        if c.shape() != (m, m) {
            return Err(Error::Input(format!("covariance returned shape {:?}, expected {m}x{m}", c.shape())));
        }
        if !linalg::is_finite(&c) {
            return Err(Error::Input(format!("covariance is not finite at ρ = {}", x.acos())));
        }
        let p = jacobi_all(max_degree, space.geom, x)?;
        for (b, pn) in coeffs.iter_mut().zip(&p) {
            *b += &c * (w * pn);
        }
    }
    for (n, b) in coeffs.iter_mut().enumerate() {
        *b = linalg::symmetric_part(b) / jacobi_norm_constant(n, space.geom);
    }
    SpatialModel::new(space.clone(), coeffs, None)
}
