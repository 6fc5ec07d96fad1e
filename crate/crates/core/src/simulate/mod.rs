//! Series simulation `Z(x; t) = Σ_{n ≤ N} W_n(t) P_n(cos ρ(x, U))`.
//!
//! `U` is uniform on the space and the `W_n` are independent Gaussian
//! processes with `cov(W_n(t₁), W_n(t₂)) = a_n² B_n(t₁ - t₂)`, so that
//! `cov(Z(x₁; t₁), Z(x₂; t₂)) = Σ B_n(t₁ - t₂) P_n(cos ρ(x₁, x₂))`.
//!
//! A single realization is not ergodic in `U`: covariances must be estimated
//! across independent replicates, each with its own `U`.

mod export;

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, PSD_TOLERANCE};
use crate::rng::{degree_stream, derive_seed, stream_rng, U_STREAM};
use crate::spaces::{Point, SpaceParams};
use crate::spectral::{
    model_hash, validate_spatial, validate_spatiotemporal, CovarianceSeries, Model, ScalarCorrelation, SpatialModel,
    SpatioTemporalModel, TemporalKernel, ValidityReport, BLOCK_TOLERANCE,
};
use crate::specialfn::jacobi_all;

pub use export::{read_realization, write_realization, METADATA_FILE, VALUES_FILE};

/// Symmetric square root `S D^{1/2} Sᵀ` of a nonnegative-definite matrix.
///
/// Eigenvalues in `[-1e-10·scale, 0)` are clipped to zero, where
/// `scale = max(1, λ_max)`.
pub fn matrix_sqrt(b: &Mat) -> Result<Mat> {
    sqrt_with_tolerance(b, PSD_TOLERANCE)
}

fn sqrt_with_tolerance(b: &Mat, tol: f64) -> Result<Mat> {
    if !b.is_square() {
        return Err(Error::Usage(format!("matrix square root of a non-square {:?} matrix", b.shape())));
    }
    let asym = linalg::asymmetry(b);
    if asym > PSD_TOLERANCE * linalg::max_abs(b).max(1.0) {
        return Err(Error::Usage(format!("matrix is not symmetric (deviation {asym:e})")));
    }
    let eig = linalg::sym_eigen(b)?;
    let hi = eig.eigenvalues.max();
    let tolerance = tol * linalg::eigen_scale(hi);
    let lo = eig.eigenvalues.min();
    if lo < -tolerance {
        return Err(Error::Indefinite { eigenvalue: lo, tolerance });
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let r = &eig.eigenvectors * Mat::from_diagonal(&roots) * eig.eigenvectors.transpose();
    Ok(linalg::symmetric_part(&r))
}

/// One simulated field, indexed by (point, time, component).
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub space: SpaceParams,
    pub m: usize,
    pub model_hash: String,
    pub points: Vec<Point>,
    pub times: Vec<f64>,
    /// Flattened values; see [`Realization::value`].
    pub values: Vec<f64>,
    pub latent_u: Point,
    pub trunc: usize,
    pub seed: u64,
    /// `coefficients[n][k]`: the random vector `W_n(times[k])`.
    pub coefficients: Vec<Vec<Vec<f64>>>,
}

impl Realization {
    fn index(&self, point: usize, time: usize) -> usize {
        (point * self.times.len() + time) * self.m
    }

    /// `(points, times, components)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.points.len(), self.times.len(), self.m)
    }

    pub fn value(&self, point: usize, time: usize, component: usize) -> f64 {
        self.values[self.index(point, time) + component]
    }

    /// The `m`-vector `Z(points[point]; times[time])`.
    pub fn vector(&self, point: usize, time: usize) -> &[f64] {
        let i = self.index(point, time);
        &self.values[i..i + self.m]
    }

    /// `W_n(times[time])`; zero for degrees beyond the truncation.
    pub fn coefficient(&self, n: usize, time: usize) -> Vec<f64> {
        self.coefficients.get(n).map_or_else(|| vec![0.0; self.m], |c| c[time].clone())
    }

    /// Evaluates the recorded series at an arbitrary point.
    pub fn field_at(&self, x: &Point, time: usize) -> Result<Vec<f64>> {
        let p = self.jacobi_at(x)?;
        Ok(combine(&self.coefficients, &p, time, self.m))
    }

    /// The degree-`n` term `W_n(t) P_n(cos ρ(x, U))` at a stored point.
    pub fn degree_term(&self, n: usize, point: usize, time: usize) -> Result<Vec<f64>> {
        if n > self.trunc {
            return Err(Error::Range(format!("degree {n} exceeds the truncation {}", self.trunc)));
        }
        let p = self.jacobi_at(&self.points[point])?;
        Ok(self.coefficients[n][time].iter().map(|w| w * p[n]).collect())
    }

    fn jacobi_at(&self, x: &Point) -> Result<Vec<f64>> {
        let c = self.space.cos_distance(x, &self.latent_u)?;
        jacobi_all(self.trunc, self.space.geom, c)
    }

    /// `ρ(points[a], points[b])`.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        self.space.distance(&self.points[a], &self.points[b])
    }
}

fn combine(coefficients: &[Vec<Vec<f64>>], p: &[f64], time: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (w, pn) in coefficients.iter().zip(p) {
        for (o, wc) in out.iter_mut().zip(&w[time]) {
            *o += wc * pn;
        }
    }
    out
}

/// How the latent process of one degree is drawn.
#[derive(Debug, Clone)]
enum DegreeSampler {
    /// `W(t) = a B^{1/2} g` at every time.
    Frozen { root: Mat },
    /// `W(t) = a B^{1/2} ξ(t)` with independent stationary Markov components.
    Separable { root: Mat, corr: ScalarCorrelation },
    /// `W(t) = a (ε(t) + Φ ε(t-1))`, `ε = Σ^{1/2} g`.
    Ma1 { sigma_root: Mat, phi: Mat },
    /// Joint draw from the full time-block covariance.
    Block { root: Mat },
}

fn gaussian_vector(rng: &mut ChaCha12Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

impl DegreeSampler {
    fn draw(&self, a: f64, times: &[f64], m: usize, rng: &mut ChaCha12Rng) -> Vec<Vec<f64>> {
        let to_vec = |v: DVector<f64>| v.iter().map(|x| a * x).collect::<Vec<f64>>();
        match self {
            DegreeSampler::Frozen { root } => {
                let w = to_vec(root * gaussian_vector(rng, m));
                vec![w; times.len()]
            }
            DegreeSampler::Separable { root, corr } => {
                // Stationary start, then exact transitions across each gap.
                let mut xi = gaussian_vector(rng, m);
                let mut out = Vec::with_capacity(times.len());
                for (k, &t) in times.iter().enumerate() {
                    if k > 0 {
                        let r = corr.value(t - times[k - 1]);
                        let innovation = (1.0 - r * r).max(0.0).sqrt();
                        xi = xi * r + gaussian_vector(rng, m) * innovation;
                    }
                    out.push(to_vec(root * &xi));
                }
                out
            }
            DegreeSampler::Ma1 { sigma_root, phi } => {
                let mut needed: Vec<i64> = times.iter().flat_map(|&t| [t as i64 - 1, t as i64]).collect();
                needed.sort_unstable();
                needed.dedup();
                let eps: BTreeMap<i64, DVector<f64>> =
                    needed.into_iter().map(|s| (s, sigma_root * gaussian_vector(rng, m))).collect();
                times
                    .iter()
                    .map(|&t| {
                        let t = t as i64;
                        to_vec(&eps[&t] + phi * &eps[&(t - 1)])
                    })
                    .collect()
            }
            DegreeSampler::Block { root } => {
                let w = root * gaussian_vector(rng, root.nrows());
                (0..times.len()).map(|k| w.rows(k * m, m).iter().map(|x| a * x).collect()).collect()
            }
        }
    }
}

/// A validated model prepared for repeated simulation at fixed points and times.
#[derive(Debug, Clone)]
pub struct Simulator {
    space: SpaceParams,
    m: usize,
    hash: String,
    points: Vec<Point>,
    times: Vec<f64>,
    trunc: usize,
    a: Vec<f64>,
    samplers: Vec<DegreeSampler>,
}

fn invalid(report: &ValidityReport) -> Error {
    let v = report.first().expect("invalid report has a violation");
    Error::InvalidModel(format!(
        "{} violation(s); first: {:?} at degree {} (lag {}), magnitude {:e}",
        report.violations.len(),
        v.kind,
        v.degree,
        v.lag,
        v.magnitude
    ))
}

impl Simulator {
    /// Validates `model` and precomputes every matrix root.
    ///
    /// Spatial models take no times (a single time 0 is used). Spatio-temporal
    /// models need strictly increasing times admissible for their lag domain;
    /// validity is probed on every lag the times span.
    pub fn new(model: &Model, points: Vec<Point>, times: Option<Vec<f64>>, trunc: usize) -> Result<Self> {
        let space = model.space().clone();
        if trunc > model.max_degree() {
            return Err(Error::Range(format!(
                "truncation {trunc} exceeds the stored maximum degree {}",
                model.max_degree()
            )));
        }
        space.base_point()?;
        for p in &points {
            space.check_point(p)?;
        }
        let m = model.dim();
        let (times, samplers) = match model {
            Model::Spatial(s) => {
                if times.as_ref().is_some_and(|t| t.as_slice() != [0.0]) {
                    return Err(Error::Usage("a spatial model is simulated at a single time".into()));
                }
                (vec![0.0], Self::spatial_samplers(s, trunc)?)
            }
            Model::SpatioTemporal(s) => {
                let times = times.unwrap_or_else(|| vec![0.0]);
                if times.is_empty() {
                    return Err(Error::Usage("at least one time is required".into()));
                }
                if times.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Usage("times must be strictly increasing".into()));
                }
                for &t in &times {
                    s.lag_domain().check(t)?;
                }
                let samplers = Self::temporal_samplers(s, &times, trunc)?;
                (times, samplers)
            }
        };
        let a = (0..=trunc).map(|n| space.a_constant(n)).collect();
        Ok(Self { hash: model_hash(model), space, m, points, times, trunc, a, samplers })
    }

    fn spatial_samplers(model: &SpatialModel, trunc: usize) -> Result<Vec<DegreeSampler>> {
        let report = validate_spatial(model);
        if !report.valid {
            return Err(invalid(&report));
        }
        model.coeffs()[..=trunc].iter().map(|b| Ok(DegreeSampler::Frozen { root: matrix_sqrt(b)? })).collect()
    }

    fn temporal_samplers(model: &SpatioTemporalModel, times: &[f64], trunc: usize) -> Result<Vec<DegreeSampler>> {
        let probes: Vec<f64> = times.iter().map(|t| t - times[0]).collect();
        let report = validate_spatiotemporal(model, &probes)?;
        if !report.valid {
            return Err(invalid(&report));
        }
        let m = model.dim();
        (0..=trunc)
            .map(|n| {
                let b = &model.base()[n];
                Ok(match model.kernel() {
                    TemporalKernel::PureSpatial => DegreeSampler::Frozen { root: matrix_sqrt(b)? },
                    TemporalKernel::Separable(corr) => DegreeSampler::Separable { root: matrix_sqrt(b)?, corr: *corr },
                    TemporalKernel::VectorMa1 { phi } => {
                        DegreeSampler::Ma1 { sigma_root: matrix_sqrt(b)?, phi: phi.clone() }
                    }
                    TemporalKernel::LagTable(_) => {
                        let k = times.len();
                        let mut block = Mat::zeros(k * m, k * m);
                        for (i, ti) in times.iter().enumerate() {
                            for (j, tj) in times.iter().enumerate() {
                                block.view_mut((i * m, j * m), (m, m)).copy_from(&model.coeff_unchecked(n, ti - tj));
                            }
                        }
                        DegreeSampler::Block { root: sqrt_with_tolerance(&block, BLOCK_TOLERANCE)? }
                    }
                })
            })
            .collect()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// One realization. `U` uses stream 0 of `seed` and degree `n` stream `n + 1`.
    pub fn run(&self, seed: u64) -> Result<Realization> {
        let latent_u = self.space.sample_uniform(&mut stream_rng(seed, U_STREAM))?;
        let coefficients: Vec<Vec<Vec<f64>>> = self
            .samplers
            .iter()
            .enumerate()
            .map(|(n, s)| s.draw(self.a[n], &self.times, self.m, &mut stream_rng(seed, degree_stream(n))))
            .collect();
        let per_point: Vec<Vec<f64>> = self
            .points
            .par_iter()
            .map(|x| {
                let c = self.space.cos_distance_unchecked(x, &latent_u);
                let p = jacobi_all(self.trunc, self.space.geom, c).expect("cosine lies in [-1, 1]");
                (0..self.times.len()).flat_map(|k| combine(&coefficients, &p, k, self.m)).collect()
            })
            .collect();
        Ok(Realization {
            space: self.space.clone(),
            m: self.m,
            model_hash: self.hash.clone(),
            points: self.points.clone(),
            times: self.times.clone(),
            values: per_point.concat(),
            latent_u,
            trunc: self.trunc,
            seed,
            coefficients,
        })
    }

    /// `replicates` independent realizations with seeds `derive_seed(seed, r)`.
    pub fn ensemble(&self, seed: u64, replicates: usize) -> Result<Vec<Realization>> {
        (0..replicates).into_par_iter().map(|r| self.run(derive_seed(seed, r as u64))).collect()
    }
}

/// Simulates a spatial model at `points`.
pub fn simulate_spatial(model: &SpatialModel, points: &[Point], trunc: usize, seed: u64) -> Result<Realization> {
    Simulator::new(&Model::Spatial(model.clone()), points.to_vec(), None, trunc)?.run(seed)
}

/// Simulates a spatio-temporal model at `points × times`.
pub fn simulate_spatiotemporal(
    model: &SpatioTemporalModel,
    points: &[Point],
    times: &[f64],
    trunc: usize,
    seed: u64,
) -> Result<Realization> {
    Simulator::new(&Model::SpatioTemporal(model.clone()), points.to_vec(), Some(times.to_vec()), trunc)?.run(seed)
}
