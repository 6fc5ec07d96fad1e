//! Numerical oracles for the identities behind the series representation.
//!
//! Monte-Carlo integrals over a space use `∫ f dx = ω_d E[f(X)]` with `X`
//! uniform. Every estimate carries its standard error and a z-score against
//! the analytic target; the default acceptance threshold is 5.

pub mod exact;
mod suite;

use std::collections::HashSet;

use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::simulate::Realization;
use crate::spaces::{Point, SpaceParams};
use crate::spectral::{eval_cov_cos, model_hash, Model};
use crate::specialfn::{jacobi_all, jacobi_at_one};
use crate::stats::{chunked_moments, Moments};

pub use suite::{
    all_spaces, check_space_identities, run_checks, CheckOptions, CheckRecord, CheckReport, DEFAULT_MC_SPACES,
};

/// Default z-score acceptance threshold.
pub const Z_THRESHOLD: f64 = 5.0;
/// Smallest replicate count accepted by the Monte-Carlo oracles.
pub const MIN_REPLICATES: usize = 1000;

/// A Monte-Carlo estimate with its analytic target.
#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    pub value: Mat,
    pub std_error: Mat,
    pub replicates: usize,
    pub target: Mat,
    /// `max |value - target| / std_error` over components.
    pub z_score: f64,
}

/// `|v - t| / se`; a zero standard error gives 0 when `v` matches `t` to
/// rounding and infinity otherwise.
pub fn z_component(value: f64, se: f64, target: f64) -> f64 {
    let diff = (value - target).abs();
    if se > 0.0 {
        diff / se
    } else if diff <= 1e-12 * target.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

impl MCEstimate {
    fn new(value: Mat, std_error: Mat, replicates: usize, target: Mat) -> Self {
        let z_score = value
            .iter()
            .zip(std_error.iter())
            .zip(target.iter())
            .map(|((v, s), t)| z_component(*v, *s, *t))
            .fold(0.0, f64::max);
        Self { value, std_error, replicates, target, z_score }
    }

    /// Builds an estimate from moments of row-major flattened samples.
    fn from_moments(m: &Moments, offset: usize, rows: usize, cols: usize, target: Mat) -> Self {
        let len = rows * cols;
        let value = Mat::from_row_slice(rows, cols, &m.mean()[offset..offset + len]);
        let se = Mat::from_row_slice(rows, cols, &m.std_error()[offset..offset + len]);
        Self::new(value, se, m.count() as usize, target)
    }

    pub fn scalar(&self) -> f64 {
        self.value[(0, 0)]
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.z_score <= threshold
    }
}

fn scalar(v: f64) -> Mat {
    Mat::from_element(1, 1, v)
}

fn require_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::Usage(format!("at least {MIN_REPLICATES} replicates are required, got {replicates}")));
    }
    Ok(())
}

fn uniform(space: &SpaceParams, rng: &mut ChaCha12Rng) -> Point {
    space.sample_uniform(rng).expect("point model checked by the caller")
}

/// Funk–Hecke orthogonality for all `0 ≤ i, j ≤ max_degree` from one sample.
///
/// Entry `(i, j)` estimates `ω_d E[P_i(cos ρ(x₁, U)) P_j(cos ρ(x₂, U))]`
/// with target `δ_ij ω_d / a_i² · P_i(cos ρ(x₁, x₂))`. `a_scale` multiplies
/// every `a_n` with `n ≥ 1` in the targets (fault injection only).
pub fn mc_funk_hecke_grid(
    space: &SpaceParams,
    max_degree: usize,
    x1: &Point,
    x2: &Point,
    replicates: usize,
    seed: u64,
    a_scale: f64,
) -> Result<Vec<Vec<MCEstimate>>> {
    require_replicates(replicates)?;
    let c12 = space.cos_distance(x1, x2)?;
    let k = max_degree + 1;
    let omega = space.volume;
    let geom = space.geom;
    let mom = chunked_moments(k * k, replicates, seed, |rng, out| {
        let u = uniform(space, rng);
        let p1 = jacobi_all(max_degree, geom, space.cos_distance_unchecked(x1, &u)).expect("cosine in range");
        let p2 = jacobi_all(max_degree, geom, space.cos_distance_unchecked(x2, &u)).expect("cosine in range");
        for i in 0..k {
            for j in 0..k {
                out[i * k + j] = omega * p1[i] * p2[j];
            }
        }
    });
    let p12 = jacobi_all(max_degree, geom, c12)?;
    Ok((0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let target = if i == j { omega / scaled_a_squared(space, i, a_scale) * p12[i] } else { 0.0 };
                    MCEstimate::from_moments(&mom, i * k + j, 1, 1, scalar(target))
                })
                .collect()
        })
        .collect())
}

fn scaled_a_squared(space: &SpaceParams, n: usize, a_scale: f64) -> f64 {
    let s = if n == 0 { 1.0 } else { a_scale * a_scale };
    space.a_squared(n) * s
}

/// `ω_d E[P_i(cos ρ(x₁, U)) P_j(cos ρ(x₂, U))]` against `δ_ij ω_d / a_i² · P_i(cos ρ(x₁, x₂))`.
pub fn mc_funk_hecke(
    space: &SpaceParams,
    i: usize,
    j: usize,
    x1: &Point,
    x2: &Point,
    replicates: usize,
    seed: u64,
) -> Result<MCEstimate> {
    let grid = mc_funk_hecke_grid(space, i.max(j), x1, x2, replicates, seed, 1.0)?;
    Ok(grid[i][j].clone())
}

/// Moments of the zonal field `Z_n(x) = a_n P_n(cos ρ(x, U))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalCovariance {
    /// `E Z_n(x₁)`, target 0.
    pub mean: MCEstimate,
    /// `E Z_n(x₁) Z_n(x₂)`, target `P_n(cos ρ(x₁, x₂))`.
    pub cov: MCEstimate,
    /// `E Z_k(x₁) Z_n(x₂)` for the other degree `k`, target 0.
    pub cross: MCEstimate,
}

/// Mean, covariance and cross-degree covariance of zonal fields.
#[allow(clippy::too_many_arguments)]
pub fn mc_zonal_covariance(
    space: &SpaceParams,
    n: usize,
    other: usize,
    x1: &Point,
    x2: &Point,
    replicates: usize,
    seed: u64,
) -> Result<ZonalCovariance> {
    zonal_with_scale(space, n, other, x1, x2, replicates, seed, 1.0)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn zonal_with_scale(
    space: &SpaceParams,
    n: usize,
    other: usize,
    x1: &Point,
    x2: &Point,
    replicates: usize,
    seed: u64,
    a_scale: f64,
) -> Result<ZonalCovariance> {
    if n == 0 || other == n {
        return Err(Error::Usage(format!("zonal oracle needs n >= 1 and a different second degree, got {n} and {other}")));
    }
    require_replicates(replicates)?;
    let c12 = space.cos_distance(x1, x2)?;
    let top = n.max(other);
    let geom = space.geom;
    let (an, ak) = (space.a_constant(n), space.a_constant(other));
    let mom = chunked_moments(3, replicates, seed, |rng, out| {
        let u = uniform(space, rng);
        let p1 = jacobi_all(top, geom, space.cos_distance_unchecked(x1, &u)).expect("cosine in range");
        let p2 = jacobi_all(top, geom, space.cos_distance_unchecked(x2, &u)).expect("cosine in range");
        let zn1 = an * p1[n];
        let zn2 = an * p2[n];
        out[0] = zn1;
        out[1] = zn1 * zn2;
        out[2] = ak * p1[other] * zn2;
    });
    // With a_n scaled by s the field covariance becomes s² P_n; the target stays P_n.
    let s2 = a_scale * a_scale;
    let cov_target = jacobi_all(n, geom, c12)?[n];
    let mut cov = MCEstimate::from_moments(&mom, 1, 1, 1, scalar(cov_target));
    if s2 != 1.0 {
        cov = MCEstimate::new(&cov.value * s2, &cov.std_error * s2, cov.replicates, cov.target);
    }
    Ok(ZonalCovariance {
        mean: MCEstimate::from_moments(&mom, 0, 1, 1, scalar(0.0)),
        cov,
        cross: MCEstimate::from_moments(&mom, 2, 1, 1, scalar(0.0)),
    })
}

/// Cross-covariance `E[Z(x_a; t + lag) Z(x_b; t)ᵀ]` across replicates.
///
/// Within a replicate the products are averaged over every time pair at the
/// requested lag; the replicates are the independent samples. The target is
/// `eval_cov(ρ(x_a, x_b), lag, trunc)` for `model`.
pub fn empirical_cov(model: &Model, realizations: &[Realization], pair: (usize, usize), lag: f64) -> Result<MCEstimate> {
    let first = realizations.first().ok_or_else(|| Error::Usage("no realizations given".into()))?;
    let hash = model_hash(model);
    let mut seeds = HashSet::with_capacity(realizations.len());
    for r in realizations {
        if r.model_hash != hash || r.points != first.points || r.times != first.times || r.trunc != first.trunc {
            return Err(Error::Usage("realizations differ in model, points, times or truncation".into()));
        }
        if !seeds.insert(r.seed) {
            return Err(Error::Usage(format!("seed {} appears twice", r.seed)));
        }
    }
    let (a, b) = pair;
    if a >= first.points.len() || b >= first.points.len() {
        return Err(Error::Range(format!("point pair ({a}, {b}) out of range")));
    }
    let offsets: Vec<(usize, usize)> = (0..first.times.len())
        .flat_map(|k1| (0..first.times.len()).map(move |k2| (k1, k2)))
        .filter(|&(k1, k2)| first.times[k1] - first.times[k2] == lag)
        .collect();
    if offsets.is_empty() {
        return Err(Error::Usage(format!("lag {lag} is not realised on the time grid")));
    }
    let m = first.m;
    let mut mom = Moments::new(m * m);
    let mut sample = vec![0.0; m * m];
    for r in realizations {
        sample.iter_mut().for_each(|s| *s = 0.0);
        for &(k1, k2) in &offsets {
            let (za, zb) = (r.vector(a, k1), r.vector(b, k2));
            for i in 0..m {
                for j in 0..m {
                    sample[i * m + j] += za[i] * zb[j];
                }
            }
        }
        sample.iter_mut().for_each(|s| *s /= offsets.len() as f64);
        mom.push(&sample);
    }
    let c = first.space.cos_distance(&first.points[a], &first.points[b])?;
    let target = eval_cov_cos(model, c, lag, first.trunc)?;
    Ok(MCEstimate::from_moments(&mom, 0, m, m, target))
}

/// Recovers `W_n(t)` from a realization by the projection integral
/// `a_n² / (ω_d P_n(1)) ∫ Z(x; t) P_n(cos ρ(x, U)) dx`.
///
/// Returns one `m × 1` estimate per stored time; the target is the recorded
/// `W_n(t)`, which is zero for degrees beyond the truncation.
pub fn mc_recover_vn(realization: &Realization, n: usize, abscissae: usize, seed: u64) -> Result<Vec<MCEstimate>> {
    recover_with_scale(realization, n, abscissae, seed, 1.0)
}

pub(crate) fn recover_with_scale(
    r: &Realization,
    n: usize,
    abscissae: usize,
    seed: u64,
    a_scale: f64,
) -> Result<Vec<MCEstimate>> {
    if r.coefficients.len() != r.trunc + 1 {
        return Err(Error::Usage("realization does not carry its latent coefficients".into()));
    }
    require_replicates(abscissae)?;
    let space = &r.space;
    space.check_point(&r.latent_u)?;
    let (nt, m) = (r.times.len(), r.m);
    let geom = space.geom;
    let top = n.max(r.trunc);
    // ω_d cancels between the Monte-Carlo integral and the normalisation.
    let scale = scaled_a_squared(space, n, a_scale) / jacobi_at_one(n, geom);
    let mom = chunked_moments(nt * m, abscissae, seed, |rng, out| {
        let x = uniform(space, rng);
        let p = jacobi_all(top, geom, space.cos_distance_unchecked(&x, &r.latent_u)).expect("cosine in range");
        let weight = scale * p[n];
        for k in 0..nt {
            for c in 0..m {
                let z: f64 = r.coefficients.iter().zip(&p).map(|(w, pj)| w[k][c] * pj).sum();
                out[k * m + c] = z * weight;
            }
        }
    });
    Ok((0..nt)
        .map(|k| {
            let target = Mat::from_column_slice(m, 1, &r.coefficient(n, k));
            MCEstimate::from_moments(&mom, k * m, m, 1, target)
        })
        .collect())
}

#[cfg(test)]
mod tests;
