//! The identity suite behind the `check` command.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use super::exact::{self, PiMultiple};
use super::{mc_funk_hecke_grid, recover_with_scale, zonal_with_scale, MCEstimate, Z_THRESHOLD};
use crate::error::Result;
use crate::linalg::Mat;
use crate::rng::derive_seed;
use crate::simulate::Simulator;
use crate::spaces::{make_space, SpaceFamily, SpaceParams, MAX_DIMENSION};
use crate::spectral::{Model, SpatioTemporalModel, TemporalKernel};
use crate::specialfn::jacobi_at_one;

/// Spaces used by the Monte-Carlo oracles unless configured otherwise.
pub const DEFAULT_MC_SPACES: [&str; 4] = ["sphere:2", "projR:3", "projC:4", "projH:8"];

/// Relative tolerance for closed-form float values against exact ones.
const FLOAT_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for the volume relation in floating point.
const VOLUME_TOLERANCE: f64 = 1e-9;

/// One checked identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity being checked, in words and symbols.
    pub reference: String,
    pub target: f64,
    pub estimate: f64,
    /// Standard error (Monte-Carlo records only).
    pub se: Option<f64>,
    /// z-score (Monte-Carlo records only).
    pub z: Option<f64>,
    /// Relative tolerance (deterministic records only).
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl CheckRecord {
    fn exact(name: String, reference: &str, target: f64, estimate: f64, tolerance: f64, holds: bool) -> Self {
        let rel = if target == 0.0 { estimate.abs() } else { ((estimate - target) / target).abs() };
        CheckRecord {
            name,
            reference: reference.into(),
            target,
            estimate,
            se: None,
            z: None,
            tolerance: Some(tolerance),
            pass: holds && rel <= tolerance,
        }
    }

    fn monte_carlo(name: String, reference: &str, e: &MCEstimate, component: (usize, usize)) -> Self {
        let (target, estimate, se) = (e.target[component], e.value[component], e.std_error[component]);
        let z = super::z_component(estimate, se, target);
        CheckRecord {
            name,
            reference: reference.into(),
            target,
            estimate,
            se: Some(se),
            z: Some(z),
            tolerance: None,
            pass: z <= Z_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub seed: u64,
    /// Samples per Monte-Carlo oracle.
    pub replicates: usize,
    /// Spaces for the Monte-Carlo oracles.
    pub spaces: Vec<SpaceParams>,
    /// Degrees `0..=max_degree` in the orthogonality and zonal oracles.
    pub max_degree: usize,
    /// Random point pairs per space in the orthogonality oracle.
    pub point_pairs: usize,
    /// Largest `n` in the eigenspace identities.
    pub identity_degree: usize,
    /// Largest dimension enumerated for the closed-form identities.
    pub identity_max_dimension: usize,
    /// Multiplies every `a_n` (`n ≥ 1`); anything but 1 must make the suite fail.
    pub a_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: crate::rng::DEFAULT_SEED,
            replicates: 100_000,
            spaces: DEFAULT_MC_SPACES.iter().map(|s| s.parse().expect("valid designation")).collect(),
            max_degree: 4,
            point_pairs: 3,
            identity_degree: 50,
            identity_max_dimension: MAX_DIMENSION,
            a_scale: 1.0,
        }
    }
}

/// Every space of dimension at most `max_d`.
pub fn all_spaces(max_d: usize) -> Vec<SpaceParams> {
    let mut out = Vec::new();
    for family in SpaceFamily::ALL {
        for d in 1..=max_d.min(MAX_DIMENSION) {
            if let Ok(s) = make_space(family, d) {
                out.push(s);
            }
        }
    }
    out
}

/// Closed-form identities of one space, checked exactly and in floating point.
pub fn check_space_identities(space: &SpaceParams) -> Vec<CheckRecord> {
    space_identities(space, 50, 1.0)
}

fn space_identities(space: &SpaceParams, max_n: usize, a_scale: f64) -> Vec<CheckRecord> {
    let tag = space.designation();
    let mut out = Vec::new();

    let omega = exact::volume(space);
    let rhs = exact::weinstein(space) * exact::sphere_volume(space.d);
    let float_rhs = space.weinstein as f64 * crate::spaces::sphere_volume(space.d);
    out.push(CheckRecord::exact(
        format!("{tag} volume"),
        "ω_d = (4π)^{α+1} Γ(β+1)/Γ(α+β+2) equals i(M^d) times the sphere volume",
        float_rhs,
        space.volume,
        VOLUME_TOLERANCE,
        omega == rhs,
    ));

    let w = exact::weinstein(space);
    let table = PiMultiple::natural(space.weinstein);
    out.push(CheckRecord::exact(
        format!("{tag} weinstein"),
        "i(M^d) = 2^{2α+1} Γ(α+3/2) Γ(β+1) / (√π Γ(α+β+2)) is the tabulated integer",
        space.weinstein as f64,
        space.weinstein_formula(),
        FLOAT_TOLERANCE * 10.0,
        exact::is_natural(&w) && w == table,
    ));

    let (two_a, two_b) = (2.0 * space.alpha() + 2.0, 2.0 * space.beta() + 2.0);
    out.push(CheckRecord::exact(
        format!("{tag} dimensions"),
        "d = 2α + 2 and e = 2β + 2",
        space.d as f64,
        two_a,
        0.0,
        two_b == space.e as f64,
    ));

    // a_n² P_n(1) = dim H_n: the recurrence table must agree with the closed
    // forms at the top degree, every entry must be a natural number, and the
    // float routines are compared against it (worst n reported).
    let table = exact::degree_table(space, max_n);
    let top = &table[max_n];
    let mut holds = top.a_squared == exact::a_squared(space, max_n)
        && top.jacobi_at_one == exact::jacobi_at_one(space, max_n)
        && top.dim == exact::dim_eigenspace(space, max_n);
    let (mut worst, mut worst_n) = (0.0, 0);
    let mut dim_ok = true;
    let (mut dim_worst, mut dim_worst_n) = (0.0, 0);
    for (n, c) in table.iter().enumerate() {
        holds &= c.a_squared.clone() * c.jacobi_at_one.clone() == c.dim;
        dim_ok &= exact::is_natural(&c.dim);
        let s = if n == 0 { 1.0 } else { a_scale * a_scale };
        let e = exact::relative_error(space.a_squared(n) * s * jacobi_at_one(n, space.geom), &c.dim);
        if !(e <= worst) {
            (worst, worst_n) = (e, n);
        }
        let e = exact::relative_error(space.dim_eigenspace(n), &c.dim);
        if !(e <= dim_worst) {
            (dim_worst, dim_worst_n) = (e, n);
        }
    }
    let dim_at = |n: usize| table[n].dim.to_f64();
    let s = if worst_n == 0 { 1.0 } else { a_scale * a_scale };
    out.push(CheckRecord::exact(
        format!("{tag} a_n^2 P_n(1) = dim H_n (n <= {max_n}, worst n = {worst_n})"),
        "a_n² P_n^{(α,β)}(1) = dim H_n",
        dim_at(worst_n),
        space.a_squared(worst_n) * s * jacobi_at_one(worst_n, space.geom),
        FLOAT_TOLERANCE,
        holds,
    ));
    out.push(CheckRecord::exact(
        format!("{tag} dim H_n integral (n <= {max_n}, worst n = {dim_worst_n})"),
        "dim H_n is a nonnegative integer",
        dim_at(dim_worst_n),
        space.dim_eigenspace(dim_worst_n),
        FLOAT_TOLERANCE,
        dim_ok,
    ));
    if space.family == SpaceFamily::Sphere && space.d == 2 {
        let ok = table.iter().enumerate().all(|(n, c)| c.dim == PiMultiple::integer(2 * n as i64 + 1));
        out.push(CheckRecord::exact(
            format!("{tag} dim H_n = 2n + 1"),
            "dim H_n = 2n + 1 on the 2-sphere",
            (2 * max_n + 1) as f64,
            space.dim_eigenspace(max_n),
            FLOAT_TOLERANCE,
            ok,
        ));
    }
    out
}

const FUNK_HECKE: &str = "∫ P_i(cos ρ(x₁,x)) P_j(cos ρ(x₂,x)) dx = δ_ij ω_d/a_i² P_i(cos ρ(x₁,x₂))";
const ZONAL_MEAN: &str = "E Z_n(x) = 0 for Z_n(x) = a_n P_n(cos ρ(x,U))";
const ZONAL_COV: &str = "cov(Z_n(x₁), Z_n(x₂)) = P_n(cos ρ(x₁,x₂))";
const ZONAL_CROSS: &str = "cov(Z_k(x₁), Z_n(x₂)) = 0 for k ≠ n";
const RECOVERY: &str = "V_n(t) = a_n²/(ω_d P_n(1)) ∫ Z(x;t) P_n(cos ρ(x,U)) dx";

/// Closed-form identities on every space, then the Monte-Carlo oracles.
pub fn run_checks(opts: &CheckOptions) -> Result<CheckReport> {
    let mut records = Vec::new();
    for space in all_spaces(opts.identity_max_dimension) {
        records.extend(space_identities(&space, opts.identity_degree, opts.a_scale));
    }

    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        derive_seed(opts.seed, stream)
    };
    for space in &opts.spaces {
        // Fails with UnsupportedGeometry for spaces without a point model.
        space.base_point()?;
        let tag = space.designation();
        let mut rng = ChaCha12Rng::seed_from_u64(next_seed());
        let pairs = (0..opts.point_pairs.max(1))
            .map(|_| Ok((space.sample_uniform(&mut rng)?, space.sample_uniform(&mut rng)?)))
            .collect::<Result<Vec<_>>>()?;
        for (k, (x1, x2)) in pairs.iter().enumerate() {
            let grid = mc_funk_hecke_grid(space, opts.max_degree, x1, x2, opts.replicates, next_seed(), opts.a_scale)?;
            for (i, row) in grid.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    records.push(CheckRecord::monte_carlo(format!("{tag} funk-hecke i={i} j={j} pair {k}"), FUNK_HECKE, e, (0, 0)));
                }
            }
        }
        let (x1, x2) = &pairs[0];
        for n in 1..=opts.max_degree.max(1) {
            let other = if n == 1 { 2 } else { n - 1 };
            let z = zonal_with_scale(space, n, other, x1, x2, opts.replicates, next_seed(), opts.a_scale)?;
            records.push(CheckRecord::monte_carlo(format!("{tag} zonal mean n={n}"), ZONAL_MEAN, &z.mean, (0, 0)));
            records.push(CheckRecord::monte_carlo(format!("{tag} zonal covariance n={n}"), ZONAL_COV, &z.cov, (0, 0)));
            records.push(CheckRecord::monte_carlo(
                format!("{tag} zonal cross k={other} n={n}"),
                ZONAL_CROSS,
                &z.cross,
                (0, 0),
            ));
        }
    }

    records.extend(recovery_checks(opts, next_seed(), next_seed())?);
    let passed = records.iter().all(|r| r.pass);
    Ok(CheckReport { passed, records })
}

/// Recovers every degree of an MA(1) realization on the 2-sphere, plus one
/// absent degree.
fn recovery_checks(opts: &CheckOptions, sim_seed: u64, mc_seed: u64) -> Result<Vec<CheckRecord>> {
    let space: SpaceParams = "sphere:2".parse().expect("valid designation");
    let sigmas = vec![
        Mat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]),
        Mat::from_row_slice(2, 2, &[0.5, -0.1, -0.1, 0.4]),
        Mat::identity(2, 2) * 0.25,
    ];
    let phi = Mat::from_row_slice(2, 2, &[0.6, 0.2, -0.3, 0.4]);
    let model = SpatioTemporalModel::new(space, sigmas, TemporalKernel::VectorMa1 { phi }, None)?;
    let sim = Simulator::new(&Model::SpatioTemporal(model), Vec::new(), Some(vec![0.0, 1.0]), 2)?;
    let real = sim.run(sim_seed)?;
    let mut out = Vec::new();
    for n in 0..=3 {
        let est = recover_with_scale(&real, n, opts.replicates, derive_seed(mc_seed, n as u64), opts.a_scale)?;
        for (k, e) in est.iter().enumerate() {
            for c in 0..real.m {
                out.push(CheckRecord::monte_carlo(
                    format!("sphere:2 recover V_n n={n} t={} component {c}", real.times[k]),
                    RECOVERY,
                    e,
                    (c, 0),
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(super) fn space_identities_for_tests(space: &SpaceParams, a_scale: f64) -> Vec<CheckRecord> {
    space_identities(space, 50, a_scale)
}
