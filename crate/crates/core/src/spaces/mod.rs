//! Compact two-point homogeneous spaces: parameters, geometry and sampling.
//!
//! Distances are normalised so that every closed geodesic has length `2π`;
//! the diameter is therefore `π` in every family. All series use the
//! geometric Jacobi pair, where every zonal function reads
//! `R_n^{(α,β)}(cos ρ)`. The Lie-algebra pair is kept only for the
//! Laplace–Beltrami eigenvalues.

mod point;
mod quaternion;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub use point::{Point, NORM_TOLERANCE};
pub use quaternion::Quaternion;

use crate::error::{Error, Result};
use crate::specialfn::{jacobi_all, jacobi_normalized, ln_gamma, JacobiParams};

/// Largest topological dimension accepted by [`make_space`].
pub const MAX_DIMENSION: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceFamily {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionProjective,
    OctonionProjective,
}

impl SpaceFamily {
    pub const ALL: [SpaceFamily; 5] = [
        SpaceFamily::Sphere,
        SpaceFamily::RealProjective,
        SpaceFamily::ComplexProjective,
        SpaceFamily::QuaternionProjective,
        SpaceFamily::OctonionProjective,
    ];

    /// Short token used in `family:dimension` designations.
    pub fn token(self) -> &'static str {
        match self {
            SpaceFamily::Sphere => "sphere",
            SpaceFamily::RealProjective => "projR",
            SpaceFamily::ComplexProjective => "projC",
            SpaceFamily::QuaternionProjective => "projH",
            SpaceFamily::OctonionProjective => "projO",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "sphere" | "s" => SpaceFamily::Sphere,
            "projr" | "rp" => SpaceFamily::RealProjective,
            "projc" | "cp" => SpaceFamily::ComplexProjective,
            "projh" | "hp" => SpaceFamily::QuaternionProjective,
            "projo" | "op" => SpaceFamily::OctonionProjective,
            _ => return None,
        })
    }

    /// Whether points, distances and sampling are available.
    pub fn has_point_model(self) -> bool {
        self != SpaceFamily::OctonionProjective
    }
}

/// Everything numeric about one space `M^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceParams {
    pub family: SpaceFamily,
    pub d: usize,
    /// Geometric pair, used by every series.
    pub geom: JacobiParams,
    /// Lie-algebra pair, used only by [`SpaceParams::laplace_eigenvalue`].
    pub lie: JacobiParams,
    /// Dimension of the antipodal manifold.
    pub p: usize,
    pub q: usize,
    pub epsilon: u32,
    /// Total Riemannian volume `ω_d`.
    pub volume: f64,
    /// Ratio of the volume to that of the sphere of the same dimension.
    pub weinstein: u128,
    /// Dimension spanned by tangents of geodesics from a point to its antipodal manifold.
    pub e: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Builds the parameter record for `family` in dimension `d`.
pub fn make_space(family: SpaceFamily, d: usize) -> Result<SpaceParams> {
    use SpaceFamily::*;
    let bad = |rule: &str| Err(Error::Config(format!("{}:{d} violates {rule}", family.token())));
    match family {
        Sphere if d < 1 => return bad("d >= 1"),
        RealProjective if d < 2 => return bad("d >= 2"),
        ComplexProjective if d < 4 || !d.is_multiple_of(2) => return bad("d even and >= 4"),
        QuaternionProjective if d < 8 || !d.is_multiple_of(4) => return bad("d divisible by 4 and >= 8"),
        OctonionProjective if d != 16 => return bad("d = 16"),
        _ => {}
    }
    if d > MAX_DIMENSION {
        return bad(&format!("d <= {MAX_DIMENSION}"));
    }

    // (p, q) pairs: geometric, then Lie-algebraic.
    let ((p, q), (pl, ql)) = match family {
        Sphere => ((0, d - 1), (0, d - 1)),
        RealProjective => ((d - 1, 0), (0, d - 1)),
        ComplexProjective => ((d - 2, 1), (d - 2, 1)),
        QuaternionProjective => ((d - 4, 3), (d - 4, 3)),
        OctonionProjective => ((8, 7), (8, 7)),
    };
    let pair = |p: usize, q: usize| JacobiParams::new((p as f64 + q as f64 - 1.0) / 2.0, (q as f64 - 1.0) / 2.0);
    let geom = pair(p, q)?;
    let lie = pair(pl, ql)?;
    let (alpha, beta) = (geom.alpha(), geom.beta());

    let e = (2.0 * beta + 2.0).round() as usize;
    let du = d as u128;
    let weinstein = match family {
        Sphere => 1,
        RealProjective => 1u128 << (d - 1),
        ComplexProjective => binomial(du - 1, du / 2 - 1),
        QuaternionProjective => binomial(du - 1, du / 2 - 1) / (du / 2 + 1),
        OctonionProjective => 39,
    };
    let volume = ((alpha + 1.0) * (4.0 * std::f64::consts::PI).ln() + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp();

    Ok(SpaceParams {
        family,
        d,
        geom,
        lie,
        p,
        q,
        epsilon: if family == RealProjective { 2 } else { 1 },
        volume,
        weinstein,
        e,
    })
}

/// Volume of the unit sphere `S^d`, `2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)).exp()
}

impl SpaceParams {
    pub fn alpha(&self) -> f64 {
        self.geom.alpha()
    }

    pub fn beta(&self) -> f64 {
        self.geom.beta()
    }

    /// `family:dimension` designation, e.g. `projC:4`.
    pub fn designation(&self) -> String {
        format!("{}:{}", self.family.token(), self.d)
    }

    /// Weinstein's ratio evaluated from its gamma-function closed form.
    pub fn weinstein_formula(&self) -> f64 {
        let (a, b) = (self.alpha(), self.beta());
        ((2.0 * a + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.5) + ln_gamma(b + 1.0)
            - 0.5 * std::f64::consts::PI.ln()
            - ln_gamma(a + b + 2.0))
        .exp()
    }

    /// `a_n` from the Funk–Hecke normalisation.
    ///
    /// Computed as `a_n² = (2n+s) (s+1)_{n-1} / (β+1)_n` with `s = α+β+1`; the
    /// rising factorials are interleaved so nothing overflows.
    pub fn a_constant(&self, n: usize) -> f64 {
        self.a_squared(n).sqrt()
    }

    pub fn a_squared(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let (b, s) = (self.beta(), self.alpha() + self.beta() + 1.0);
        let nf = n as f64;
        let mut r = (2.0 * nf + s) / (b + nf);
        for k in 1..n {
            let kf = k as f64;
            r *= (s + kf) / (b + kf);
        }
        r
    }

    /// Dimension of the `n`-th eigenspace of the Laplace–Beltrami operator.
    pub fn dim_eigenspace(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let (a, b) = (self.alpha(), self.beta());
        let s = a + b + 1.0;
        let nf = n as f64;
        let mut r = (2.0 * nf + s) * (a + nf) / (nf * (b + nf));
        for k in 1..n {
            let kf = k as f64;
            r *= (s + kf) * (a + kf) / (kf * (b + kf));
        }
        // The true value is an integer; snap while integers are exact in f64.
        if r < 2f64.powi(53) {
            r.round()
        } else {
            r
        }
    }

    /// `λ_n = -ε n (ε n + α + β + 1)` with the Lie-algebra pair.
    pub fn laplace_eigenvalue(&self, n: usize) -> f64 {
        let en = self.epsilon as f64 * n as f64;
        -en * (en + self.lie.alpha() + self.lie.beta() + 1.0)
    }

    fn require_points(&self) -> Result<()> {
        if self.family.has_point_model() {
            Ok(())
        } else {
            Err(Error::UnsupportedGeometry(format!(
                "{} has parameter-level support only (no point model)",
                self.designation()
            )))
        }
    }

    /// Number of scalar components of a point representative.
    pub fn ambient_len(&self) -> usize {
        match self.family {
            SpaceFamily::Sphere | SpaceFamily::RealProjective => self.d + 1,
            SpaceFamily::ComplexProjective => self.d / 2 + 1,
            SpaceFamily::QuaternionProjective => self.d / 4 + 1,
            SpaceFamily::OctonionProjective => 0,
        }
    }

    /// Rejects points of the wrong kind, length or norm.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        self.require_points()?;
        let kind_ok = matches!(
            (self.family, x),
            (SpaceFamily::Sphere | SpaceFamily::RealProjective, Point::Real(_))
                | (SpaceFamily::ComplexProjective, Point::Complex(_))
                | (SpaceFamily::QuaternionProjective, Point::Quaternion(_))
        );
        if !kind_ok || x.len() != self.ambient_len() {
            return Err(Error::Usage(format!(
                "{} point of length {} does not belong to {}",
                x.kind_name(),
                x.len(),
                self.designation()
            )));
        }
        if (x.norm() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Input(format!("point norm {} is not 1", x.norm())));
        }
        Ok(())
    }

    /// Builds a point from ambient real coordinates, normalising them.
    ///
    /// Complex coordinates are read as `(re, im)` pairs, quaternions as
    /// `(w, x, y, z)` quadruples.
    pub fn point_from_ambient(&self, coords: &[f64]) -> Result<Point> {
        self.require_points()?;
        let width = match self.family {
            SpaceFamily::ComplexProjective => 2,
            SpaceFamily::QuaternionProjective => 4,
            _ => 1,
        };
        if coords.len() != self.ambient_len() * width {
            return Err(Error::Input(format!(
                "{} expects {} ambient coordinates, got {}",
                self.designation(),
                self.ambient_len() * width,
                coords.len()
            )));
        }
        match self.family {
            SpaceFamily::ComplexProjective => Point::complex_normalized(
                coords.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(),
            ),
            SpaceFamily::QuaternionProjective => Point::quaternion_normalized(
                coords.chunks(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect(),
            ),
            _ => Point::real_normalized(coords.to_vec()),
        }
    }

    /// Geodesic distance in `[0, π]`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_pair(x, y)?;
        let xa = x.ambient();
        Ok(match self.family {
            SpaceFamily::Sphere => point::real_angle(&xa, &y.ambient()),
            _ => 2.0 * point::real_angle(&xa, &point::aligned_ambient(x, y)?),
        })
    }

    /// `cos ρ(x, y)`, computed without going through the angle.
    pub fn cos_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_pair(x, y)?;
        Ok(self.cos_distance_unchecked(x, y))
    }

    pub(crate) fn cos_distance_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (self.family, x, y) {
            (SpaceFamily::Sphere, Point::Real(a), Point::Real(b)) => {
                a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>().clamp(-1.0, 1.0)
            }
            _ => {
                let c = point::inner_modulus(x, y).unwrap_or(0.0).min(1.0);
                (2.0 * c * c - 1.0).clamp(-1.0, 1.0)
            }
        }
    }

    fn check_pair(&self, x: &Point, y: &Point) -> Result<()> {
        self.check_point(x)?;
        self.check_point(y)
    }

    /// Zonal spherical function `R_n^{(α,β)}(cos ρ(x, y))`.
    pub fn zonal(&self, n: usize, x: &Point, y: &Point) -> Result<f64> {
        jacobi_normalized(n, self.geom, self.cos_distance(x, y)?)
    }

    /// `P_0, ..., P_max_degree` of the geometric pair at `cos ρ(x, y)`.
    pub fn jacobi_at_points(&self, max_degree: usize, x: &Point, y: &Point) -> Result<Vec<f64>> {
        jacobi_all(max_degree, self.geom, self.cos_distance(x, y)?)
    }

    /// Draws a point from the normalised invariant measure.
    ///
    /// A standard Gaussian vector in the ambient coordinates is normalised;
    /// its law is invariant under every isometry, so it is the unique
    /// invariant probability measure. Projective representatives are then put
    /// in a canonical gauge.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        self.require_points()?;
        let mut gauss = || -> f64 { rng.sample(StandardNormal) };
        let len = self.ambient_len();
        loop {
            let p = match self.family {
                SpaceFamily::Sphere | SpaceFamily::RealProjective => {
                    Point::real_normalized((0..len).map(|_| gauss()).collect())
                }
                SpaceFamily::ComplexProjective => Point::complex_normalized(
                    (0..len).map(|_| Complex64::new(gauss(), gauss())).collect(),
                ),
                SpaceFamily::QuaternionProjective => Point::quaternion_normalized(
                    (0..len)
                        .map(|_| Quaternion::new(gauss(), gauss(), gauss(), gauss()))
                        .collect(),
                ),
                SpaceFamily::OctonionProjective => unreachable!(),
            };
            // A zero Gaussian vector has probability zero; redraw if it ever happens.
            if let Ok(p) = p {
                return Ok(match self.family {
                    SpaceFamily::Sphere => p,
                    _ => point::canonical_gauge(p),
                });
            }
        }
    }

    /// A fixed base point `(1, 0, ..., 0)`.
    pub fn base_point(&self) -> Result<Point> {
        self.require_points()?;
        let mut v = vec![0.0; self.ambient_len()];
        v[0] = 1.0;
        Ok(match self.family {
            SpaceFamily::ComplexProjective => {
                Point::Complex(v.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
            }
            SpaceFamily::QuaternionProjective => {
                Point::Quaternion(v.into_iter().map(|c| Quaternion::new(c, 0.0, 0.0, 0.0)).collect())
            }
            _ => Point::Real(v),
        })
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.designation())
    }
}

impl FromStr for SpaceParams {
    type Err = Error;

    /// Parses `family:dimension`, e.g. `sphere:2` or `projC:4`.
    fn from_str(s: &str) -> Result<Self> {
        let (fam, dim) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("space '{s}' is not of the form family:dimension")))?;
        let family = SpaceFamily::from_token(fam.trim())
            .ok_or_else(|| Error::Config(format!("unknown space family '{fam}'")))?;
        let d = dim
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad dimension '{dim}' in space '{s}'")))?;
        make_space(family, d)
    }
}

impl Serialize for SpaceFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

#[cfg(test)]
mod tests;
