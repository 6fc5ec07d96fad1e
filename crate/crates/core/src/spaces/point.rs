use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::error::{Error, Result};

/// Unit-norm tolerance accepted when building a point from raw coordinates.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A point of a sphere or of a projective space over ℝ, ℂ or ℍ, stored as a
/// unit-norm representative in the ambient coordinate space.
///
/// Projective points are equivalence classes: `x`, `x·λ` with `|λ| = 1`
/// (sign, phase, or unit quaternion acting on the right) describe the same
/// point, and every distance computed here is invariant under that change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coords", rename_all = "lowercase")]
pub enum Point {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Quaternion(Vec<Quaternion>),
}

fn normalized<T: Copy>(v: Vec<T>, norm_sqr: impl Fn(T) -> f64, scale: impl Fn(T, f64) -> T) -> Result<Vec<T>> {
    let n2: f64 = v.iter().map(|&c| norm_sqr(c)).sum();
    if !(n2.is_finite() && n2 > 0.0) {
        return Err(Error::Input("point coordinates must be finite and nonzero".into()));
    }
    let inv = 1.0 / n2.sqrt();
    Ok(v.into_iter().map(|c| scale(c, inv)).collect())
}

impl Point {
    /// Normalises arbitrary nonzero real coordinates.
    pub fn real_normalized(v: Vec<f64>) -> Result<Self> {
        normalized(v, |c| c * c, |c, s| c * s).map(Point::Real)
    }

    pub fn complex_normalized(v: Vec<Complex64>) -> Result<Self> {
        normalized(v, |c| c.norm_sqr(), |c, s| c * s).map(Point::Complex)
    }

    pub fn quaternion_normalized(v: Vec<Quaternion>) -> Result<Self> {
        normalized(v, |c| c.norm_sqr(), |c, s| c.scale(s)).map(Point::Quaternion)
    }

    /// Number of scalar components (reals, complex numbers or quaternions).
    pub fn len(&self) -> usize {
        match self {
            Point::Real(v) => v.len(),
            Point::Complex(v) => v.len(),
            Point::Quaternion(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn norm(&self) -> f64 {
        match self {
            Point::Real(v) => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Point::Complex(v) => v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            Point::Quaternion(v) => v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// Ambient real coordinates: complex entries as `(re, im)`, quaternions as `(w, x, y, z)`.
    pub fn ambient(&self) -> Vec<f64> {
        match self {
            Point::Real(v) => v.clone(),
            Point::Complex(v) => v.iter().flat_map(|c| [c.re, c.im]).collect(),
            Point::Quaternion(v) => v.iter().flat_map(|q| q.to_array()).collect(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Real(_) => "real",
            Point::Complex(_) => "complex",
            Point::Quaternion(_) => "quaternion",
        }
    }
}

/// Sesquilinear inner product `Σ conj(x_k) y_k`; only its modulus is gauge invariant.
pub(crate) fn inner_modulus(x: &Point, y: &Point) -> Result<f64> {
    match (x, y) {
        (Point::Real(a), Point::Real(b)) => Ok(a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>().abs()),
        (Point::Complex(a), Point::Complex(b)) => Ok(a
            .iter()
            .zip(b)
            .map(|(p, q)| p.conj() * q)
            .sum::<Complex64>()
            .norm()),
        (Point::Quaternion(a), Point::Quaternion(b)) => Ok(a
            .iter()
            .zip(b)
            .fold(Quaternion::ZERO, |acc, (p, q)| acc + p.conj() * *q)
            .norm()),
        _ => Err(Error::Usage(format!(
            "cannot pair {} and {} points",
            x.kind_name(),
            y.kind_name()
        ))),
    }
}

/// Angle in `[0, π]` between unit real vectors, accurate for nearly equal
/// and nearly opposite vectors alike.
pub(crate) fn real_angle(a: &[f64], b: &[f64]) -> f64 {
    let (mut dm, mut dp) = (0.0, 0.0);
    for (p, q) in a.iter().zip(b) {
        dm += (p - q) * (p - q);
        dp += (p + q) * (p + q);
    }
    2.0 * dm.sqrt().atan2(dp.sqrt())
}

/// Representative of `y` rotated by a unit scalar so that `⟨x, y'⟩` is real
/// and nonnegative, as ambient real coordinates.
pub(crate) fn aligned_ambient(x: &Point, y: &Point) -> Result<Vec<f64>> {
    match (x, y) {
        (Point::Real(a), Point::Real(b)) => {
            let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            let s = if dot < 0.0 { -1.0 } else { 1.0 };
            Ok(b.iter().map(|c| c * s).collect())
        }
        (Point::Complex(a), Point::Complex(b)) => {
            let ip: Complex64 = a.iter().zip(b).map(|(p, q)| p.conj() * q).sum();
            let r = ip.norm();
            let phase = if r > 0.0 { ip.conj() / r } else { Complex64::new(1.0, 0.0) };
            Ok(b.iter().flat_map(|c| {
                let z = c * phase;
                [z.re, z.im]
            })
            .collect())
        }
        (Point::Quaternion(a), Point::Quaternion(b)) => {
            let ip = a
                .iter()
                .zip(b)
                .fold(Quaternion::ZERO, |acc, (p, q)| acc + p.conj() * *q);
            let r = ip.norm();
            let unit = if r > 0.0 { ip.conj().scale(1.0 / r) } else { Quaternion::ONE };
            Ok(b.iter().flat_map(|c| (*c * unit).to_array()).collect())
        }
        _ => Err(Error::Usage(format!(
            "cannot pair {} and {} points",
            x.kind_name(),
            y.kind_name()
        ))),
    }
}

/// Chooses the representative whose largest-modulus component is real and positive.
pub(crate) fn canonical_gauge(p: Point) -> Point {
    match p {
        Point::Real(v) => {
            let big = v.iter().copied().fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
            if big < 0.0 {
                Point::Real(v.into_iter().map(|c| -c).collect())
            } else {
                Point::Real(v)
            }
        }
        Point::Complex(v) => {
            let big = v.iter().copied().fold(Complex64::new(0.0, 0.0), |m, c| {
                if c.norm_sqr() > m.norm_sqr() { c } else { m }
            });
            let r = big.norm();
            if r == 0.0 {
                return Point::Complex(v);
            }
            let phase = big.conj() / r;
            Point::Complex(v.into_iter().map(|c| c * phase).collect())
        }
        Point::Quaternion(v) => {
            let big = v.iter().copied().fold(Quaternion::ZERO, |m, c| {
                if c.norm_sqr() > m.norm_sqr() { c } else { m }
            });
            let r = big.norm();
            if r == 0.0 {
                return Point::Quaternion(v);
            }
            let unit = big.conj().scale(1.0 / r);
            Point::Quaternion(v.into_iter().map(|c| c * unit).collect())
        }
    }
}
