//! Exact arithmetic for the closed-form space constants.
//!
//! For every space `2α` and `2β` are integers, so every gamma value involved
//! is `Γ(k/2)`: a rational number times `√π` or `1`. Values are kept as
//! `q · π^{k/2}` with `q` rational, which makes integrality and the identity
//! `a_n² P_n(1) = dim H_n` decidable without rounding.

use std::ops::{Div, Mul};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::spaces::SpaceParams;

/// `coef · π^{half_pi_power / 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMultiple {
    pub coef: BigRational,
    pub half_pi_power: i64,
}

impl PiMultiple {
    pub fn rational(q: BigRational) -> Self {
        Self { coef: q, half_pi_power: 0 }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / 2` as an exact value.
    pub fn half(num: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(2)))
    }

    /// `num / den` as an exact value.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn natural(n: u128) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pow2(k: u32) -> Self {
        Self::rational(BigRational::from_integer(BigInt::one() << k))
    }

    /// `π^{k/2}`.
    pub fn pi_half_power(k: i64) -> Self {
        Self { coef: BigRational::one(), half_pi_power: k }
    }

    /// The integer value, if this is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        (self.half_pi_power == 0 && self.coef.is_integer()).then(|| self.coef.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.coef.to_f64().unwrap_or(f64::NAN);
        q * std::f64::consts::PI.powf(self.half_pi_power as f64 / 2.0)
    }
}

impl Mul for PiMultiple {
    type Output = PiMultiple;
    fn mul(self, o: PiMultiple) -> PiMultiple {
        PiMultiple { coef: self.coef * o.coef, half_pi_power: self.half_pi_power + o.half_pi_power }
    }
}

impl Div for PiMultiple {
    type Output = PiMultiple;
    fn div(self, o: PiMultiple) -> PiMultiple {
        assert!(!o.coef.is_zero(), "division by an exact zero");
        PiMultiple { coef: self.coef / o.coef, half_pi_power: self.half_pi_power - o.half_pi_power }
    }
}

const TABLE_LEN: usize = 1024;

fn factorial(n: usize) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(BigInt::one());
        for k in 1..TABLE_LEN {
            let next = &t[k - 1] * BigInt::from(k);
            t.push(next);
        }
        t
    });
    if n < TABLE_LEN {
        return table[n].clone();
    }
    (TABLE_LEN..=n).fold(table[TABLE_LEN - 1].clone(), |acc, k| acc * BigInt::from(k))
}

/// `Γ(two_x / 2)` for `two_x ≥ 1`.
pub fn gamma_half(two_x: i64) -> Result<PiMultiple> {
    if two_x < 1 {
        return Err(Error::Domain(format!("exact gamma needs a positive argument, got {two_x}/2")));
    }
    if two_x % 2 == 0 {
        let k = (two_x / 2) as usize;
        return Ok(PiMultiple::rational(BigRational::from_integer(factorial(k - 1))));
    }
    // Γ(m + 1/2) = (2m)! √π / (4^m m!)
    let m = ((two_x - 1) / 2) as usize;
    let num = factorial(2 * m);
    let den = (BigInt::one() << (2 * m)) * factorial(m);
    Ok(PiMultiple { coef: BigRational::new(num, den), half_pi_power: 1 })
}

/// Twice the geometric exponents, as integers.
fn doubled(space: &SpaceParams) -> (i64, i64) {
    ((2.0 * space.alpha()).round() as i64, (2.0 * space.beta()).round() as i64)
}

fn g(two_x: i64) -> PiMultiple {
    gamma_half(two_x).expect("arguments used below are positive")
}

/// `ω_d = (4π)^{α+1} Γ(β+1) / Γ(α+β+2)`.
pub fn volume(space: &SpaceParams) -> PiMultiple {
    let (a2, b2) = doubled(space);
    // (4π)^{α+1} = 2^{2α+2} π^{(2α+2)/2}
    PiMultiple::pow2((a2 + 2) as u32) * PiMultiple::pi_half_power(a2 + 2) * g(b2 + 2) / g(a2 + b2 + 4)
}

/// `2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(d: usize) -> PiMultiple {
    let d = d as i64;
    PiMultiple::integer(2) * PiMultiple::pi_half_power(d + 1) / g(d + 1)
}

/// `2^{2α+1} Γ(α+3/2) Γ(β+1) / (√π Γ(α+β+2))`.
pub fn weinstein(space: &SpaceParams) -> PiMultiple {
    let (a2, b2) = doubled(space);
    PiMultiple::pow2((a2 + 1) as u32) * g(a2 + 3) * g(b2 + 2) / (PiMultiple::pi_half_power(1) * g(a2 + b2 + 4))
}

/// `P_n(1) = Γ(n+α+1) / (Γ(n+1) Γ(α+1))`.
pub fn jacobi_at_one(space: &SpaceParams, n: usize) -> PiMultiple {
    let (a2, _) = doubled(space);
    let n2 = 2 * n as i64;
    g(n2 + a2 + 2) / (g(n2 + 2) * g(a2 + 2))
}

/// `a_n² = Γ(β+1) (2n+α+β+1) Γ(n+α+β+1) / (Γ(α+β+2) Γ(n+β+1))`, with `a_0 = 1`.
pub fn a_squared(space: &SpaceParams, n: usize) -> PiMultiple {
    if n == 0 {
        return PiMultiple::integer(1);
    }
    let (a2, b2) = doubled(space);
    let n2 = 2 * n as i64;
    g(b2 + 2) * PiMultiple::half(2 * n2 + a2 + b2 + 2) * g(n2 + a2 + b2 + 2) / (g(a2 + b2 + 4) * g(n2 + b2 + 2))
}

/// `dim H_n`, with `dim H_0 = 1`.
pub fn dim_eigenspace(space: &SpaceParams, n: usize) -> PiMultiple {
    if n == 0 {
        return PiMultiple::integer(1);
    }
    let (a2, b2) = doubled(space);
    let n2 = 2 * n as i64;
    PiMultiple::half(2 * n2 + a2 + b2 + 2) * g(b2 + 2) * g(n2 + a2 + b2 + 2) * g(n2 + a2 + 2)
        / (g(a2 + 2) * g(a2 + b2 + 4) * g(n2 + 2) * g(n2 + b2 + 2))
}

/// Exact `a_n²`, `P_n(1)` and `dim H_n` for one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeConstants {
    pub a_squared: PiMultiple,
    pub jacobi_at_one: PiMultiple,
    pub dim: PiMultiple,
}

/// The constants for `n = 0..=max_n` by `Γ(x+1) = x Γ(x)` applied to the
/// gamma ratios, starting from `G_1 = 1/(β+1)` where
/// `G_n = Γ(β+1) Γ(n+α+β+1) / (Γ(α+β+2) Γ(n+β+1))`.
///
/// Far cheaper than the closed forms degree by degree, since every step
/// multiplies by a small rational.
pub fn degree_table(space: &SpaceParams, max_n: usize) -> Vec<DegreeConstants> {
    let (a2, b2) = doubled(space);
    let one = PiMultiple::integer(1);
    let mut out = vec![DegreeConstants { a_squared: one.clone(), jacobi_at_one: one.clone(), dim: one.clone() }];
    let mut gn = PiMultiple::ratio(2, b2 + 2);
    let mut p1 = one;
    for n in 1..=max_n as i64 {
        if n > 1 {
            // (n-1) -> n: G gains (n-1+s)/(n+β), P(1) gains (n+α)/n.
            gn = gn * PiMultiple::ratio(2 * n + a2 + b2, 2 * n + b2);
            p1 = p1 * PiMultiple::ratio(2 * n + a2, 2 * n);
        } else {
            p1 = PiMultiple::half(a2 + 2);
        }
        let a_sq = PiMultiple::half(4 * n + a2 + b2 + 2) * gn.clone();
        let dim = a_sq.clone() * p1.clone();
        out.push(DegreeConstants { a_squared: a_sq, jacobi_at_one: p1.clone(), dim });
    }
    out
}

/// Relative difference between a float and an exact value.
pub fn relative_error(estimate: f64, exact: &PiMultiple) -> f64 {
    let t = exact.to_f64();
    if t == 0.0 {
        return estimate.abs();
    }
    ((estimate - t) / t).abs()
}

/// Whether `x` is a nonnegative exact integer.
pub fn is_natural(x: &PiMultiple) -> bool {
    x.as_integer().is_some_and(|v| !v.is_negative())
}
