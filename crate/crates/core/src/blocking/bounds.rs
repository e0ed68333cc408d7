//! Lower bounds for blocking sets, all in exact integer arithmetic.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::chains::Lambda;
use crate::error::{Error, Result};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn pow(q: &BigInt, k: u32) -> BigInt {
    num_traits::pow(q.clone(), k as usize)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (quot, rem) = (a / b, a % b);
    if !rem.is_zero() && (rem.is_positive() == b.is_positive()) {
        quot + 1
    } else {
        quot
    }
}

/// `θ_n = (q^{n+1} - 1)/(q - 1)` for `n >= -1`.
pub fn theta(q: u64, n: i64) -> BigInt {
    assert!(n >= -1, "theta is defined for n >= -1");
    let q = BigInt::from(q);
    (pow(&q, (n + 1) as u32) - 1) / (q - 1)
}

/// The weight `(i-1)(i-3)(i-4)`, nonnegative on all positive integers.
pub fn glynn_weight(i: i64) -> i64 {
    (i - 1) * (i - 3) * (i - 4)
}

/// `⌈λ0/λ1⌉`.
pub fn bound_trivial(lambda: &Lambda) -> u64 {
    lambda.l0.div_ceil(lambda.l1)
}

/// `⌈(2q^d - r*)/(q+1)⌉`.
pub fn bound_elf(q: u64, d: u32, unit_count: u64) -> BigInt {
    let qb = BigInt::from(q);
    let num = pow(&qb, d) * 2 - BigInt::from(unit_count);
    ceil_div(&num, &(qb + 1))
}

/// The cubic that every blocking set size `x` of a local chain geometry with
/// parameters `(q, d, δ)` must keep nonnegative:
///
/// `x(x-1)(x-2) - 5x(x-q^δ)θ q^δ + 12x q^{d+δ-1} θ - 12 S q^{d+2δ-1}`
///
/// with `θ = θ_{d-δ-1}` and `S = sum_{j=0}^{d-δ-1} q^{2j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlynnPolynomial {
    pub q: u64,
    pub d: u32,
    pub delta: u32,
    q_delta: BigInt,
    theta: BigInt,
    linear: BigInt,
    constant: BigInt,
}

impl GlynnPolynomial {
    pub fn new(q: u64, d: u32, delta: u32) -> Result<GlynnPolynomial> {
        if q < 2 {
            return Err(Error::BadParameters(format!("q = {q} must be at least 2")));
        }
        if d < 1 || delta >= d {
            return Err(Error::BadParameters(format!(
                "need d >= 1 and 0 <= delta <= d-1, got d = {d}, delta = {delta}"
            )));
        }
        let qb = BigInt::from(q);
        let theta = theta(q, (d - delta - 1) as i64);
        let s: BigInt = (0..d - delta).map(|j| pow(&qb, 2 * j)).sum();
        Ok(GlynnPolynomial {
            q,
            d,
            delta,
            q_delta: pow(&qb, delta),
            linear: pow(&qb, d + delta - 1) * &theta * 12,
            constant: s * pow(&qb, d + 2 * delta - 1) * 12,
            theta,
        })
    }

    /// `θ_{d-δ-1}`.
    pub fn theta(&self) -> &BigInt {
        &self.theta
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let cubic = x * (x - 1) * (x - 2);
        let quad = x * (x - &self.q_delta) * &self.theta * &self.q_delta * 5;
        cubic - quad + x * &self.linear - &self.constant
    }

    /// `⌈(q^d + q^δ)/(q+1)⌉`, the general bound specialized to local rings.
    pub fn scan_start(&self) -> BigInt {
        let qb = BigInt::from(self.q);
        ceil_div(&(pow(&qb, self.d) + &self.q_delta), &(qb + 1))
    }
}

/// Smallest `x >= ⌈(q^d + q^δ)/(q+1)⌉` at which the Glynn cubic is nonnegative.
pub fn glynn_bound(q: u64, d: u32, delta: u32) -> Result<BigInt> {
    let poly = GlynnPolynomial::new(q, d, delta)?;
    let mut x = poly.scan_start();
    while poly.eval(&x).is_negative() {
        x += 1;
    }
    Ok(x)
}

/// The closed form obtained by substituting `x = 2q^2 - q + t` into the
/// cubic for `d = 3, δ = 0`.
pub fn displayed_3d_polynomial(q: i64, t: i64) -> BigInt {
    let (q, t) = (big(q), big(t));
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let q4 = &q3 * &q;
    let t2 = &t * &t;
    let t3 = &t2 * &t;
    (big(-1) + &t * 4) * q4
        + (big(19) - &t * 10) * q3
        + (big(-11) - &t * 2 + &t2) * q2
        + (big(-7) + &t * 21 - &t2 * 8) * &q
        + (&t * 7 - &t2 * 8 + t3)
}

/// Evaluates the cubic at `x = 2q^2 - q + t` for `(q, 3, 0)` and checks it
/// against [`displayed_3d_polynomial`].
pub fn glynn_polynomial_check_3d(q: i64, t: i64) -> Result<BigInt> {
    if q < 2 {
        return Err(Error::BadParameters(format!("q = {q} must be at least 2")));
    }
    let poly = GlynnPolynomial::new(q as u64, 3, 0)?;
    let x = big(2 * q * q - q + t);
    let value = poly.eval(&x);
    if value != displayed_3d_polynomial(q, t) {
        return Err(Error::PolynomialMismatch { q, t });
    }
    Ok(value)
}

/// Published lower bounds for Möbius geometries of order `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MoebiusBounds {
    pub q: u64,
    /// `2q - 1`, or `2q` for `q >= 4`.
    pub planar: u64,
    /// `2q^2 - q - 2`, raised by one at each of `q >= 4, 7, 19`.
    pub three_dim: u64,
}

pub const THREE_DIM_THRESHOLDS: [u64; 3] = [4, 7, 19];

pub fn moebius_bound_table(q: u64) -> MoebiusBounds {
    let planar = if q >= 4 { 2 * q } else { 2 * q - 1 };
    let steps = THREE_DIM_THRESHOLDS.iter().filter(|&&t| q >= t).count() as u64;
    MoebiusBounds {
        q,
        planar,
        three_dim: 2 * q * q - q - 2 + steps,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossover {
    /// Bound `2q^2 - q - 2 + increment`.
    pub increment: u64,
    /// Threshold stated with the published bound.
    pub published: u64,
    /// Smallest `q` in the scanned range from which `glynn_bound(q,3,0)`
    /// reaches the bound for every larger scanned `q`.
    pub computed: Option<u64>,
}

/// Where the three-dimensional Glynn bound actually reaches each step of the
/// published piecewise bound, over the integers in `qs`.
pub fn three_dim_crossovers(qs: std::ops::RangeInclusive<u64>) -> Result<Vec<Crossover>> {
    let values: Vec<(u64, BigInt)> = qs
        .map(|q| Ok((q, glynn_bound(q, 3, 0)?)))
        .collect::<Result<_>>()?;
    let published = [2, 4, 7, 19];
    Ok((0..4u64)
        .map(|k| {
            let holds = |q: u64, g: &BigInt| *g >= BigInt::from(2 * q * q - q - 2 + k);
            let mut computed = None;
            for (q, g) in values.iter().rev() {
                if holds(*q, g) {
                    computed = Some(*q);
                } else {
                    break;
                }
            }
            Crossover {
                increment: k,
                published: published[k as usize],
                computed,
            }
        })
        .collect())
}

pub(crate) fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert_eq!(theta(3, -1), big(0));
        assert_eq!(theta(3, 0), big(1));
        assert_eq!(theta(3, 2), big(13));
    }

    #[test]
    fn glynn_weight_nonnegative() {
        assert!((1..=1_000_000).all(|i| glynn_weight(i) >= 0));
        assert_eq!(glynn_weight(2), 2);
        assert_eq!(glynn_weight(3), 0);
        assert_eq!(glynn_weight(0), -12);
    }

    #[test]
    fn elf_bounds() {
        assert_eq!(bound_elf(2, 2, 1), big(3));
        assert_eq!(bound_elf(2, 2, 2), big(2));
        assert_eq!(bound_elf(3, 2, 8), big(3));
    }

    #[test]
    fn glynn_small_cases() {
        let p = GlynnPolynomial::new(2, 2, 0).unwrap();
        assert_eq!(p.eval(&big(2)), big(-6));
        assert_eq!(p.eval(&big(3)), big(12));
        assert_eq!(glynn_bound(2, 2, 0).unwrap(), big(3));
        let p = GlynnPolynomial::new(2, 2, 1).unwrap();
        assert_eq!(p.scan_start(), big(2));
        assert_eq!(p.eval(&big(2)), big(0));
        assert_eq!(glynn_bound(2, 2, 1).unwrap(), big(2));
        assert!(matches!(glynn_bound(2, 2, 2), Err(Error::BadParameters(_))));
        assert!(matches!(glynn_bound(1, 2, 0), Err(Error::BadParameters(_))));
    }

    #[test]
    fn table_values() {
        assert_eq!(moebius_bound_table(2).three_dim, 4);
        assert_eq!(moebius_bound_table(19).three_dim, 704);
        assert_eq!(moebius_bound_table(3).planar, 5);
        assert_eq!(moebius_bound_table(4).planar, 8);
    }

    #[test]
    fn check_3d_known_points() {
        for (q, t) in [(2, 0), (19, 1), (7, -3), (20, 3)] {
            glynn_polynomial_check_3d(q, t).unwrap();
        }
    }
}
