//! Finite fields `GF(p^e)` as dense lookup tables.
//!
//! Elements are indexed `0..q` in the polynomial basis: the element
//! `c_0 + c_1 t + ... + c_{e-1} t^{e-1}` has index `sum c_i p^i`. Index 0 is
//! zero and index 1 is one. Multiplication and inversion go through
//! discrete log / antilog tables built from a primitive element.

use std::fmt;

use crate::error::{Error, Result};

/// Largest order accepted by [`Field::new`].
pub const MAX_ORDER: u32 = 256;
/// Largest order for which a default modulus is chosen automatically.
pub const MAX_DEFAULT_ORDER: u32 = 128;

/// An element of a [`Field`], stored as its polynomial-basis index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn index(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The finite field `GF(p^e)`.
#[derive(Clone)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    /// Monic, low-to-high, length `e + 1`. `None` for prime fields.
    modulus: Option<Vec<u32>>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    log: Vec<u16>,
    exp: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Polynomials over Z_p, coefficients low-to-high, no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_trim(out)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small
    (1..p).find(|&x| (a as u64 * x as u64) % p as u64 == 1).unwrap_or(0)
}

fn digits(mut index: u32, p: u32, len: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = index % p;
            index /= p;
            d
        })
        .collect()
}

fn undigits(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = poly_trim(modulus.to_vec());
    if m.len() < 2 {
        return false;
    }
    let deg = m.len() as u32 - 1;
    for k in 1..=deg / 2 {
        for low in 0..p.pow(k) {
            let mut divisor = digits(low, p, k);
            divisor.push(1);
            if poly_rem(&m, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically least irreducible monic polynomial of degree `e`,
/// where `t^e + sum c_i t^i` is ordered by `sum c_i p^i`.
pub fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    (0..p.pow(e))
        .map(|low| {
            let mut m = digits(low, p, e);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

impl Field {
    /// The prime field `GF(p)`.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// Builds `GF(p^e)` from the given monic modulus (low-to-high, length
    /// `e + 1`), or from the default modulus when none is given.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if e == 0 {
            return Err(Error::BadParameters("field degree must be positive".into()));
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER as u64 {
            return Err(Error::UnsupportedOrder(q64));
        }
        let q = q64 as u32;
        let modulus = match (e, modulus) {
            (1, None) => None,
            (1, Some(_)) => {
                return Err(Error::InvalidModulus(
                    "prime fields take no modulus".into(),
                ))
            }
            (_, None) => {
                if q > MAX_DEFAULT_ORDER {
                    return Err(Error::UnsupportedOrder(q as u64));
                }
                Some(default_modulus(p, e))
            }
            (_, Some(m)) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must be digits below {p}"
                    )));
                }
                if !is_irreducible(m, p) {
                    return Err(Error::ReducibleModulus {
                        coeffs: m.to_vec(),
                        p,
                    });
                }
                Some(m.to_vec())
            }
        };
        Ok(Field::build(p, e, q, modulus))
    }

    fn build(p: u32, e: u32, q: u32, modulus: Option<Vec<u32>>) -> Field {
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..q {
            let da = digits(a, p, e);
            for b in 0..q {
                let db = digits(b, p, e);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p) as u16;
            }
            let n: Vec<u32> = da.iter().map(|&x| (p - x) % p).collect();
            neg[a as usize] = undigits(&n, p) as u16;
        }

        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&poly_trim(digits(a, p, e)), &poly_trim(digits(b, p, e)), p);
            let r = match &modulus {
                Some(m) => poly_rem(&prod, m, p),
                None => prod.into_iter().map(|c| c % p).collect(),
            };
            let r = poly_trim(r);
            undigits(&r, p) % q
        };

        // Primitive element: smallest nonzero g of multiplicative order q-1.
        let order = |g: u32| -> u32 {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = slow_mul(x, g);
                k += 1;
            }
            k
        };
        let generator = if q == 2 {
            1
        } else {
            (2..q).find(|&g| order(g) == q - 1).expect("field has a primitive element")
        };

        let mut exp = vec![0u16; qs - 1];
        let mut log = vec![0u16; qs];
        let mut x = 1u32;
        for k in 0..q - 1 {
            exp[k as usize] = x as u16;
            log[x as usize] = k as u16;
            x = slow_mul(x, generator);
        }

        let mut mul = vec![0u16; qs * qs];
        let mut inv = vec![0u16; qs];
        let n = q - 1;
        for a in 1..q {
            let la = log[a as usize] as u32;
            for b in 1..q {
                let lb = log[b as usize] as u32;
                mul[(a * q + b) as usize] = exp[((la + lb) % n) as usize];
            }
            inv[a as usize] = exp[((n - la) % n) as usize];
        }

        Field {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            log,
            exp,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    /// True when the modulus is the one [`Field::new`] picks by default.
    pub fn has_default_modulus(&self) -> bool {
        match &self.modulus {
            None => true,
            Some(m) => *m == default_modulus(self.p, self.e),
        }
    }

    pub fn element(&self, index: u32) -> Result<Fe> {
        if index < self.q {
            Ok(Fe(index as u16))
        } else {
            Err(Error::BadParameters(format!(
                "element index {index} out of range for GF({})",
                self.q
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q as u16).map(Fe)
    }

    /// Coefficient vector `(c_0, .., c_{e-1})` over `Z_p`.
    pub fn coefficients(&self, a: Fe) -> Vec<u32> {
        digits(a.index(), self.p, self.e)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() != self.e as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::BadParameters(format!(
                "bad coefficient vector {coeffs:?}"
            )));
        }
        Ok(Fe(undigits(coeffs, self.p) as u16))
    }

    /// The image of the integer `n` under `Z -> GF(q)`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[(a.0 as usize) * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[(a.0 as usize) * self.q as usize + b.0 as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fe(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (k % n)) % n) as usize])
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> Fe {
        if self.q == 2 {
            Fe::ONE
        } else {
            Fe(self.exp[1])
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut x = a;
        let mut k = 1;
        while x != Fe::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Ok(k)
    }

    /// Evaluates a polynomial with coefficients in this field at `x`.
    pub fn eval_poly(&self, coeffs: &[Fe], x: Fe) -> Fe {
        coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Short display form: `gf(q)` or `gf(q;c0,..,1)` for a non-default modulus.
    pub fn label(&self) -> String {
        match &self.modulus {
            Some(m) if !self.has_default_modulus() => {
                let cs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                format!("gf({};{})", self.q, cs.join(","))
            }
            _ => format!("gf({})", self.q),
        }
    }
}

/// Reference arithmetic straight from polynomial multiplication mod
/// `(p, modulus)`; used by tests as an oracle for the table-driven path.
pub fn slow_mul(field: &Field, a: Fe, b: Fe) -> Fe {
    let p = field.p;
    let e = field.e;
    let prod = poly_mul(
        &poly_trim(digits(a.index(), p, e)),
        &poly_trim(digits(b.index(), p, e)),
        p,
    );
    let r = match field.modulus() {
        Some(m) => poly_rem(&prod, m, p),
        None => prod,
    };
    Fe(undigits(&poly_trim(r), p) as u16)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_characteristic_two() {
        let f = Field::prime(2).unwrap();
        assert_eq!(f.add(Fe::ONE, Fe::ONE), Fe::ZERO);
    }

    #[test]
    fn gf4_t_squared() {
        let f = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let t = f.element(2).unwrap();
        // t^2 = t + 1
        assert_eq!(f.mul(t, t), f.element(3).unwrap());
        assert_eq!(f.inv(t).unwrap(), f.element(3).unwrap());
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = Field::prime(3).unwrap();
        let two = f.element(2).unwrap();
        assert_eq!(f.inv(two).unwrap(), two);
    }

    #[test]
    fn gf9_default_modulus_is_t2_plus_1() {
        let f = Field::new(3, 2, None).unwrap();
        assert_eq!(f.modulus(), Some(&[1, 0, 1][..]));
        let t = f.element(3).unwrap();
        assert_eq!(f.mul(t, t), f.element(2).unwrap());
    }

    #[test]
    fn default_moduli_table() {
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(default_modulus(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(default_modulus(2, 4), vec![1, 1, 0, 0, 1]);
        assert_eq!(default_modulus(3, 3), vec![1, 2, 0, 1]);
        assert_eq!(default_modulus(5, 2), vec![2, 0, 1]);
        for &(p, e) in &[(2, 5), (2, 6), (2, 7), (3, 4), (5, 3), (7, 2), (11, 2)] {
            let m = default_modulus(p, e);
            assert!(is_irreducible(&m, p));
            assert_eq!(m.len(), e as usize + 1);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(Field::new(4, 1, None).unwrap_err(), Error::NonPrimeCharacteristic(4));
        assert!(matches!(
            Field::new(2, 2, Some(&[1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
        assert_eq!(Field::new(2, 8, None).unwrap_err(), Error::UnsupportedOrder(256));
        assert!(Field::new(2, 8, Some(&default_modulus(2, 8))).is_ok());
        assert_eq!(Field::new(3, 6, None).unwrap_err(), Error::UnsupportedOrder(729));
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero));
        assert_eq!(f.div(Fe::ONE, Fe::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(128), Some((2, 7)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
