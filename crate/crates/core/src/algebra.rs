//! Finite-dimensional associative `F_q`-algebras given by structure constants.
//!
//! An element is stored as the index `sum c_i q^i` of its coordinate vector
//! `(c_0, .., c_{d-1})` with respect to the basis `e_0, .., e_{d-1}`. For
//! algebras of order at most [`TABLE_LIMIT`] addition and multiplication are
//! table lookups; larger algebras fall back to the structure constants.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg;

/// Largest algebra order `q^d` accepted.
pub const MAX_ALGEBRA_ORDER: u64 = 4096;
/// Largest order for which full operation tables are precomputed.
pub const TABLE_LIMIT: u32 = 1024;

/// An algebra element, stored as the base-`q` index of its coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locality {
    /// Dimension of the ideal of nonunits over the base field.
    pub delta: u32,
    /// Basis of the nonunit ideal in reduced row echelon form.
    pub radical_basis: Vec<Vec<Fe>>,
}

#[derive(Clone)]
pub struct Algebra {
    base: Arc<Field>,
    d: usize,
    n: u32,
    tensor: Vec<Fe>,
    one: Vec<Fe>,
    one_elem: Elem,
    add_table: Vec<u32>,
    mul_table: Vec<u32>,
    neg_table: Vec<u32>,
    unit: Vec<bool>,
    inv_table: Vec<u32>,
    units: Vec<Elem>,
    locality: Option<Locality>,
    label: String,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("label", &self.label)
            .field("q", &self.base.q())
            .field("d", &self.d)
            .field("units", &self.units.len())
            .field("locality", &self.locality.as_ref().map(|l| l.delta))
            .finish()
    }
}

fn raw_mul(base: &Field, d: usize, tensor: &[Fe], a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; d];
    for i in 0..d {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..d {
            if b[j].is_zero() {
                continue;
            }
            let c = base.mul(a[i], b[j]);
            let row = &tensor[(i * d + j) * d..(i * d + j + 1) * d];
            for k in 0..d {
                out[k] = base.add(out[k], base.mul(c, row[k]));
            }
        }
    }
    out
}

impl Algebra {
    /// Builds and validates an algebra from structure constants.
    ///
    /// `tensor[(i * d + j) * d + k]` is the `k`-th coordinate of `e_i e_j`;
    /// `one` is the coordinate vector of the unit element.
    pub fn from_structure_constants(
        base: Arc<Field>,
        d: usize,
        tensor: Vec<Fe>,
        one: Vec<Fe>,
        label: impl Into<String>,
    ) -> Result<Algebra> {
        let q = base.q();
        if d == 0 {
            return Err(Error::BadSpec("dimension must be positive".into()));
        }
        let order = (q as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
        if order > MAX_ALGEBRA_ORDER {
            return Err(Error::TooLarge(format!(
                "algebra of order {q}^{d} exceeds {MAX_ALGEBRA_ORDER}"
            )));
        }
        if tensor.len() != d * d * d || one.len() != d {
            return Err(Error::BadSpec("structure constant counts do not match d".into()));
        }
        if tensor.iter().chain(&one).any(|x| x.index() >= q) {
            return Err(Error::BadSpec("coordinate out of field range".into()));
        }
        if one.iter().all(|x| x.is_zero()) {
            return Err(Error::NoUnity("the unit vector is zero".into()));
        }

        let basis = |i: usize| -> Vec<Fe> {
            let mut v = vec![Fe::ZERO; d];
            v[i] = Fe::ONE;
            v
        };
        let m = |a: &[Fe], b: &[Fe]| raw_mul(&base, d, &tensor, a, b);

        for i in 0..d {
            let ei = basis(i);
            if m(&one, &ei) != ei || m(&ei, &one) != ei {
                return Err(Error::NoUnity(format!(
                    "the given one does not act as identity on e_{i}"
                )));
            }
        }
        for i in 0..d {
            for j in 0..d {
                let eij = m(&basis(i), &basis(j));
                for k in 0..d {
                    let ek = basis(k);
                    if m(&eij, &ek) != m(&basis(i), &m(&basis(j), &ek)) {
                        return Err(Error::NonAssociative(i, j, k));
                    }
                }
            }
        }
        let g = base.generator();
        let scalar: Vec<Fe> = one.iter().map(|&c| base.mul(g, c)).collect();
        for i in 0..d {
            if m(&scalar, &basis(i)) != m(&basis(i), &scalar) {
                return Err(Error::ScalarsNotCentral(i));
            }
        }

        let n = order as u32;
        let mut alg = Algebra {
            base,
            d,
            n,
            tensor,
            one_elem: Elem(0),
            one,
            add_table: Vec::new(),
            mul_table: Vec::new(),
            neg_table: Vec::new(),
            unit: Vec::new(),
            inv_table: Vec::new(),
            units: Vec::new(),
            locality: None,
            label: label.into(),
        };
        alg.one_elem = alg.from_coords(&alg.one.clone());
        alg.build_tables();
        alg.build_units();
        alg.locality = alg.compute_locality();
        Ok(alg)
    }

    fn build_tables(&mut self) {
        let n = self.n;
        self.neg_table = (0..n)
            .map(|a| {
                let c: Vec<Fe> = self.coords(Elem(a)).iter().map(|&x| self.base.neg(x)).collect();
                self.from_coords(&c).0
            })
            .collect();
        if n > TABLE_LIMIT {
            return;
        }
        let ns = n as usize;
        let mut add = vec![0u32; ns * ns];
        let mut mul = vec![0u32; ns * ns];
        let coords: Vec<Vec<Fe>> = (0..n).map(|a| self.coords(Elem(a))).collect();
        for a in 0..ns {
            // rows of left multiplication by a: a * e_j
            let left: Vec<Vec<Fe>> = (0..self.d)
                .map(|j| {
                    let mut ej = vec![Fe::ZERO; self.d];
                    ej[j] = Fe::ONE;
                    raw_mul(&self.base, self.d, &self.tensor, &coords[a], &ej)
                })
                .collect();
            for b in 0..ns {
                let s: Vec<Fe> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .map(|(&x, &y)| self.base.add(x, y))
                    .collect();
                add[a * ns + b] = self.from_coords(&s).0;
                let mut prod = vec![Fe::ZERO; self.d];
                for (j, &bj) in coords[b].iter().enumerate() {
                    if bj.is_zero() {
                        continue;
                    }
                    for k in 0..self.d {
                        prod[k] = self.base.add(prod[k], self.base.mul(bj, left[j][k]));
                    }
                }
                mul[a * ns + b] = self.from_coords(&prod).0;
            }
        }
        self.add_table = add;
        self.mul_table = mul;
    }

    fn build_units(&mut self) {
        let n = self.n;
        self.unit = vec![false; n as usize];
        self.inv_table = vec![u32::MAX; n as usize];
        let one = self.one.clone();
        for a in 0..n {
            let lr = self.left_regular(Elem(a));
            if linalg::rank(&self.base, &lr) == self.d {
                let x = linalg::solve_left(&self.base, &lr, &one)
                    .expect("invertible left-regular map is onto");
                self.unit[a as usize] = true;
                self.inv_table[a as usize] = self.from_coords(&x).0;
            }
        }
        self.units = (0..n).filter(|&a| self.unit[a as usize]).map(Elem).collect();
    }

    fn compute_locality(&self) -> Option<Locality> {
        let nonunits: Vec<Vec<Fe>> = (0..self.n)
            .filter(|&a| !self.unit[a as usize])
            .map(|a| self.coords(Elem(a)))
            .collect();
        let count = nonunits.len() as u64;
        let mut rows = nonunits;
        let pivots = linalg::rref(&self.base, &mut rows);
        let delta = pivots.len() as u32;
        // The nonunits are closed under addition iff they fill their span.
        if (self.base.q() as u64).pow(delta) != count {
            return None;
        }
        rows.truncate(pivots.len());
        Some(Locality {
            delta,
            radical_basis: rows,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<Field> {
        self.base.clone()
    }

    pub fn q(&self) -> u32 {
        self.base.q()
    }

    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of elements, `q^d`.
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn structure_constants(&self) -> &[Fe] {
        &self.tensor
    }

    pub fn one_coords(&self) -> &[Fe] {
        &self.one
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.n).map(Elem)
    }

    pub fn element(&self, index: u32) -> Result<Elem> {
        if index < self.n {
            Ok(Elem(index))
        } else {
            Err(Error::BadParameters(format!("element index {index} out of range")))
        }
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        self.one_elem
    }

    pub fn basis(&self, i: usize) -> Elem {
        Elem(self.q().pow(i as u32))
    }

    pub fn coords(&self, a: Elem) -> Vec<Fe> {
        let q = self.q();
        let mut x = a.0;
        (0..self.d)
            .map(|_| {
                let c = x % q;
                x /= q;
                self.base.element(c).expect("digit below q")
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[Fe]) -> Elem {
        debug_assert_eq!(c.len(), self.d);
        let q = self.q();
        Elem(c.iter().rev().fold(0, |acc, x| acc * q + x.index()))
    }

    /// The scalar `k * 1`.
    pub fn scalar(&self, k: Fe) -> Elem {
        self.scale(k, self.one_elem)
    }

    /// Scalar multiple `k * a`.
    pub fn scale(&self, k: Fe, a: Elem) -> Elem {
        let c: Vec<Fe> = self.coords(a).iter().map(|&x| self.base.mul(k, x)).collect();
        self.from_coords(&c)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.add_table.is_empty() {
            let s: Vec<Fe> = self
                .coords(a)
                .iter()
                .zip(&self.coords(b))
                .map(|(&x, &y)| self.base.add(x, y))
                .collect();
            self.from_coords(&s)
        } else {
            Elem(self.add_table[(a.0 * self.n + b.0) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg_table[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.mul_table.is_empty() {
            let p = raw_mul(&self.base, self.d, &self.tensor, &self.coords(a), &self.coords(b));
            self.from_coords(&p)
        } else {
            Elem(self.mul_table[(a.0 * self.n + b.0) as usize])
        }
    }

    /// Rows of the matrix of `x -> a x`: row `j` holds the coordinates of `a e_j`.
    pub fn left_regular(&self, a: Elem) -> Vec<Vec<Fe>> {
        let ca = self.coords(a);
        (0..self.d)
            .map(|j| {
                let mut ej = vec![Fe::ZERO; self.d];
                ej[j] = Fe::ONE;
                raw_mul(&self.base, self.d, &self.tensor, &ca, &ej)
            })
            .collect()
    }

    #[inline]
    pub fn is_unit(&self, a: Elem) -> bool {
        self.unit[a.0 as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if self.is_unit(a) {
            Ok(Elem(self.inv_table[a.0 as usize]))
        } else {
            Err(Error::NotAUnit)
        }
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    /// `r*`, the number of units.
    pub fn unit_count(&self) -> u64 {
        self.units.len() as u64
    }

    pub fn nonunits(&self) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(move |&a| !self.is_unit(a))
    }

    /// `(is_local, delta)`: local iff the nonunits form an additive subgroup,
    /// and then `delta` is its dimension over the base field.
    pub fn classify_local(&self) -> (bool, Option<u32>) {
        match &self.locality {
            Some(l) => (true, Some(l.delta)),
            None => (false, None),
        }
    }

    pub fn is_local(&self) -> bool {
        self.locality.is_some()
    }

    pub fn delta(&self) -> Option<u32> {
        self.locality.as_ref().map(|l| l.delta)
    }

    pub fn locality(&self) -> Option<&Locality> {
        self.locality.as_ref()
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.d;
        (0..d).all(|i| {
            (0..d).all(|j| {
                self.tensor[(i * d + j) * d..(i * d + j + 1) * d]
                    == self.tensor[(j * d + i) * d..(j * d + i + 1) * d]
            })
        })
    }

    /// `#N` for the normalizer `N = { n in R* : n^-1 K* n = K* }`, by direct test.
    pub fn normalizer_order(&self) -> u64 {
        let scalars: Vec<Elem> = self
            .base
            .elements()
            .filter(|k| !k.is_zero())
            .map(|k| self.scalar(k))
            .collect();
        let set: HashSet<Elem> = scalars.iter().copied().collect();
        self.units
            .iter()
            .filter(|&&u| {
                let ui = self.inv(u).expect("unit");
                scalars
                    .iter()
                    .all(|&k| set.contains(&self.mul(self.mul(ui, k), u)))
            })
            .count() as u64
    }

    /// True when this is `K x K` over `K` in the basis `(1,0), (0,1)`.
    pub fn is_split_product(&self) -> bool {
        if self.d != 2 {
            return false;
        }
        let e0 = self.basis(0);
        let e1 = self.basis(1);
        self.mul(e0, e0) == e0
            && self.mul(e1, e1) == e1
            && self.mul(e0, e1) == Elem::ZERO
            && self.mul(e1, e0) == Elem::ZERO
            && self.one_elem == self.add(e0, e1)
    }

    /// The residue field `R / (R \ R*)` of a local algebra.
    pub fn residue_field(&self) -> Result<ResidueField> {
        let loc = self.locality.as_ref().ok_or(Error::NotLocal)?;
        let d = self.d;
        let mut rad = loc.radical_basis.clone();
        let pivots = linalg::rref(&self.base, &mut rad);
        let complement: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
        let fd = complement.len();

        let reduce = |x: &[Fe]| -> Vec<Fe> {
            let mut y = x.to_vec();
            for (r, &pc) in pivots.iter().enumerate() {
                let c = y[pc];
                if c.is_zero() {
                    continue;
                }
                for k in 0..d {
                    y[k] = self.base.sub(y[k], self.base.mul(c, rad[r][k]));
                }
            }
            complement.iter().map(|&i| y[i]).collect()
        };

        let mut tensor = Vec::with_capacity(fd * fd * fd);
        for &i in &complement {
            for &j in &complement {
                let prod = self.mul(self.basis(i), self.basis(j));
                tensor.extend(reduce(&self.coords(prod)));
            }
        }
        let one = reduce(&self.one);
        let label = format!("{} / rad", self.label);
        let field = Algebra::from_structure_constants(self.base.clone(), fd, tensor, one, label)?;
        if field.delta() != Some(0) {
            return Err(Error::NotLocal);
        }
        let projection = self
            .elements()
            .map(|a| field.from_coords(&reduce(&self.coords(a))).0)
            .collect();
        Ok(ResidueField { field, projection })
    }
}

/// `F = R / (R \ R*)` together with the canonical projection.
#[derive(Clone, Debug)]
pub struct ResidueField {
    pub field: Algebra,
    projection: Vec<u32>,
}

impl ResidueField {
    pub fn project(&self, a: Elem) -> Elem {
        Elem(self.projection[a.0 as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ringspec::build_algebra;

    fn alg(spec: &str) -> Algebra {
        build_algebra(spec).unwrap()
    }

    #[test]
    fn product_ring() {
        let r = alg("gf(2) x gf(2)");
        assert_eq!(r.dim(), 2);
        assert_eq!(r.unit_count(), 1);
        assert_eq!(r.classify_local(), (false, None));
        let e0 = r.basis(0);
        let e1 = r.basis(1);
        assert_eq!(r.mul(e0, e1), r.zero());
        assert!(!r.is_unit(e0));
        assert!(r.is_split_product());
    }

    #[test]
    fn dual_numbers_gf2() {
        let r = alg("gf(2)[t]/(t^2)");
        assert_eq!(r.classify_local(), (true, Some(1)));
        assert_eq!(r.unit_count(), 2);
        let t = r.basis(1);
        assert_eq!(r.mul(t, t), r.zero());
        let u = r.add(r.one(), t);
        assert!(r.is_unit(u));
        assert_eq!(r.inv(u).unwrap(), u);
        assert_eq!(r.inv(r.zero()), Err(Error::NotAUnit));
    }

    #[test]
    fn gf4_over_gf2() {
        let r = alg("gf(4)/gf(2)");
        assert_eq!(r.dim(), 2);
        assert_eq!(r.classify_local(), (true, Some(0)));
        assert_eq!(r.unit_count(), 3);
        assert_eq!(r.normalizer_order(), 3);
    }

    #[test]
    fn truncated_cube_is_local_delta_two() {
        for q in [2, 3] {
            let r = alg(&format!("gf({q})[t]/(t^3)"));
            assert_eq!(r.classify_local(), (true, Some(2)));
            assert_eq!(r.nonunits().count() as u32, q * q);
        }
        assert_eq!(alg("gf(3) x gf(3)").classify_local(), (false, None));
        assert_eq!(alg("gf(9)/gf(3)").classify_local(), (true, Some(0)));
    }

    #[test]
    fn residue_fields() {
        let r = alg("gf(2)[t]/(t^2)");
        let res = r.residue_field().unwrap();
        assert_eq!(res.field.dim(), 1);
        for a in r.elements() {
            // proj(a + b t) = a
            let c = r.coords(a);
            assert_eq!(res.field.coords(res.project(a)), vec![c[0]]);
        }

        let r = alg("gf(4)[t]/(t^2) over gf(2)");
        let res = r.residue_field().unwrap();
        assert_eq!(res.field.order(), 4);
        assert_eq!(res.field.delta(), Some(0));

        let r = alg("gf(9)/gf(3)");
        let res = r.residue_field().unwrap();
        for a in r.elements() {
            assert_eq!(res.project(a), a);
        }
        assert_eq!(
            alg("gf(2) x gf(2)").residue_field().unwrap_err(),
            Error::NotLocal
        );
    }

    #[test]
    fn units_and_nonunits_partition() {
        for spec in ["gf(3)[t]/(t^2)", "gf(2) x gf(2)", "gf(8)/gf(2)", "gf(4)[t]/(t^2) over gf(2)"] {
            let r = alg(spec);
            let nonunits = r.nonunits().count() as u64;
            assert_eq!(r.unit_count() + nonunits, r.order() as u64);
            for &u in r.units() {
                let ui = r.inv(u).unwrap();
                assert_eq!(r.mul(u, ui), r.one());
                assert_eq!(r.mul(ui, u), r.one());
            }
        }
    }

    #[test]
    fn rejects_bad_structure() {
        let f = Arc::new(Field::prime(2).unwrap());
        let o = Fe::ONE;
        let z = Fe::ZERO;
        // e0 = 1, e1 * e1 = e0 + e1 but claims one = e1: not an identity
        let tensor = vec![o, z, z, o, z, o, o, o];
        assert!(matches!(
            Algebra::from_structure_constants(f.clone(), 2, tensor.clone(), vec![z, o], "x"),
            Err(Error::NoUnity(_))
        ));
        assert!(matches!(
            Algebra::from_structure_constants(f.clone(), 2, tensor, vec![z, z], "x"),
            Err(Error::NoUnity(_))
        ));
        assert!(matches!(
            Algebra::from_structure_constants(f, 2, vec![o; 3], vec![o, z], "x"),
            Err(Error::BadSpec(_))
        ));
    }

    #[test]
    fn non_associative_rejected() {
        // d = 3 over GF(2), basis 1, a, b with a*b = a, b*a = 0, a*a = b, b*b = 0.
        // (a a) b = b b = 0, a (a b) = a a = b.
        let f = Arc::new(Field::prime(2).unwrap());
        let o = Fe::ONE;
        let z = Fe::ZERO;
        let v = |x: [Fe; 3]| x.to_vec();
        let one = v([o, z, z]);
        let a = v([z, o, z]);
        let b = v([z, z, o]);
        let zero = v([z, z, z]);
        let table = [
            [one.clone(), a.clone(), b.clone()],
            [a.clone(), b.clone(), a.clone()],
            [b.clone(), zero.clone(), zero.clone()],
        ];
        let tensor: Vec<Fe> = table.iter().flat_map(|r| r.iter().flatten().copied()).collect();
        let err = Algebra::from_structure_constants(f, 3, tensor, one, "bad").unwrap_err();
        assert!(matches!(err, Error::NonAssociative(..)));
    }
}
