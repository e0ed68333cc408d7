//! Chains of `Σ(F_q, R)` and the full [`Geometry`].
//!
//! A chain is the image of the standard chain `P(F_q)` under some matrix in
//! `GL_2(R)`. The chains through the standard triple `R(1,0), R(0,1), R(1,1)`
//! are the lines `P(w^-1 K w)` for units `w`, since the stabilizer of that
//! triple consists of the scalar matrices `aI`. Chains through any other
//! mutually distant triple are obtained by transporting those templates with
//! a matrix that maps the standard triple onto it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Elem};
use crate::error::{Error, Result};
use crate::incidence::Incidence;
use crate::linalg;
use crate::projline::{Mat2, ProjectiveLine};
use crate::ringspec::build_algebra;

/// A chain as the ascending list of its point ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Chain(Vec<usize>);

impl Chain {
    pub fn new(mut points: Vec<usize>) -> Chain {
        points.sort_unstable();
        Chain(points)
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `(λ0, λ1, λ2, λ3)`: chains through 0, 1, 2, 3 given mutually distant points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lambda {
    pub l0: u64,
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
}

impl Lambda {
    pub fn as_array(&self) -> [u64; 4] {
        [self.l0, self.l1, self.l2, self.l3]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaTable {
    /// From `λ3 = r*/#N` and the ratio formulas.
    pub formula: Lambda,
    /// Counted on the enumerated chains through `R(1,0)`, `R(0,1)`, `R(1,1)`.
    pub empirical: Lambda,
    pub normalizer_order: u64,
}

/// The point sets `{R(1,0)} ∪ {R(s,1) : s ∈ w^-1 K w}` as pairs, one per
/// distinct conjugate of `K`.
pub fn conjugate_templates(alg: &Algebra) -> Vec<Vec<(Elem, Elem)>> {
    let scalars: Vec<Elem> = alg.base().elements().map(|k| alg.scalar(k)).collect();
    let mut conjugates = BTreeSet::new();
    for &w in alg.units() {
        let wi = alg.inv(w).expect("unit");
        let set: BTreeSet<Elem> = scalars.iter().map(|&k| alg.mul(alg.mul(wi, k), w)).collect();
        conjugates.insert(set);
    }
    conjugates
        .into_iter()
        .map(|set| {
            let mut pairs = vec![(alg.one(), alg.zero())];
            pairs.extend(set.into_iter().map(|s| (s, alg.one())));
            pairs
        })
        .collect()
}

/// `{R(1,0)} ∪ {R(x·1, 1) : x ∈ F_q}`.
pub fn standard_chain(line: &ProjectiveLine) -> Chain {
    let alg = line.algebra();
    let mut ids = vec![line.infinity()];
    ids.extend(
        alg.base()
            .elements()
            .map(|x| line.point_id(alg.scalar(x), alg.one()).expect("standard chain point")),
    );
    Chain::new(ids)
}

/// A matrix `g` with `R(1,0)g = p1`, `R(0,1)g = p2`, `R(1,1)g = p3`.
///
/// Solves `u (a1,b1) + v (a2,b2) = (a3,b3)` over the base field and takes
/// `g = [[u a1, u b1], [v a2, v b2]]`.
pub fn triple_transform(line: &ProjectiveLine, triple: [usize; 3]) -> Result<Mat2> {
    let [p1, p2, p3] = triple;
    if !(line.distant(p1, p2) && line.distant(p1, p3) && line.distant(p2, p3)) {
        return Err(Error::NotMutuallyDistant);
    }
    let alg = line.algebra();
    let d = alg.dim();
    let (x1, x2, x3) = (line.point(p1), line.point(p2), line.point(p3));
    let mut rows = Vec::with_capacity(2 * d);
    for (a, b) in [(x1.a, x1.b), (x2.a, x2.b)] {
        for k in 0..d {
            let ek = alg.basis(k);
            let mut row = alg.coords(alg.mul(ek, a));
            row.extend(alg.coords(alg.mul(ek, b)));
            rows.push(row);
        }
    }
    let mut target = alg.coords(x3.a);
    target.extend(alg.coords(x3.b));
    let sol = linalg::solve_left(alg.base(), &rows, &target)
        .ok_or_else(|| Error::SolveFailed(format!("no solution for triple {triple:?}")))?;
    let u = alg.from_coords(&sol[..d]);
    let v = alg.from_coords(&sol[d..]);
    if !alg.is_unit(u) || !alg.is_unit(v) {
        return Err(Error::SolveFailed(format!(
            "coefficients for triple {triple:?} are not units"
        )));
    }
    Ok(Mat2([
        [alg.mul(u, x1.a), alg.mul(u, x1.b)],
        [alg.mul(v, x2.a), alg.mul(v, x2.b)],
    ]))
}

/// All chains through three mutually distant points.
pub fn chains_through_triple(
    line: &ProjectiveLine,
    templates: &[Vec<(Elem, Elem)>],
    triple: [usize; 3],
) -> Result<Vec<Chain>> {
    let g = triple_transform(line, triple)?;
    let alg = line.algebra();
    let mut out = BTreeSet::new();
    for template in templates {
        let ids = template
            .iter()
            .map(|&(x, y)| {
                let (a, b) = g.apply(alg, x, y);
                line.point_id(a, b).ok_or_else(|| {
                    Error::SolveFailed(format!("image of ({x},{y}) is not a point"))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        out.insert(Chain::new(ids));
    }
    Ok(out.into_iter().collect())
}

/// Every chain, each produced once from its three smallest points, in
/// lexicographic order of point-id lists.
pub fn enumerate_chains(line: &ProjectiveLine, templates: &[Vec<(Elem, Elem)>]) -> Result<Vec<Chain>> {
    let v = line.len();
    let per_first: Vec<Vec<Chain>> = (0..v)
        .into_par_iter()
        .map(|p1| -> Result<Vec<Chain>> {
            let mut found = Vec::new();
            for p2 in line.distant_neighbors(p1).filter(|&p| p > p1) {
                for p3 in line.distant_neighbors(p2).filter(|&p| p > p2) {
                    if !line.distant(p1, p3) {
                        continue;
                    }
                    for chain in chains_through_triple(line, templates, [p1, p2, p3])? {
                        if chain.points()[..3] == [p1, p2, p3] {
                            found.push(chain);
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    let mut chains: Vec<Chain> = per_first.into_iter().flatten().collect();
    chains.sort();
    let before = chains.len();
    chains.dedup();
    if chains.len() != before {
        return Err(Error::ChainCountMismatch {
            expected: chains.len() as u64,
            found: before as u64,
        });
    }
    Ok(chains)
}

fn exact_div(num: u128, den: u128, what: &str) -> Result<u64> {
    if den == 0 || !num.is_multiple_of(den) {
        return Err(Error::LambdaMismatch(format!(
            "{what} = {num}/{den} is not an integer"
        )));
    }
    Ok((num / den) as u64)
}

/// `λ3 = r*/#N`, `λ2 = r*λ3/(q-1)`, `λ1 = q^(d-1) r*λ3/(q-1)`,
/// `λ0 = v q^(d-1) r*λ3/(q^2-1)`.
pub fn formula_lambda(q: u64, d: u32, v: u64, unit_count: u64, normalizer_order: u64) -> Result<Lambda> {
    let (q, v, r) = (q as u128, v as u128, unit_count as u128);
    let qd1 = q.pow(d - 1);
    let l3 = exact_div(r, normalizer_order as u128, "λ3")?;
    let l3w = l3 as u128;
    Ok(Lambda {
        l0: exact_div(v * qd1 * r * l3w, q * q - 1, "λ0")?,
        l1: exact_div(qd1 * r * l3w, q - 1, "λ1")?,
        l2: exact_div(r * l3w, q - 1, "λ2")?,
        l3,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignReport {
    pub v: usize,
    pub class_size: usize,
    pub classes: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub lambda3: u64,
    pub triples_checked: u64,
}

/// The chain geometry `Σ(F_q, R)`: points, distant relation, chains and the
/// verified λ-table.
#[derive(Clone, Debug)]
pub struct Geometry {
    line: ProjectiveLine,
    templates: Vec<Vec<(Elem, Elem)>>,
    chains: Vec<Chain>,
    point_chains: Vec<Vec<usize>>,
    lambda: LambdaTable,
}

impl Geometry {
    pub fn from_spec(spec: &str) -> Result<Geometry> {
        Geometry::build(Arc::new(build_algebra(spec)?))
    }

    pub fn build(algebra: Arc<Algebra>) -> Result<Geometry> {
        let line = ProjectiveLine::new(algebra)?;
        let alg = line.algebra();
        let templates = conjugate_templates(alg);
        let normalizer_order = alg.normalizer_order();
        let q = alg.q() as u64;
        let formula = formula_lambda(
            q,
            alg.dim() as u32,
            line.len() as u64,
            alg.unit_count(),
            normalizer_order,
        )?;
        if templates.len() as u64 != formula.l3 {
            return Err(Error::LambdaMismatch(format!(
                "{} conjugates of K, but r*/#N = {}",
                templates.len(),
                formula.l3
            )));
        }
        let chains = enumerate_chains(&line, &templates)?;
        if chains.len() as u64 != formula.l0 {
            return Err(Error::ChainCountMismatch {
                expected: formula.l0,
                found: chains.len() as u64,
            });
        }
        let mut point_chains = vec![Vec::new(); line.len()];
        for (c, chain) in chains.iter().enumerate() {
            for &p in chain.points() {
                point_chains[p].push(c);
            }
        }
        let (inf, zero, one) = (line.infinity(), line.origin(), line.unit_point());
        let through = |pts: &[usize]| chains.iter().filter(|c| pts.iter().all(|&p| c.contains(p))).count() as u64;
        let empirical = Lambda {
            l0: chains.len() as u64,
            l1: through(&[inf]),
            l2: through(&[inf, zero]),
            l3: through(&[inf, zero, one]),
        };
        if empirical != formula {
            return Err(Error::LambdaMismatch(format!(
                "counted {:?}, formulas give {:?}",
                empirical.as_array(),
                formula.as_array()
            )));
        }
        // double count of (point distant from two given points, chain through all three)
        if alg.unit_count() * empirical.l3 != (q - 1) * empirical.l2 {
            return Err(Error::LambdaMismatch("r*λ3 != (q-1)λ2".into()));
        }
        Ok(Geometry {
            line,
            templates,
            chains,
            point_chains,
            lambda: LambdaTable {
                formula,
                empirical,
                normalizer_order,
            },
        })
    }

    pub fn line(&self) -> &ProjectiveLine {
        &self.line
    }

    pub fn algebra(&self) -> &Algebra {
        self.line.algebra()
    }

    pub fn v(&self) -> usize {
        self.line.len()
    }

    pub fn q(&self) -> u32 {
        self.algebra().q()
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    /// Indices of the chains through point `p`.
    pub fn chains_through(&self, p: usize) -> &[usize] {
        &self.point_chains[p]
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda.formula
    }

    pub fn lambda_table(&self) -> LambdaTable {
        self.lambda
    }

    pub fn templates(&self) -> &[Vec<(Elem, Elem)>] {
        &self.templates
    }

    pub fn standard_chain(&self) -> Chain {
        standard_chain(&self.line)
    }

    pub fn chains_through_triple(&self, p1: usize, p2: usize, p3: usize) -> Result<Vec<Chain>> {
        chains_through_triple(&self.line, &self.templates, [p1, p2, p3])
    }

    pub fn chain_index(&self, chain: &Chain) -> Option<usize> {
        self.chains.binary_search(chain).ok()
    }

    pub fn incidence(&self) -> Incidence {
        Incidence::new(
            self.v(),
            self.chains.iter().map(|c| c.points().to_vec()).collect(),
        )
        .expect("chains use valid point ids")
    }

    /// Checks that the geometry is a `3-(q^δ, q+1, λ3)` divisible design on
    /// `q^d + q^δ` points with the parallel classes as point classes.
    pub fn verify_divisible_design(&self) -> Result<DesignReport> {
        let alg = self.algebra();
        let delta = alg.delta().ok_or(Error::NotLocal)?;
        let q = alg.q() as usize;
        let classes = self.line.parallel_classes()?;
        let class_size = q.pow(delta);
        let v = self.v();
        let violation = |triple: [usize; 3], message: String| Error::DesignViolation { triple, message };
        if v != q.pow(alg.dim() as u32) + class_size {
            return Err(violation([0; 3], format!("v = {v} is not q^d + q^delta")));
        }
        let mut class_of = vec![0usize; v];
        for (i, c) in classes.iter().enumerate() {
            for &p in c {
                class_of[p] = i;
            }
        }
        let l3 = self.lambda.formula.l3;
        let mut counts: HashMap<[usize; 3], u64> = HashMap::new();
        for chain in &self.chains {
            let pts = chain.points();
            if pts.len() != q + 1 {
                return Err(violation([pts[0], pts[1], pts[2]], format!("chain has {} points", pts.len())));
            }
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    if class_of[pts[i]] == class_of[pts[j]] {
                        return Err(violation(
                            [pts[i], pts[j], pts[j]],
                            "chain meets a parallel class twice".into(),
                        ));
                    }
                    for k in (j + 1)..pts.len() {
                        *counts.entry([pts[i], pts[j], pts[k]]).or_default() += 1;
                    }
                }
            }
        }
        let mut checked = 0u64;
        for a in 0..v {
            for b in (a + 1)..v {
                if class_of[a] == class_of[b] {
                    continue;
                }
                for c in (b + 1)..v {
                    if class_of[c] == class_of[a] || class_of[c] == class_of[b] {
                        continue;
                    }
                    let found = counts.get(&[a, b, c]).copied().unwrap_or(0);
                    if found != l3 {
                        return Err(violation(
                            [a, b, c],
                            format!("on {found} chains, expected λ3 = {l3}"),
                        ));
                    }
                    checked += 1;
                }
            }
        }
        if checked != counts.len() as u64 {
            return Err(violation([0; 3], "a chain contains a non-distant pair".into()));
        }
        Ok(DesignReport {
            v,
            class_size,
            classes: classes.len(),
            blocks: self.chains.len(),
            block_size: q + 1,
            lambda3: l3,
            triples_checked: checked,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(spec: &str) -> Geometry {
        Geometry::from_spec(spec).unwrap()
    }

    #[test]
    fn lambda_tables() {
        assert_eq!(geo("gf(4)/gf(2)").lambda().as_array(), [10, 6, 3, 1]);
        assert_eq!(geo("gf(2)[t]/(t^2)").lambda().as_array(), [8, 4, 2, 1]);
        assert_eq!(geo("gf(2) x gf(2)").lambda().as_array(), [6, 2, 1, 1]);
    }

    #[test]
    fn trivial_ring_has_one_chain() {
        let g = geo("gf(5)");
        assert_eq!(g.v(), 6);
        assert_eq!(g.chains().len(), 1);
        assert_eq!(g.chains()[0].len(), 6);
    }

    #[test]
    fn standard_chain_gf4() {
        let g = geo("gf(4)/gf(2)");
        let l = g.line();
        let expected = Chain::new(vec![l.infinity(), l.origin(), l.unit_point()]);
        assert_eq!(g.standard_chain(), expected);
        let through = g.chains_through_triple(l.infinity(), l.origin(), l.unit_point()).unwrap();
        assert_eq!(through, vec![expected]);
    }

    #[test]
    fn triple_must_be_distant() {
        let g = geo("gf(2)[t]/(t^2)");
        let l = g.line();
        let alg = l.algebra();
        let t = alg.basis(1);
        let par = l.point_id(alg.one(), t).unwrap();
        assert_eq!(
            g.chains_through_triple(l.infinity(), par, l.origin()).unwrap_err(),
            Error::NotMutuallyDistant
        );
    }

    #[test]
    fn divisible_designs() {
        let r = geo("gf(2)[t]/(t^2)").verify_divisible_design().unwrap();
        assert_eq!((r.v, r.class_size, r.blocks, r.lambda3), (6, 2, 8, 1));
        let r = geo("gf(4)/gf(2)").verify_divisible_design().unwrap();
        assert_eq!((r.v, r.class_size, r.classes, r.triples_checked), (5, 1, 5, 10));
        let r = geo("gf(4)[t]/(t^2) over gf(2)").verify_divisible_design().unwrap();
        assert_eq!((r.v, r.class_size, r.block_size), (20, 4, 3));
        assert_eq!(geo("gf(2) x gf(2)").verify_divisible_design().unwrap_err(), Error::NotLocal);
    }

    #[test]
    fn formula_rejects_non_integers() {
        assert!(matches!(formula_lambda(3, 2, 10, 7, 1), Err(Error::LambdaMismatch(_))));
    }
}
