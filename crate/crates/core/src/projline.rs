//! The projective line `P(R)` over a finite algebra.
//!
//! Points are enumerated as the orbit of `R(1,0)` under right multiplication
//! by elementary, swap and diagonal matrices. Every admissible pair is
//! recorded in a dense `q^d x q^d` table mapping it to its point id, so
//! canonicalizing the image of a pair is a single lookup. Point ids follow
//! the lexicographic order of canonical representatives.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::algebra::{Algebra, Elem};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::linalg;

/// Largest algebra order for which a projective line is built.
pub const MAX_GEOMETRY_ORDER: u32 = 1024;

const NONE: u32 = u32::MAX;

/// Canonical representative `(a, b)` of the point `R(a, b)`: the
/// lexicographically least pair among its left unit multiples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub a: Elem,
    pub b: Elem,
}

/// A 2x2 matrix over the algebra, acting on row vectors from the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2(pub [[Elem; 2]; 2]);

impl Mat2 {
    pub fn identity(alg: &Algebra) -> Mat2 {
        Mat2([[alg.one(), alg.zero()], [alg.zero(), alg.one()]])
    }

    pub fn mul(&self, alg: &Algebra, other: &Mat2) -> Mat2 {
        let (x, y) = (&self.0, &other.0);
        let e = |i: usize, j: usize| alg.add(alg.mul(x[i][0], y[0][j]), alg.mul(x[i][1], y[1][j]));
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// `(x, y) * self`.
    pub fn apply(&self, alg: &Algebra, x: Elem, y: Elem) -> (Elem, Elem) {
        let m = &self.0;
        (
            alg.add(alg.mul(x, m[0][0]), alg.mul(y, m[1][0])),
            alg.add(alg.mul(x, m[0][1]), alg.mul(y, m[1][1])),
        )
    }

    pub fn is_invertible(&self, alg: &Algebra) -> bool {
        let m = &self.0;
        pairs_distant(alg, (m[0][0], m[0][1]), (m[1][0], m[1][1]))
    }

    /// Two-sided inverse, found by solving `self * H = I` column by column.
    pub fn inverse(&self, alg: &Algebra) -> Result<Mat2> {
        let m = &self.0;
        let d = alg.dim();
        // images of the unknown column (h0, h1) under (h0, h1) -> (m00 h0 + m01 h1, m10 h0 + m11 h1)
        let mut rows = Vec::with_capacity(2 * d);
        for (upper, lower) in [(m[0][0], m[1][0]), (m[0][1], m[1][1])] {
            for k in 0..d {
                let ek = alg.basis(k);
                let top = alg.mul(upper, ek);
                let bottom = alg.mul(lower, ek);
                let mut row = alg.coords(top);
                row.extend(alg.coords(bottom));
                rows.push(row);
            }
        }
        let mut cols = [[alg.zero(); 2]; 2];
        for (j, target) in [(alg.one(), alg.zero()), (alg.zero(), alg.one())].into_iter().enumerate() {
            let mut b = alg.coords(target.0);
            b.extend(alg.coords(target.1));
            let x = linalg::solve_left(alg.base(), &rows, &b).ok_or(Error::NotAUnit)?;
            cols[j] = [alg.from_coords(&x[..d]), alg.from_coords(&x[d..])];
        }
        let h = Mat2([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]);
        if h.mul(alg, self) != Mat2::identity(alg) || self.mul(alg, &h) != Mat2::identity(alg) {
            return Err(Error::NotAUnit);
        }
        Ok(h)
    }
}

fn pair_rows(alg: &Algebra, a: Elem, b: Elem) -> Vec<Vec<Fe>> {
    (0..alg.dim())
        .map(|k| {
            let ek = alg.basis(k);
            let mut row = alg.coords(alg.mul(ek, a));
            row.extend(alg.coords(alg.mul(ek, b)));
            row
        })
        .collect()
}

/// True iff `[[a, b], [c, d]]` is invertible, tested on the `2d x 2d`
/// matrix of `(x, y) -> (x a + y c, x b + y d)` over the base field.
pub fn pairs_distant(alg: &Algebra, (a, b): (Elem, Elem), (c, d): (Elem, Elem)) -> bool {
    let mut rows = pair_rows(alg, a, b);
    rows.extend(pair_rows(alg, c, d));
    linalg::rank(alg.base(), &rows) == 2 * alg.dim()
}

/// Least left unit multiple of `(a, b)`, by direct search over `R*`.
pub fn canonical_pair(alg: &Algebra, a: Elem, b: Elem) -> (Elem, Elem) {
    alg.units()
        .iter()
        .map(|&u| (alg.mul(u, a), alg.mul(u, b)))
        .min()
        .expect("1 is a unit")
}

/// Slow oracle: every pair `(a, b)` that is the first row of some invertible
/// matrix, found by trying all completions `(c, d)`. Returns canonical
/// representatives in sorted order. Cost is `q^{4d}` rank computations.
pub fn admissible_pairs_bruteforce(alg: &Algebra) -> Vec<(Elem, Elem)> {
    let elems: Vec<Elem> = alg.elements().collect();
    let mut found = BTreeSet::new();
    for &a in &elems {
        for &b in &elems {
            let admissible = elems
                .iter()
                .any(|&c| elems.iter().any(|&d| pairs_distant(alg, (a, b), (c, d))));
            if admissible {
                found.insert(canonical_pair(alg, a, b));
            }
        }
    }
    found.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct DistantMatrix {
    rows: Vec<FixedBitSet>,
}

impl DistantMatrix {
    pub fn get(&self, p: usize, r: usize) -> bool {
        self.rows[p].contains(r)
    }

    pub fn row(&self, p: usize) -> &FixedBitSet {
        &self.rows[p]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ProjectiveLine {
    algebra: Arc<Algebra>,
    points: Vec<Point>,
    pair_index: Vec<u32>,
    distant: DistantMatrix,
}

impl ProjectiveLine {
    /// Enumerates `P(R)`, computes the distant relation and runs the point
    /// count cross-checks.
    pub fn new(algebra: Arc<Algebra>) -> Result<ProjectiveLine> {
        let n = algebra.order();
        if n > MAX_GEOMETRY_ORDER {
            return Err(Error::TooLarge(format!(
                "projective line over an algebra of order {n} (limit {MAX_GEOMETRY_ORDER})"
            )));
        }
        let (points, pair_index) = enumerate_orbit(&algebra);

        let rows: Vec<Vec<Vec<Fe>>> = points.iter().map(|p| pair_rows(&algebra, p.a, p.b)).collect();
        let v = points.len();
        let two_d = 2 * algebra.dim();
        let upper: Vec<Vec<usize>> = (0..v)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..v)
                    .filter(|&j| {
                        let mut m = rows[i].clone();
                        m.extend(rows[j].iter().cloned());
                        linalg::rank(algebra.base(), &m) == two_d
                    })
                    .collect()
            })
            .collect();
        let mut bits = vec![FixedBitSet::with_capacity(v); v];
        for (i, js) in upper.iter().enumerate() {
            for &j in js {
                bits[i].insert(j);
                bits[j].insert(i);
            }
        }
        let line = ProjectiveLine {
            algebra,
            points,
            pair_index,
            distant: DistantMatrix { rows: bits },
        };
        line.cross_check()?;
        Ok(line)
    }

    fn cross_check(&self) -> Result<()> {
        let alg = &self.algebra;
        let q = alg.q() as u64;
        let qd = q.pow(alg.dim() as u32);
        let v = self.points.len() as u64;
        let r = alg.unit_count();
        if let Some(delta) = alg.delta() {
            let expected = qd + q.pow(delta);
            if v != expected {
                return Err(Error::OrbitCountMismatch(format!(
                    "local ring: v = {v}, expected q^d + q^delta = {expected}"
                )));
            }
        }
        if v + r < 2 * qd {
            return Err(Error::OrbitCountMismatch(format!(
                "v = {v} violates v >= 2q^d - r* = {}",
                2 * qd - r
            )));
        }
        if alg.is_split_product() && v != (q + 1) * (q + 1) {
            return Err(Error::OrbitCountMismatch(format!(
                "K x K: v = {v}, expected (q+1)^2 = {}",
                (q + 1) * (q + 1)
            )));
        }
        for (p, row) in self.distant.rows.iter().enumerate() {
            let deg = row.count_ones(..) as u64;
            if deg != qd {
                return Err(Error::OrbitCountMismatch(format!(
                    "point {p} is distant from {deg} points, expected q^d = {qd}"
                )));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<Algebra> {
        self.algebra.clone()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    /// Number of points `v`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point id of `R(a, b)`, or `None` if the pair is not admissible.
    pub fn point_id(&self, a: Elem, b: Elem) -> Option<usize> {
        let n = self.algebra.order();
        match self.pair_index[(a.index() * n + b.index()) as usize] {
            NONE => None,
            id => Some(id as usize),
        }
    }

    fn require_id(&self, a: Elem, b: Elem) -> usize {
        self.point_id(a, b).expect("orbit contains the standard points")
    }

    /// `R(1, 0)`.
    pub fn infinity(&self) -> usize {
        let alg = &self.algebra;
        self.require_id(alg.one(), alg.zero())
    }

    /// `R(0, 1)`.
    pub fn origin(&self) -> usize {
        let alg = &self.algebra;
        self.require_id(alg.zero(), alg.one())
    }

    /// `R(1, 1)`.
    pub fn unit_point(&self) -> usize {
        let alg = &self.algebra;
        self.require_id(alg.one(), alg.one())
    }

    pub fn distant(&self, p: usize, r: usize) -> bool {
        self.distant.get(p, r)
    }

    pub fn distant_matrix(&self) -> &DistantMatrix {
        &self.distant
    }

    pub fn distant_neighbors(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.distant.rows[p].ones()
    }

    /// Image of a point under right multiplication by `g`.
    pub fn apply(&self, g: &Mat2, p: usize) -> Option<usize> {
        let pt = self.points[p];
        let (x, y) = g.apply(&self.algebra, pt.a, pt.b);
        self.point_id(x, y)
    }

    /// Classes of parallelism (non-distance, with `p || p`). Only defined for
    /// local rings, where it is an equivalence relation; that is re-verified
    /// exhaustively.
    pub fn parallel_classes(&self) -> Result<Vec<Vec<usize>>> {
        let alg = &self.algebra;
        let delta = alg.delta().ok_or(Error::NotLocal)?;
        let v = self.len();
        let mut class_of = vec![usize::MAX; v];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for p in 0..v {
            if class_of[p] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (0..v).filter(|&r| r == p || !self.distant(p, r)).collect();
            for &r in &members {
                if class_of[r] != usize::MAX {
                    return Err(Error::ParallelismViolation(format!(
                        "point {r} is parallel to {p} but already belongs to another class"
                    )));
                }
                class_of[r] = classes.len();
            }
            classes.push(members);
        }
        let size = (alg.q() as usize).pow(delta);
        let expected_classes = (alg.q() as usize).pow(alg.dim() as u32 - delta) + 1;
        for c in &classes {
            if c.len() != size {
                return Err(Error::ParallelismViolation(format!(
                    "class {:?} has size {}, expected q^delta = {size}",
                    c,
                    c.len()
                )));
            }
        }
        if classes.len() != expected_classes {
            return Err(Error::ParallelismViolation(format!(
                "{} classes, expected q^(d-delta) + 1 = {expected_classes}",
                classes.len()
            )));
        }
        for p in 0..v {
            for r in 0..v {
                if p != r && (class_of[p] == class_of[r]) == self.distant(p, r) {
                    return Err(Error::ParallelismViolation(format!(
                        "points {p} and {r} break transitivity"
                    )));
                }
            }
        }
        Ok(classes)
    }
}

fn enumerate_orbit(alg: &Algebra) -> (Vec<Point>, Vec<u32>) {
    let n = alg.order();
    let mut pair_index = vec![NONE; (n as usize) * (n as usize)];
    let mut reps: Vec<(Elem, Elem)> = Vec::new();
    let mut queue = VecDeque::new();
    let elems: Vec<Elem> = alg.elements().collect();
    let units = alg.units();

    let visit = |a: Elem, b: Elem, pair_index: &mut Vec<u32>, reps: &mut Vec<(Elem, Elem)>, queue: &mut VecDeque<(Elem, Elem)>| {
        if pair_index[(a.index() * n + b.index()) as usize] != NONE {
            return;
        }
        let id = reps.len() as u32;
        let mut best = (a, b);
        for &u in units {
            let m = (alg.mul(u, a), alg.mul(u, b));
            pair_index[(m.0.index() * n + m.1.index()) as usize] = id;
            best = best.min(m);
        }
        reps.push(best);
        queue.push_back(best);
    };

    visit(alg.one(), alg.zero(), &mut pair_index, &mut reps, &mut queue);
    while let Some((a, b)) = queue.pop_front() {
        for &x in &elems {
            visit(a, alg.add(alg.mul(a, x), b), &mut pair_index, &mut reps, &mut queue);
            visit(alg.add(a, alg.mul(b, x)), b, &mut pair_index, &mut reps, &mut queue);
        }
        visit(b, a, &mut pair_index, &mut reps, &mut queue);
        for &u in units {
            visit(alg.mul(a, u), b, &mut pair_index, &mut reps, &mut queue);
        }
    }

    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&i| reps[i]);
    let mut remap = vec![0u32; reps.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new as u32;
    }
    for slot in pair_index.iter_mut() {
        if *slot != NONE {
            *slot = remap[*slot as usize];
        }
    }
    let points = order
        .iter()
        .map(|&i| Point {
            a: reps[i].0,
            b: reps[i].1,
        })
        .collect();
    (points, pair_index)
}
