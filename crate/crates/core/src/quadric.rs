//! The chain geometry over `K x K` as the hyperbolic quadric
//! `x0 x1 - x2 x3 = 0` of `PG(3, q)`.
//!
//! `ψ: R(a, b) -> K(a1 b2, a2 b1, a1 a2, b1 b2)` maps points bijectively onto
//! the quadric, chains onto non-tangent plane sections, and distant pairs onto
//! pairs spanning a secant line. [`QuadricModel`] checks each of these
//! exhaustively.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::Algebra;
use crate::chains::{Chain, Geometry};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg;
use crate::projline::{Mat2, Point};
use crate::ringspec::build_algebra;

/// A point of `PG(3, q)`, first nonzero coordinate 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint3(pub [Fe; 4]);

/// A plane `u0 x0 + u1 x1 + u2 x2 + u3 x3 = 0`, normalized like points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane3(pub [Fe; 4]);

fn normalize(f: &Field, x: [Fe; 4]) -> Option<[Fe; 4]> {
    let lead = *x.iter().find(|c| !c.is_zero())?;
    let s = f.inv(lead).expect("nonzero");
    Some(x.map(|c| f.mul(s, c)))
}

impl ProjPoint3 {
    pub fn new(f: &Field, x: [Fe; 4]) -> Option<ProjPoint3> {
        normalize(f, x).map(ProjPoint3)
    }
}

impl Plane3 {
    pub fn new(f: &Field, u: [Fe; 4]) -> Option<Plane3> {
        normalize(f, u).map(Plane3)
    }

    pub fn contains(&self, f: &Field, x: &ProjPoint3) -> bool {
        (0..4)
            .fold(Fe::ZERO, |acc, i| f.add(acc, f.mul(self.0[i], x.0[i])))
            .is_zero()
    }

    /// `u0 u1 - u2 u3 = 0`.
    pub fn is_tangent(&self, f: &Field) -> bool {
        let u = self.0;
        f.sub(f.mul(u[0], u[1]), f.mul(u[2], u[3])).is_zero()
    }
}

pub fn on_quadric(f: &Field, x: &ProjPoint3) -> bool {
    let x = x.0;
    f.sub(f.mul(x[0], x[1]), f.mul(x[2], x[3])).is_zero()
}

/// All points of `PG(3, q)` in lexicographic order.
pub fn pg3_points(f: &Field) -> Vec<ProjPoint3> {
    let els: Vec<Fe> = f.elements().collect();
    let mut out = Vec::new();
    for lead in 0..4 {
        let free = 3 - lead;
        let total = els.len().pow(free as u32);
        for idx in 0..total {
            let mut x = [Fe::ZERO; 4];
            x[lead] = Fe::ONE;
            let mut r = idx;
            for k in (lead + 1..4).rev() {
                x[k] = els[r % els.len()];
                r /= els.len();
            }
            out.push(ProjPoint3(x));
        }
    }
    out.sort();
    out
}

/// `ψ(R(a, b))` for a point of `P(K x K)`.
pub fn psi(alg: &Algebra, pt: Point) -> Result<ProjPoint3> {
    if !alg.is_split_product() {
        return Err(Error::WrongRing(format!("{} is not K x K", alg.label())));
    }
    let f = alg.base();
    let (a, b) = (alg.coords(pt.a), alg.coords(pt.b));
    let x = [
        f.mul(a[0], b[1]),
        f.mul(a[1], b[0]),
        f.mul(a[0], a[1]),
        f.mul(b[0], b[1]),
    ];
    ProjPoint3::new(f, x).ok_or_else(|| Error::ModelViolation(format!("{pt:?} maps to the zero vector")))
}

/// The 4x4 matrix of `PG(3, q)` induced by `(M, 1)` with
/// `M = [[m1, m2], [m3, m4]]`, acting on row vectors.
pub fn action_matrix(m: [Fe; 4]) -> [[Fe; 4]; 4] {
    let [m1, m2, m3, m4] = m;
    let z = Fe::ZERO;
    [[m1, z, z, m2], [z, m4, m3, z], [z, m2, m1, z], [m3, z, z, m4]]
}

fn apply4(f: &Field, x: &ProjPoint3, a: &[[Fe; 4]; 4]) -> Option<ProjPoint3> {
    let mut y = [Fe::ZERO; 4];
    for (j, yj) in y.iter_mut().enumerate() {
        for (xi, row) in x.0.iter().zip(a) {
            *yj = f.add(*yj, f.mul(*xi, row[j]));
        }
    }
    ProjPoint3::new(f, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadricSummary {
    pub q: u32,
    pub points: usize,
    pub chains: usize,
    pub non_tangent_planes: usize,
    pub tangent_planes: usize,
    pub point_pairs: usize,
    pub ruling_lines: usize,
}

/// `Σ(F_q, F_q x F_q)` together with `ψ` and the quadric.
#[derive(Clone, Debug)]
pub struct QuadricModel {
    geom: Geometry,
    images: Vec<ProjPoint3>,
    quadric: Vec<ProjPoint3>,
}

impl QuadricModel {
    pub fn new(q: u32) -> Result<QuadricModel> {
        let alg = build_algebra(&format!("gf({q}) x gf({q})"))?;
        QuadricModel::from_geometry(Geometry::build(Arc::new(alg))?)
    }

    /// Builds `ψ` and checks that it is a bijection onto the quadric.
    pub fn from_geometry(geom: Geometry) -> Result<QuadricModel> {
        let alg = geom.algebra();
        let images = geom
            .line()
            .points()
            .iter()
            .map(|&pt| psi(alg, pt))
            .collect::<Result<Vec<_>>>()?;
        let f = alg.base();
        let quadric: Vec<ProjPoint3> = pg3_points(f).into_iter().filter(|x| on_quadric(f, x)).collect();
        if let Some(p) = images.iter().position(|x| !on_quadric(f, x)) {
            return Err(Error::ModelViolation(format!("image of point {p} is off the quadric")));
        }
        let distinct: BTreeSet<ProjPoint3> = images.iter().copied().collect();
        if distinct.len() != images.len() {
            return Err(Error::ModelViolation("psi is not injective".into()));
        }
        if distinct.len() != quadric.len() {
            return Err(Error::ModelViolation(format!(
                "psi hits {} of {} quadric points",
                distinct.len(),
                quadric.len()
            )));
        }
        Ok(QuadricModel { geom, images, quadric })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    fn field(&self) -> &Field {
        self.geom.algebra().base()
    }

    pub fn image(&self, p: usize) -> ProjPoint3 {
        self.images[p]
    }

    pub fn quadric_points(&self) -> &[ProjPoint3] {
        &self.quadric
    }

    fn preimage(&self, x: &ProjPoint3) -> Option<usize> {
        self.images.iter().position(|y| y == x)
    }

    /// Ids of points whose images lie in the plane.
    pub fn section(&self, plane: &Plane3) -> Vec<usize> {
        let f = self.field();
        (0..self.images.len())
            .filter(|&p| plane.contains(f, &self.images[p]))
            .collect()
    }

    /// The plane spanned by the image of a chain, checked to be non-tangent
    /// and to cut the quadric in exactly that image.
    pub fn chain_to_plane(&self, chain: &Chain) -> Result<Plane3> {
        let f = self.field();
        let rows: Vec<Vec<Fe>> = chain.points().iter().map(|&p| self.images[p].0.to_vec()).collect();
        let rank = linalg::rank(f, &rows);
        if rank != 3 {
            return Err(Error::NotCoplanar { rank });
        }
        let ns = linalg::nullspace(f, &rows);
        let u: [Fe; 4] = ns[0].clone().try_into().expect("four coordinates");
        let plane = Plane3::new(f, u).expect("nonzero normal");
        if plane.is_tangent(f) {
            return Err(Error::TangentPlane {
                plane: plane.0.map(|c| c.index()),
            });
        }
        if self.section(&plane) != chain.points() {
            return Err(Error::ModelViolation(format!(
                "plane section differs from chain {:?}",
                chain.points()
            )));
        }
        Ok(plane)
    }

    /// Every plane of `PG(3, q)`: tangent planes cut `2q+1` quadric points,
    /// the others `q+1`, and the non-tangent sections are exactly the chains.
    /// Returns `(non-tangent, tangent)` plane counts.
    pub fn check_planes(&self) -> Result<(usize, usize)> {
        let f = self.field();
        let q = f.q() as usize;
        let mut chain_planes = BTreeSet::new();
        for chain in self.geom.chains() {
            chain_planes.insert(self.chain_to_plane(chain)?);
        }
        if chain_planes.len() != self.geom.chains().len() {
            return Err(Error::ModelViolation("two chains span the same plane".into()));
        }
        let (mut secant, mut tangent) = (0, 0);
        for p in pg3_points(f) {
            let plane = Plane3(p.0);
            let section = self.section(&plane);
            if plane.is_tangent(f) {
                tangent += 1;
                if section.len() != 2 * q + 1 {
                    return Err(Error::ModelViolation(format!(
                        "tangent plane {:?} meets the quadric in {} points",
                        plane.0,
                        section.len()
                    )));
                }
            } else {
                secant += 1;
                if section.len() != q + 1 || !chain_planes.contains(&plane) {
                    return Err(Error::ModelViolation(format!(
                        "non-tangent plane {:?} is not the span of a chain",
                        plane.0
                    )));
                }
            }
        }
        if secant != self.geom.chains().len() {
            return Err(Error::ModelViolation(format!(
                "{secant} non-tangent planes but {} chains",
                self.geom.chains().len()
            )));
        }
        Ok((secant, tangent))
    }

    /// Points of the line through two distinct points of `PG(3, q)`.
    fn line_through(&self, x: &ProjPoint3, y: &ProjPoint3) -> Vec<ProjPoint3> {
        let f = self.field();
        let mut pts = vec![*x];
        for s in f.elements() {
            let z = [0, 1, 2, 3].map(|i| f.add(f.mul(s, x.0[i]), y.0[i]));
            pts.push(ProjPoint3::new(f, z).expect("distinct points"));
        }
        pts.sort();
        pts
    }

    /// Distant points span secant lines; non-distant points span lines of
    /// the quadric. Checked on all pairs; returns the number of pairs.
    pub fn check_distant_iff_secant(&self) -> Result<usize> {
        let f = self.field();
        let v = self.images.len();
        let mut pairs = 0;
        for p in 0..v {
            for r in (p + 1)..v {
                let line = self.line_through(&self.images[p], &self.images[r]);
                let inside = line.iter().all(|x| on_quadric(f, x));
                if inside == self.geom.line().distant(p, r) {
                    return Err(Error::ModelViolation(format!(
                        "points {p}, {r}: distant = {}, line inside quadric = {inside}",
                        !inside
                    )));
                }
                pairs += 1;
            }
        }
        let inf = self.geom.line().infinity();
        for r in 0..v {
            if r != inf && !self.geom.line().distant(inf, r) && !self.images[r].0[3].is_zero() {
                return Err(Error::ModelViolation(format!(
                    "point {r} is parallel to R(1,0) but off the plane x3 = 0"
                )));
            }
        }
        Ok(pairs)
    }

    /// The lines contained in the quadric as point-id sets, split into the
    /// two reguli. Each family has `q+1` pairwise disjoint lines.
    pub fn ruling_lines(&self) -> Result<[Vec<Vec<usize>>; 2]> {
        let f = self.field();
        let q = f.q() as usize;
        let v = self.images.len();
        let mut lines = BTreeSet::new();
        for p in 0..v {
            for r in (p + 1)..v {
                if self.geom.line().distant(p, r) {
                    continue;
                }
                let pts = self.line_through(&self.images[p], &self.images[r]);
                let mut ids = pts
                    .iter()
                    .map(|x| {
                        self.preimage(x)
                            .ok_or_else(|| Error::ModelViolation(format!("{x:?} has no preimage")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ids.sort_unstable();
                lines.insert(ids);
            }
        }
        let lines: Vec<Vec<usize>> = lines.into_iter().collect();
        if lines.len() != 2 * (q + 1) {
            return Err(Error::ModelViolation(format!(
                "{} lines on the quadric, expected 2(q+1)",
                lines.len()
            )));
        }
        let meet = |a: &[usize], b: &[usize]| a.iter().filter(|p| b.contains(p)).count();
        let (first, second): (Vec<_>, Vec<_>) = lines
            .iter()
            .cloned()
            .partition(|l| *l == lines[0] || meet(l, &lines[0]) == 0);
        for (fam, other) in [(&first, &second), (&second, &first)] {
            if fam.len() != q + 1 {
                return Err(Error::ModelViolation("reguli of unequal size".into()));
            }
            for a in fam.iter() {
                for b in other.iter() {
                    if meet(a, b) != 1 {
                        return Err(Error::ModelViolation(format!(
                            "lines {a:?} and {b:?} from opposite reguli do not meet once"
                        )));
                    }
                }
            }
        }
        Ok([first, second])
    }

    /// `ψ((M, 1) · p) = ψ(p) A(M)` for every point, where `A(M)` is
    /// [`action_matrix`]. `M` must be invertible.
    pub fn check_action(&self, m: [Fe; 4]) -> Result<()> {
        let alg = self.geom.algebra();
        let f = alg.base();
        let one = Fe::ONE;
        let z = Fe::ZERO;
        let g = Mat2([
            [alg.from_coords(&[m[0], one]), alg.from_coords(&[m[1], z])],
            [alg.from_coords(&[m[2], z]), alg.from_coords(&[m[3], one])],
        ]);
        if !g.is_invertible(alg) {
            return Err(Error::BadParameters(format!("matrix {m:?} is singular")));
        }
        let a = action_matrix(m);
        for p in 0..self.images.len() {
            let moved = self
                .geom
                .line()
                .apply(&g, p)
                .ok_or_else(|| Error::ModelViolation("matrix does not act on points".into()))?;
            if apply4(f, &self.images[p], &a) != Some(self.images[moved]) {
                return Err(Error::ModelViolation(format!(
                    "action of {m:?} disagrees with the 4x4 matrix at point {p}"
                )));
            }
        }
        Ok(())
    }

    /// [`check_action`](Self::check_action) over all of `GL_2(q)`; returns
    /// the number of matrices checked.
    pub fn check_action_all(&self) -> Result<usize> {
        let f = self.field();
        let els: Vec<Fe> = f.elements().collect();
        let mut count = 0;
        for &m1 in &els {
            for &m2 in &els {
                for &m3 in &els {
                    for &m4 in &els {
                        if f.sub(f.mul(m1, m4), f.mul(m2, m3)).is_zero() {
                            continue;
                        }
                        self.check_action([m1, m2, m3, m4])?;
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    }

    /// Runs every check.
    pub fn check_all(&self) -> Result<QuadricSummary> {
        let (non_tangent_planes, tangent_planes) = self.check_planes()?;
        let point_pairs = self.check_distant_iff_secant()?;
        let rulings = self.ruling_lines()?;
        self.check_action_all()?;
        Ok(QuadricSummary {
            q: self.field().q(),
            points: self.images.len(),
            chains: self.geom.chains().len(),
            non_tangent_planes,
            tangent_planes,
            point_pairs,
            ruling_lines: rulings[0].len() + rulings[1].len(),
        })
    }
}
