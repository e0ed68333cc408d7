//! Blocking sets: point sets meeting every chain.
//!
//! [`is_blocking`] produces a full certificate (intersection distribution and
//! the four counting relations), [`min_blocking`] runs the exact search from
//! [`search`], and [`ResidueMap`] lifts blocking sets of the residue geometry
//! to unions of parallel classes.

pub mod bounds;
pub mod search;

use std::sync::Arc;

use serde::Serialize;

use crate::chains::{Chain, Geometry};
use crate::error::{Error, Result};
use crate::incidence::Incidence;

pub use bounds::{
    bound_elf, bound_trivial, glynn_bound, glynn_polynomial_check_3d, moebius_bound_table,
    three_dim_crossovers, Crossover, GlynnPolynomial, MoebiusBounds,
};
pub use search::{all_minimum_hitting_sets, hits_all, min_hitting_set, SearchOptions, SearchResult};

/// `n[i]` = number of blocks meeting the set in exactly `i` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionDistribution {
    pub x: usize,
    pub n: Vec<u64>,
}

impl IntersectionDistribution {
    /// `Σ_i i(i-1)...(i-k+1) n_i`.
    pub fn falling_moment(&self, k: u32) -> i128 {
        self.n
            .iter()
            .enumerate()
            .map(|(i, &ni)| (0..k as i128).map(|j| i as i128 - j).product::<i128>() * ni as i128)
            .sum()
    }
}

/// The counting relations every point set satisfies in a chain geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountingChecks {
    /// `Σ n_i = λ0`.
    pub blocks: bool,
    /// `Σ i n_i = x λ1`.
    pub incidences: bool,
    /// `Σ i(i-1) n_i >= x(x - q^δ) λ2`, local rings only.
    pub pairs: Option<bool>,
    /// `Σ i(i-1)(i-2) n_i <= x(x-1)(x-2) λ3`.
    pub triples: bool,
}

impl CountingChecks {
    pub fn all_hold(&self) -> bool {
        self.blocks && self.incidences && self.pairs != Some(false) && self.triples
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub trivial: u64,
    pub elf: u64,
    /// Only for local rings.
    pub glynn: Option<u64>,
}

impl Bounds {
    /// The strongest of the bounds.
    pub fn best(&self) -> u64 {
        self.trivial.max(self.elf).max(self.glynn.unwrap_or(0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingReport {
    pub set: Vec<usize>,
    pub is_blocking: bool,
    pub first_missed_chain: Option<usize>,
    pub distribution: IntersectionDistribution,
    pub checks: Option<CountingChecks>,
    pub bounds: Option<Bounds>,
}

pub fn bounds(geom: &Geometry) -> Result<Bounds> {
    let alg = geom.algebra();
    let q = alg.q() as u64;
    let d = alg.dim() as u32;
    let glynn = match alg.delta() {
        Some(delta) => Some(bounds::to_u64(&glynn_bound(q, d, delta)?)),
        None => None,
    };
    Ok(Bounds {
        trivial: bound_trivial(&geom.lambda()),
        elf: bounds::to_u64(&bound_elf(q, d, alg.unit_count())),
        glynn,
    })
}

fn normalize_set(v: usize, set: &[usize]) -> Result<Vec<usize>> {
    if let Some(&p) = set.iter().find(|&&p| p >= v) {
        return Err(Error::UnknownPoint(p));
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Blocking test and intersection distribution for an arbitrary incidence
/// structure; no counting checks or bounds.
pub fn analyze_incidence(inc: &Incidence, set: &[usize]) -> Result<BlockingReport> {
    let set = normalize_set(inc.v(), set)?;
    let mut member = vec![false; inc.v()];
    for &p in &set {
        member[p] = true;
    }
    let k = inc.blocks().iter().map(Vec::len).max().unwrap_or(0);
    let mut n = vec![0u64; k + 1];
    let mut first_missed_chain = None;
    for (b, block) in inc.blocks().iter().enumerate() {
        let hits = block.iter().filter(|&&p| member[p]).count();
        n[hits] += 1;
        if hits == 0 && first_missed_chain.is_none() {
            first_missed_chain = Some(b);
        }
    }
    Ok(BlockingReport {
        is_blocking: first_missed_chain.is_none(),
        first_missed_chain,
        distribution: IntersectionDistribution { x: set.len(), n },
        set,
        checks: None,
        bounds: None,
    })
}

/// Full blocking report for a point set of a chain geometry.
pub fn is_blocking(geom: &Geometry, set: &[usize]) -> Result<BlockingReport> {
    let set = normalize_set(geom.v(), set)?;
    let mut member = vec![false; geom.v()];
    for &p in &set {
        member[p] = true;
    }
    let q = geom.q() as usize;
    let mut n = vec![0u64; q + 2];
    let mut first_missed_chain = None;
    for (c, chain) in geom.chains().iter().enumerate() {
        let hits = chain.points().iter().filter(|&&p| member[p]).count();
        n[hits] += 1;
        if hits == 0 && first_missed_chain.is_none() {
            first_missed_chain = Some(c);
        }
    }
    let distribution = IntersectionDistribution { x: set.len(), n };
    let checks = counting_checks(geom, &distribution);
    Ok(BlockingReport {
        is_blocking: first_missed_chain.is_none(),
        first_missed_chain,
        distribution,
        set,
        checks: Some(checks),
        bounds: Some(bounds(geom)?),
    })
}

pub fn counting_checks(geom: &Geometry, dist: &IntersectionDistribution) -> CountingChecks {
    let l = geom.lambda();
    let x = dist.x as i128;
    let (l0, l1, l2, l3) = (l.l0 as i128, l.l1 as i128, l.l2 as i128, l.l3 as i128);
    let pairs = geom.algebra().delta().map(|delta| {
        let q_delta = (geom.q() as i128).pow(delta);
        dist.falling_moment(2) >= x * (x - q_delta) * l2
    });
    CountingChecks {
        blocks: dist.falling_moment(0) == l0,
        incidences: dist.falling_moment(1) == x * l1,
        pairs,
        triples: dist.falling_moment(3) <= x * (x - 1) * (x - 2) * l3,
    }
}

/// The lower bound used to stop the search early: the trivial bound, and the
/// polynomial bound for local rings.
pub fn static_lower_bound(geom: &Geometry) -> Result<u64> {
    Ok(bounds(geom)?.best())
}

/// Exact minimum blocking set with the lexicographically least witness.
pub fn min_blocking(geom: &Geometry, max_size: Option<usize>) -> Result<SearchResult> {
    let opts = SearchOptions {
        max_size,
        lower_bound: static_lower_bound(geom)? as usize,
    };
    Ok(min_hitting_set(&geom.incidence(), opts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoseBurtonReport {
    pub min: usize,
    pub minima: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
}

/// For local rings with `δ = d-1`: the minimum blocking sets are exactly the
/// parallel classes. Enumerates all minima and compares.
pub fn bose_burton_check(geom: &Geometry) -> Result<BoseBurtonReport> {
    let alg = geom.algebra();
    let d = alg.dim() as u32;
    match alg.delta() {
        Some(delta) if delta + 1 == d => {}
        Some(delta) => {
            return Err(Error::NotApplicable(format!("delta = {delta}, need d - 1 = {}", d - 1)));
        }
        None => return Err(Error::NotApplicable("ring is not local".into())),
    }
    let inc = geom.incidence();
    let min = min_hitting_set(&inc, SearchOptions::default())
        .min
        .expect("the whole point set blocks");
    let minima = all_minimum_hitting_sets(&inc, min);
    let mut classes = geom.line().parallel_classes()?;
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort();
    let expected = (geom.q() as usize).pow(d - 1);
    if min != expected {
        return Err(Error::CounterexampleFound(format!(
            "minimum blocking set has size {min}, expected q^(d-1) = {expected}"
        )));
    }
    if let Some(m) = minima.iter().find(|m| classes.binary_search(m).is_err()) {
        return Err(Error::CounterexampleFound(format!(
            "minimum blocking set {m:?} is not a parallel class"
        )));
    }
    if let Some(c) = classes.iter().find(|c| !minima.contains(c)) {
        return Err(Error::CounterexampleFound(format!(
            "parallel class {c:?} is not a minimum blocking set"
        )));
    }
    Ok(BoseBurtonReport { min, minima, classes })
}

/// The map `φ: R(a,b) -> F(a + I, b + I)` from a local geometry onto the
/// geometry over its residue field, with both structural properties checked:
/// chains map onto chains, and the fibers are exactly the parallel classes.
#[derive(Clone, Debug)]
pub struct ResidueMap {
    residue: Geometry,
    phi: Vec<usize>,
    fibers: Vec<Vec<usize>>,
}

impl ResidueMap {
    pub fn new(geom: &Geometry) -> Result<ResidueMap> {
        let alg = geom.algebra();
        let rf = alg.residue_field()?;
        let residue = Geometry::build(Arc::new(rf.field.clone()))?;
        let line = geom.line();
        let phi = line
            .points()
            .iter()
            .map(|pt| {
                residue
                    .line()
                    .point_id(rf.project(pt.a), rf.project(pt.b))
                    .ok_or_else(|| Error::ModelViolation(format!("{pt:?} maps to a non-point")))
            })
            .collect::<Result<Vec<_>>>()?;

        for (c, chain) in geom.chains().iter().enumerate() {
            let mut image: Vec<usize> = chain.points().iter().map(|&p| phi[p]).collect();
            image.sort_unstable();
            image.dedup();
            if residue.chain_index(&Chain::new(image)).is_none() {
                return Err(Error::ModelViolation(format!(
                    "image of chain {c} is not a chain of the residue geometry"
                )));
            }
        }

        let mut fibers = vec![Vec::new(); residue.v()];
        for (p, &f) in phi.iter().enumerate() {
            fibers[f].push(p);
        }
        let mut classes = line.parallel_classes()?;
        for c in &mut classes {
            c.sort_unstable();
        }
        classes.sort();
        let mut sorted_fibers = fibers.clone();
        sorted_fibers.sort();
        if sorted_fibers != classes {
            return Err(Error::ModelViolation(
                "fibers of the residue map differ from the parallel classes".into(),
            ));
        }
        Ok(ResidueMap { residue, phi, fibers })
    }

    pub fn residue_geometry(&self) -> &Geometry {
        &self.residue
    }

    pub fn phi(&self, p: usize) -> usize {
        self.phi[p]
    }

    pub fn fiber(&self, f: usize) -> &[usize] {
        &self.fibers[f]
    }

    /// `φ^-1(B_F)` for a blocking set `B_F` of the residue geometry. The
    /// result has size `x q^δ` and is checked to block.
    pub fn lift(&self, geom: &Geometry, set: &[usize]) -> Result<BlockingReport> {
        let down = is_blocking(&self.residue, set)?;
        if let Some(missed_chain) = down.first_missed_chain {
            return Err(Error::NotBlockingDownstairs { missed_chain });
        }
        let mut lifted: Vec<usize> = down.set.iter().flat_map(|&f| self.fibers[f].iter().copied()).collect();
        lifted.sort_unstable();
        let delta = geom.algebra().delta().ok_or(Error::NotLocal)?;
        let expected = down.set.len() * (geom.q() as usize).pow(delta);
        if lifted.len() != expected {
            return Err(Error::ModelViolation(format!(
                "lifted set has {} points, expected x q^delta = {expected}",
                lifted.len()
            )));
        }
        let report = is_blocking(geom, &lifted)?;
        if let Some(c) = report.first_missed_chain {
            return Err(Error::CounterexampleFound(format!("lifted set misses chain {c}")));
        }
        Ok(report)
    }
}

/// Lifts `set` from the residue geometry of `geom`; see [`ResidueMap::lift`].
pub fn lift_blocking(geom: &Geometry, set: &[usize]) -> Result<BlockingReport> {
    ResidueMap::new(geom)?.lift(geom, set)
}
