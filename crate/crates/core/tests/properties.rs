use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use chaingeo_core::blocking::{self, SearchOptions};
use chaingeo_core::field::slow_mul;
use chaingeo_core::projline::canonical_pair;
use chaingeo_core::{build_algebra, Algebra, Field, Geometry};
use proptest::prelude::*;

const DESK: [&str; 8] = [
    "gf(4)/gf(2)",
    "gf(9)/gf(3)",
    "gf(2)[t]/(t^2)",
    "gf(3)[t]/(t^2)",
    "gf(2)[t]/(t^3)",
    "gf(2) x gf(2)",
    "gf(3) x gf(3)",
    "gf(4)[t]/(t^2) over gf(2)",
];

fn geometries() -> &'static Vec<Geometry> {
    static CELL: OnceLock<Vec<Geometry>> = OnceLock::new();
    CELL.get_or_init(|| DESK.iter().map(|s| Geometry::from_spec(s).unwrap()).collect())
}

fn fields() -> &'static HashMap<u32, Field> {
    static CELL: OnceLock<HashMap<u32, Field>> = OnceLock::new();
    CELL.get_or_init(|| {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (2, 7)]
            .into_iter()
            .map(|(p, e)| {
                let f = Field::new(p, e, None).unwrap();
                (f.q(), f)
            })
            .collect()
    })
}

fn field_and_elems() -> impl Strategy<Value = (u32, u32, u32, u32)> {
    prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27, 128])
        .prop_flat_map(|q| (Just(q), 0..q, 0..q, 0..q))
}

proptest! {
    #[test]
    fn field_axioms((q, a, b, c) in field_and_elems()) {
        let f = &fields()[&q];
        let (a, b, c) = (f.element(a).unwrap(), f.element(b).unwrap(), f.element(c).unwrap());
        prop_assert_eq!(f.mul(a, b), slow_mul(f, a, b));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.element(0).unwrap());
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.element(1).unwrap());
        }
    }

    #[test]
    fn points_are_unit_orbits(g in 0..DESK.len(), p in any::<prop::sample::Index>(), u in any::<prop::sample::Index>()) {
        let geom = &geometries()[g];
        let line = geom.line();
        let alg = line.algebra();
        let pt = line.point(p.index(line.len()));
        let unit = alg.units()[u.index(alg.units().len())];
        let (a, b) = (alg.mul(unit, pt.a), alg.mul(unit, pt.b));
        prop_assert_eq!(canonical_pair(alg, a, b), (pt.a, pt.b));
        prop_assert_eq!(line.point_id(a, b), line.point_id(pt.a, pt.b));
    }

    #[test]
    fn counting_relations_hold(g in 0..DESK.len(), bits in prop::collection::vec(any::<bool>(), 30)) {
        let geom = &geometries()[g];
        let set: Vec<usize> = (0..geom.v()).filter(|&p| bits[p % bits.len()] ^ (p >= bits.len())).collect();
        let rep = blocking::is_blocking(geom, &set).unwrap();
        let checks = rep.checks.unwrap();
        prop_assert!(checks.all_hold(), "{:?}", checks);
        prop_assert_eq!(rep.is_blocking, rep.distribution.n[0] == 0);
        prop_assert_eq!(checks.pairs.is_some(), geom.algebra().is_local());
    }

    #[test]
    fn random_hitting_sets_match_exhaustive_search(
        v in 3usize..10,
        raw in prop::collection::vec(prop::collection::btree_set(0usize..10, 1..4), 1..12),
    ) {
        let blocks: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|b| b.into_iter().map(|p| p % v).collect::<std::collections::BTreeSet<_>>().into_iter().collect())
            .collect();
        let inc = chaingeo_core::Incidence::new(v, blocks).unwrap();
        let best = (0u32..1 << v)
            .map(|m| (0..v).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| blocking::hits_all(&inc, s))
            .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)))
            .unwrap();
        let r = blocking::min_hitting_set(&inc, SearchOptions::default());
        prop_assert_eq!(r.min, Some(best.len()));
        prop_assert_eq!(r.witness.as_ref(), Some(&best));
        let all = blocking::all_minimum_hitting_sets(&inc, best.len());
        let expected: Vec<Vec<usize>> = (0u32..1 << v)
            .map(|m| (0..v).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| s.len() == best.len() && blocking::hits_all(&inc, s))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assert_eq!(all, expected);
    }
}

#[test]
fn residue_projection_is_a_ring_map() {
    for spec in ["gf(2)[t]/(t^2)", "gf(3)[t]/(t^2)", "gf(2)[t]/(t^3)", "gf(4)[t]/(t^2) over gf(2)", "gf(9)/gf(3)"] {
        let alg: Algebra = build_algebra(spec).unwrap();
        let rf = alg.residue_field().unwrap();
        let delta = alg.delta().unwrap();
        let mut fiber = HashMap::new();
        for a in alg.elements() {
            *fiber.entry(rf.project(a)).or_insert(0u32) += 1;
            for b in alg.elements() {
                assert_eq!(rf.project(alg.mul(a, b)), rf.field.mul(rf.project(a), rf.project(b)), "{spec}");
                assert_eq!(rf.project(alg.add(a, b)), rf.field.add(rf.project(a), rf.project(b)), "{spec}");
            }
        }
        assert!(fiber.values().all(|&n| n == alg.q().pow(delta)), "{spec}");
    }
}

#[test]
fn search_witnesses_are_minimal() {
    for geom in geometries().iter().filter(|g| g.v() <= 12) {
        let r = blocking::min_blocking(geom, None).unwrap();
        let w = r.witness.unwrap();
        let glynn = blocking::bounds(geom).unwrap().glynn;
        assert!(glynn.is_none_or(|g| g as usize <= w.len()));
        assert!(blocking::is_blocking(geom, &w).unwrap().is_blocking);
        for i in 0..w.len() {
            let mut smaller = w.clone();
            smaller.remove(i);
            assert!(!blocking::is_blocking(geom, &smaller).unwrap().is_blocking);
        }
    }
}

#[test]
fn chain_enumeration_is_deterministic() {
    let alg = Arc::new(build_algebra("gf(3) x gf(3)").unwrap());
    let a = Geometry::build(alg.clone()).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| Geometry::build(alg).unwrap());
    assert_eq!(a.chains(), b.chains());
}
