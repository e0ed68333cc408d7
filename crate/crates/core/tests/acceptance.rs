//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. All comparisons are exact integer or set equalities; the only
//! tolerance is `TOLERANCE = 0`.

use std::process::ExitCode;
use std::time::Instant;

use chaingeo_core::blocking::{self, bounds::THREE_DIM_THRESHOLDS};
use chaingeo_core::quadric::QuadricModel;
use chaingeo_core::{Fe, Geometry};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOLERANCE: u64 = 0;
const RANDOM_SETS: usize = 200;
const RANDOM_MATRICES: usize = 20;
const SEED: u64 = 0x5eed;

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

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn geom(spec: &str) -> Result<Geometry, String> {
    Geometry::from_spec(spec).map_err(|e| format!("{spec}: {e}"))
}

#[allow(clippy::absurd_extreme_comparisons)]
fn lambda_formulas() -> Outcome {
    let mut parts = Vec::new();
    for spec in DESK {
        let g = geom(spec)?;
        let t = g.lambda_table();
        let diff = t
            .formula
            .as_array()
            .iter()
            .zip(t.empirical.as_array())
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap();
        ensure(diff <= TOLERANCE, || {
            format!("{spec}: formula {:?} vs counted {:?}", t.formula, t.empirical)
        })?;
        ensure(g.chains().len() as u64 == t.formula.l0, || format!("{spec}: chain list size"))?;
        parts.push(format!("{spec}={:?}", t.empirical.as_array()));
    }
    Ok(parts.join(" "))
}

fn point_counts() -> Outcome {
    let mut parts = Vec::new();
    for spec in DESK {
        let g = geom(spec)?;
        let alg = g.algebra();
        let q = alg.q() as u64;
        let d = alg.dim() as u32;
        let v = g.v() as u64;
        let expected = match alg.delta() {
            Some(delta) => q.pow(d) + q.pow(delta),
            None => (q + 1) * (q + 1),
        };
        ensure(v == expected, || format!("{spec}: v = {v}, expected {expected}"))?;
        ensure(v + alg.unit_count() >= 2 * q.pow(d), || format!("{spec}: v < 2q^d - r*"))?;
        parts.push(format!("{spec}:{v}"));
    }
    Ok(parts.join(" "))
}

fn minimum_blocking_sets() -> Outcome {
    let cases = [
        ("gf(4)/gf(2)", 3),
        ("gf(9)/gf(3)", 5),
        ("gf(2) x gf(2)", 3),
        ("gf(3) x gf(3)", 4),
        ("gf(2)[t]/(t^2)", 2),
        ("gf(3)[t]/(t^2)", 3),
    ];
    let mut parts = Vec::new();
    for (spec, expected) in cases {
        let g = geom(spec)?;
        let start = Instant::now();
        let r = blocking::min_blocking(&g, None).map_err(|e| e.to_string())?;
        let ms = start.elapsed().as_millis();
        ensure(r.min == Some(expected), || format!("{spec}: min {:?}, expected {expected}", r.min))?;
        let w = r.witness.unwrap_or_default();
        let rep = blocking::is_blocking(&g, &w).map_err(|e| e.to_string())?;
        ensure(rep.is_blocking, || format!("{spec}: witness {w:?} does not block"))?;
        parts.push(format!("{spec}={expected} ({ms} ms)"));
    }
    Ok(parts.join(" "))
}

fn bose_burton() -> Outcome {
    let mut parts = Vec::new();
    for spec in ["gf(2)[t]/(t^2)", "gf(3)[t]/(t^2)"] {
        let g = geom(spec)?;
        let r = blocking::bose_burton_check(&g).map_err(|e| format!("{spec}: {e}"))?;
        ensure(r.minima == r.classes, || format!("{spec}: minima differ from classes"))?;
        parts.push(format!("{spec}: {} minima of size {} = parallel classes", r.minima.len(), r.min));
    }
    Ok(parts.join("; "))
}

fn glynn() -> Outcome {
    let b = blocking::glynn_bound(2, 2, 0).map_err(|e| e.to_string())?;
    ensure(b == BigInt::from(3), || format!("glynn_bound(2,2,0) = {b}"))?;
    let mut grid = 0;
    for q in 2..=20 {
        for t in -3..=3 {
            blocking::glynn_polynomial_check_3d(q, t).map_err(|e| e.to_string())?;
            grid += 1;
        }
    }
    for q in 2..=25u64 {
        let g = blocking::glynn_bound(q, 3, 0).map_err(|e| e.to_string())?;
        let published = blocking::moebius_bound_table(q).three_dim;
        ensure(g >= BigInt::from(published), || format!("q={q}: glynn {g} < published {published}"))?;
    }
    let cross = blocking::three_dim_crossovers(2..=25).map_err(|e| e.to_string())?;
    let report: Vec<String> = cross
        .iter()
        .skip(1)
        .map(|c| {
            let computed = c.computed.map_or("none".into(), |q| q.to_string());
            format!("+{}: published q>={} computed q>={}", c.increment, c.published, computed)
        })
        .collect();
    for (c, t) in cross.iter().skip(1).zip(THREE_DIM_THRESHOLDS) {
        ensure(c.computed.is_some_and(|q| q <= t), || format!("+{} not reached by q = {t}", c.increment))?;
    }
    Ok(format!("grid {grid} points exact; {}", report.join(", ")))
}

fn counting_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for spec in DESK {
        let g = geom(spec)?;
        for _ in 0..RANDOM_SETS {
            let density: f64 = rng.gen();
            let set: Vec<usize> = (0..g.v()).filter(|_| rng.gen_bool(density)).collect();
            let rep = blocking::is_blocking(&g, &set).map_err(|e| e.to_string())?;
            let c = rep.checks.expect("geometry report has checks");
            ensure(c.all_hold(), || format!("{spec}: set {set:?} violates {c:?}"))?;
            ensure(rep.is_blocking == (rep.distribution.n[0] == 0), || format!("{spec}: n0 mismatch"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} sets, 0 violations"))
}

fn quadric_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut parts = Vec::new();
    for q in [2u32, 3, 4] {
        let m = QuadricModel::new(q).map_err(|e| format!("q={q}: {e}"))?;
        let (secant, tangent) = m.check_planes().map_err(|e| format!("q={q}: {e}"))?;
        let qq = q as usize;
        ensure(secant == qq * qq * qq - qq, || format!("q={q}: {secant} non-tangent planes"))?;
        let pairs = m.check_distant_iff_secant().map_err(|e| format!("q={q}: {e}"))?;
        let f = m.geometry().algebra().base();
        let mut tested = 0;
        while tested < RANDOM_MATRICES {
            let mat: [Fe; 4] = std::array::from_fn(|_| f.element(rng.gen_range(0..q)).unwrap());
            if f.sub(f.mul(mat[0], mat[3]), f.mul(mat[1], mat[2])).is_zero() {
                continue;
            }
            m.check_action(mat).map_err(|e| format!("q={q}: {e}"))?;
            tested += 1;
        }
        parts.push(format!("q={q}: {secant}+{tangent} planes, {pairs} pairs, {tested} matrices"));
    }
    Ok(parts.join("; "))
}

fn lifting() -> Outcome {
    let spec = "gf(4)[t]/(t^2) over gf(2)";
    let g = geom(spec)?;
    let map = blocking::ResidueMap::new(&g).map_err(|e| e.to_string())?;
    let down = map.residue_geometry();
    let r = blocking::min_blocking(down, None).map_err(|e| e.to_string())?;
    ensure(r.min == Some(3), || format!("residue minimum {:?}", r.min))?;
    let base = r.witness.unwrap();
    let rep = map.lift(&g, &base).map_err(|e| e.to_string())?;
    let delta = g.algebra().delta().unwrap();
    ensure(g.v() == 20, || format!("v = {}", g.v()))?;
    ensure(rep.set.len() == base.len() * 2usize.pow(delta), || format!("size {}", rep.set.len()))?;
    ensure(rep.is_blocking && rep.distribution.n[0] == 0, || "lift does not block".into())?;
    Ok(format!("{:?} -> {} of {} points, blocking", base, rep.set.len(), g.v()))
}

fn elf_sharpness() -> Outcome {
    let mut parts = Vec::new();
    for q in [2u32, 3] {
        let m = QuadricModel::new(q).map_err(|e| e.to_string())?;
        let g = m.geometry();
        let elf = blocking::bounds(g).map_err(|e| e.to_string())?.elf as usize;
        let min = blocking::min_blocking(g, None).map_err(|e| e.to_string())?.min;
        ensure(min == Some(elf), || format!("q={q}: elf {elf} vs min {min:?}"))?;
        let [a, b] = m.ruling_lines().map_err(|e| e.to_string())?;
        for line in a.iter().chain(&b) {
            let rep = blocking::is_blocking(g, line).map_err(|e| e.to_string())?;
            ensure(rep.is_blocking && line.len() == elf, || format!("q={q}: line {line:?}"))?;
        }
        parts.push(format!("q={q}: elf=min={elf}, {} ruling lines minimum", a.len() + b.len()));
    }
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 lambda formulas", lambda_formulas),
        ("2 point counts", point_counts),
        ("3 minimum blocking sets", minimum_blocking_sets),
        ("4 minima are parallel classes", bose_burton),
        ("5 polynomial bound", glynn),
        ("6 counting identities", counting_identities),
        ("7 quadric model", quadric_model),
        ("8 lifting", lifting),
        ("9 elf bound sharpness", elf_sharpness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] ({secs:.2}s) {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
