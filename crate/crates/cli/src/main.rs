mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context};
use chaingeo_core::blocking::{self, ResidueMap, SearchOptions};
use chaingeo_core::quadric::{ProjPoint3, QuadricModel};
use chaingeo_core::{ringspec, Algebra, Elem, Error, Geometry, Incidence, ProjectiveLine, RingSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Format, Report, RunReport};

const EXIT_VIOLATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "chaingeo", version, about = "Finite chain geometries over F_q-algebras")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    /// Worker threads for chain enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Append wall time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RingArg {
    /// Ring spec, e.g. "gf(4)/gf(2)", "gf(3) x gf(3)", "gf(2)[t]/(t^2)".
    #[arg(long)]
    ring: String,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    ring: Option<String>,
    /// Incidence file (`v b k` header, one block per line).
    #[arg(long)]
    incidence: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Points,
    Rulings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Incidence,
    Structure,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sizes, locality and the λ table with formula and counted values.
    Info(RingArg),
    /// List points with their canonical representatives.
    Points(RingArg),
    /// List chains, or write them as an incidence file.
    Chains {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bounds for blocking sets.
    Bounds(RingArg),
    /// The polynomial bound for local parameters (q, d, delta).
    Glynn {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        delta: u32,
    },
    /// Exact minimum blocking set.
    Search {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_size: Option<usize>,
        /// Also list every minimum blocking set.
        #[arg(long)]
        all_minima: bool,
    },
    /// Check whether a point set blocks every chain.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Comma-separated point ids.
        #[arg(long)]
        set: String,
    },
    /// Lift a blocking set of the residue geometry to the full geometry.
    Lift {
        #[command(flatten)]
        ring: RingArg,
        /// Point ids in the residue geometry (default: its minimum witness).
        #[arg(long)]
        set: Option<String>,
    },
    /// The hyperbolic quadric model of gf(q) x gf(q).
    Quadric {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum)]
        check: Option<Check>,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Write the incidence file or the structure-constant file of a ring.
    Export {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, value_enum, default_value = "incidence")]
        kind: ExportKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of an internal check; reported with exit code 2.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

/// Bad user input; reported with exit code 64.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    match run(&cli.command) {
        Ok(mut report) => {
            if cli.timing {
                report.push("wall_ms", start.elapsed().as_millis() as u64);
            }
            print!("{}", report.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Violation>().is_some() {
        return EXIT_VIOLATION;
    }
    if e.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_violation() => EXIT_VIOLATION,
        Some(Error::Io(_)) => 1,
        Some(_) => EXIT_USAGE,
        None => 1,
    }
}

fn run(cmd: &Command) -> anyhow::Result<Report> {
    match cmd {
        Command::Info(r) => cmd_info(&r.ring),
        Command::Points(r) => cmd_points(&r.ring),
        Command::Chains { ring, out } => cmd_chains(&ring.ring, out.as_deref()),
        Command::Bounds(r) => cmd_bounds(&r.ring),
        Command::Glynn { q, d, delta } => cmd_glynn(*q, *d, *delta),
        Command::Search {
            source,
            max_size,
            all_minima,
        } => cmd_search(source, *max_size, *all_minima),
        Command::Verify { source, set } => cmd_verify(source, set),
        Command::Lift { ring, set } => cmd_lift(&ring.ring, set.as_deref()),
        Command::Quadric { q, check, emit } => cmd_quadric(*q, check.is_some() || emit.is_none(), *emit),
        Command::Export { ring, kind, out } => cmd_export(&ring.ring, *kind, out.as_deref()),
    }
}

fn parse_spec(spec: &str) -> anyhow::Result<(String, Algebra)> {
    let parsed = RingSpec::parse(spec)?;
    let alg = parsed.build()?;
    Ok((parsed.to_string(), alg))
}

fn geometry(spec: &str) -> anyhow::Result<(String, Geometry)> {
    let (canonical, alg) = parse_spec(spec)?;
    Ok((canonical, Geometry::build(Arc::new(alg))?))
}

fn parse_set(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Usage(format!("`{t}` is not a point id")).into())
        })
        .collect()
}

fn digit(c: u32, q: u32) -> String {
    if q <= 36 {
        char::from_digit(c, 36).expect("digit below 36").to_string()
    } else {
        format!("{c}.")
    }
}

/// Coordinates of an algebra element, lowest basis index first.
fn elem_digits(alg: &Algebra, x: Elem) -> String {
    let s: String = alg.coords(x).iter().map(|c| digit(c.index(), alg.q())).collect();
    s.trim_end_matches('.').to_string()
}

fn cmd_info(spec: &str) -> anyhow::Result<Report> {
    let (canonical, geom) = geometry(spec)?;
    let mut r = Report::new();
    RunReport::new(canonical, &geom)?.fill(&mut r);
    let alg = geom.algebra();
    r.push("commutative", alg.is_commutative())
        .push("chains", geom.chains().len())
        .push("block_size", geom.q() + 1);
    if alg.is_local() {
        let design = geom.verify_divisible_design()?;
        r.push("parallel_classes", design.classes)
            .push("class_size", design.class_size)
            .push("divisible_design", "ok");
    }
    Ok(r)
}

fn cmd_points(spec: &str) -> anyhow::Result<Report> {
    let (canonical, alg) = parse_spec(spec)?;
    let line = ProjectiveLine::new(Arc::new(alg))?;
    let alg = line.algebra();
    let mut r = Report::new();
    r.push("ring", canonical).push("v", line.len());
    let pts: Vec<Vec<String>> = line
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), elem_digits(alg, p.a), elem_digits(alg, p.b)])
        .collect();
    r.push("point", pts);
    Ok(r)
}

fn cmd_chains(spec: &str, out: Option<&Path>) -> anyhow::Result<Report> {
    let (canonical, geom) = geometry(spec)?;
    let mut r = Report::new();
    r.push("ring", canonical)
        .push("v", geom.v())
        .push("chains", geom.chains().len())
        .push("block_size", geom.q() + 1);
    match out {
        Some(path) => {
            std::fs::write(path, geom.incidence().to_text())
                .with_context(|| format!("writing {}", path.display()))?;
            r.push("written", path.display().to_string());
        }
        None => {
            let list: Vec<&[usize]> = geom.chains().iter().map(|c| c.points()).collect();
            r.push("chain", list);
        }
    }
    Ok(r)
}

fn cmd_bounds(spec: &str) -> anyhow::Result<Report> {
    let (canonical, geom) = geometry(spec)?;
    let mut r = Report::new();
    RunReport::new(canonical, &geom)?.fill(&mut r);
    r.push("bound_best", blocking::bounds(&geom)?.best());
    Ok(r)
}

fn cmd_glynn(q: u64, d: u32, delta: u32) -> anyhow::Result<Report> {
    let poly = blocking::GlynnPolynomial::new(q, d, delta)?;
    let bound = blocking::glynn_bound(q, d, delta)?;
    let mut r = Report::new();
    r.push("q", q)
        .push("d", d)
        .push("delta", delta)
        .push("scan_start", poly.scan_start().to_string())
        .push("bound", bound.to_string());
    if delta == 0 && (d == 2 || d == 3) {
        let table = blocking::moebius_bound_table(q);
        let published = if d == 2 { table.planar } else { table.three_dim };
        r.push("published", published);
        if d == 3 {
            let hi = q.max(25);
            r.push("crossover_range", [2, hi]);
            r.push("crossovers", blocking::three_dim_crossovers(2..=hi)?);
        }
    }
    Ok(r)
}

fn cmd_search(source: &Source, max_size: Option<usize>, all_minima: bool) -> anyhow::Result<Report> {
    let mut r = Report::new();
    let (inc, lower_bound) = match (&source.ring, &source.incidence) {
        (Some(spec), _) => {
            let (canonical, geom) = geometry(spec)?;
            r.push("ring", canonical);
            let lb = blocking::static_lower_bound(&geom)?;
            (geom.incidence(), lb as usize)
        }
        (None, Some(path)) => {
            r.push("incidence", path.display().to_string());
            (Incidence::read(path)?, 0)
        }
        (None, None) => bail!(Usage("one of --ring or --incidence is required".into())),
    };
    let res = blocking::min_hitting_set(&inc, SearchOptions { max_size, lower_bound });
    r.push("v", inc.v())
        .push("blocks", inc.blocks().len())
        .push("lower_bound", lower_bound)
        .push("min", res.min)
        .push("witness", &res.witness);
    if let Some(w) = &res.witness {
        let rep = blocking::analyze_incidence(&inc, w)?;
        if !rep.is_blocking {
            bail!(Violation("search witness does not block".into()));
        }
    }
    if all_minima {
        if let Some(min) = res.min {
            let all = blocking::all_minimum_hitting_sets(&inc, min);
            r.push("minima", all.len()).push("minimum", all);
        }
    }
    Ok(r)
}

fn cmd_verify(source: &Source, set: &str) -> anyhow::Result<Report> {
    let set = parse_set(set)?;
    let mut r = Report::new();
    let report = match (&source.ring, &source.incidence) {
        (Some(spec), _) => {
            let (canonical, geom) = geometry(spec)?;
            r.push("ring", canonical);
            blocking::is_blocking(&geom, &set)?
        }
        (None, Some(path)) => {
            r.push("incidence", path.display().to_string());
            blocking::analyze_incidence(&Incidence::read(path)?, &set)?
        }
        (None, None) => bail!(Usage("one of --ring or --incidence is required".into())),
    };
    push_blocking(&mut r, &report);
    if let Some(c) = &report.checks {
        if !c.all_hold() {
            bail!(Violation(format!("counting relations fail for this set: {c:?}")));
        }
    }
    Ok(r)
}

fn push_blocking(r: &mut Report, rep: &blocking::BlockingReport) {
    r.push("set", &rep.set)
        .push("size", rep.set.len())
        .push("blocking", rep.is_blocking)
        .push("first_missed_chain", rep.first_missed_chain)
        .push("distribution", &rep.distribution.n);
    if let Some(c) = &rep.checks {
        r.push("check_blocks", c.blocks)
            .push("check_incidences", c.incidences)
            .push("check_pairs", c.pairs)
            .push("check_triples", c.triples);
    }
    if let Some(b) = &rep.bounds {
        r.push("bound_trivial", b.trivial)
            .push("bound_elf", b.elf)
            .push("bound_glynn", b.glynn);
    }
}

fn cmd_lift(spec: &str, set: Option<&str>) -> anyhow::Result<Report> {
    let (canonical, geom) = geometry(spec)?;
    if !geom.algebra().is_local() {
        return Err(Error::NotLocal.into());
    }
    let map = ResidueMap::new(&geom)?;
    let down = map.residue_geometry();
    let set = match set {
        Some(s) => parse_set(s)?,
        None => blocking::min_blocking(down, None)?
            .witness
            .expect("the residue geometry has a blocking set"),
    };
    let lifted = map.lift(&geom, &set)?;
    let mut r = Report::new();
    r.push("ring", canonical)
        .push("residue_v", down.v())
        .push("residue_set", &set)
        .push("delta", geom.algebra().delta())
        .push("v", geom.v())
        .push("chain_images", "ok")
        .push("fibers_are_parallel_classes", "ok");
    push_blocking(&mut r, &lifted);
    Ok(r)
}

fn point3_digits(x: &ProjPoint3, q: u32) -> String {
    x.0.iter()
        .map(|c| digit(c.index(), q).trim_end_matches('.').to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_quadric(q: u32, check: bool, emit: Option<Emit>) -> anyhow::Result<Report> {
    let model = QuadricModel::new(q)?;
    let mut r = Report::new();
    r.push("q", q).push("points", model.geometry().v());
    let mut failures = Vec::new();
    if check {
        let mut record = |name: &str, res: chaingeo_core::Result<String>| match res {
            Ok(detail) => {
                r.push(&format!("check.{name}"), format!("pass {detail}"));
            }
            Err(e) => {
                r.push(&format!("check.{name}"), format!("FAIL {e}"));
                failures.push(name.to_string());
            }
        };
        record("bijection", Ok(format!("{} points", model.quadric_points().len())));
        record(
            "plane_sections",
            model
                .check_planes()
                .map(|(s, t)| format!("{s} non-tangent, {t} tangent")),
        );
        record(
            "distant_iff_secant",
            model.check_distant_iff_secant().map(|n| format!("{n} pairs")),
        );
        record("rulings", check_rulings(&model).map(|n| format!("{n} lines")));
        record(
            "action",
            model.check_action_all().map(|n| format!("{n} matrices")),
        );
    }
    match emit {
        Some(Emit::Points) => {
            let pts: Vec<Vec<String>> = (0..model.geometry().v())
                .map(|p| vec![p.to_string(), point3_digits(&model.image(p), q)])
                .collect();
            r.push("point", pts);
        }
        Some(Emit::Rulings) => {
            let [a, b] = model.ruling_lines()?;
            r.push("regulus_a", a).push("regulus_b", b);
        }
        None => {}
    }
    if !failures.is_empty() {
        eprint!("{}", r.render(Format::Text));
        bail!(Violation(format!("quadric checks failed: {}", failures.join(", "))));
    }
    Ok(r)
}

/// Every ruling line is a blocking set of size `q+1`.
fn check_rulings(model: &QuadricModel) -> chaingeo_core::Result<usize> {
    let geom = model.geometry();
    let lines = model.ruling_lines()?;
    let elf = blocking::bounds(geom)?.elf as usize;
    let mut n = 0;
    for line in lines.iter().flatten() {
        let rep = blocking::is_blocking(geom, line)?;
        if !rep.is_blocking || line.len() != elf {
            return Err(Error::ModelViolation(format!("ruling line {line:?} is not a minimum blocking set")));
        }
        n += 1;
    }
    Ok(n)
}

fn cmd_export(spec: &str, kind: ExportKind, out: Option<&Path>) -> anyhow::Result<Report> {
    let (canonical, alg) = parse_spec(spec)?;
    let text = match kind {
        ExportKind::Structure => ringspec::write_structure(&alg),
        ExportKind::Incidence => Geometry::build(Arc::new(alg))?.incidence().to_text(),
    };
    let mut r = Report::new();
    r.push("ring", canonical);
    match out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            r.push("written", path.display().to_string());
        }
        None => r.set_raw(text),
    }
    Ok(r)
}
