//! Textual ring specifications and the structure-constant file format.
//!
//! Grammar (whitespace is ignored except inside `file:` paths):
//!
//! ```text
//! spec   := "file:" path
//!         | shape [ ("over" | "/") field ]
//! shape  := field
//!         | field ("x" | "*" | "×") field          product K x K
//!         | field "[t]/(t^" n ")"                  truncated polynomials
//! field  := "gf(" order [ ";" c0 "," c1 "," ... "," 1 ] ")"
//! order  := q | p "^" e
//! ```
//!
//! The optional `over` clause restricts scalars to a subfield, so
//! `gf(4)/gf(2)` is `F_4` as a 2-dimensional `F_2`-algebra and
//! `gf(4)[t]/(t^2) over gf(2)` has dimension 4. Modulus coefficients are
//! listed low-to-high and must describe a monic irreducible polynomial.
//!
//! # Structure-constant files
//!
//! ```text
//! # comment lines and blank lines are skipped
//! p e d
//! <modulus>        only when e > 1: "-" for the default, or e+1 digits
//! <one>            d field-element indices
//! <e_i * e_j>      d*d lines of d field-element indices, (i, j) row-major
//! ```
//!
//! Field elements are written as their polynomial-basis index in `0..q`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::{default_modulus, prime_power, Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// `None` means the default modulus.
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn q(&self) -> u32 {
        self.p.pow(self.e)
    }

    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.e, self.modulus.as_deref())
    }

    fn normalized(mut self) -> FieldSpec {
        if let Some(m) = &self.modulus {
            if self.e > 1 && *m == default_modulus(self.p, self.e) {
                self.modulus = None;
            }
        }
        self
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            Some(m) => {
                let cs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                write!(f, "gf({};{})", self.q(), cs.join(","))
            }
            None => write!(f, "gf({})", self.q()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Field(FieldSpec),
    Product(FieldSpec),
    Truncated { field: FieldSpec, n: u32 },
}

impl Shape {
    fn field(&self) -> &FieldSpec {
        match self {
            Shape::Field(f) | Shape::Product(f) | Shape::Truncated { field: f, .. } => f,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingSpec {
    Built { shape: Shape, ground: Option<FieldSpec> },
    File(PathBuf),
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::File(p) => write!(f, "file:{}", p.display()),
            RingSpec::Built { shape, ground } => {
                match (shape, ground) {
                    (Shape::Field(k), Some(g)) => return write!(f, "{k}/{g}"),
                    (Shape::Field(k), None) => write!(f, "{k}")?,
                    (Shape::Product(k), _) => write!(f, "{k} x {k}")?,
                    (Shape::Truncated { field, n }, _) => write!(f, "{field}[t]/(t^{n})")?,
                }
                if let Some(g) = ground {
                    write!(f, " over {g}")?;
                }
                Ok(())
            }
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        self.pos += len;
        rest[..len]
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.s.len()
    }

    fn error(&self, msg: &str) -> Error {
        Error::BadSpec(format!("{msg} at offset {} in `{}`", self.pos, self.s))
    }

    fn field(&mut self) -> Result<FieldSpec> {
        self.expect("gf(")?;
        let base = self.number()?;
        let (p, e) = if self.eat("^") {
            let e = self.number()?;
            (base, e)
        } else {
            prime_power(base)
                .ok_or_else(|| Error::BadSpec(format!("{base} is not a prime power")))?
        };
        if !crate::field::is_prime(p) || e == 0 {
            return Err(Error::BadSpec(format!("gf({base}^{e}) is not a prime power order")));
        }
        let modulus = if self.eat(";") {
            let mut cs = vec![self.number()?];
            while self.eat(",") {
                cs.push(self.number()?);
            }
            Some(cs)
        } else {
            None
        };
        self.expect(")")?;
        Ok(FieldSpec { p, e, modulus }.normalized())
    }
}

impl RingSpec {
    pub fn parse(s: &str) -> Result<RingSpec> {
        let trimmed = s.trim();
        if let Some(path) = trimmed.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::BadSpec("empty file path".into()));
            }
            return Ok(RingSpec::File(PathBuf::from(path)));
        }
        let mut c = Cursor { s: trimmed, pos: 0 };
        let first = c.field()?;
        let shape = if c.eat("x") || c.eat("*") || c.eat("×") {
            let second = c.field()?;
            if second != first {
                return Err(Error::BadSpec(
                    "product rings must use the same field twice".into(),
                ));
            }
            Shape::Product(first)
        } else if c.eat("[t]/(t") {
            let n = if c.eat("^") {
                c.number()?
            } else if c.eat("²") {
                2
            } else if c.eat("³") {
                3
            } else {
                return Err(c.error("expected `^n`"));
            };
            c.expect(")")?;
            if n == 0 {
                return Err(Error::BadSpec("t^0 gives the zero ring".into()));
            }
            Shape::Truncated { field: first, n }
        } else {
            Shape::Field(first)
        };
        let ground = if c.eat("over") || c.eat("/") {
            Some(c.field()?)
        } else {
            None
        };
        if !c.at_end() {
            return Err(c.error("unexpected trailing input"));
        }
        let top = shape.field();
        let ground = match ground {
            Some(g) if g == *top => None,
            Some(g) => {
                if g.p != top.p || top.e % g.e != 0 {
                    return Err(Error::BadSpec(format!("{g} is not a subfield of {top}")));
                }
                if g.e == top.e {
                    return Err(Error::BadSpec(format!(
                        "{g} and {top} differ only in modulus"
                    )));
                }
                Some(g)
            }
            None => None,
        };
        Ok(RingSpec::Built { shape, ground })
    }

    pub fn build(&self) -> Result<Algebra> {
        match self {
            RingSpec::File(path) => read_structure_file(path),
            RingSpec::Built { shape, ground } => {
                let big = shape.field().build()?;
                let (d, tensor, one) = shape_constants(shape);
                let label = self.to_string();
                match ground {
                    None => Algebra::from_structure_constants(Arc::new(big), d, tensor, one, label),
                    Some(g) => {
                        let ground = g.build()?;
                        let (d, tensor, one) = restrict_scalars(&big, &ground, d, &tensor, &one)?;
                        Algebra::from_structure_constants(Arc::new(ground), d, tensor, one, label)
                    }
                }
            }
        }
    }
}

/// Parses and builds an algebra in one step.
pub fn build_algebra(spec: &str) -> Result<Algebra> {
    RingSpec::parse(spec)?.build()
}

fn shape_constants(shape: &Shape) -> (usize, Vec<Fe>, Vec<Fe>) {
    let (o, z) = (Fe::ONE, Fe::ZERO);
    match shape {
        Shape::Field(_) => (1, vec![o], vec![o]),
        Shape::Product(_) => (2, vec![o, z, z, z, z, z, z, o], vec![o, o]),
        Shape::Truncated { n, .. } => {
            let d = *n as usize;
            let mut tensor = vec![z; d * d * d];
            for i in 0..d {
                for j in 0..d {
                    if i + j < d {
                        tensor[(i * d + j) * d + i + j] = o;
                    }
                }
            }
            let mut one = vec![z; d];
            one[0] = o;
            (d, tensor, one)
        }
    }
}

/// Rewrites an algebra over `big` as an algebra over the subfield `ground`,
/// using the basis `alpha^i e_j` with `alpha` the polynomial generator of `big`.
fn restrict_scalars(
    big: &Field,
    ground: &Field,
    d: usize,
    tensor: &[Fe],
    one: &[Fe],
) -> Result<(usize, Vec<Fe>, Vec<Fe>)> {
    let m = (big.e() / ground.e()) as usize;
    let embed: Vec<Fe> = match ground.modulus() {
        None => ground
            .elements()
            .map(|g| big.element(g.index()).expect("prime subfield"))
            .collect(),
        Some(gm) => {
            let coeffs: Vec<Fe> = gm.iter().map(|&c| big.element(c).expect("digit")).collect();
            let root = big
                .elements()
                .find(|&x| big.eval_poly(&coeffs, x).is_zero())
                .ok_or_else(|| Error::BadSpec("ground modulus has no root".into()))?;
            ground
                .elements()
                .map(|g| {
                    let cs: Vec<Fe> = ground
                        .coefficients(g)
                        .iter()
                        .map(|&c| big.element(c).expect("digit"))
                        .collect();
                    big.eval_poly(&cs, root)
                })
                .collect()
        }
    };
    let alpha = big.element(big.p()).expect("t exists when e > 1");
    let alpha_pows: Vec<Fe> = (0..2 * m).map(|i| big.pow(alpha, i as u64)).collect();

    // coordinates of every big-field element in the basis alpha^0..alpha^{m-1}
    let mut table: Vec<Option<Vec<Fe>>> = vec![None; big.q() as usize];
    let gq = ground.q() as usize;
    for idx in 0..gq.pow(m as u32) {
        let mut rest = idx;
        let cs: Vec<Fe> = (0..m)
            .map(|_| {
                let c = rest % gq;
                rest /= gq;
                ground.element(c as u32).expect("digit")
            })
            .collect();
        let val = cs
            .iter()
            .enumerate()
            .fold(Fe::ZERO, |acc, (i, &c)| big.add(acc, big.mul(embed[c.index() as usize], alpha_pows[i])));
        table[val.index() as usize] = Some(cs);
    }
    let table: Vec<Vec<Fe>> = table
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::BadSpec("powers of t do not span the extension".into())))
        .collect::<Result<_>>()?;

    let nd = d * m;
    let mut out = vec![Fe::ZERO; nd * nd * nd];
    for j in 0..d {
        for i in 0..m {
            for l in 0..d {
                for k in 0..m {
                    let r1 = j * m + i;
                    let r2 = l * m + k;
                    for r in 0..d {
                        let c = tensor[(j * d + l) * d + r];
                        let val = big.mul(alpha_pows[i + k], c);
                        for (s, &g) in table[val.index() as usize].iter().enumerate() {
                            out[(r1 * nd + r2) * nd + r * m + s] = g;
                        }
                    }
                }
            }
        }
    }
    let mut new_one = vec![Fe::ZERO; nd];
    for r in 0..d {
        for (s, &g) in table[one[r].index() as usize].iter().enumerate() {
            new_one[r * m + s] = g;
        }
    }
    Ok((nd, out, new_one))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn ints(line: &str, lineno: usize) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::BadSpec(format!("line {lineno}: `{t}` is not a number")))
        })
        .collect()
}

/// Parses the structure-constant text format.
pub fn parse_structure(text: &str, label: &str) -> Result<Algebra> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::BadSpec(format!("missing {what}")))
    };
    let (ln, header) = next("header line `p e d`")?;
    let h = ints(header, ln)?;
    let [p, e, d] = h[..] else {
        return Err(Error::BadSpec(format!("line {ln}: header needs `p e d`")));
    };
    let modulus = if e > 1 {
        let (ln, line) = next("modulus line")?;
        if line == "-" {
            None
        } else {
            Some(ints(line, ln)?)
        }
    } else {
        None
    };
    let field = Field::new(p, e, modulus.as_deref())?;
    let d = d as usize;
    if d == 0 {
        return Err(Error::BadSpec("dimension must be positive".into()));
    }
    let q = field.q();
    let mut read_vec = |what: &str| -> Result<Vec<Fe>> {
        let (ln, line) = next(what)?;
        let v = ints(line, ln)?;
        if v.len() != d {
            return Err(Error::BadSpec(format!(
                "line {ln}: expected {d} entries, found {}",
                v.len()
            )));
        }
        v.into_iter()
            .map(|x| {
                if x < q {
                    field.element(x)
                } else {
                    Err(Error::BadSpec(format!("line {ln}: entry {x} not below q={q}")))
                }
            })
            .collect()
    };
    let one = read_vec("unit vector")?;
    let mut tensor = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            tensor.extend(read_vec(&format!("product e_{i}*e_{j}"))?);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::BadSpec(format!("line {ln}: unexpected extra line")));
    }
    Algebra::from_structure_constants(Arc::new(field), d, tensor, one, label)
}

pub fn read_structure_file(path: &Path) -> Result<Algebra> {
    let text = std::fs::read_to_string(path)?;
    parse_structure(&text, &format!("file:{}", path.display()))
}

/// Renders an algebra in the structure-constant text format.
pub fn write_structure(alg: &Algebra) -> String {
    let f = alg.base();
    let d = alg.dim();
    let join = |v: &[Fe]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("# {}\n{} {} {}\n", alg.label(), f.p(), f.e(), d);
    if f.e() > 1 {
        match f.modulus() {
            Some(m) if !f.has_default_modulus() => {
                let cs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                out.push_str(&cs.join(" "));
                out.push('\n');
            }
            _ => out.push_str("-\n"),
        }
    }
    out.push_str(&join(alg.one_coords()));
    out.push('\n');
    for row in alg.structure_constants().chunks(d) {
        out.push_str(&join(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let cases = [
            ("gf(2)", "gf(2)"),
            ("gf(4)/gf(2)", "gf(4)/gf(2)"),
            ("gf(2^2) / gf(2)", "gf(4)/gf(2)"),
            ("gf(4) over gf(2)", "gf(4)/gf(2)"),
            ("gf(2)x gf(2)", "gf(2) x gf(2)"),
            ("gf(3) × gf(3)", "gf(3) x gf(3)"),
            ("gf(2)[t]/(t^2)", "gf(2)[t]/(t^2)"),
            ("gf(2)[t]/(t²)", "gf(2)[t]/(t^2)"),
            ("gf(4)[t]/(t^2) over gf(2)", "gf(4)[t]/(t^2) over gf(2)"),
            ("gf(4)[t]/(t^2)/gf(2)", "gf(4)[t]/(t^2) over gf(2)"),
            ("gf(4;1,1,1)", "gf(4)"),
            ("gf(9;2,2,1)", "gf(9;2,2,1)"),
            ("gf(9)/gf(9)", "gf(9)"),
        ];
        for (input, canon) in cases {
            let spec = RingSpec::parse(input).unwrap();
            assert_eq!(spec.to_string(), canon, "{input}");
            assert_eq!(RingSpec::parse(canon).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "gf(6)",
            "gf(2) x gf(3)",
            "gf(4)/gf(3)",
            "gf(8)/gf(4)",
            "gf(2)[t]/(t^0)",
            "gf(2) extra",
            "gf(4;1,0,1)",
            "file:",
            "",
        ] {
            assert!(build_algebra(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn restriction_over_nonprime_ground() {
        let r = build_algebra("gf(16)/gf(4)").unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.unit_count(), 15);
        assert_eq!(r.delta(), Some(0));
        let r = build_algebra("gf(4) x gf(4) over gf(2)").unwrap();
        assert_eq!(r.dim(), 4);
        assert_eq!(r.unit_count(), 9);
        assert!(!r.is_local());
    }

    #[test]
    fn structure_file_round_trip() {
        for spec in ["gf(2)[t]/(t^3)", "gf(9)/gf(3)", "gf(3) x gf(3)", "gf(9;2,2,1)[t]/(t^2)"] {
            let a = build_algebra(spec).unwrap();
            let text = write_structure(&a);
            let b = parse_structure(&text, "round trip").unwrap();
            assert_eq!(a.structure_constants(), b.structure_constants());
            assert_eq!(a.one_coords(), b.one_coords());
            assert_eq!(a.base(), b.base());
        }
    }

    #[test]
    fn structure_file_errors() {
        let bad_counts = "2 1 2\n1 0\n1 0\n0 1\n0 1\n";
        assert!(matches!(parse_structure(bad_counts, "x"), Err(Error::BadSpec(_))));
        let short_row = "2 1 2\n1 0\n1 0\n0 1\n0 1\n0\n";
        assert!(matches!(parse_structure(short_row, "x"), Err(Error::BadSpec(_))));
        let extra = "2 1 1\n1\n1\n1\n";
        assert!(matches!(parse_structure(extra, "x"), Err(Error::BadSpec(_))));
        let big_entry = "3 1 1\n1\n5\n";
        assert!(matches!(parse_structure(big_entry, "x"), Err(Error::BadSpec(_))));
    }

    #[test]
    fn noncommutative_upper_triangular_matrices() {
        // 2x2 upper triangular matrices over GF(2): basis E11, E12, E22.
        let text = "\
# upper triangular 2x2 over GF(2)
2 1 3
1 0 1
1 0 0
0 1 0
0 0 0
0 0 0
0 0 0
0 1 0
0 0 0
0 0 0
0 0 1
";
        let r = parse_structure(text, "ut2").unwrap();
        assert!(!r.is_commutative());
        assert_eq!(r.unit_count(), 2);
        assert!(!r.is_local());
        assert_eq!(r.normalizer_order(), r.unit_count());
    }
}
