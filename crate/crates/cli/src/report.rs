//! Command output: an ordered list of fields rendered either as
//! `key=value` lines or as one JSON object.

use chaingeo_core::{blocking, Geometry, LambdaTable};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Default, Debug)]
pub struct Report {
    fields: Vec<(String, Value)>,
    raw: Option<String>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, key: &str, value: impl Serialize) -> &mut Report {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.fields.push((key.to_string(), value));
        self
    }

    /// Text to print verbatim in text mode instead of the fields; JSON mode
    /// carries it as `content`.
    pub fn set_raw(&mut self, text: String) {
        self.raw = Some(text);
    }

    pub fn render(&self, format: Format) -> String {
        if let (Format::Text, Some(raw)) = (format, &self.raw) {
            return raw.clone();
        }
        match format {
            Format::Json => {
                let mut map: Map<String, Value> = self.fields.iter().cloned().collect();
                if let Some(raw) = &self.raw {
                    map.insert("content".into(), Value::String(raw.clone()));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                for (k, v) in &self.fields {
                    render_text(&mut out, k, v);
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Scalars print as `key=v`, arrays of scalars as `key=a,b,c`, arrays of
/// arrays as one line per element, objects as `key.field=...`.
fn render_text(out: &mut String, key: &str, v: &Value) {
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{key}={s}\n"));
        return;
    }
    match v {
        Value::Array(items) => {
            if let Some(parts) = items.iter().map(scalar).collect::<Option<Vec<_>>>() {
                out.push_str(&format!("{key}={}\n", parts.join(",")));
            } else if items.iter().all(|i| i.is_array()) {
                for item in items {
                    render_text(out, key, item);
                }
            } else {
                for (i, item) in items.iter().enumerate() {
                    render_text(out, &format!("{key}.{i}"), item);
                }
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                render_text(out, &format!("{key}.{k}"), item);
            }
        }
        _ => unreachable!(),
    }
}

/// Summary of a geometry: ring, sizes, λ table and bounds.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub ring: String,
    pub q: u32,
    pub d: usize,
    pub v: usize,
    pub units: u64,
    pub local: bool,
    pub delta: Option<u32>,
    pub lambda: LambdaTable,
    pub bounds: blocking::Bounds,
}

impl RunReport {
    pub fn new(ring: String, geom: &Geometry) -> chaingeo_core::Result<RunReport> {
        let alg = geom.algebra();
        Ok(RunReport {
            ring,
            q: alg.q(),
            d: alg.dim(),
            v: geom.v(),
            units: alg.unit_count(),
            local: alg.is_local(),
            delta: alg.delta(),
            lambda: geom.lambda_table(),
            bounds: blocking::bounds(geom)?,
        })
    }

    pub fn fill(&self, r: &mut Report) {
        r.push("ring", &self.ring)
            .push("q", self.q)
            .push("d", self.d)
            .push("v", self.v)
            .push("units", self.units)
            .push("local", self.local)
            .push("delta", self.delta)
            .push("lambda", self.lambda.formula.as_array())
            .push("lambda_empirical", self.lambda.empirical.as_array())
            .push("normalizer", self.lambda.normalizer_order)
            .push("bound_trivial", self.bounds.trivial)
            .push("bound_elf", self.bounds.elf)
            .push("bound_glynn", self.bounds.glynn);
    }
}
