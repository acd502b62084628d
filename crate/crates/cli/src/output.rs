//! File emission. Every data file gets a `<stem>.config.json` sidecar with
//! the resolved configuration.

use std::path::Path;

use qbat_core::io::CsvTable;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliResult;

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    version: &'static str,
    /// Swept parameter and value this file belongs to, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Value>,
    config: &'a RunConfig,
}

pub struct Output<'a> {
    cfg: &'a RunConfig,
}

/// Stem fragment for a swept value, e.g. `n_s_0.3`.
pub fn point_label(name: &str, v: f64) -> String {
    format!("{name}_{v}")
}

fn cell(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return Value::from(i);
    }
    match s.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s.to_string()),
    }
}

/// Table rows as an array of header-keyed objects.
pub fn table_json(t: &impl CsvTable) -> Value {
    let header = t.header();
    Value::Array(
        t.records()
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = header
                    .iter()
                    .zip(r)
                    .map(|(h, v)| (h.clone(), cell(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

impl<'a> Output<'a> {
    pub fn new(cfg: &'a RunConfig) -> CliResult<Self> {
        std::fs::create_dir_all(&cfg.out)?;
        Ok(Self { cfg })
    }

    pub fn dir(&self) -> &Path {
        &self.cfg.out
    }

    fn sidecar(&mut self, stem: &str, file: &str, point: Option<(&str, f64)>) -> CliResult<()> {
        let point = point.map(|(k, v)| {
            let mut m = Map::new();
            m.insert(k.to_string(), cell(&v.to_string()));
            Value::Object(m)
        });
        let s = Sidecar {
            file,
            version: env!("CARGO_PKG_VERSION"),
            point,
            config: self.cfg,
        };
        let path = self.cfg.out.join(format!("{stem}.config.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&s)? + "\n")?;
        Ok(())
    }

    fn finish(&mut self, stem: &str, name: String, point: Option<(&str, f64)>) -> CliResult<()> {
        self.sidecar(stem, &name, point)
    }

    /// Writes a table as CSV or JSON according to the configured format.
    pub fn table(
        &mut self,
        stem: &str,
        t: &impl CsvTable,
        point: Option<(&str, f64)>,
    ) -> CliResult<()> {
        let name = format!("{stem}.{}", self.cfg.format.ext());
        let path = self.cfg.out.join(&name);
        match self.cfg.format {
            Format::Csv => t.save_csv(&path)?,
            Format::Json => std::fs::write(&path, serde_json::to_string(&table_json(t))? + "\n")?,
        }
        self.finish(stem, name, point)
    }

    /// Writes pre-rendered JSON regardless of the configured format.
    pub fn json(&mut self, stem: &str, body: &str, point: Option<(&str, f64)>) -> CliResult<()> {
        let name = format!("{stem}.json");
        std::fs::write(self.cfg.out.join(&name), format!("{body}\n"))?;
        self.finish(stem, name, point)
    }

    /// CSV in csv mode, otherwise the given JSON rendering.
    pub fn either(
        &mut self,
        stem: &str,
        t: &impl CsvTable,
        json: impl FnOnce() -> CliResult<String>,
        point: Option<(&str, f64)>,
    ) -> CliResult<()> {
        match self.cfg.format {
            Format::Csv => self.table(stem, t, point),
            Format::Json => {
                let body = json()?;
                self.json(stem, &body, point)
            }
        }
    }
}

/// Failure record for one sweep point.
#[derive(Debug, Serialize)]
pub struct PointError {
    pub point: String,
    pub error: String,
}

/// Writes `<command>_errors.json` when any point failed.
pub fn write_errors(out: &mut Output, command: &str, errors: &[&PointError]) -> CliResult<()> {
    if errors.is_empty() {
        return Ok(());
    }
    for e in errors {
        eprintln!("{command}: {} failed: {}", e.point, e.error);
    }
    let body = serde_json::to_string_pretty(errors)?;
    out.json(&format!("{command}_errors"), &body, None)
}
