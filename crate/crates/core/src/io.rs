//! Tabular output shared by every result type.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` and keeps output byte-identical across runs.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Normalise −0.0 so identical states print identically.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub trait CsvTable {
    fn header(&self) -> Vec<String>;
    fn records(&self) -> Vec<Vec<String>>;

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in self.records() {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Concatenates the rows of several tables that share a header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

impl CsvTable for Table {
    fn header(&self) -> Vec<String> {
        self.header.clone()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows.clone()
    }
}
