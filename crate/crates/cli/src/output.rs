//! CSV emission: UTF-8, one `# seed = …` comment line, a header row, and
//! floats with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// A float with 17 significant digits, which round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// An optional float; empty when absent.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// An in-memory CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The document: seed comment, header, rows.
    pub fn render(&self, seed: u64) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
        Ok(format!("# seed = {seed}\n{body}"))
    }

    pub fn write(&self, dir: &Path, name: &str, seed: u64) -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, self.render(seed)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(opt(None), "");
    }

    #[test]
    fn render_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["x;y".into(), num(2.0)]);
        assert_eq!(t.render(9).unwrap(), "# seed = 9\na,b\nx;y,2.0000000000000000e0\n");
    }
}
