//! Tabular output with a fixed column order, as CSV or a JSON array.

use std::io::Write;

use anyhow::Context;

/// Floats are written with 15 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Json => {
                let rows: Vec<serde_json::Map<String, serde_json::Value>> =
                    self.rows.iter().map(|row| self.header.iter().zip(row).map(|(h, v)| (h.to_string(), json_value(v))).collect()).collect();
                Ok(serde_json::to_string_pretty(&rows)? + "\n")
            }
        }
    }
}

/// Numeric cells become JSON numbers; the rest stay strings.
fn json_value(cell: &str) -> serde_json::Value {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() && !cell.is_empty() => serde_json::Number::from_f64(v).map_or_else(|| cell.into(), Into::into),
        _ => match cell {
            "true" => true.into(),
            "false" => false.into(),
            _ => cell.into(),
        },
    }
}

/// Write to `path`, or to standard output when absent.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write `{}`", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(0.5), "5.00000000000000e-1");
        assert_eq!(num(-1234.5), "-1.23450000000000e3");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["x".into(), num(2.0)]);
        assert_eq!(t.render(Format::Csv).unwrap(), "a,b\nx,2.00000000000000e0\n");
        let json: serde_json::Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json[0]["a"], "x");
        assert_eq!(json[0]["b"], 2.0);
    }
}
