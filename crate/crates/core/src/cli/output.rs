//! Rendering of command results as aligned tables, CSV, or JSON.
//!
//! All numeric formatting routes through this module so that identical
//! invocations produce byte-identical output.

use std::f64::consts::LN_10;

/// A single result field.
#[derive(Clone, Debug)]
pub enum Cell {
    UInt(u64),
    /// Fixed-point real, rendered with `digits` decimals.
    Real(f64),
    /// Scientific-notation real with `digits` significant digits.
    Sci(f64),
    /// Probability carried by its natural log; `None` is exact zero. Renders
    /// correctly even when the magnitude underflows a plain f64.
    LogProb(Option<f64>),
    Text(String),
}

/// One command's worth of output: echoed inputs, a column header, data rows,
/// and the seed for randomized commands.
#[derive(Debug, Default)]
pub struct Report {
    pub inputs: Vec<(String, serde_json::Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

/// Scientific notation with `digits` significant digits from a natural-log
/// magnitude; exact zero renders as `0`.
fn sci_from_ln(ln: Option<f64>, digits: usize) -> String {
    let Some(l) = ln else {
        return "0".into();
    };
    let value = l.exp();
    if value.is_normal() {
        return format!("{:.*e}", digits - 1, value);
    }
    // Out of f64 range: split mantissa and exponent in log10 space.
    let log10 = l / LN_10;
    let mut exp = log10.floor() as i64;
    let mut mantissa = 10f64.powf(log10 - exp as f64);
    let scale = 10f64.powi(digits as i32 - 1);
    mantissa = (mantissa * scale).round() / scale;
    if mantissa >= 10.0 {
        mantissa /= 10.0;
        exp += 1;
    }
    format!("{:.*}e{}", digits - 1, mantissa, exp)
}

fn sci_from_value(value: f64, digits: usize) -> String {
    if value == 0.0 {
        "0".into()
    } else {
        format!("{:.*e}", digits - 1, value)
    }
}

impl Cell {
    fn render(&self, digits: usize) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Real(v) => format!("{:.*}", digits, v),
            Cell::Sci(v) => sci_from_value(*v, digits),
            Cell::LogProb(ln) => sci_from_ln(*ln, digits),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::UInt(v) => serde_json::json!(v),
            Cell::Real(v) | Cell::Sci(v) => serde_json::json!(v),
            Cell::LogProb(ln) => serde_json::json!(ln.map_or(0.0, f64::exp)),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

impl Report {
    pub fn render(&self, format: OutputFormat, digits: usize) -> String {
        match format {
            OutputFormat::Table => self.render_table(digits),
            OutputFormat::Csv => self.render_csv(digits),
            OutputFormat::Json => self.render_json(digits),
        }
    }

    fn render_table(&self, digits: usize) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.render(digits)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(&header.join("  "));
        out.push('\n');
        for row in &rendered {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        out
    }

    fn render_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.render(digits)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self, digits: usize) -> String {
        let inputs: serde_json::Map<String, serde_json::Value> =
            self.inputs.iter().cloned().collect();
        let results: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| {
                        let mut v = cell.to_json();
                        // Preserve out-of-range probabilities as rendered strings.
                        if let Cell::LogProb(Some(l)) = cell {
                            if !l.exp().is_normal() {
                                v = serde_json::json!(sci_from_ln(Some(*l), digits));
                            }
                        }
                        (c.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "inputs": inputs,
            "results": results,
            "seed": self.seed,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_rendering() {
        assert_eq!(sci_from_ln(Some(0.0231f64.ln()), 3), "2.31e-2");
        assert_eq!(sci_from_ln(Some(0.0f64.exp().ln()), 3), "1.00e0");
        assert_eq!(sci_from_ln(None, 3), "0");
        // Far below f64 underflow.
        let tiny = sci_from_ln(Some(-2000.0), 3);
        assert!(tiny.ends_with("e-869"), "{tiny}");
    }

    #[test]
    fn fixed_rendering() {
        assert_eq!(Cell::Real(632.3046).render(3), "632.305");
        assert_eq!(Cell::Real(632.3046).render(1), "632.3");
    }

    #[test]
    fn csv_layout() {
        let report = Report {
            inputs: vec![],
            columns: vec!["a".into(), "p".into()],
            rows: vec![vec![Cell::UInt(3), Cell::LogProb(Some(0.5f64.ln()))]],
            seed: None,
        };
        assert_eq!(report.render(OutputFormat::Csv, 3), "a,p\n3,5.00e-1\n");
    }

    #[test]
    fn json_has_required_keys() {
        let report = Report {
            inputs: vec![("sets".into(), serde_json::json!(4))],
            columns: vec!["x".into()],
            rows: vec![vec![Cell::Real(1.5)]],
            seed: Some(7),
        };
        let parsed: serde_json::Value =
            serde_json::from_str(&report.render(OutputFormat::Json, 3)).unwrap();
        assert_eq!(parsed["inputs"]["sets"], 4);
        assert_eq!(parsed["results"][0]["x"], 1.5);
        assert_eq!(parsed["seed"], 7);
    }
}
