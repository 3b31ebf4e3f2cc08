//! Artifact rendering: CSV with a `#` metadata header, or one JSON document
//! with a `metadata` record.

use serde::Serialize;

use crate::OutputFormat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// A named scalar check with its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            check: name.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    /// Passes when `value > bound`.
    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Self {
            check: name.into(),
            value,
            bound,
            pass: value > bound,
        }
    }
}

/// 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A rendered output document.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub format: OutputFormat,
    pub metadata: Metadata,
    /// Extra `# key: value` lines after the metadata (CSV only).
    pub notes: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// The JSON body, merged next to `metadata`.
    pub json: serde_json::Value,
}

impl Artifact {
    pub fn render(&self) -> String {
        match self.format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let m = &self.metadata;
        let mut s = format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# config: {}\n",
            m.tool, m.version, m.command, m.seed, m.config
        );
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    fn render_json(&self) -> String {
        let mut doc = serde_json::Map::new();
        doc.insert("metadata".into(), serde_json::to_value(&self.metadata).expect("metadata serializes"));
        match &self.json {
            serde_json::Value::Object(body) => {
                for (k, v) in body {
                    doc.insert(k.clone(), v.clone());
                }
            }
            other => {
                doc.insert("data".into(), other.clone());
            }
        }
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains(' '));
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }
}
