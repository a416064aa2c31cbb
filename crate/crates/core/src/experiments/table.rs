use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// One row of an experiment table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub parameter: f64,
    pub gamma_szego: Option<f64>,
    pub gamma_slit: Option<f64>,
    pub gamma_c_lp: Option<f64>,
    /// Extra numeric columns, keyed by the names in [`SweepResult::columns`].
    pub aux: BTreeMap<String, f64>,
    /// Failure recorded for this row; the sweep carries on after it.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn new(parameter: f64) -> Self {
        Self { parameter, ..Default::default() }
    }

    pub fn with(mut self, column: &str, value: f64) -> Self {
        self.aux.insert(column.to_string(), value);
        self
    }

    pub fn set(&mut self, column: &str, value: f64) {
        self.aux.insert(column.to_string(), value);
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        self.aux.get(column).copied()
    }

    pub fn failed(parameter: f64, error: impl ToString) -> Self {
        Self { parameter, error: Some(error.to_string()), ..Default::default() }
    }
}

/// Rows of an experiment plus the settings that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    /// Header of the parameter column.
    pub parameter_name: String,
    /// Order of the auxiliary columns.
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub meta: BTreeMap<String, String>,
}

impl SweepResult {
    pub fn new(experiment: &str, parameter_name: &str, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameter_name: parameter_name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.to_string(), value.to_string());
    }

    /// Rows without a recorded error.
    pub fn ok_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_none())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.parameter_name.clone(), "gamma_szego".into(), "gamma_slit".into(), "gamma_c_lp".into()];
        h.extend(self.columns.iter().cloned());
        h.push("error".into());
        h
    }

    /// Header row, then one line per row; missing values are empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        let cell = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for r in &self.rows {
            let mut cells = vec![format_float(r.parameter), cell(r.gamma_szego), cell(r.gamma_slit), cell(r.gamma_c_lp)];
            cells.extend(self.columns.iter().map(|c| cell(r.get(c))));
            cells.push(r.error.as_deref().map(csv_quote).unwrap_or_default());
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// `{"meta": {...}, "rows": [...]}` with one object per row keyed by the CSV header.
    pub fn to_json(&self) -> Value {
        let mut meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        meta.insert("experiment".into(), json!(self.experiment));
        meta.insert("columns".into(), json!(self.header()));
        let num = |v: Option<f64>| v.filter(|x| x.is_finite()).map(Value::from).unwrap_or(Value::Null);
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut o = Map::new();
                o.insert(self.parameter_name.clone(), num(Some(r.parameter)));
                o.insert("gamma_szego".into(), num(r.gamma_szego));
                o.insert("gamma_slit".into(), num(r.gamma_slit));
                o.insert("gamma_c_lp".into(), num(r.gamma_c_lp));
                for c in &self.columns {
                    o.insert(c.clone(), num(r.get(c)));
                }
                o.insert("error".into(), r.error.clone().map(Value::String).unwrap_or(Value::Null));
                Value::Object(o)
            })
            .collect();
        json!({ "meta": meta, "rows": rows })
    }
}

/// Shortest round-trip decimal, switching to exponent notation for very small or large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Double-quoted CSV field.
pub fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_values_use_exponents() {
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(3.5e-9), "3.5e-9");
        assert_eq!(format_float(-2e20), "-2e20");
    }

    #[test]
    fn csv_and_json_share_columns() {
        let mut t = SweepResult::new("demo", "delta", &["gap"]);
        t.meta("nodes", 64);
        t.rows.push(SweepRow { gamma_szego: Some(1.5), ..SweepRow::new(0.2) }.with("gap", 0.25));
        t.rows.push(SweepRow::failed(0.1, "solver \"broke\""));
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "delta,gamma_szego,gamma_slit,gamma_c_lp,gap,error");
        assert_eq!(lines[1], "0.2,1.5,,,0.25,");
        assert_eq!(lines[2], "0.1,,,,,\"solver \"\"broke\"\"\"");
        let j = t.to_json();
        assert_eq!(j["meta"]["nodes"], "64");
        assert_eq!(j["rows"][0]["gap"], 0.25);
        assert!(j["rows"][1]["gamma_szego"].is_null());
        assert_eq!(t.ok_rows().count(), 1);
    }
}
