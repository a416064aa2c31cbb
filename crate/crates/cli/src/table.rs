use std::collections::BTreeMap;

use ahlfors_core::experiments::{csv_quote, format_float, SweepResult};
use serde_json::{json, Map, Value};

/// Output table: fixed columns, loosely typed cells and string metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub meta: BTreeMap<String, String>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self { command: command.into(), columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.into(), value.to_string());
    }

    pub fn meta_num(&mut self, key: &str, x: f64) {
        self.meta.insert(key.into(), format_float(x));
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        meta.insert("command".into(), json!(self.command));
        meta.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        json!({ "meta": meta, "rows": rows })
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.as_f64().map(format_float).unwrap_or_else(|| n.to_string()),
        Value::String(s) if s.contains([',', '"', '\n']) => csv_quote(s),
        Value::String(s) => s.clone(),
        other => csv_quote(&other.to_string()),
    }
}

/// Finite numbers become JSON numbers, everything else `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

pub fn int(n: usize) -> Value {
    Value::from(n)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

/// Sweep tables already carry their own CSV and JSON layout.
pub enum Output {
    Table(Table),
    Sweep(SweepResult),
}

impl Output {
    pub fn to_csv(&self) -> String {
        match self {
            Output::Table(t) => t.to_csv(),
            Output::Sweep(s) => s.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let v = match self {
            Output::Table(t) => t.to_json(),
            Output::Sweep(s) => s.to_json(),
        };
        serde_json::to_string_pretty(&v).expect("tables always serialize") + "\n"
    }
}
