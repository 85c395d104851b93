//! Deterministic reports: an ordered list of fields rendered as plain text
//! or as JSON. Stdout carries only report bytes — identical workspace,
//! command and seed render byte-identical output; timing goes to stderr.

use serde_json::{json, Map, Value};

pub enum Field {
    Text(String),
    Num(u64),
    List(Vec<String>),
}

pub struct Report {
    entries: Vec<(String, Field)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { entries: vec![("command".to_string(), Field::Text(command.to_string()))] }
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), Field::Text(value.into())));
    }

    pub fn num(&mut self, key: &str, value: u64) {
        self.entries.push((key.to_string(), Field::Num(value)));
    }

    pub fn list(&mut self, key: &str, items: Vec<String>) {
        self.entries.push((key.to_string(), Field::List(items)));
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (key, field) in &self.entries {
            match field {
                Field::Text(s) => out.push_str(&format!("{key}: {s}\n")),
                Field::Num(n) => out.push_str(&format!("{key}: {n}\n")),
                Field::List(items) if items.is_empty() => {
                    out.push_str(&format!("{key}: (none)\n"))
                }
                Field::List(items) => {
                    out.push_str(&format!("{key}:\n"));
                    for item in items {
                        out.push_str(&format!("  - {item}\n"));
                    }
                }
            }
        }
        out
    }

    /// Mirror every field into a JSON object. Keys serialize sorted, which
    /// is as deterministic as the text order.
    pub fn render_machine(&self) -> Value {
        let mut map = Map::new();
        for (key, field) in &self.entries {
            let value = match field {
                Field::Text(s) => json!(s),
                Field::Num(n) => json!(n),
                Field::List(items) => json!(items),
            };
            map.insert(key.clone(), value);
        }
        Value::Object(map)
    }
}

/// A finished command: rendered bytes for both formats and the exit code.
pub struct Output {
    pub text: String,
    pub machine: Value,
    pub code: i32,
}

impl Output {
    pub fn from_report(report: Report, code: i32) -> Output {
        Output { text: report.render_text(), machine: report.render_machine(), code }
    }
}
