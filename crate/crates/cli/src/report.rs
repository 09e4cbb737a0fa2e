//! Reports: what every subcommand prints, in table or JSON form.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Canonical echo of the invocation.
    pub command: String,
    /// Truncation degree the result is valid up to.
    pub cap: Option<usize>,
    /// False when a mathematical check failed; the process then exits 1.
    pub passed: bool,
    /// Keys are kept sorted, so serialization is deterministic.
    pub result: Map<String, Value>,
    pub witness: Option<String>,
    /// Range restrictions that applied to this result.
    pub guards: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: String, cap: Option<usize>) -> Self {
        Report {
            command,
            cap,
            passed: true,
            result: Map::new(),
            witness: None,
            guards: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.result.insert(key.to_string(), value.into());
        self
    }

    pub fn fail(&mut self, witness: impl Into<String>) {
        self.passed = false;
        self.witness.get_or_insert_with(|| witness.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(cap) = self.cap {
            let _ = writeln!(out, "cap: {cap}");
        }
        let _ = writeln!(out, "status: {}", if self.passed { "ok" } else { "check failed" });
        for (key, value) in &self.result {
            match value {
                Value::Array(rows) if rows.iter().any(Value::is_object) => {
                    let _ = writeln!(out, "{key}:");
                    for row in rows {
                        let _ = writeln!(out, "  {}", row_text(row));
                    }
                }
                _ => {
                    let _ = writeln!(out, "{key}: {}", compact(value));
                }
            }
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness: {w}");
        }
        for g in &self.guards {
            let _ = writeln!(out, "guard: {g}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

fn row_text(row: &Value) -> String {
    match row {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", compact(v)))
            .collect::<Vec<_>>()
            .join("  "),
        other => compact(other),
    }
}

/// Tuples as `(a,b,c)`, maps as `{k:v, ...}`, strings unquoted.
pub fn compact(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("({})", items.iter().map(compact).collect::<Vec<_>>().join(",")),
        Value::Object(map) => format!(
            "{{{}}}",
            map.iter()
                .map(|(k, v)| format!("{k}:{}", compact(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn table_layout() {
        let mut r = Report::new("lie lcs --free 2".into(), Some(5));
        r.set("phi", json!([2, 1, 2, 3, 6]));
        r.set("psi", json!({"3": 1}));
        r.set("generators", json!([{"name": "x", "degree": 2}]));
        r.guards.push("outside range".into());
        assert_eq!(
            r.to_table(),
            "command: lie lcs --free 2\ncap: 5\nstatus: ok\ngenerators:\n  degree=2  name=x\nphi: (2,1,2,3,6)\npsi: {3:1}\nguard: outside range\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("x".into(), None);
        r.set("b", 1).set("a", "two");
        r.fail("w");
        r.fail("ignored");
        let text = r.to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        assert_eq!(r.witness.as_deref(), Some("w"));
        assert_eq!(r.exit_code(), 1);
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }
}
