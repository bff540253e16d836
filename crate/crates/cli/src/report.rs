use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// One run's result. JSON keys are emitted in sorted order, so equal
/// reports serialize to equal bytes.
#[derive(Clone, Debug)]
pub struct Report {
    pub statement: &'static str,
    pub q: Option<u32>,
    pub k: Option<usize>,
    pub params: Map<String, Value>,
    pub verdict: String,
    pub witness: Option<Value>,
    pub stats: Value,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(statement: &'static str, q: Option<u32>, k: Option<usize>) -> Self {
        Report {
            statement,
            q,
            k,
            params: Map::new(),
            verdict: String::new(),
            witness: None,
            stats: json!({}),
            elapsed_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool_version".into(), TOOL_VERSION.into());
        m.insert("statement".into(), self.statement.into());
        m.insert("q".into(), json!(self.q));
        m.insert("k".into(), json!(self.k));
        m.insert("params".into(), Value::Object(self.params.clone()));
        m.insert("verdict".into(), self.verdict.clone().into());
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.clone());
        }
        m.insert("stats".into(), self.stats.clone());
        m.insert("elapsed_ms".into(), self.elapsed_ms.into());
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.to_json()).expect("plain values")),
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} (mdslab {})", self.statement, TOOL_VERSION).unwrap();
        if let Some(q) = self.q {
            write!(out, "q = {q}").unwrap();
            if let Some(k) = self.k {
                write!(out, ", k = {k}").unwrap();
            }
            out.push('\n');
        }
        for (key, v) in &self.params {
            writeln!(out, "  {key}: {}", compact(v)).unwrap();
        }
        writeln!(out, "verdict: {}", self.verdict).unwrap();
        if let Some(w) = &self.witness {
            writeln!(out, "witness: {}", compact(w)).unwrap();
        }
        match &self.stats {
            Value::Object(m) => {
                for (key, v) in m {
                    writeln!(out, "  {key}: {}", compact(v)).unwrap();
                }
            }
            other => writeln!(out, "stats: {}", compact(other)).unwrap(),
        }
        writeln!(out, "elapsed: {} ms", self.elapsed_ms).unwrap();
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render_error(kind: &str, message: &str, format: Format) -> String {
    match format {
        Format::Json => {
            let v = json!({
                "tool_version": TOOL_VERSION,
                "error": { "kind": kind, "message": message },
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("plain values"))
        }
        Format::Text => format!("error ({kind}): {message}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_the_stable_keys() {
        let r = Report::new("verify-rs", Some(5), Some(3)).param("extended", false);
        let v = r.to_json();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            vec!["elapsed_ms", "k", "params", "q", "statement", "stats", "tool_version", "verdict"]
        );
    }

    #[test]
    fn text_lists_witness() {
        let mut r = Report::new("stmt2", Some(2), Some(2));
        r.verdict = "holds".into();
        r.witness = Some(json!({"combination": [0, 1]}));
        let t = r.render(Format::Text);
        assert!(t.contains("verdict: holds"));
        assert!(t.contains("witness: {\"combination\":[0,1]}"));
    }

    #[test]
    fn errors_render_as_objects() {
        let e = render_error("input", "bad", Format::Json);
        let v: Value = serde_json::from_str(&e).unwrap();
        assert_eq!(v["error"]["kind"], "input");
    }
}
