use std::fmt::Write as _;
use std::time::Duration;

use pinvkit_core::io::format_f64;
use pinvkit_core::ResidualReport;
use serde_json::{json, Map, Value};

/// Digest of one file read or written by a command.
#[derive(Debug, Clone)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Summary printed after every command.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub method: String,
    pub rank: Option<usize>,
    pub residuals: Option<ResidualReport>,
    pub pass: bool,
    pub wall_time: Duration,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub details: Map<String, Value>,
}

impl RunReport {
    pub fn new(command: &'static str, method: impl Into<String>) -> Self {
        Self {
            command,
            method: method.into(),
            rank: None,
            residuals: None,
            pass: true,
            wall_time: Duration::ZERO,
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: Map::new(),
        }
    }

    pub fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), value);
    }

    /// Records residuals and folds their verdict into `pass`.
    pub fn verify(&mut self, residuals: ResidualReport) {
        self.pass &= residuals.all_pass();
        self.residuals = Some(residuals);
    }

    pub fn to_value(&self) -> Value {
        let digests = |v: &[FileDigest]| -> Value {
            v.iter().map(|d| json!({"path": d.path, "sha256": d.sha256})).collect()
        };
        let residuals = self.residuals.as_ref().map(|r| {
            json!({
                "max_penrose": r.entries.iter().filter(|e| e.name.starts_with("penrose")).map(|e| e.residual).fold(0.0, f64::max),
                "bound": r.residual_abs,
                "entries": r.entries.iter().map(|e| json!({"name": e.name, "residual": e.residual, "pass": e.pass})).collect::<Vec<_>>(),
            })
        });
        json!({
            "command": self.command,
            "method": self.method,
            "pass": self.pass,
            "rank": self.rank,
            "residuals": residuals,
            "wall_time_ms": self.wall_time.as_secs_f64() * 1e3,
            "inputs": digests(&self.inputs),
            "outputs": digests(&self.outputs),
            "details": Value::Object(self.details.clone()),
        })
    }

    /// Aligned `key: value` lines for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<22} {}", "command", self.command);
        let _ = writeln!(out, "{:<22} {}", "method", self.method);
        let _ = writeln!(out, "{:<22} {}", "verdict", if self.pass { "PASS" } else { "FAIL" });
        if let Some(rank) = self.rank {
            let _ = writeln!(out, "{:<22} {rank}", "rank");
        }
        if let Some(r) = &self.residuals {
            let _ = writeln!(out, "{:<22} {}", "bound", format_f64(r.residual_abs));
            for e in &r.entries {
                let mark = if e.pass { "ok" } else { "FAIL" };
                let _ = writeln!(out, "  {:<20} {} {mark}", e.name, format_f64(e.residual));
            }
        }
        for (k, v) in &self.details {
            let _ = writeln!(out, "{k:<22} {}", compact(v));
        }
        for d in self.inputs.iter().map(|d| ("input", d)).chain(self.outputs.iter().map(|d| ("output", d))) {
            let _ = writeln!(out, "{:<22} {} {}", d.0, d.1.sha256, d.1.path);
        }
        let _ = writeln!(out, "{:<22} {:.3} ms", "wall time", self.wall_time.as_secs_f64() * 1e3);
        out
    }
}

fn compact(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, None, 0);
    s
}

/// Serializes JSON with every float in 17-significant-digit form.
pub fn render(v: &Value, pretty: bool) -> String {
    let mut s = String::new();
    write_value(&mut s, v, pretty.then_some(2), 0);
    s.push('\n');
    s
}

fn write_value(out: &mut String, v: &Value, indent: Option<usize>, depth: usize) {
    let newline = |out: &mut String, d: usize| {
        if let Some(w) = indent {
            out.push('\n');
            out.push_str(&" ".repeat(w * d));
        }
    };
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if indent.is_none() {
                        out.push(' ');
                    }
                }
                newline(out, depth + 1);
                write_value(out, item, indent, depth + 1);
            }
            newline(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if indent.is_none() {
                        out.push(' ');
                    }
                }
                newline(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent, depth + 1);
            }
            newline(out, depth);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_fixed_width() {
        let v = json!({"x": 0.1, "n": 3, "s": "a\"b", "v": [1.5, -2.0], "e": []});
        let s = render(&v, false);
        assert_eq!(
            s,
            "{\"e\": [], \"n\": 3, \"s\": \"a\\\"b\", \"v\": [1.5000000000000000e0, -2.0000000000000000e0], \"x\": 1.0000000000000001e-1}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn pretty_round_trips() {
        let v = json!({"a": {"b": [1, 2.25]}, "c": null});
        let back: Value = serde_json::from_str(&render(&v, true)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn failed_residuals_flip_verdict() {
        let mut r = RunReport::new("pinv", "svd");
        let mut res = ResidualReport::new(1e-9);
        res.push("penrose1", 1.0);
        r.verify(res);
        assert!(!r.pass);
        assert!(r.to_table().contains("FAIL"));
        assert_eq!(r.to_value()["residuals"]["max_penrose"].as_f64(), Some(1.0));
    }
}
