//! Command output: `{"kind", "inputs", "rows", "match"}` as JSON, or the
//! same content as plain text.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub inputs: Map<String, Value>,
    pub rows: Vec<Map<String, Value>>,
    #[serde(rename = "match")]
    pub matched: bool,
}

/// Builds one row from `(key, value)` pairs, keeping their order.
#[macro_export]
macro_rules! row {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = serde_json::Map::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}

impl Report {
    pub fn new(kind: &str, cfg: &RunConfig) -> Self {
        let mut inputs = Map::new();
        inputs.insert("nu".into(), Value::String(cfg.nu.to_string()));
        inputs.insert("omega".into(), Value::String(cfg.omega.to_string()));
        inputs.insert("level".into(), Value::from(cfg.level));
        Self { kind: kind.to_string(), inputs, rows: Vec::new(), matched: true }
    }

    pub fn push(&mut self, row: Map<String, Value>) {
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
            out.push_str(&fields.join(", "));
            out.push('\n');
        }
        out.push_str(&format!("match={}\n", self.matched));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Text => self.to_text(),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(plain).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Param;
    use h4_core::ExactScalar;

    fn sample() -> Report {
        let cfg = RunConfig {
            nu: Param::Value(ExactScalar::from_ratio(1, 3)),
            omega: Param::Symbolic,
            level: 4,
            format: Format::Json,
            cache: None,
        };
        let mut r = Report::new("spectrum", &cfg);
        r.push(row! { "order" => 14400, "orbits" => vec![120, 600], "value" => "1/2+1/2*sqrt5" });
        r.matched = false;
        r
    }

    #[test]
    fn json_roundtrip_is_byte_identical() {
        let text = sample().to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(back.to_json(), text);
        let generic: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&generic).unwrap(), text);
    }

    #[test]
    fn text_keeps_field_order() {
        assert_eq!(sample().to_text(), "order=14400, orbits=[120,600], value=1/2+1/2*sqrt5\nmatch=false\n");
    }
}
