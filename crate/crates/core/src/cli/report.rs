use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Refused,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Refused => 3,
        }
    }
}

/// Machine-readable result of one subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the canonical JSON of everything the command read.
    pub inputs_digest: String,
    pub outcome: Outcome,
    pub metrics: Value,
    pub witness: Option<Value>,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Value>,
}

impl RunReport {
    pub fn to_json_string(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        serde_json::to_string_pretty(&canonical(&v)).expect("reports serialize")
    }
}

/// What a command body produces before the report is assembled.
#[derive(Clone, Debug)]
pub struct Body {
    pub outcome: Outcome,
    pub metrics: Value,
    pub witness: Option<Value>,
    pub artifacts: Vec<String>,
    pub message: Option<String>,
}

impl Body {
    pub fn pass(metrics: Value) -> Self {
        Body { outcome: Outcome::Pass, metrics, witness: None, artifacts: Vec::new(), message: None }
    }

    /// A failing body always carries a witness.
    pub fn fail(metrics: Value, witness: Value, message: impl Into<String>) -> Self {
        Body {
            outcome: Outcome::Fail,
            metrics,
            witness: Some(witness),
            artifacts: Vec::new(),
            message: Some(message.into()),
        }
    }

    pub fn with_artifacts(mut self, paths: Vec<String>) -> Self {
        self.artifacts.extend(paths);
        self
    }
}

/// Copy of `v` with every object's keys sorted.
pub fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), canonical(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(&canonical(inputs)).expect("inputs serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Wall-clock phases, reported only on request.
#[derive(Debug)]
pub struct Timer {
    start: Instant,
    last: Instant,
    phases: Vec<(String, f64)>,
}

impl Timer {
    pub fn new() -> Self {
        let now = Instant::now();
        Timer { start: now, last: now, phases: Vec::new() }
    }

    /// Close the current phase under `name`.
    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.phases.push((name.to_string(), (now - self.last).as_secs_f64() * 1e3));
        self.last = now;
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, ms) in &self.phases {
            m.insert(format!("{k}_ms"), Value::from(*ms));
        }
        m.insert("total_ms".into(), Value::from(self.start.elapsed().as_secs_f64() * 1e3));
        Value::Object(m)
    }
}

impl Default for Timer {
    fn default() -> Self {
        Timer::new()
    }
}
