use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// One per run. Identical command, instance, seed and parameters give an
/// identical manifest unless wall-clock timing was requested.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: &'static str,
    pub instance_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub params: Value,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
    pub result: Value,
}

impl RunManifest {
    pub fn new(command: &'static str, instance: &[u8], params: Value, result: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            instance_sha256: sha256_hex(instance),
            seed: None,
            params,
            version: env!("CARGO_PKG_VERSION"),
            wall_clock_ms: None,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// `key: value` lines; nested values are written as compact JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let Value::Object(top) = serde_json::to_value(self).expect("manifest serializes") else {
            unreachable!()
        };
        for (k, v) in top {
            match v {
                Value::Object(inner) if k == "result" || k == "params" => {
                    for (ik, iv) in inner {
                        out.push_str(&format!("{k}.{ik}: {}\n", scalar(&iv)));
                    }
                }
                v => out.push_str(&format!("{k}: {}\n", scalar(&v))),
            }
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
