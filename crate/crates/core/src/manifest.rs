//! Run manifests: enough to re-execute a command and check its output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every option the command ran with, defaults included.
    pub flags: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub tool_version: String,
    /// sha256 of the input bytes, hex.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_digest: Option<String>,
    /// Left out unless asked for, so that reruns compare byte for byte.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        RunManifest {
            command: command.into(),
            flags: BTreeMap::new(),
            seed: None,
            tool_version: TOOL_VERSION.to_string(),
            input_digest: None,
            timing: None,
        }
    }

    pub fn flag(mut self, name: &str, value: impl Serialize) -> Self {
        self.flags.insert(
            name.to_string(),
            serde_json::to_value(value).expect("flag value serializes"),
        );
        self
    }

    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.input_digest = Some(digest(bytes));
        self
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A result together with the manifest that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Output<T> {
    pub manifest: RunManifest,
    pub result: T,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_known_value() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn timing_omitted_by_default() {
        let m = RunManifest::new("bench").flag("suite", "empty");
        let s = serde_json::to_string(&m).unwrap();
        assert!(!s.contains("timing"));
        let back: RunManifest = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
