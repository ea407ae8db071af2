use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "pdtb-lab-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON container for trained models. `payload` holds the model, whose
/// tensors serialize as `{shape, data}` and whose embedding tables carry
/// their vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint<T> {
    pub format: String,
    pub version: u32,
    pub kind: String,
    pub config_hash: String,
    pub payload: T,
}

impl<T: Serialize + DeserializeOwned> Checkpoint<T> {
    pub fn new(kind: impl Into<String>, config_hash: impl Into<String>, payload: T) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            kind: kind.into(),
            config_hash: config_hash.into(),
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str, kind: &str) -> Result<Self> {
        let c: Checkpoint<T> = serde_json::from_str(s)?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(Error::validation("checkpoint format", format!("{} v{}", c.format, c.version)));
        }
        if c.kind != kind {
            return Err(Error::validation("checkpoint kind", format!("expected {kind}, found {}", c.kind)));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_json()?).map_err(|e| Error::Io(e).in_file(path))
    }

    pub fn load(path: &Path, kind: &str) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::Io(e).in_file(path))?;
        Self::from_json(&s, kind).map_err(|e| e.in_file(path))
    }
}

/// Hex SHA-256 of the canonical JSON encoding of `config`.
pub fn config_hash(config: &impl Serialize) -> Result<String> {
    let v = serde_json::to_value(config)?;
    Ok(hex::encode(Sha256::digest(v.to_string().as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_kind_check() {
        let c = Checkpoint::new("basic", "abc", vec![1.0f64, 0.1 + 0.2]);
        let s = c.to_json().unwrap();
        let back: Checkpoint<Vec<f64>> = Checkpoint::from_json(&s, "basic").unwrap();
        assert_eq!(back, c);
        assert!(Checkpoint::<Vec<f64>>::from_json(&s, "model1").is_err());
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&serde_json::json!({"b": 1, "a": 2})).unwrap();
        let b = config_hash(&serde_json::json!({"a": 2, "b": 1})).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
