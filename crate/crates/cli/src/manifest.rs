//! Run manifest: the resolved config, the seed, and SHA-256 checksums of
//! every input file. A manifest is enough to reproduce a pipeline run
//! byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: RunConfig,
    /// path -> sha256 hex of every input file read by the run.
    pub input_checksums: BTreeMap<String, String>,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

impl Manifest {
    pub fn for_run(config: &RunConfig) -> Result<Manifest> {
        let mut input_checksums = BTreeMap::new();
        for path in [
            config.tweets.as_ref(),
            config.prices.as_ref(),
            config.lexicon.as_ref(),
            config.index.as_ref(),
            config.text_sentiment.as_ref(),
        ]
        .into_iter()
        .flatten()
        {
            input_checksums.insert(path.display().to_string(), sha256_hex(path)?);
        }
        Ok(Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            input_checksums,
        })
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&body)
            .with_context(|| format!("invalid manifest {}", path.display()))
    }

    /// Re-hash the inputs and demand they match what the manifest saw.
    pub fn verify_inputs(&self) -> Result<()> {
        for (path, expected) in &self.input_checksums {
            let actual = sha256_hex(Path::new(path))?;
            if &actual != expected {
                bail!("input {path} changed since the manifest was written (sha256 {actual} != {expected})");
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
