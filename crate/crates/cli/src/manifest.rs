use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Provenance record written next to every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub artifact_version: String,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[PathBuf], seed: u64, outputs: &[&Path]) -> CliResult<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                let bytes = std::fs::read(p).map_err(|source| CliError::Io {
                    path: p.clone(),
                    source,
                })?;
                Ok((p.display().to_string(), sha256_hex(&bytes)))
            })
            .collect::<CliResult<_>>()?;
        Ok(RunManifest {
            command: command.to_string(),
            inputs,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        })
    }

    /// `out.json` gets `out.json.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}
