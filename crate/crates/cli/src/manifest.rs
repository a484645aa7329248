//! Run provenance written at the top of every output file.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: &'static str,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<C: Serialize>(argv: &[String], config: &C, seed: Option<u64>) -> Self {
        let canon = serde_json::to_vec(config).expect("config serializes");
        RunManifest {
            command: argv.join(" "),
            config_hash: hex::encode(Sha256::digest(&canon)),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: 0.0,
            outputs: Vec::new(),
        }
    }

    /// `#`-prefixed header lines, ending in a newline.
    pub fn header(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# config_sha256: {}\n", self.config_hash));
        if let Some(seed) = self.seed {
            s.push_str(&format!("# seed: {seed}\n"));
        }
        s.push_str(&format!("# version: detsum {}\n", self.version));
        s.push_str(&format!("# wall_time_s: {:.3}\n", self.wall_time_s));
        s.push_str(&format!("# outputs: {}\n", self.outputs.join(", ")));
        s
    }
}
