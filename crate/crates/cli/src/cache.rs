use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::commands::Outcome;
use crate::Params;

/// One cached result, keyed by command, parameters and code version.
pub struct Cache {
    path: PathBuf,
}

pub fn key(command: &str, p: &Params) -> String {
    let material = json!({
        "command": command,
        "d": p.d,
        "g": p.g,
        "reflection_sign": p.reflection_sign.to_string(),
        "edge_sign": p.edge_sign.to_string(),
        "signs": p.signs,
        "trials": p.trials,
        "seed": p.seed,
        "cli": env!("CARGO_PKG_VERSION"),
        "core": cokernel_core::VERSION,
    });
    let digest = Sha256::digest(material.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn new(dir: &Path, command: &str, p: &Params) -> Self {
        Cache { path: dir.join(format!("{command}-{}.json", key(command, p))) }
    }

    pub fn load(&self) -> Option<Outcome> {
        let text = fs::read_to_string(&self.path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, o: &Outcome) -> io::Result<()> {
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(o).map_err(io::Error::other)?)?;
        fs::rename(tmp, &self.path)
    }
}
