use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{RunArgs, SweepArgs};

/// Configuration echo; the paths inside are the recorded outputs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", content = "config", rename_all = "lowercase")]
pub enum Recorded {
    Run(RunArgs),
    Sweep(SweepArgs),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    #[serde(flatten)]
    pub recorded: Recorded,
    pub argv: Vec<String>,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(recorded: Recorded, outputs: Vec<PathBuf>) -> Self {
        Self {
            recorded,
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        fs::write(path, text + "\n")
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Moves every output path into `dir`, keeping file names.
pub fn redirect(recorded: &mut Recorded, dir: &Path) {
    let move_into = |p: &mut Option<PathBuf>| {
        if let Some(path) = p {
            let name = path.file_name().map(PathBuf::from).unwrap_or_else(|| path.clone());
            *path = dir.join(name);
        }
    };
    match recorded {
        Recorded::Run(args) => {
            move_into(&mut args.profile);
            move_into(&mut args.json);
        }
        Recorded::Sweep(args) => move_into(&mut args.output),
    }
}
