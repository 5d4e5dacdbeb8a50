use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::exit::Exit;
use crate::Globals;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub threads: usize,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
    pub exit_code: u8,
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Collects output paths while a command runs and writes the manifest last.
pub struct Run<'a> {
    g: &'a Globals,
    command: &'static str,
    started: Instant,
    started_unix_ms: u128,
    outputs: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    pub fn start(g: &'a Globals, command: &'static str) -> Result<Self, Exit> {
        std::fs::create_dir_all(&g.out).map_err(|e| Exit::io(&g.out, e))?;
        Ok(Self {
            g,
            command,
            started: Instant::now(),
            started_unix_ms: unix_ms(),
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, Exit> {
        let path = self.g.out.join(name);
        std::fs::write(&path, contents).map_err(|e| Exit::io(&path, e))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    pub fn finish(self, config: impl Serialize, seed: Option<u64>, exit_code: u8) -> Result<u8, Exit> {
        let m = RunManifest {
            command: self.command,
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            threads: self.g.threads,
            started_unix_ms: self.started_unix_ms,
            finished_unix_ms: unix_ms(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            exit_code,
        };
        let path: &Path = &self.g.out.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| Exit::io(path, e))?;
        Ok(exit_code)
    }
}
