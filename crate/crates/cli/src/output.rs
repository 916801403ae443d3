use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
}

impl Meta {
    /// Hash of the canonical JSON form of everything that determines the output.
    pub fn new<C: Serialize>(command: &str, config: &C) -> Meta {
        let canonical = serde_json::to_string(config).expect("run config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Meta { tool: "vortex-spectra", version: VERSION, command: command.to_string(), config_hash }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    result: &'a T,
}

pub fn json<T: Serialize>(meta: &Meta, result: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { meta, result }).expect("report serializes");
    s.push('\n');
    s
}

/// CSV text with a leading `#` line carrying the tool version and config hash.
pub fn csv(meta: &Meta, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv");
    format!("# {} {} {} config_hash={}\n{}", meta.tool, meta.version, meta.command, meta.config_hash, body)
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
