use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct Digest256 {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
struct Versions {
    efmsig: &'static str,
    efmsig_cli: &'static str,
    target: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    argv: &'a [String],
    flags: &'a serde_json::Value,
    seed: Option<u64>,
    threads: usize,
    versions: Versions,
    inputs: &'a [Digest256],
    outputs: &'a [Digest256],
    wall_time_s: f64,
}

/// Routes outputs to `--out` or stdout and collects what the manifest records.
pub struct Run {
    out: Option<PathBuf>,
    quiet: bool,
    started: Instant,
    pub command: String,
    pub seed: Option<u64>,
    inputs: Vec<Digest256>,
    outputs: Vec<Digest256>,
}

impl Run {
    pub fn new(out: Option<PathBuf>, quiet: bool) -> Result<Self> {
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Run { out, quiet, started: Instant::now(), command: String::new(), seed: None, inputs: vec![], outputs: vec![] })
    }

    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(Digest256 { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(bytes)
    }

    /// The main result: `name` under `--out`, stdout otherwise.
    pub fn primary(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        if self.out.is_some() {
            self.secondary(name, bytes)
        } else {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).context("writing stdout")?;
            so.flush().context("writing stdout")?;
            Ok(())
        }
    }

    /// Written only under `--out`.
    pub fn secondary(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = &self.out {
            let p = dir.join(name);
            std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
            self.outputs.push(Digest256 { path: name.to_string(), sha256: sha256_hex(bytes) });
        }
        Ok(())
    }

    /// Written to an explicit path given on the command line.
    pub fn write_at(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(Digest256 { path: path.display().to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// Human-readable table: stderr, plus summary.txt under `--out`.
    pub fn table(&mut self, text: &str) -> Result<()> {
        if !self.quiet {
            eprint!("{text}");
        }
        self.secondary("summary.txt", text.as_bytes())
    }

    pub fn finish(self, argv: &[String], flags: &serde_json::Value, threads: usize) -> Result<()> {
        let Some(dir) = &self.out else { return Ok(()) };
        let m = RunManifest {
            command: &self.command,
            argv,
            flags,
            seed: self.seed,
            threads,
            versions: Versions {
                efmsig: efmsig::VERSION,
                efmsig_cli: env!("CARGO_PKG_VERSION"),
                target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            },
            inputs: &self.inputs,
            outputs: &self.outputs,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let p = dir.join("manifest.json");
        std::fs::write(&p, serde_json::to_string_pretty(&m)? + "\n").with_context(|| format!("writing {}", p.display()))?;
        Ok(())
    }
}

pub fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Left-aligned first column, right-aligned rest.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (j, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if j == 0 {
                s.push_str(&format!("{c:<w$}"));
            } else {
                s.push_str(&format!("  {c:>w$}"));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn table_alignment() {
        let t = render_table(&["word", "value"], &[vec!["e".into(), "1".into()], vec!["1-1".into(), "0.25".into()]]);
        assert_eq!(t, "word  value\ne         1\n1-1    0.25\n");
    }
}
