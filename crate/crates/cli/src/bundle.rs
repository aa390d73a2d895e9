//! In-memory set of output files, written only once every file is ready.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Bundle {
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Digest256 {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

impl Bundle {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        debug_assert!(self.get(name).is_none(), "duplicate output {name}");
        self.files.push((name.to_string(), contents.into()));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn digests(&self) -> Vec<Digest256> {
        self.files
            .iter()
            .map(|(name, data)| Digest256 {
                file: name.clone(),
                bytes: data.len(),
                sha256: sha256_hex(data),
            })
            .collect()
    }

    /// Write every file into `dir`. Files are staged under temporary names
    /// and renamed at the end; on failure the staged files are removed.
    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, data) in &self.files {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, data) {
                for t in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(io(&tmp)(e));
            }
            staged.push(tmp);
        }
        for ((name, _), tmp) in self.files.iter().zip(&staged) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest).map_err(io(&dest))?;
        }
        Ok(())
    }
}
