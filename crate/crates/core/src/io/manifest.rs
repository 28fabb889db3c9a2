use std::fmt::Display;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use super::container::{read_bytes, write_bytes};
use crate::error::{Result, ScsError};

/// Flat `key=value` run record. Keys keep insertion order; setting an
/// existing key replaces its value in place.
///
/// The command line is stored as `arg.0`, `arg.1`, … so a run can be
/// replayed verbatim.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Seconds since the Unix epoch, taken from `SOURCE_DATE_EPOCH` when set so
/// that manifests can be reproduced byte for byte.
pub fn creation_timestamp() -> u64 {
    if let Some(v) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()) {
        return v;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn check_token(s: &str, is_key: bool) -> Result<()> {
    if s.contains('\n') || s.contains('\r') || (is_key && (s.is_empty() || s.contains('='))) {
        return Err(ScsError::InvalidArgument(format!("cannot store {s:?} in a manifest")));
    }
    Ok(())
}

impl RunManifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> Result<()> {
        let value = value.to_string();
        check_token(key, true)?;
        check_token(&value, false)?;
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn set_args<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        for (i, a) in args.iter().enumerate() {
            self.set(&format!("arg.{i}"), a.as_ref())?;
        }
        Ok(())
    }

    /// The recorded command line, `arg.0` first.
    pub fn args(&self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(v) = self.get(&format!("arg.{}", out.len())) {
            out.push(v.to_string());
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = RunManifest::new();
        for (no, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ScsError::Format(format!("manifest line {}: missing '='", no + 1)))?;
            m.set(k, v)?;
        }
        Ok(m)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_bytes(path.as_ref(), self.to_text().as_bytes())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = read_bytes(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| ScsError::Format(format!("{}: manifest is not UTF-8", path.display())))?;
        Self::parse(&text)
    }
}
