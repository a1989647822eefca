//! Plain-text parameter container.
//!
//! ```text
//! hqf-checkpoint 1
//! meta <key> <value>              (zero or more, value runs to end of line)
//! tensor <name> <rank> <d0> … <dk>
//! <v0> <v1> …                     (row-major, one line, shortest round-trip decimal)
//! …
//! end
//! ```
//!
//! Names and meta keys contain no whitespace. Values are written with Rust's
//! shortest round-trip `f64` formatting, so reading a checkpoint back yields
//! bit-identical parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::Tensor;
use crate::error::{Error, Result};

pub const MAGIC: &str = "hqf-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checkpoint {
    pub meta: BTreeMap<String, String>,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::Checkpoint(format!("missing tensor {name}")))
    }

    pub fn meta(&self, key: &str) -> Result<&str> {
        self.meta
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Checkpoint(format!("missing meta key {key}")))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {VERSION}\n");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for (name, t) in &self.tensors {
            let _ = write!(out, "tensor {name} {}", t.shape().len());
            for d in t.shape() {
                let _ = write!(out, " {d}");
            }
            out.push('\n');
            let mut first = true;
            for v in t.data() {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v:?}");
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Checkpoint(format!("line {line}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, header)) => {
                let mut parts = header.split_whitespace();
                if parts.next() != Some(MAGIC) {
                    return Err(bad(1, "not a checkpoint file"));
                }
                let version: u32 = parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad(1, "missing version"))?;
                if version != VERSION {
                    return Err(bad(1, &format!("unsupported version {version}")));
                }
            }
            None => return Err(bad(1, "empty file")),
        }

        let mut ckpt = Checkpoint::default();
        while let Some((no, line)) = lines.next() {
            let (kind, rest) = line.split_once(' ').unwrap_or((line, ""));
            match kind {
                "meta" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    ckpt.meta.insert(k.to_string(), v.to_string());
                }
                "tensor" => {
                    let mut parts = rest.split_whitespace();
                    let name = parts.next().ok_or_else(|| bad(no, "missing name"))?;
                    let rank: usize = parts
                        .next()
                        .and_then(|r| r.parse().ok())
                        .ok_or_else(|| bad(no, "missing rank"))?;
                    let shape = parts
                        .map(|d| d.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad(no, "bad dimension"))?;
                    if shape.len() != rank {
                        return Err(bad(no, "rank does not match dimension count"));
                    }
                    let (vno, values) = lines.next().ok_or_else(|| bad(no, "missing values"))?;
                    let data = values
                        .split_whitespace()
                        .map(|v| v.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad(vno, "bad value"))?;
                    let tensor =
                        Tensor::from_vec(&shape, data).map_err(|e| bad(vno, &e.to_string()))?;
                    ckpt.tensors.push((name.to_string(), tensor));
                }
                "end" => return Ok(ckpt),
                _ => return Err(bad(no, &format!("unexpected record {kind:?}"))),
            }
        }
        Err(Error::Checkpoint(
            "truncated checkpoint (no end marker)".into(),
        ))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_text())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }
}
