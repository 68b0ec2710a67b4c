//! Single-file binary checkpoint.
//!
//! Layout: the line `synsrl-checkpoint 1\n`, a little-endian `u64` length
//! followed by that many bytes of JSON holding the config and vocabularies,
//! a `u32` block count, then per block: `u32` name length, the UTF-8 name,
//! `u32` rank, one `u64` per dimension and the values as `f64` LE in row
//! major order.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::shapes;
use super::{Tagger, TaggerConfig, TaggerParams, Vocabularies};

const MAGIC: &str = "synsrl-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a checkpoint file")]
    Magic,
    #[error("unsupported checkpoint version {0} (this build reads version {VERSION})")]
    Version(String),
    #[error("bad checkpoint header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("checkpoint truncated at byte {0}")]
    Truncated(usize),
    #[error("checkpoint has {found} parameter blocks, expected {expected}")]
    BlockCount { expected: usize, found: usize },
    #[error("parameter block {index} is `{found}`, expected `{expected}`")]
    BlockName { index: usize, expected: String, found: String },
    #[error("parameter block `{name}` has shape {found:?}, expected {expected:?}")]
    Shape { name: String, expected: Vec<usize>, found: Vec<usize> },
    #[error("invalid configuration in checkpoint: {0}")]
    Config(String),
    #[error("{0} trailing bytes after the last parameter block")]
    Trailing(usize),
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: TaggerConfig,
    vocabs: Vocabularies,
}

pub fn to_bytes(tagger: &Tagger) -> Vec<u8> {
    let mut out = format!("{MAGIC} {VERSION}\n").into_bytes();
    let header = serde_json::to_vec(&Header { config: tagger.config.clone(), vocabs: tagger.vocabs.clone() })
        .expect("config and vocabularies serialise");
    out.extend((header.len() as u64).to_le_bytes());
    out.extend(header);
    let blocks = tagger.params.blocks();
    out.extend((blocks.len() as u32).to_le_bytes());
    for (name, block) in blocks {
        out.extend((name.len() as u32).to_le_bytes());
        out.extend(name.as_bytes());
        out.extend((block.ndim() as u32).to_le_bytes());
        for &d in block.shape() {
            out.extend((d as u64).to_le_bytes());
        }
        for &v in block.iter() {
            out.extend(v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(CheckpointError::Truncated(self.pos))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, CheckpointError> {
        let at = self.pos;
        usize::try_from(self.u64()?).map_err(|_| CheckpointError::Truncated(at))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<Tagger, CheckpointError> {
    let newline = bytes.iter().take(64).position(|&b| b == b'\n').ok_or(CheckpointError::Magic)?;
    let first = std::str::from_utf8(&bytes[..newline]).map_err(|_| CheckpointError::Magic)?;
    let version = first.strip_prefix(MAGIC).and_then(|r| r.strip_prefix(' ')).ok_or(CheckpointError::Magic)?;
    if version != VERSION.to_string() {
        return Err(CheckpointError::Version(version.to_string()));
    }
    let mut r = Reader { bytes, pos: newline + 1 };
    let header_len = r.len()?;
    let header: Header = serde_json::from_slice(r.take(header_len)?)?;
    let problems = header.config.validate();
    if !problems.is_empty() {
        return Err(CheckpointError::Config(problems.join("; ")));
    }
    let expected = shapes(&header.config, &header.vocabs);
    let count = r.u32()? as usize;
    if count != expected.len() {
        return Err(CheckpointError::BlockCount { expected: expected.len(), found: count });
    }
    let mut params = TaggerParams::zeros(&header.config, &header.vocabs);
    for (index, ((exp_name, exp_shape), (_, mut block))) in expected.into_iter().zip(params.blocks_mut()).enumerate() {
        let name_len = r.u32()? as usize;
        let name = String::from_utf8_lossy(r.take(name_len)?).into_owned();
        if name != exp_name {
            return Err(CheckpointError::BlockName { index, expected: exp_name, found: name });
        }
        let rank = r.u32()? as usize;
        let shape = (0..rank).map(|_| r.len()).collect::<Result<Vec<_>, _>>()?;
        if shape != exp_shape {
            return Err(CheckpointError::Shape { name, expected: exp_shape, found: shape });
        }
        let raw = r.take(block.len() * 8)?;
        for (v, chunk) in block.iter_mut().zip(raw.chunks_exact(8)) {
            *v = f64::from_le_bytes(chunk.try_into().unwrap());
        }
    }
    if r.pos != bytes.len() {
        return Err(CheckpointError::Trailing(bytes.len() - r.pos));
    }
    Ok(Tagger::from_parts(header.config, header.vocabs, params))
}

pub fn save(tagger: &Tagger, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    fs::write(path, to_bytes(tagger))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Tagger, CheckpointError> {
    from_bytes(&fs::read(path)?)
}
