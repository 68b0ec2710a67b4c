//! Readers and writers for constituency trees, dependency graphs and SRL
//! frames, plus the types every other module consumes.

mod conll;
mod frames;
mod ptb;
mod tree;

pub use self::conll::{parse_conll_dep, write_conll_dep, DepGraph, DepGraphError, Governor};
pub use self::frames::{
    bio_to_spans, bio_to_spans_lenient, parse_frames, write_frames, Argument, FrameError, SrlFrame,
};
pub use self::ptb::{parse_ptb, strip_function_tags, write_ptb};
pub use self::tree::{Bracket, ConstTree, Node, NodeId, NodeKind, Sentence, Span};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("sentence has no tokens")]
    EmptySentence,
    #[error("token {0} is empty")]
    EmptyToken(usize),
    #[error("node label is empty")]
    EmptyLabel,
    #[error("node `{0}` has no children")]
    ChildlessNode(String),
    #[error("tree has {tree} tokens but sentence has {sentence}")]
    LengthMismatch { tree: usize, sentence: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PtbError {
    #[error("unbalanced parenthesis at byte {0}")]
    Unbalanced(usize),
    #[error("empty tree at byte {0}")]
    EmptyTree(usize),
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// Line-oriented format error; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError { line, message: message.into() }
    }
}

/// Group non-blank lines into blank-line separated blocks, keeping 1-based
/// line numbers. Accepts `\n` and `\r\n`.
pub(crate) fn split_blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}
