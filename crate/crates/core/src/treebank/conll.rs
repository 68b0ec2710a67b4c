//! Four-column dependency TSV: `index  form  governor  label`.

use std::fmt::Write as _;

use super::tree::Sentence;
use super::{split_blocks, FormatError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Governor {
    Root,
    /// 1-based token position.
    Token(usize),
}

/// A dependency tree over a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepGraph {
    governors: Vec<Governor>,
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DepGraphError {
    #[error("governor and label lists differ in length")]
    LengthMismatch,
    #[error("token {0} has no label")]
    EmptyLabel(usize),
    #[error("token {token} has governor {governor} outside the sentence")]
    GovernorOutOfRange { token: usize, governor: usize },
    #[error("no token is governed by ROOT")]
    NoRoot,
    #[error("tokens {first} and {second} are both governed by ROOT")]
    MultipleRoots { first: usize, second: usize },
    #[error("token {0} is part of a governor cycle")]
    Cycle(usize),
}

impl DepGraph {
    pub fn new(governors: Vec<Governor>, labels: Vec<String>) -> Result<Self, DepGraphError> {
        if governors.len() != labels.len() || governors.is_empty() {
            return Err(DepGraphError::LengthMismatch);
        }
        let n = governors.len();
        if let Some(i) = labels.iter().position(|l| l.is_empty()) {
            return Err(DepGraphError::EmptyLabel(i + 1));
        }
        let mut root = None;
        for (i, g) in governors.iter().enumerate() {
            match *g {
                Governor::Root => {
                    if let Some(first) = root {
                        return Err(DepGraphError::MultipleRoots { first, second: i + 1 });
                    }
                    root = Some(i + 1);
                }
                Governor::Token(h) if h == 0 || h > n => {
                    return Err(DepGraphError::GovernorOutOfRange { token: i + 1, governor: h })
                }
                Governor::Token(_) => {}
            }
        }
        if root.is_none() {
            return Err(DepGraphError::NoRoot);
        }
        // With exactly one root, every token must reach it within n steps.
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while let Governor::Token(h) = governors[cur - 1] {
                cur = h;
                steps += 1;
                if steps > n {
                    return Err(DepGraphError::Cycle(start));
                }
            }
        }
        Ok(DepGraph { governors, labels })
    }

    pub fn len(&self) -> usize {
        self.governors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.governors.is_empty()
    }

    /// Governor of the token at 1-based `pos`.
    pub fn governor(&self, pos: usize) -> Governor {
        self.governors[pos - 1]
    }

    pub fn label(&self, pos: usize) -> &str {
        &self.labels[pos - 1]
    }

    pub fn governors(&self) -> &[Governor] {
        &self.governors
    }

    pub fn root(&self) -> usize {
        self.governors.iter().position(|g| *g == Governor::Root).expect("validated on construction") + 1
    }

    /// Dependents of `pos` in increasing position order.
    pub fn dependents(&self, pos: usize) -> impl Iterator<Item = usize> + '_ {
        self.governors
            .iter()
            .enumerate()
            .filter(move |(_, g)| **g == Governor::Token(pos))
            .map(|(i, _)| i + 1)
    }
}

/// Parse blank-line separated dependency sentences.
pub fn parse_conll_dep(text: &str) -> Result<Vec<(Sentence, DepGraph)>, FormatError> {
    let mut out = Vec::new();
    for block in split_blocks(text) {
        let mut forms = Vec::new();
        let mut governors = Vec::new();
        let mut labels = Vec::new();
        let mut lines = Vec::new();
        for &(line_no, line) in &block {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(FormatError::new(line_no, format!("expected 4 tab-separated columns, found {}", cols.len())));
            }
            let index: usize =
                cols[0].parse().map_err(|_| FormatError::new(line_no, format!("bad token index `{}`", cols[0])))?;
            let expected = forms.len() + 1;
            if index < expected {
                return Err(FormatError::new(line_no, format!("duplicate token index {index}")));
            }
            if index > expected {
                return Err(FormatError::new(line_no, format!("missing token index {expected}")));
            }
            let gov: usize =
                cols[2].parse().map_err(|_| FormatError::new(line_no, format!("bad governor index `{}`", cols[2])))?;
            forms.push(cols[1].to_string());
            governors.push(if gov == 0 { Governor::Root } else { Governor::Token(gov) });
            labels.push(cols[3].to_string());
            lines.push(line_no);
        }
        let sentence = Sentence::new(forms).map_err(|e| FormatError::new(block[0].0, e.to_string()))?;
        let last_line = *lines.last().expect("blocks are non-empty");
        let graph = DepGraph::new(governors, labels).map_err(|e| {
            let line = match &e {
                DepGraphError::EmptyLabel(t)
                | DepGraphError::GovernorOutOfRange { token: t, .. }
                | DepGraphError::Cycle(t)
                | DepGraphError::MultipleRoots { second: t, .. } => lines[t - 1],
                DepGraphError::NoRoot | DepGraphError::LengthMismatch => last_line,
            };
            FormatError::new(line, e.to_string())
        })?;
        out.push((sentence, graph));
    }
    Ok(out)
}

pub fn write_conll_dep(sentence: &Sentence, graph: &DepGraph) -> String {
    let mut out = String::new();
    for pos in 1..=graph.len() {
        let gov = match graph.governor(pos) {
            Governor::Root => 0,
            Governor::Token(h) => h,
        };
        let _ = writeln!(out, "{pos}\t{}\t{gov}\t{}", sentence.token(pos), graph.label(pos));
    }
    out
}
