//! Argument-candidate pruning and the SRL-C word tagging.
//!
//! Starting at the predicate's pre-terminal, the walk climbs to the root and
//! collects the sisters of each node on the way. Prepositional phrases
//! contribute their immediate children as extra candidates. The candidates
//! are then projected onto the words as `B`/`I`/`O`/`A` tags, `A` marking
//! words inside a PP candidate.

use std::fmt;

use thiserror::Error;

use crate::treebank::{ConstTree, NodeId, SrlFrame, Span};

const COORD: &str = "CC";
const PREP_PHRASE: &str = "PP";
const PUNCT_TAGS: [&str; 5] = [",", ".", ":", "''", "``"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub node: NodeId,
    pub span: Span,
    pub label: String,
}

/// Candidates in extraction order, plus the number of climbing steps taken.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateList {
    pub candidates: Vec<Candidate>,
    pub steps: usize,
}

impl CandidateList {
    pub fn spans(&self) -> impl Iterator<Item = Span> + '_ {
        self.candidates.iter().map(|c| c.span)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("predicate {predicate} outside sentence of length {len}")]
    PredicateOutOfRange { predicate: usize, len: usize },
}

fn is_punctuation(tree: &ConstTree, id: NodeId) -> bool {
    let node = tree.node(id);
    node.is_preterminal()
        && (PUNCT_TAGS.contains(&node.label()) || node.label().chars().all(|c| c.is_ascii_punctuation()))
}

/// Collect argument candidates for the predicate at `predicate` (1-based).
pub fn prune_xue_palmer(tree: &ConstTree, predicate: usize) -> Result<CandidateList, PruneError> {
    if predicate == 0 || predicate > tree.len() {
        return Err(PruneError::PredicateOutOfRange { predicate, len: tree.len() });
    }
    let mut out = CandidateList::default();
    let mut current = tree.preterminal(predicate);
    while let Some(parent) = tree.node(current).parent() {
        out.steps += 1;
        let siblings = tree.node(parent).children();
        let here = siblings.iter().position(|&c| c == current).expect("child of its parent");
        let current_label = tree.node(current).label();
        for (k, &sister) in siblings.iter().enumerate() {
            if k == here {
                continue;
            }
            let node = tree.node(sister);
            if node.label() == COORD || is_punctuation(tree, sister) {
                continue;
            }
            let (lo, hi) = if k < here { (k, here) } else { (here, k) };
            let coordinated =
                node.label() == current_label && siblings[lo + 1..hi].iter().any(|&c| tree.node(c).label() == COORD);
            if coordinated {
                continue;
            }
            out.candidates.push(Candidate { node: sister, span: node.span(), label: node.label().to_string() });
            if node.label() == PREP_PHRASE {
                for &child in node.children() {
                    let c = tree.node(child);
                    out.candidates.push(Candidate { node: child, span: c.span(), label: c.label().to_string() });
                }
            }
        }
        current = parent;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SrlCTag {
    B,
    I,
    O,
    A,
}

impl SrlCTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SrlCTag::B => "B",
            SrlCTag::I => "I",
            SrlCTag::O => "O",
            SrlCTag::A => "A",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "B" => Some(SrlCTag::B),
            "I" => Some(SrlCTag::I),
            "O" => Some(SrlCTag::O),
            "A" => Some(SrlCTag::A),
            _ => None,
        }
    }
}

impl fmt::Display for SrlCTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SrlCSeq {
    pub tags: Vec<SrlCTag>,
}

impl SrlCSeq {
    /// Every `I`/`A` continues a run that a `B` opened.
    pub fn is_well_formed(&self) -> bool {
        let mut inside = false;
        for t in &self.tags {
            match t {
                SrlCTag::B => inside = true,
                SrlCTag::O => inside = false,
                SrlCTag::I | SrlCTag::A if !inside => return false,
                _ => {}
            }
        }
        true
    }
}

/// Project candidates onto words, innermost (shortest) candidates first;
/// ties keep extraction order and tags are never overwritten.
pub fn tag_srl_c(len: usize, candidates: &CandidateList) -> SrlCSeq {
    let mut tags = vec![SrlCTag::O; len];
    let mut order: Vec<&Candidate> = candidates.candidates.iter().collect();
    order.sort_by_key(|c| c.span.len());
    for cand in order {
        let inner = if cand.label == PREP_PHRASE { SrlCTag::A } else { SrlCTag::I };
        let mut first = true;
        for pos in cand.span.start..=cand.span.end {
            if tags[pos - 1] != SrlCTag::O {
                continue;
            }
            tags[pos - 1] = if first { SrlCTag::B } else { inner };
            first = false;
        }
    }
    SrlCSeq { tags }
}

/// Pruning candidates and SRL-C tags for one predicate.
pub fn srl_c_features(tree: &ConstTree, predicate: usize) -> Result<SrlCSeq, PruneError> {
    Ok(tag_srl_c(tree.len(), &prune_xue_palmer(tree, predicate)?))
}

/// Fraction of gold argument spans that exactly match a candidate span.
/// With no gold arguments the recall is 1.
pub fn pruning_recall<'a, I>(pairs: I) -> f64
where
    I: IntoIterator<Item = (&'a CandidateList, &'a SrlFrame)>,
{
    let mut gold = 0usize;
    let mut kept = 0usize;
    for (cands, frame) in pairs {
        for arg in frame.args() {
            gold += 1;
            if cands.spans().any(|s| s == arg.span) {
                kept += 1;
            }
        }
    }
    if gold == 0 {
        1.0
    } else {
        kept as f64 / gold as f64
    }
}
