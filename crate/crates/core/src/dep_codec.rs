//! Per-word dependency features: dependent counts on each side, edge
//! position among the governor's dependents, signed distance to the
//! governor, and the relation label.

use std::fmt;

use crate::treebank::{DepGraph, Governor};

pub const ROOT_LABEL: &str = "root";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    /// Leftmost dependent, on the governor's left.
    L,
    /// Rightmost dependent, on the governor's right.
    R,
    N,
}

impl Edge {
    pub fn as_str(self) -> &'static str {
        match self {
            Edge::L => "L",
            Edge::R => "R",
            Edge::N => "N",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "L" => Some(Edge::L),
            "R" => Some(Edge::R),
            "N" => Some(Edge::N),
            _ => None,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepFeats {
    pub left: usize,
    pub right: usize,
    pub rg: i64,
    pub edge: Edge,
    pub dl: String,
}

impl DepFeats {
    /// The five feature values as text, in `left right rg edge dl` order.
    pub fn columns(&self) -> [String; 5] {
        [self.left.to_string(), self.right.to_string(), self.rg.to_string(), self.edge.to_string(), self.dl.clone()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepFeatSeq {
    pub feats: Vec<DepFeats>,
}

/// Extract the features of every word.
///
/// The root word gets `rg` equal to its own position, edge `R` and label
/// `root`, whatever label the input carried.
pub fn encode_dep(graph: &DepGraph) -> DepFeatSeq {
    let n = graph.len();
    let mut left = vec![0usize; n + 1];
    let mut right = vec![0usize; n + 1];
    let mut first_dep = vec![usize::MAX; n + 1];
    let mut last_dep = vec![0usize; n + 1];
    for pos in 1..=n {
        if let Governor::Token(g) = graph.governor(pos) {
            if pos < g {
                left[g] += 1;
            } else {
                right[g] += 1;
            }
            first_dep[g] = first_dep[g].min(pos);
            last_dep[g] = last_dep[g].max(pos);
        }
    }
    let feats = (1..=n)
        .map(|pos| {
            let (rg, edge, dl) = match graph.governor(pos) {
                Governor::Root => (pos as i64, Edge::R, ROOT_LABEL.to_string()),
                Governor::Token(g) => {
                    let edge = if pos < g && first_dep[g] == pos {
                        Edge::L
                    } else if pos > g && last_dep[g] == pos {
                        Edge::R
                    } else {
                        Edge::N
                    };
                    (g as i64 - pos as i64, edge, graph.label(pos).to_string())
                }
            };
            DepFeats { left: left[pos], right: right[pos], rg, edge, dl }
        })
        .collect();
    DepFeatSeq { feats }
}
