//! Full constituency encoding: one `(r, l)` pair per adjacent word pair.
//!
//! For words `w_i, w_{i+1}`, `n_i` is the number of phrasal ancestors they
//! share and `l_i` the label of their lowest common ancestor. The encoding
//! stores the relative value `r_i = n_i - n_{i-1}` (with `n_0 = 0`) on word
//! `i` and a padding symbol on the last word. POS pre-terminals are not
//! counted as ancestors and are not recoverable from the encoding.

use std::fmt;

use thiserror::Error;

use crate::treebank::{Bracket, ConstTree, NodeId, NodeKind, Sentence, TreeError};

/// Label emitted for pre-terminals by the decoder.
pub const POS_PLACEHOLDER: &str = "XX";
/// Label for nodes the lenient decoder could not name, and for the root of a
/// one-word sentence.
pub const UNKNOWN_LABEL: &str = "X";
/// Padding symbol in the text formats.
pub const PAD_SYMBOL: &str = "N";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FullCLabel {
    Pad,
    Pair { r: i32, label: String },
}

impl FullCLabel {
    pub fn pair(r: i32, label: impl Into<String>) -> Self {
        FullCLabel::Pair { r, label: label.into() }
    }

    /// `(r, l)` as text columns; padding renders as `N N`.
    pub fn columns(&self) -> (String, String) {
        match self {
            FullCLabel::Pad => (PAD_SYMBOL.to_string(), PAD_SYMBOL.to_string()),
            FullCLabel::Pair { r, label } => (r.to_string(), label.clone()),
        }
    }
}

impl fmt::Display for FullCLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, l) = self.columns();
        write!(f, "({r}, {l})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FullCSeq {
    pub labels: Vec<FullCLabel>,
}

impl FullCSeq {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Running sums of `r`, i.e. the absolute common-ancestor counts, for
    /// the non-padding prefix.
    pub fn absolute_depths(&self) -> Vec<i64> {
        let mut sum = 0i64;
        self.labels
            .iter()
            .map_while(|l| match l {
                FullCLabel::Pair { r, .. } => {
                    sum += i64::from(*r);
                    Some(sum)
                }
                FullCLabel::Pad => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("sequence has {seq} labels but the sentence has {sentence} tokens")]
    LengthMismatch { seq: usize, sentence: usize },
    #[error("position {0}: common-ancestor count drops below 1")]
    DepthUnderflow(usize),
    #[error("position {position}: node already labelled `{existing}`, got `{found}`")]
    LabelConflict { position: usize, existing: String, found: String },
    #[error("position {0}: a constituent closes without ever being labelled")]
    UnlabelledNode(usize),
    #[error("position {0}: padding is only allowed on the last word")]
    MisplacedPad(usize),
    #[error("position {0}: the last word must carry the padding symbol")]
    MissingPad(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Collapse chains of phrases whose only child is a phrase into a single
/// node labelled `top+...+bottom`.
pub fn normalize_unaries(tree: &ConstTree) -> ConstTree {
    ConstTree::from_bracket(&collapse(tree.to_bracket())).expect("collapsing keeps a valid tree")
}

fn collapse(bracket: Bracket) -> Bracket {
    match bracket {
        Bracket::Word { .. } => bracket,
        Bracket::Phrase { mut label, mut children } => {
            while children.len() == 1 && matches!(children[0], Bracket::Phrase { .. }) {
                let Some(Bracket::Phrase { label: inner, children: grand }) = children.pop() else { unreachable!() };
                label.push('+');
                label.push_str(&inner);
                children = grand;
            }
            Bracket::Phrase { label, children: children.into_iter().map(collapse).collect() }
        }
    }
}

/// The part of a unary-normalized tree that the encoding determines: phrases
/// spanning a single word fold into their pre-terminal, every pre-terminal is
/// relabelled `XX`, and a one-word sentence becomes `(X w)`.
///
/// `decode_full_c(encode_full_c(t))` equals `skeleton(t)` for every
/// unary-normalized `t`.
pub fn skeleton(tree: &ConstTree) -> ConstTree {
    let sentence = tree.sentence();
    if sentence.len() == 1 {
        return ConstTree::from_bracket(&Bracket::word(UNKNOWN_LABEL, sentence.token(1))).expect("valid");
    }
    ConstTree::from_bracket(&skeleton_at(tree, tree.root())).expect("skeleton keeps a valid tree")
}

fn skeleton_at(tree: &ConstTree, id: NodeId) -> Bracket {
    let node = tree.node(id);
    match node.kind() {
        NodeKind::Word { word, .. } => Bracket::word(POS_PLACEHOLDER, word.clone()),
        NodeKind::Phrase(_) if node.span().len() == 1 => {
            let pos = node.span().start;
            Bracket::word(POS_PLACEHOLDER, tree.sentence().token(pos))
        }
        NodeKind::Phrase(children) => {
            Bracket::phrase(node.label(), children.iter().map(|&c| skeleton_at(tree, c)).collect())
        }
    }
}

/// Phrasal ancestors of each word, root first.
fn phrase_paths(tree: &ConstTree) -> Vec<Vec<NodeId>> {
    (1..=tree.len())
        .map(|pos| {
            let mut path: Vec<NodeId> = tree.ancestors(tree.preterminal(pos)).collect();
            path.reverse();
            path
        })
        .collect()
}

/// Encode a unary-normalized tree.
pub fn encode_full_c(tree: &ConstTree) -> FullCSeq {
    let paths = phrase_paths(tree);
    let mut labels = Vec::with_capacity(tree.len());
    let mut prev = 0i32;
    for pair in paths.windows(2) {
        let shared = pair[0].iter().zip(&pair[1]).take_while(|(a, b)| a == b).count();
        let lca = pair[0][shared - 1];
        let shared = shared as i32;
        labels.push(FullCLabel::pair(shared - prev, tree.node(lca).label()));
        prev = shared;
    }
    labels.push(FullCLabel::Pad);
    FullCSeq { labels }
}

struct OpenNode {
    label: Option<String>,
    children: Vec<Bracket>,
}

/// Rebuild a tree from its encoding.
///
/// Strict mode rejects sequences that no tree produces. Lenient mode clamps
/// running depths to at least 1, names unlabelled nodes `X`, keeps the first
/// label on conflicts, and treats interior padding as `r = 0` without a label.
pub fn decode_full_c(seq: &FullCSeq, sentence: &Sentence, mode: DecodeMode) -> Result<ConstTree, DecodeError> {
    let n = sentence.len();
    if seq.len() != n {
        return Err(DecodeError::LengthMismatch { seq: seq.len(), sentence: n });
    }
    let strict = mode == DecodeMode::Strict;
    if strict && seq.labels[n - 1] != FullCLabel::Pad {
        return Err(DecodeError::MissingPad(n));
    }
    if n == 1 {
        return Ok(ConstTree::from_bracket(&Bracket::word(UNKNOWN_LABEL, sentence.token(1)))?);
    }

    let close = |node: OpenNode, position: usize| -> Result<Bracket, DecodeError> {
        let label = match node.label {
            Some(l) => l,
            None if strict => return Err(DecodeError::UnlabelledNode(position)),
            None => UNKNOWN_LABEL.to_string(),
        };
        Ok(Bracket::Phrase { label, children: node.children })
    };

    let mut path: Vec<OpenNode> = Vec::new();
    let mut prev: i64 = 0;
    for pos in 1..n {
        let (r, label) = match &seq.labels[pos - 1] {
            FullCLabel::Pair { r, label } => (i64::from(*r), Some(label.as_str()).filter(|l| !l.is_empty())),
            FullCLabel::Pad if strict => return Err(DecodeError::MisplacedPad(pos)),
            FullCLabel::Pad => (0, None),
        };
        let mut depth = prev + r;
        if depth < 1 {
            if strict {
                return Err(DecodeError::DepthUnderflow(pos));
            }
            depth = 1;
        }
        let depth = depth as usize;
        while path.len() < depth {
            path.push(OpenNode { label: None, children: Vec::new() });
        }
        path.last_mut().expect("depth >= 1").children.push(Bracket::word(POS_PLACEHOLDER, sentence.token(pos)));

        let target = &mut path[depth - 1];
        match (&target.label, label) {
            (None, Some(l)) => target.label = Some(l.to_string()),
            (Some(existing), Some(l)) if existing != l && strict => {
                return Err(DecodeError::LabelConflict {
                    position: pos,
                    existing: existing.clone(),
                    found: l.to_string(),
                })
            }
            _ => {}
        }
        while path.len() > depth {
            let node = path.pop().expect("non-empty");
            let bracket = close(node, pos)?;
            path.last_mut().expect("depth >= 1").children.push(bracket);
        }
        prev = depth as i64;
    }

    path.last_mut().expect("n >= 2 opens a root").children.push(Bracket::word(POS_PLACEHOLDER, sentence.token(n)));
    let mut done: Option<Bracket> = None;
    while let Some(mut node) = path.pop() {
        if let Some(child) = done.take() {
            node.children.push(child);
        }
        done = Some(close(node, n)?);
    }
    Ok(ConstTree::from_bracket(&done.expect("root exists"))?)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::treebank::{parse_ptb, write_ptb};

    fn tree(text: &str) -> ConstTree {
        parse_ptb(text).unwrap().pop().unwrap().1
    }

    /// Independent oracle: intersect explicit ancestor sets and pick the
    /// shared ancestor with the smallest span.
    fn oracle(t: &ConstTree) -> Vec<FullCLabel> {
        let anc: Vec<HashSet<NodeId>> = (1..=t.len()).map(|p| t.ancestors(t.preterminal(p)).collect()).collect();
        let mut prev = 0i32;
        let mut out = Vec::new();
        for i in 0..t.len().saturating_sub(1) {
            let common: Vec<NodeId> = anc[i].intersection(&anc[i + 1]).copied().collect();
            let lca = *common.iter().min_by_key(|id| t.node(**id).span().len()).unwrap();
            let count = common.len() as i32;
            out.push(FullCLabel::pair(count - prev, t.node(lca).label()));
            prev = count;
        }
        out.push(FullCLabel::Pad);
        out
    }

    #[test]
    fn encodes_dog_example() {
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        let seq = encode_full_c(&t);
        assert_eq!(seq.labels, [FullCLabel::pair(2, "NP"), FullCLabel::pair(-1, "S"), FullCLabel::Pad]);
        assert_eq!(seq.labels, oracle(&t));
        assert_eq!(seq.absolute_depths(), [2, 1]);
    }

    #[test]
    fn single_word_is_pad() {
        let t = tree("(S+VP (VB Go))");
        assert_eq!(encode_full_c(&t).labels, [FullCLabel::Pad]);
        let s = t.sentence();
        let d = decode_full_c(&encode_full_c(&t), &s, DecodeMode::Strict).unwrap();
        assert_eq!(write_ptb(&d), "(X Go)");
    }

    #[test]
    fn right_branching_chain() {
        for depth in 2..8 {
            let labels: Vec<String> = (0..depth).map(|d| format!("C{d}")).collect();
            let mut b = Bracket::phrase(labels[depth - 1].clone(), vec![
                Bracket::word("T", format!("w{}", depth)),
                Bracket::word("T", format!("w{}", depth + 1)),
            ]);
            for d in (0..depth - 1).rev() {
                b = Bracket::phrase(labels[d].clone(), vec![Bracket::word("T", format!("w{}", d + 1)), b]);
            }
            let t = ConstTree::from_bracket(&b).unwrap();
            let seq = encode_full_c(&t);
            assert_eq!(seq.labels, oracle(&t));
            for (i, l) in seq.labels[..depth].iter().enumerate() {
                assert_eq!(l, &FullCLabel::pair(1, labels[i].clone()));
            }
            assert_eq!(decode_full_c(&seq, &t.sentence(), DecodeMode::Strict).unwrap(), skeleton(&t));
        }
    }

    #[test]
    fn decodes_dog_example() {
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        let seq = FullCSeq { labels: vec![FullCLabel::pair(2, "NP"), FullCLabel::pair(-1, "S"), FullCLabel::Pad] };
        let d = decode_full_c(&seq, &t.sentence(), DecodeMode::Strict).unwrap();
        assert_eq!(write_ptb(&d), "(S (NP (XX the) (XX dog)) (XX barks))");
        assert_eq!(d, skeleton(&t));
    }

    #[test]
    fn strict_underflow() {
        let s = Sentence::new(["a", "b"]).unwrap();
        let seq = FullCSeq { labels: vec![FullCLabel::pair(-3, "S"), FullCLabel::Pad] };
        assert_eq!(decode_full_c(&seq, &s, DecodeMode::Strict), Err(DecodeError::DepthUnderflow(1)));
        let lenient = decode_full_c(&seq, &s, DecodeMode::Lenient).unwrap();
        assert_eq!(write_ptb(&lenient), "(S (XX a) (XX b))");
    }

    #[test]
    fn strict_conflicts_and_unlabelled() {
        let s = Sentence::new(["a", "b", "c", "d"]).unwrap();
        // root labelled S at position 1 then T at position 3
        let seq = FullCSeq {
            labels: vec![FullCLabel::pair(1, "S"), FullCLabel::pair(1, "NP"), FullCLabel::pair(-1, "T"), FullCLabel::Pad],
        };
        assert!(matches!(decode_full_c(&seq, &s, DecodeMode::Strict), Err(DecodeError::LabelConflict { position: 3, .. })));
        // jump of 3 leaves depth 2 without a label
        let seq = FullCSeq {
            labels: vec![FullCLabel::pair(3, "A"), FullCLabel::pair(-2, "S"), FullCLabel::pair(0, "S"), FullCLabel::Pad],
        };
        assert_eq!(decode_full_c(&seq, &s, DecodeMode::Strict), Err(DecodeError::UnlabelledNode(2)));
        let lenient = decode_full_c(&seq, &s, DecodeMode::Lenient).unwrap();
        assert_eq!(write_ptb(&lenient), "(S (X (A (XX a) (XX b))) (XX c) (XX d))");
    }

    #[test]
    fn pad_placement() {
        let s = Sentence::new(["a", "b"]).unwrap();
        let seq = FullCSeq { labels: vec![FullCLabel::Pad, FullCLabel::Pad] };
        assert_eq!(decode_full_c(&seq, &s, DecodeMode::Strict), Err(DecodeError::MisplacedPad(1)));
        assert_eq!(write_ptb(&decode_full_c(&seq, &s, DecodeMode::Lenient).unwrap()), "(X (XX a) (XX b))");
        let seq = FullCSeq { labels: vec![FullCLabel::pair(1, "S"), FullCLabel::pair(0, "S")] };
        assert_eq!(decode_full_c(&seq, &s, DecodeMode::Strict), Err(DecodeError::MissingPad(2)));
    }

    #[test]
    fn normalize_collapses_chains() {
        let t = tree("(S (VP (VB go) (NP (NN home))))");
        assert_eq!(write_ptb(&normalize_unaries(&t)), "(S+VP (VB go) (NP (NN home)))");
        let t = tree("(A (B (C (D x) (E y))))");
        assert_eq!(write_ptb(&normalize_unaries(&t)), "(A+B+C (D x) (E y))");
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        assert_eq!(normalize_unaries(&t), t);
    }

    #[test]
    fn round_trip_with_nested_structure() {
        let t = normalize_unaries(&tree(
            "(S (NP (NP (DT the) (NN seeds)) (PP (IN of) (NP (NN doubt)))) (VP (VBD were) (VP (VBN sown) (ADVP (RB early)))) (. .))",
        ));
        let seq = encode_full_c(&t);
        assert_eq!(seq.labels, oracle(&t));
        let d = decode_full_c(&seq, &t.sentence(), DecodeMode::Strict).unwrap();
        assert_eq!(d, skeleton(&t));
    }
}
