//! The three syntactic encodings as word-aligned feature columns, and their
//! TSV renderings.
//!
//! Every TSV block is one sentence (one sentence/predicate pair for SRL-C),
//! one row per token, with the token in the first column; blocks end with a
//! blank line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::const_codec::{encode_full_c, normalize_unaries, DecodeMode, FullCLabel, FullCSeq, PAD_SYMBOL};
use crate::dep_codec::{encode_dep, DepFeatSeq};
use crate::pruner::{srl_c_features, PruneError, SrlCSeq};
use crate::treebank::{split_blocks, ConstTree, DepGraph, FormatError, Sentence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyntaxEncoding {
    #[serde(rename = "full-c")]
    FullC,
    #[serde(rename = "srl-c")]
    SrlC,
    #[serde(rename = "dep")]
    Dep,
}

impl SyntaxEncoding {
    pub const ALL: [SyntaxEncoding; 3] = [SyntaxEncoding::FullC, SyntaxEncoding::SrlC, SyntaxEncoding::Dep];

    /// Number of categorical features per word.
    pub fn feature_count(self) -> usize {
        match self {
            SyntaxEncoding::FullC => 2,
            SyntaxEncoding::SrlC => 1,
            SyntaxEncoding::Dep => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SyntaxEncoding::FullC => "full-c",
            SyntaxEncoding::SrlC => "srl-c",
            SyntaxEncoding::Dep => "dep",
        }
    }

    /// Display name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            SyntaxEncoding::FullC => "Full-C",
            SyntaxEncoding::SrlC => "SRL-C",
            SyntaxEncoding::Dep => "Dep",
        }
    }
}

impl fmt::Display for SyntaxEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntaxEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full-c" => Ok(SyntaxEncoding::FullC),
            "srl-c" => Ok(SyntaxEncoding::SrlC),
            "dep" => Ok(SyntaxEncoding::Dep),
            other => Err(format!("unknown syntax encoding `{other}` (expected full-c, srl-c or dep)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("{0} encoding needs a constituency tree")]
    MissingTree(SyntaxEncoding),
    #[error("dep encoding needs a dependency graph")]
    MissingDeps,
    #[error("syntax covers {found} tokens, sentence has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Prune(#[from] PruneError),
}

/// Feature columns, `columns[f][t]` for feature `f` at token `t`.
pub type Columns = Vec<Vec<String>>;

pub fn full_c_columns(seq: &FullCSeq) -> Columns {
    let (r, l) = seq.labels.iter().map(FullCLabel::columns).unzip();
    vec![r, l]
}

pub fn srl_c_columns(seq: &SrlCSeq) -> Columns {
    vec![seq.tags.iter().map(|t| t.to_string()).collect()]
}

pub fn dep_columns(seq: &DepFeatSeq) -> Columns {
    let mut cols = vec![Vec::new(); 5];
    for f in &seq.feats {
        for (col, v) in cols.iter_mut().zip(f.columns()) {
            col.push(v);
        }
    }
    cols
}

/// Word-level features of `encoding` for one sentence and predicate.
pub fn syntax_columns(
    encoding: SyntaxEncoding,
    len: usize,
    tree: Option<&ConstTree>,
    deps: Option<&DepGraph>,
    predicate: usize,
) -> Result<Columns, FeatureError> {
    let check = |found: usize| {
        if found == len {
            Ok(())
        } else {
            Err(FeatureError::LengthMismatch { expected: len, found })
        }
    };
    match encoding {
        SyntaxEncoding::FullC => {
            let tree = tree.ok_or(FeatureError::MissingTree(encoding))?;
            check(tree.len())?;
            Ok(full_c_columns(&encode_full_c(&normalize_unaries(tree))))
        }
        SyntaxEncoding::SrlC => {
            let tree = tree.ok_or(FeatureError::MissingTree(encoding))?;
            check(tree.len())?;
            Ok(srl_c_columns(&srl_c_features(tree, predicate)?))
        }
        SyntaxEncoding::Dep => {
            let deps = deps.ok_or(FeatureError::MissingDeps)?;
            check(deps.len())?;
            Ok(dep_columns(&encode_dep(deps)))
        }
    }
}

/// One TSV block: tokens plus the remaining columns of each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureBlock {
    pub line: usize,
    pub tokens: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl FeatureBlock {
    pub fn sentence(&self) -> Result<Sentence, FormatError> {
        Sentence::new(self.tokens.clone()).map_err(|e| FormatError::new(self.line, e.to_string()))
    }
}

pub fn write_block(out: &mut String, tokens: &[String], columns: &[&[String]]) {
    for (t, token) in tokens.iter().enumerate() {
        out.push_str(token);
        for col in columns {
            out.push('\t');
            out.push_str(&col[t]);
        }
        out.push('\n');
    }
    out.push('\n');
}

/// `token  r  l` rows, the last being `token  N  N`.
pub fn write_full_c_block(out: &mut String, sentence: &Sentence, seq: &FullCSeq) {
    let cols = full_c_columns(seq);
    write_block(out, sentence.tokens(), &[&cols[0], &cols[1]]);
}

/// `token  V|-  tag` rows for one predicate.
pub fn write_srl_c_block(out: &mut String, sentence: &Sentence, predicate: usize, seq: &SrlCSeq) {
    let marker: Vec<String> = (1..=sentence.len()).map(|p| if p == predicate { "V" } else { "-" }.to_string()).collect();
    let cols = srl_c_columns(seq);
    write_block(out, sentence.tokens(), &[&marker, &cols[0]]);
}

/// `token  left  right  rg  edge  dl` rows.
pub fn write_dep_block(out: &mut String, sentence: &Sentence, seq: &DepFeatSeq) {
    let cols = dep_columns(seq);
    let refs: Vec<&[String]> = cols.iter().map(Vec::as_slice).collect();
    write_block(out, sentence.tokens(), &refs);
}

/// Read tab-separated blocks; rows within a block must agree on width.
pub fn read_blocks(text: &str) -> Result<Vec<FeatureBlock>, FormatError> {
    read(text, true)
}

/// Like [`read_blocks`] but rows may have any number of columns.
pub fn read_blocks_ragged(text: &str) -> Vec<FeatureBlock> {
    read(text, false).expect("width is not checked")
}

fn read(text: &str, check_width: bool) -> Result<Vec<FeatureBlock>, FormatError> {
    split_blocks(text)
        .into_iter()
        .map(|block| {
            let width = block[0].1.split('\t').count();
            let mut tokens = Vec::with_capacity(block.len());
            let mut rows = Vec::with_capacity(block.len());
            for (line_no, line) in &block {
                let n = line.split('\t').count();
                if check_width && n != width {
                    return Err(FormatError::new(*line_no, format!("expected {width} columns, found {n}")));
                }
                let mut cols = line.split('\t');
                tokens.push(cols.next().unwrap_or_default().to_string());
                rows.push(cols.map(str::to_string).collect());
            }
            Ok(FeatureBlock { line: block[0].0, tokens, rows })
        })
        .collect()
}

/// Interpret a block's first two value columns as Full-C labels.
///
/// Strict mode requires integer `r` values and `N N` exactly on the last
/// row. Lenient mode reads anything unparsable as `r = 0` with no label.
pub fn full_c_from_block(block: &FeatureBlock, mode: DecodeMode) -> Result<FullCSeq, FormatError> {
    let n = block.rows.len();
    let mut labels = Vec::with_capacity(n);
    for (i, row) in block.rows.iter().enumerate() {
        let line = block.line + i;
        let r = row.first().map(String::as_str).unwrap_or("");
        let l = row.get(1).map(String::as_str).unwrap_or("");
        let label = match mode {
            DecodeMode::Strict => {
                if row.len() != 2 {
                    return Err(FormatError::new(line, format!("expected `token r l`, found {} columns", row.len() + 1)));
                }
                if r == PAD_SYMBOL && l == PAD_SYMBOL {
                    FullCLabel::Pad
                } else {
                    let r: i32 = r.parse().map_err(|_| FormatError::new(line, format!("bad r value `{r}`")))?;
                    if l.is_empty() {
                        return Err(FormatError::new(line, "empty label"));
                    }
                    FullCLabel::pair(r, l)
                }
            }
            DecodeMode::Lenient => {
                if r == PAD_SYMBOL && i + 1 == n {
                    FullCLabel::Pad
                } else {
                    let label = if l == PAD_SYMBOL { "" } else { l };
                    FullCLabel::pair(r.parse().unwrap_or(0), label)
                }
            }
        };
        labels.push(label);
    }
    Ok(FullCSeq { labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{parse_conll_dep, parse_ptb};

    #[test]
    fn full_c_tsv() {
        let (s, t) = parse_ptb("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))").unwrap().pop().unwrap();
        let mut out = String::new();
        write_full_c_block(&mut out, &s, &encode_full_c(&t));
        assert_eq!(out, "the\t2\tNP\ndog\t-1\tS\nbarks\tN\tN\n\n");
        let blocks = read_blocks(&out).unwrap();
        let seq = full_c_from_block(&blocks[0], DecodeMode::Strict).unwrap();
        assert_eq!(seq, encode_full_c(&t));
    }

    #[test]
    fn lenient_block_reading() {
        let blocks = read_blocks("a\tfoo\tS\nb\t3\tN\nc\tN\tN\n").unwrap();
        assert!(full_c_from_block(&blocks[0], DecodeMode::Strict).is_err());
        let seq = full_c_from_block(&blocks[0], DecodeMode::Lenient).unwrap();
        assert_eq!(seq.labels, [FullCLabel::pair(0, "S"), FullCLabel::pair(3, ""), FullCLabel::Pad]);
    }

    #[test]
    fn column_counts_match_encoding() {
        let (_, t) = parse_ptb("(S (NP (NN a)) (VP (VB b) (NP (NN c))))").unwrap().pop().unwrap();
        let (_, g) = parse_conll_dep("1\ta\t2\tnsubj\n2\tb\t0\troot\n3\tc\t2\tobj\n").unwrap().pop().unwrap();
        for enc in SyntaxEncoding::ALL {
            let cols = syntax_columns(enc, 3, Some(&t), Some(&g), 2).unwrap();
            assert_eq!(cols.len(), enc.feature_count());
            assert!(cols.iter().all(|c| c.len() == 3));
        }
        assert_eq!(syntax_columns(SyntaxEncoding::Dep, 3, Some(&t), None, 2), Err(FeatureError::MissingDeps));
        assert!(matches!(
            syntax_columns(SyntaxEncoding::SrlC, 4, Some(&t), None, 2),
            Err(FeatureError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn encoding_names_round_trip() {
        for enc in SyntaxEncoding::ALL {
            assert_eq!(enc.name().parse::<SyntaxEncoding>().unwrap(), enc);
        }
        assert!("x".parse::<SyntaxEncoding>().is_err());
    }
}
