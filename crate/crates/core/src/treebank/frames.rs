//! SRL frames and the column-per-predicate BIO interchange format.
//!
//! Each line is `token  marker  tag_1 ... tag_k` where `marker` is `V` on
//! predicate tokens and `-` elsewhere, and column `j` holds the BIO tags of
//! the `j`-th predicate. Spans labelled `V` mark the predicate itself and
//! are not arguments.

use std::fmt::Write as _;

use super::tree::{Sentence, Span};
use super::{split_blocks, FormatError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Argument {
    pub label: String,
    pub span: Span,
}

impl Argument {
    pub fn new(label: impl Into<String>, start: usize, end: usize) -> Self {
        Argument { label: label.into(), span: Span::new(start, end) }
    }
}

/// A predicate with its labelled, non-overlapping argument spans.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SrlFrame {
    predicate: usize,
    args: Vec<Argument>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("predicate {predicate} outside sentence of length {len}")]
    PredicateOutOfRange { predicate: usize, len: usize },
    #[error("argument {0} lies outside the sentence")]
    ArgOutOfRange(Span),
    #[error("arguments {0} and {1} overlap")]
    Overlap(Span, Span),
    #[error("argument {0} contains the predicate")]
    CoversPredicate(Span),
    #[error("argument at {0} has an empty label")]
    EmptyLabel(Span),
}

impl SrlFrame {
    /// Validate and build a frame; arguments are stored sorted by position.
    pub fn new(predicate: usize, mut args: Vec<Argument>, len: usize) -> Result<Self, FrameError> {
        if predicate == 0 || predicate > len {
            return Err(FrameError::PredicateOutOfRange { predicate, len });
        }
        args.sort_by_key(|a| a.span);
        for a in &args {
            if a.span.start == 0 || a.span.start > a.span.end || a.span.end > len {
                return Err(FrameError::ArgOutOfRange(a.span));
            }
            if a.label.is_empty() {
                return Err(FrameError::EmptyLabel(a.span));
            }
            if a.span.contains(predicate) {
                return Err(FrameError::CoversPredicate(a.span));
            }
        }
        for w in args.windows(2) {
            if w[0].span.overlaps(&w[1].span) {
                return Err(FrameError::Overlap(w[0].span, w[1].span));
            }
        }
        Ok(SrlFrame { predicate, args })
    }

    pub fn predicate(&self) -> usize {
        self.predicate
    }

    pub fn args(&self) -> &[Argument] {
        &self.args
    }

    /// BIO tags for this frame over a sentence of length `len`; the
    /// predicate position is tagged `O`.
    pub fn to_bio(&self, len: usize) -> Vec<String> {
        let mut tags = vec!["O".to_string(); len];
        for a in &self.args {
            tags[a.span.start - 1] = format!("B-{}", a.label);
            for t in &mut tags[a.span.start..a.span.end] {
                *t = format!("I-{}", a.label);
            }
        }
        tags
    }
}

/// Split a BIO tag into its prefix and label.
fn split_tag(tag: &str) -> Option<(char, &str)> {
    if tag == "O" {
        return Some(('O', ""));
    }
    let (prefix, label) = tag.split_once('-')?;
    match prefix {
        "B" | "I" if !label.is_empty() => Some((prefix.chars().next().unwrap(), label)),
        _ => None,
    }
}

/// Strict BIO reading. Returns `Err((position, message))` with a 1-based
/// position on malformed input.
pub fn bio_to_spans<S: AsRef<str>>(tags: &[S]) -> Result<Vec<Argument>, (usize, String)> {
    let mut spans: Vec<Argument> = Vec::new();
    let mut open: Option<&str> = None;
    for (i, tag) in tags.iter().enumerate() {
        let tag = tag.as_ref();
        let pos = i + 1;
        match split_tag(tag) {
            Some(('O', _)) => open = None,
            Some(('B', label)) => {
                spans.push(Argument::new(label, pos, pos));
                open = Some(label);
            }
            Some(('I', label)) => match open {
                Some(prev) if prev == label => spans.last_mut().expect("open span exists").span.end = pos,
                _ => return Err((pos, format!("`{tag}` does not continue a `{label}` span"))),
            },
            _ => return Err((pos, format!("malformed BIO tag `{tag}`"))),
        }
    }
    Ok(spans)
}

/// Lenient BIO reading for model output: an orphan `I-X` opens a new span
/// and unknown tags read as `O`.
pub fn bio_to_spans_lenient<S: AsRef<str>>(tags: &[S]) -> Vec<Argument> {
    let mut spans: Vec<Argument> = Vec::new();
    let mut open: Option<String> = None;
    for (i, tag) in tags.iter().enumerate() {
        let pos = i + 1;
        match split_tag(tag.as_ref()) {
            Some(('B', label)) => {
                spans.push(Argument::new(label, pos, pos));
                open = Some(label.to_string());
            }
            Some(('I', label)) => {
                if open.as_deref() == Some(label) {
                    spans.last_mut().expect("open span exists").span.end = pos;
                } else {
                    spans.push(Argument::new(label, pos, pos));
                    open = Some(label.to_string());
                }
            }
            _ => open = None,
        }
    }
    spans
}

/// Parse sentences annotated with one BIO column per predicate.
pub fn parse_frames(text: &str) -> Result<Vec<(Sentence, Vec<SrlFrame>)>, FormatError> {
    let mut out = Vec::new();
    for block in split_blocks(text) {
        let width = block[0].1.split('\t').count();
        let mut tokens = Vec::new();
        let mut predicates = Vec::new();
        let mut columns: Vec<Vec<&str>> = Vec::new();
        for &(line_no, line) in &block {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != width {
                return Err(FormatError::new(
                    line_no,
                    format!("expected {width} columns as on the sentence's first line, found {}", cols.len()),
                ));
            }
            if width < 2 {
                return Err(FormatError::new(line_no, "expected at least token and predicate-marker columns"));
            }
            match cols[1] {
                "V" => predicates.push((tokens.len() + 1, line_no)),
                "-" => {}
                other => return Err(FormatError::new(line_no, format!("predicate marker must be `V` or `-`, found `{other}`"))),
            }
            tokens.push(cols[0].to_string());
            columns.push(cols[2..].to_vec());
        }
        let first_line = block[0].0;
        if predicates.len() != width - 2 {
            return Err(FormatError::new(
                first_line,
                format!("{} predicate markers but {} tag columns", predicates.len(), width - 2),
            ));
        }
        let sentence = Sentence::new(tokens).map_err(|e| FormatError::new(first_line, e.to_string()))?;
        let mut frames = Vec::with_capacity(predicates.len());
        for (j, &(predicate, pred_line)) in predicates.iter().enumerate() {
            let tags: Vec<&str> = columns.iter().map(|c| c[j]).collect();
            let spans = bio_to_spans(&tags).map_err(|(pos, msg)| FormatError::new(block[pos - 1].0, msg))?;
            let args = spans.into_iter().filter(|a| a.label != "V").collect();
            let frame = SrlFrame::new(predicate, args, sentence.len())
                .map_err(|e| FormatError::new(pred_line, e.to_string()))?;
            frames.push(frame);
        }
        out.push((sentence, frames));
    }
    Ok(out)
}

/// Render one sentence block (without the trailing blank line).
pub fn write_frames(sentence: &Sentence, frames: &[SrlFrame]) -> String {
    let mut by_pred: Vec<&SrlFrame> = frames.iter().collect();
    by_pred.sort_by_key(|f| f.predicate());
    let columns: Vec<Vec<String>> = by_pred.iter().map(|f| f.to_bio(sentence.len())).collect();
    let mut out = String::new();
    for pos in 1..=sentence.len() {
        let marker = if by_pred.iter().any(|f| f.predicate() == pos) { "V" } else { "-" };
        let _ = write!(out, "{}\t{marker}", sentence.token(pos));
        for col in &columns {
            let _ = write!(out, "\t{}", col[pos - 1]);
        }
        out.push('\n');
    }
    out
}
