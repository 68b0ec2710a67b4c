//! Penn Treebank bracketed trees.

use super::tree::{Bracket, ConstTree, NodeKind, Sentence};
use super::PtbError;

const TRACE_LABEL: &str = "-NONE-";
const KEEP_LABELS: [&str; 3] = ["-NONE-", "-LRB-", "-RRB-"];

#[derive(Debug, Clone, Copy)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn tokenize(text: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                toks.push(Tok::Open(i));
                i += 1;
            }
            b')' => {
                toks.push(Tok::Close(i));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                toks.push(Tok::Atom(start, &text[start..i]));
            }
        }
    }
    toks
}

/// Strip functional tags and coindexation (`NP-SBJ-1` → `NP`, `NP=2` → `NP`).
pub fn strip_function_tags(label: &str) -> &str {
    if KEEP_LABELS.contains(&label) {
        return label;
    }
    match label.char_indices().skip(1).find(|&(_, c)| c == '-' || c == '=') {
        Some((idx, _)) => &label[..idx],
        None => label,
    }
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    /// Parse one parenthesised node. `None` means the node vanished after
    /// trace removal.
    fn node(&mut self, top_level: bool) -> Result<Option<Bracket>, PtbError> {
        let open = match self.peek() {
            Some(Tok::Open(off)) => off,
            _ => unreachable!("caller checks for an opening parenthesis"),
        };
        self.pos += 1;

        let label = match self.peek() {
            Some(Tok::Atom(_, a)) => {
                self.pos += 1;
                Some(a)
            }
            _ => None,
        };

        let mut subtrees = Vec::new();
        let mut words: Vec<(usize, &str)> = Vec::new();
        let mut had_subtree = false;
        loop {
            match self.peek() {
                None => return Err(PtbError::Unbalanced(open)),
                Some(Tok::Close(_)) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Open(_)) => {
                    had_subtree = true;
                    if let Some(child) = self.node(false)? {
                        subtrees.push(child);
                    }
                }
                Some(Tok::Atom(off, a)) => {
                    words.push((off, a));
                    self.pos += 1;
                }
            }
        }

        let Some(label) = label else {
            if top_level && words.is_empty() && (subtrees.len() == 1 || !had_subtree) {
                return match subtrees.pop() {
                    Some(inner) => Ok(Some(inner)),
                    None if had_subtree => Ok(None),
                    None => Err(PtbError::EmptyTree(open)),
                };
            }
            return Err(PtbError::Syntax { offset: open, message: "node without a label".into() });
        };

        if !words.is_empty() {
            if had_subtree || words.len() > 1 {
                return Err(PtbError::Syntax {
                    offset: words[0].0,
                    message: "terminal must be the only child of a pre-terminal".into(),
                });
            }
            if label == TRACE_LABEL {
                return Ok(None);
            }
            return Ok(Some(Bracket::word(strip_function_tags(label), words[0].1)));
        }
        if !had_subtree {
            return Err(PtbError::EmptyTree(open));
        }
        if subtrees.is_empty() {
            // every child was a trace
            return Ok(None);
        }
        Ok(Some(Bracket::phrase(strip_function_tags(label), subtrees)))
    }
}

/// Parse a sequence of bracketed trees.
///
/// `-NONE-` empty elements are deleted together with any phrase left
/// without children, and functional tags are stripped from every label.
pub fn parse_ptb(text: &str) -> Result<Vec<(Sentence, ConstTree)>, PtbError> {
    let toks = tokenize(text);
    let mut parser = Parser { toks, pos: 0 };
    let mut out = Vec::new();
    while let Some(tok) = parser.peek() {
        match tok {
            Tok::Open(off) => match parser.node(true)? {
                Some(bracket) => {
                    let tree = ConstTree::from_bracket(&bracket)
                        .map_err(|e| PtbError::Syntax { offset: off, message: e.to_string() })?;
                    out.push((tree.sentence(), tree));
                }
                None => return Err(PtbError::EmptyTree(off)),
            },
            Tok::Close(off) => return Err(PtbError::Unbalanced(off)),
            Tok::Atom(off, _) => {
                return Err(PtbError::Syntax { offset: off, message: "token outside of any tree".into() })
            }
        }
    }
    Ok(out)
}

/// Single-line bracketed rendering of a tree.
pub fn write_ptb(tree: &ConstTree) -> String {
    let mut out = String::new();
    write_node(tree, tree.root(), &mut out);
    out
}

fn write_node(tree: &ConstTree, id: super::NodeId, out: &mut String) {
    let node = tree.node(id);
    out.push('(');
    out.push_str(node.label());
    match node.kind() {
        NodeKind::Word { word, .. } => {
            out.push(' ');
            out.push_str(word);
        }
        NodeKind::Phrase(children) => {
            for &c in children {
                out.push(' ');
                write_node(tree, c, out);
            }
        }
    }
    out.push(')');
}
