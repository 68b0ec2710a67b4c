use std::fmt;

use super::TreeError;

/// A sentence: non-empty sequence of non-empty tokens.
///
/// Positions handed out by the public API are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<String>,
}

impl Sentence {
    pub fn new<I, S>(tokens: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(TreeError::EmptySentence);
        }
        if let Some(pos) = tokens.iter().position(|t| t.is_empty()) {
            return Err(TreeError::EmptyToken(pos + 1));
        }
        Ok(Sentence { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at 1-based position `pos`.
    pub fn token(&self, pos: usize) -> &str {
        &self.tokens[pos - 1]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Inclusive 1-based token span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Owned recursive tree used to build a [`ConstTree`].
///
/// `Word` is a pre-terminal: a POS label over exactly one token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Phrase { label: String, children: Vec<Bracket> },
    Word { tag: String, word: String },
}

impl Bracket {
    pub fn phrase(label: impl Into<String>, children: Vec<Bracket>) -> Self {
        Bracket::Phrase { label: label.into(), children }
    }

    pub fn word(tag: impl Into<String>, word: impl Into<String>) -> Self {
        Bracket::Word { tag: tag.into(), word: word.into() }
    }

    pub fn label(&self) -> &str {
        match self {
            Bracket::Phrase { label, .. } => label,
            Bracket::Word { tag, .. } => tag,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Phrase(Vec<NodeId>),
    /// Pre-terminal over the token at `index` (1-based).
    Word { index: usize, word: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    label: String,
    parent: Option<NodeId>,
    kind: NodeKind,
    span: Span,
}

impl Node {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn children(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Phrase(children) => children,
            NodeKind::Word { .. } => &[],
        }
    }

    pub fn is_preterminal(&self) -> bool {
        matches!(self.kind, NodeKind::Word { .. })
    }
}

/// Constituency tree stored as a pre-order arena.
///
/// Every constructor goes through [`ConstTree::from_bracket`], so two trees
/// with the same bracketing have identical arenas and derived equality is
/// structural equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstTree {
    nodes: Vec<Node>,
    preterminals: Vec<NodeId>,
}

impl ConstTree {
    pub fn from_bracket(bracket: &Bracket) -> Result<Self, TreeError> {
        let mut tree = ConstTree { nodes: Vec::new(), preterminals: Vec::new() };
        tree.push(bracket, None)?;
        Ok(tree)
    }

    fn push(&mut self, bracket: &Bracket, parent: Option<NodeId>) -> Result<NodeId, TreeError> {
        let id = NodeId(self.nodes.len());
        match bracket {
            Bracket::Word { tag, word } => {
                if tag.is_empty() {
                    return Err(TreeError::EmptyLabel);
                }
                if word.is_empty() {
                    return Err(TreeError::EmptyToken(self.preterminals.len() + 1));
                }
                let index = self.preterminals.len() + 1;
                self.preterminals.push(id);
                self.nodes.push(Node {
                    label: tag.clone(),
                    parent,
                    kind: NodeKind::Word { index, word: word.clone() },
                    span: Span::new(index, index),
                });
            }
            Bracket::Phrase { label, children } => {
                if label.is_empty() {
                    return Err(TreeError::EmptyLabel);
                }
                if children.is_empty() {
                    return Err(TreeError::ChildlessNode(label.clone()));
                }
                self.nodes.push(Node {
                    label: label.clone(),
                    parent,
                    kind: NodeKind::Phrase(Vec::with_capacity(children.len())),
                    span: Span::new(1, 1),
                });
                let mut ids = Vec::with_capacity(children.len());
                for child in children {
                    ids.push(self.push(child, Some(id))?);
                }
                let span = Span::new(self.nodes[ids[0].0].span.start, self.nodes[ids[ids.len() - 1].0].span.end);
                let node = &mut self.nodes[id.0];
                node.span = span;
                node.kind = NodeKind::Phrase(ids);
            }
        }
        Ok(id)
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.preterminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preterminals.is_empty()
    }

    /// Pre-terminal node of the token at 1-based position `pos`.
    pub fn preterminal(&self, pos: usize) -> NodeId {
        self.preterminals[pos - 1]
    }

    pub fn sentence(&self) -> Sentence {
        let tokens = self.preterminals.iter().map(|id| match &self.nodes[id.0].kind {
            NodeKind::Word { word, .. } => word.clone(),
            NodeKind::Phrase(_) => unreachable!("pre-terminal list holds only words"),
        });
        Sentence::new(tokens.collect::<Vec<_>>()).expect("trees have at least one non-empty token")
    }

    /// Ancestors of `id` from its parent up to the root.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.nodes[id.0].parent, move |p| self.nodes[p.0].parent)
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.preterminals.iter().map(|&p| self.ancestors(p).count() + 1).max().unwrap_or(0)
    }

    pub fn to_bracket(&self) -> Bracket {
        self.bracket_at(self.root())
    }

    pub fn bracket_at(&self, id: NodeId) -> Bracket {
        let node = &self.nodes[id.0];
        match &node.kind {
            NodeKind::Word { word, .. } => Bracket::word(node.label.clone(), word.clone()),
            NodeKind::Phrase(children) => {
                Bracket::phrase(node.label.clone(), children.iter().map(|&c| self.bracket_at(c)).collect())
            }
        }
    }

    /// Replace the sentence's tokens, keeping the structure.
    pub fn with_tokens(&self, sentence: &Sentence) -> Result<ConstTree, TreeError> {
        if sentence.len() != self.len() {
            return Err(TreeError::LengthMismatch { tree: self.len(), sentence: sentence.len() });
        }
        let mut tree = self.clone();
        for node in &mut tree.nodes {
            if let NodeKind::Word { index, word } = &mut node.kind {
                *word = sentence.token(*index).to_string();
            }
        }
        Ok(tree)
    }
}

impl fmt::Display for ConstTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::write_ptb(self))
    }
}
