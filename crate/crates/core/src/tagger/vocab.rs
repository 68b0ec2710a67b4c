use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Injection, TaggerConfig, TaggerError};
use crate::features::{Columns, SyntaxEncoding};
use crate::treebank::SrlFrame;

pub const UNK: &str = "<unk>";
pub const OUTSIDE: &str = "O";

/// Absolute value at which numeric syntax features are clipped.
pub const CLIP: i64 = 10;

/// String interner with the unknown symbol at id 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    items: Vec<String>,
    index: HashMap<String, usize>,
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab::from(vec![UNK.to_string()])
    }
}

impl From<Vec<String>> for Vocab {
    fn from(items: Vec<String>) -> Self {
        let index = items.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Vocab { items, index }
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        v.items
    }
}

impl Vocab {
    pub fn insert(&mut self, item: &str) -> usize {
        if let Some(&id) = self.index.get(item) {
            return id;
        }
        let id = self.items.len();
        self.items.push(item.to_string());
        self.index.insert(item.to_string(), id);
        id
    }

    /// Id of `item`, or 0 when unseen.
    pub fn id(&self, item: &str) -> usize {
        self.index.get(item).copied().unwrap_or(0)
    }

    pub fn get(&self, item: &str) -> Option<usize> {
        self.index.get(item).copied()
    }

    pub fn item(&self, id: usize) -> &str {
        &self.items[id]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }
}

/// All vocabularies a tagger needs. `tags` holds `O` at id 0 followed by
/// `B-X`/`I-X` pairs; unknown labels read as `O`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabularies {
    pub words: Vocab,
    pub tags: Vocab,
    pub features: Vec<Vocab>,
}

/// One training or evaluation unit: a sentence with a marked predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub words: Vec<String>,
    pub predicate: usize,
    /// Syntax fed to the input side (`m` columns).
    pub syntax: Option<Columns>,
    /// Syntax the output heads are trained to predict.
    pub target_syntax: Option<Columns>,
    pub frame: Option<SrlFrame>,
}

/// Integer view of an [`Example`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSentence {
    pub words: Vec<usize>,
    pub predicate: Vec<usize>,
    pub features: Option<Vec<Vec<usize>>>,
    pub tags: Option<Vec<usize>>,
    pub targets: Option<Vec<Vec<usize>>>,
}

impl EncodedSentence {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Canonical vocabulary key for a syntax feature value; numeric distance
/// features are clipped to `[-CLIP, CLIP]`.
pub fn feature_key(encoding: SyntaxEncoding, column: usize, value: &str) -> String {
    let numeric = matches!((encoding, column), (SyntaxEncoding::FullC, 0) | (SyntaxEncoding::Dep, 2));
    if numeric {
        if let Ok(v) = value.parse::<i64>() {
            return v.clamp(-CLIP, CLIP).to_string();
        }
    }
    value.to_string()
}

fn uses_syntax(config: &TaggerConfig) -> bool {
    config.injection != Injection::Baseline
}

/// Build vocabularies from a training set.
pub fn build_vocab(config: &TaggerConfig, corpus: &[Example]) -> Result<Vocabularies, TaggerError> {
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    let mut words = Vocab::default();
    let mut labels = std::collections::BTreeSet::new();
    let m = config.encoding.feature_count();
    let mut features = if uses_syntax(config) { vec![Vocab::default(); m] } else { Vec::new() };
    for ex in corpus {
        for w in &ex.words {
            words.insert(w);
        }
        if let Some(frame) = &ex.frame {
            labels.extend(frame.args().iter().map(|a| a.label.clone()));
        }
        if uses_syntax(config) {
            for cols in [&ex.syntax, &ex.target_syntax].into_iter().flatten() {
                if cols.len() != m {
                    return Err(TaggerError::FeatureCount { expected: m, found: cols.len() });
                }
                for (f, col) in cols.iter().enumerate() {
                    for v in col {
                        features[f].insert(&feature_key(config.encoding, f, v));
                    }
                }
            }
        }
    }
    let mut tags = Vocab::from(vec![OUTSIDE.to_string()]);
    for l in labels {
        tags.insert(&format!("B-{l}"));
        tags.insert(&format!("I-{l}"));
    }
    Ok(Vocabularies { words, tags, features })
}

impl Vocabularies {
    pub fn encode(&self, config: &TaggerConfig, ex: &Example) -> Result<EncodedSentence, TaggerError> {
        let t = ex.words.len();
        if ex.predicate == 0 || ex.predicate > t {
            return Err(TaggerError::PredicateOutOfRange { predicate: ex.predicate, len: t });
        }
        let words = ex.words.iter().map(|w| self.words.id(w)).collect();
        let predicate = (1..=t).map(|p| usize::from(p == ex.predicate)).collect();
        let encode_cols = |cols: &Columns| -> Result<Vec<Vec<usize>>, TaggerError> {
            if cols.len() != self.features.len() {
                return Err(TaggerError::FeatureCount { expected: self.features.len(), found: cols.len() });
            }
            cols.iter()
                .enumerate()
                .map(|(f, col)| {
                    if col.len() != t {
                        return Err(TaggerError::ColumnLength { expected: t, found: col.len() });
                    }
                    Ok(col.iter().map(|v| self.features[f].id(&feature_key(config.encoding, f, v))).collect())
                })
                .collect()
        };
        let syntax_used = uses_syntax(config);
        let features = match (&ex.syntax, syntax_used) {
            (Some(cols), true) => Some(encode_cols(cols)?),
            _ => None,
        };
        let targets = match (&ex.target_syntax, syntax_used) {
            (Some(cols), true) => Some(encode_cols(cols)?),
            _ => None,
        };
        let tags = ex.frame.as_ref().map(|f| f.to_bio(t).iter().map(|tag| self.tags.get(tag).unwrap_or(0)).collect());
        Ok(EncodedSentence { words, predicate, features, tags, targets })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Argument;

    fn example(words: &[&str], syntax: Option<Columns>) -> Example {
        Example {
            words: words.iter().map(|s| s.to_string()).collect(),
            predicate: 1,
            syntax,
            target_syntax: None,
            frame: Some(SrlFrame::new(1, vec![Argument::new("A0", 2, 2)], words.len()).unwrap()),
        }
    }

    #[test]
    fn word_vocab_has_unk() {
        let cfg = TaggerConfig::default();
        let v = build_vocab(&cfg, &[example(&["a", "b", "a"], None)]).unwrap();
        assert_eq!(v.words.len(), 3);
        assert_eq!(v.words.id("zzz"), 0);
        assert_eq!(v.tags.items(), ["O", "B-A0", "I-A0"]);
    }

    #[test]
    fn empty_corpus_is_error() {
        assert!(matches!(build_vocab(&TaggerConfig::default(), &[]), Err(TaggerError::EmptyCorpus)));
    }

    #[test]
    fn rg_clipped_and_unknown_label() {
        let cfg = TaggerConfig { injection: Injection::Input, encoding: SyntaxEncoding::Dep, ..TaggerConfig::default() };
        let cols = |rg: &str, dl: &str| {
            vec![vec!["0".into(); 2], vec!["0".into(); 2], vec![rg.into(), "1".into()], vec!["L".into(); 2], vec![dl.into(), "root".into()]]
        };
        let v = build_vocab(&cfg, &[example(&["a", "b"], Some(cols("-10", "det")))]).unwrap();
        let enc = v.encode(&cfg, &example(&["a", "b"], Some(cols("-17", "weird")))).unwrap();
        let feats = enc.features.unwrap();
        assert_eq!(feats[2][0], v.features[2].id("-10"));
        assert_ne!(feats[2][0], 0);
        assert_eq!(feats[4][0], 0);
        assert_eq!(enc.predicate, [1, 0]);
        assert_eq!(enc.tags.unwrap(), [0, 1]);
    }

    #[test]
    fn vocab_serde_rebuilds_index() {
        let mut v = Vocab::default();
        v.insert("x");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["<unk>","x"]"#);
        let back: Vocab = serde_json::from_str(&json).unwrap();
        assert_eq!(back.id("x"), 1);
    }
}
