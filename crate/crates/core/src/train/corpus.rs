use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{syntax_columns, FeatureError};
use crate::tagger::{Example, TaggerConfig};
use crate::treebank::{
    parse_conll_dep, parse_frames, parse_ptb, write_conll_dep, write_frames, write_ptb, ConstTree, DepGraph,
    FormatError, PtbError, Sentence, SrlFrame,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("trees: {0}")]
    Ptb(#[from] PtbError),
    #[error("{file}: {source}")]
    Format { file: &'static str, source: FormatError },
    #[error("{file} holds {found} sentences, expected {expected}")]
    Count { file: &'static str, expected: usize, found: usize },
    #[error("{file}: tokens of sentence {sentence} differ from the trees")]
    Tokens { file: &'static str, sentence: usize },
    #[error("sentence {sentence}: {source}")]
    Feature { sentence: usize, source: FeatureError },
}

/// A sentence with gold syntax, its frames and optionally a noisy parse.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedSentence {
    pub sentence: Sentence,
    pub tree: ConstTree,
    pub deps: Option<DepGraph>,
    pub frames: Vec<SrlFrame>,
    pub noisy_tree: Option<ConstTree>,
    pub noisy_deps: Option<DepGraph>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<AnnotatedSentence>,
}

/// Sentence-texts of a corpus, one string per file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusTexts {
    pub trees: String,
    pub deps: Option<String>,
    pub frames: String,
    pub noisy_trees: Option<String>,
    pub noisy_deps: Option<String>,
}

/// Sentence indices of an 80/10/10 split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle of `0..n` cut 80/10/10.
pub fn split(n: usize, seed: u64) -> Split {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = n * 8 / 10;
    let n_dev = n / 10;
    let test = idx.split_off(n_train + n_dev);
    let dev = idx.split_off(n_train);
    Split { train: idx, dev, test }
}

fn check_tokens(file: &'static str, trees: &[(Sentence, ConstTree)], other: &[Sentence]) -> Result<(), CorpusError> {
    if trees.len() != other.len() {
        return Err(CorpusError::Count { file, expected: trees.len(), found: other.len() });
    }
    match trees.iter().zip(other).position(|((a, _), b)| a != b) {
        Some(sentence) => Err(CorpusError::Tokens { file, sentence }),
        None => Ok(()),
    }
}

fn read_deps(file: &'static str, text: &str, trees: &[(Sentence, ConstTree)]) -> Result<Vec<DepGraph>, CorpusError> {
    let parsed = parse_conll_dep(text).map_err(|source| CorpusError::Format { file, source })?;
    let sentences: Vec<Sentence> = parsed.iter().map(|(s, _)| s.clone()).collect();
    check_tokens(file, trees, &sentences)?;
    Ok(parsed.into_iter().map(|(_, g)| g).collect())
}

impl Corpus {
    /// Parse aligned files. Every file must hold the same sentences in the
    /// same order as the trees.
    pub fn from_texts(texts: &CorpusTexts) -> Result<Self, CorpusError> {
        let trees = parse_ptb(&texts.trees)?;
        let frames = parse_frames(&texts.frames).map_err(|source| CorpusError::Format { file: "frames", source })?;
        let frame_sentences: Vec<Sentence> = frames.iter().map(|(s, _)| s.clone()).collect();
        check_tokens("frames", &trees, &frame_sentences)?;
        let deps = texts.deps.as_deref().map(|t| read_deps("deps", t, &trees)).transpose()?;
        let noisy_deps = texts.noisy_deps.as_deref().map(|t| read_deps("noisy deps", t, &trees)).transpose()?;
        let noisy_trees = match texts.noisy_trees.as_deref() {
            Some(t) => {
                let parsed = parse_ptb(t)?;
                let sentences: Vec<Sentence> = parsed.iter().map(|(s, _)| s.clone()).collect();
                check_tokens("noisy trees", &trees, &sentences)?;
                Some(parsed.into_iter().map(|(_, t)| t).collect::<Vec<_>>())
            }
            None => None,
        };
        let sentences = trees
            .into_iter()
            .zip(frames)
            .enumerate()
            .map(|(i, ((sentence, tree), (_, frames)))| AnnotatedSentence {
                sentence,
                tree,
                deps: deps.as_ref().map(|d| d[i].clone()),
                frames,
                noisy_tree: noisy_trees.as_ref().map(|t| t[i].clone()),
                noisy_deps: noisy_deps.as_ref().map(|d| d[i].clone()),
            })
            .collect();
        Ok(Corpus { sentences })
    }

    /// Render back to the file formats. Optional files are present only
    /// when every sentence carries that annotation.
    pub fn to_texts(&self) -> CorpusTexts {
        let mut texts = CorpusTexts::default();
        let all_deps = self.sentences.iter().all(|s| s.deps.is_some());
        let all_noisy_trees = self.sentences.iter().all(|s| s.noisy_tree.is_some());
        let all_noisy_deps = self.sentences.iter().all(|s| s.noisy_deps.is_some());
        let (mut deps, mut noisy_trees, mut noisy_deps) = (String::new(), String::new(), String::new());
        for (i, s) in self.sentences.iter().enumerate() {
            let sep = if i > 0 { "\n" } else { "" };
            texts.trees.push_str(&write_ptb(&s.tree));
            texts.trees.push('\n');
            texts.frames.push_str(sep);
            texts.frames.push_str(&write_frames(&s.sentence, &s.frames));
            if let (true, Some(d)) = (all_deps, &s.deps) {
                deps.push_str(sep);
                deps.push_str(&write_conll_dep(&s.sentence, d));
            }
            if let (true, Some(t)) = (all_noisy_trees, &s.noisy_tree) {
                noisy_trees.push_str(&write_ptb(t));
                noisy_trees.push('\n');
            }
            if let (true, Some(d)) = (all_noisy_deps, &s.noisy_deps) {
                noisy_deps.push_str(sep);
                noisy_deps.push_str(&write_conll_dep(&s.sentence, d));
            }
        }
        let non_empty = !self.sentences.is_empty();
        texts.deps = (all_deps && non_empty).then_some(deps);
        texts.noisy_trees = (all_noisy_trees && non_empty).then_some(noisy_trees);
        texts.noisy_deps = (all_noisy_deps && non_empty).then_some(noisy_deps);
        texts
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn frame_count(&self) -> usize {
        self.sentences.iter().map(|s| s.frames.len()).sum()
    }

    /// Whether any sentence carries a noisy parse.
    pub fn has_noisy(&self) -> bool {
        self.sentences.iter().any(|s| s.noisy_tree.is_some() || s.noisy_deps.is_some())
    }

    /// One example per frame of the selected sentences. Input-side syntax
    /// comes from the noisy parse when `noisy` is set; output targets are
    /// always gold.
    pub fn examples(&self, config: &TaggerConfig, indices: &[usize], noisy: bool) -> Result<Vec<Example>, CorpusError> {
        let mut out = Vec::new();
        for &i in indices {
            let s = &self.sentences[i];
            let len = s.sentence.len();
            let (tree, deps) = if noisy { (s.noisy_tree.as_ref(), s.noisy_deps.as_ref()) } else { (Some(&s.tree), s.deps.as_ref()) };
            for frame in &s.frames {
                let p = frame.predicate();
                let wrap = |source| CorpusError::Feature { sentence: i, source };
                let syntax = if config.injection.feeds_syntax() {
                    Some(syntax_columns(config.encoding, len, tree, deps, p).map_err(wrap)?)
                } else {
                    None
                };
                let target_syntax = if config.injection.predicts_syntax() {
                    Some(syntax_columns(config.encoding, len, Some(&s.tree), s.deps.as_ref(), p).map_err(wrap)?)
                } else {
                    None
                };
                out.push(Example {
                    words: s.sentence.tokens().to_vec(),
                    predicate: p,
                    syntax,
                    target_syntax,
                    frame: Some(frame.clone()),
                });
            }
        }
        Ok(out)
    }

    /// Every sentence index, in order.
    pub fn all(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}
