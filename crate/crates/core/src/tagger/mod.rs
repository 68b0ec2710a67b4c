//! Embedding + stacked bidirectional LSTM + linear-chain CRF tagger with
//! optional syntax injection.
//!
//! * `baseline`: words and a predicate indicator only.
//! * `input`: syntax feature embeddings are concatenated to each word's
//!   input vector.
//! * `output`: per-feature softmax heads over the encoder states are trained
//!   jointly with the CRF; syntax is not needed at prediction time.
//! * `autoencoder`: both of the above.
//!
//! Everything is computed in `f64` with hand-written gradients.

pub mod checkpoint;
pub mod crf;
mod lstm;
mod model;
mod params;
mod vocab;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::model::{multitask_loss, Gradients, LossParts, Tagger};
pub use self::params::{shapes, BiLayer, Head, LstmWeights, TaggerParams};
pub use self::vocab::{build_vocab, feature_key, EncodedSentence, Example, Vocab, Vocabularies, CLIP, OUTSIDE, UNK};
use crate::features::SyntaxEncoding;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Injection {
    Baseline,
    Input,
    Output,
    #[serde(rename = "autoencoder")]
    AutoEncoder,
}

impl Injection {
    pub const ALL: [Injection; 4] = [Injection::Baseline, Injection::Input, Injection::Output, Injection::AutoEncoder];

    pub fn name(self) -> &'static str {
        match self {
            Injection::Baseline => "baseline",
            Injection::Input => "input",
            Injection::Output => "output",
            Injection::AutoEncoder => "autoencoder",
        }
    }

    /// Whether syntax features are embedded on the input side.
    pub fn feeds_syntax(self) -> bool {
        matches!(self, Injection::Input | Injection::AutoEncoder)
    }

    /// Whether auxiliary heads predict syntax features.
    pub fn predicts_syntax(self) -> bool {
        matches!(self, Injection::Output | Injection::AutoEncoder)
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Injection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Injection::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| format!("unknown injection mode `{s}` (expected baseline, input, output or autoencoder)"))
    }
}

/// Architecture and injection settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    pub injection: Injection,
    pub encoding: SyntaxEncoding,
    pub word_dim: usize,
    pub predicate_dim: usize,
    /// Embedding size of each syntax feature.
    pub feature_dim: usize,
    pub hidden: usize,
    pub layers: usize,
    pub dropout: f64,
    pub seed: u64,
    /// Weight of the auxiliary syntax loss.
    pub aux_weight: f64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            injection: Injection::Baseline,
            encoding: SyntaxEncoding::SrlC,
            word_dim: 16,
            predicate_dim: 4,
            feature_dim: 8,
            hidden: 16,
            layers: 1,
            dropout: 0.0,
            seed: 1,
            aux_weight: 1.0,
        }
    }
}

impl TaggerConfig {
    /// Width of the per-token input vector.
    pub fn input_dim(&self) -> usize {
        let syntax = if self.injection.feeds_syntax() { self.encoding.feature_count() * self.feature_dim } else { 0 };
        self.word_dim + self.predicate_dim + syntax
    }

    /// Every violated constraint, one message per field.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        for (name, v) in [
            ("word_dim", self.word_dim),
            ("predicate_dim", self.predicate_dim),
            ("feature_dim", self.feature_dim),
            ("hidden", self.hidden),
            ("layers", self.layers),
        ] {
            if v < 1 {
                errors.push(format!("{name} must be at least 1"));
            }
        }
        if !(0.0..1.0).contains(&self.dropout) {
            errors.push(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if !(self.aux_weight.is_finite() && self.aux_weight >= 0.0) {
            errors.push(format!("aux_weight must be finite and non-negative, got {}", self.aux_weight));
        }
        errors
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaggerError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid tagger configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("expected {expected} syntax feature columns, found {found}")]
    FeatureCount { expected: usize, found: usize },
    #[error("syntax column has {found} values for a {expected}-token sentence")]
    ColumnLength { expected: usize, found: usize },
    #[error("predicate {predicate} outside sentence of length {len}")]
    PredicateOutOfRange { predicate: usize, len: usize },
    #[error("{0} mode needs syntax feature columns on the input")]
    MissingSyntax(Injection),
    #[error("{0} mode needs gold syntax targets for training")]
    MissingTargets(Injection),
    #[error("sentence has no gold tags")]
    MissingTags,
    #[error("non-finite gradient in parameter block `{0}`")]
    NonFiniteGradient(String),
    #[error("empty sentence")]
    EmptySentence,
}
