//! Training loop, span evaluation, feature divergence and the
//! injection-by-encoding experiment grid.

mod corpus;
mod eval;
mod matrix;
pub mod synthetic;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::corpus::{split, AnnotatedSentence, Corpus, CorpusError, CorpusTexts, Split};
pub use self::eval::{divergence_rate, evaluate, srl_f1, EvalError, EvalReport};
pub use self::matrix::{run_matrix, write_matrix_tsv, Grid, MatrixRow};
use crate::tagger::{build_vocab, Example, Tagger, TaggerConfig, TaggerError, TaggerParams};

/// Optimiser and schedule settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSpec {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Global gradient norm above which a batch gradient is rescaled.
    pub clip_norm: f64,
    /// Epochs without dev improvement before stopping.
    pub patience: usize,
    /// Seed for shuffling and dropout.
    pub seed: u64,
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec { epochs: 30, batch_size: 4, learning_rate: 0.01, clip_norm: 5.0, patience: 10, seed: 1 }
    }
}

impl TrainSpec {
    /// Every violated constraint. Zero epochs is allowed and returns the
    /// initial parameters.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.batch_size == 0 {
            errors.push("batch_size must be at least 1".to_string());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            errors.push(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.clip_norm.is_finite() && self.clip_norm > 0.0) {
            errors.push(format!("clip_norm must be positive, got {}", self.clip_norm));
        }
        if self.patience == 0 {
            errors.push("patience must be at least 1".to_string());
        }
        errors
    }
}

/// Training configuration file: `{"tagger": {...}, "train": {...}}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tagger: TaggerConfig,
    pub train: TrainSpec,
}

impl ExperimentConfig {
    /// Every violated constraint, prefixed with its section.
    pub fn validate(&self) -> Vec<String> {
        let tagger = self.tagger.validate().into_iter().map(|e| format!("tagger.{e}"));
        let train = self.train.validate().into_iter().map(|e| format!("train.{e}"));
        tagger.chain(train).collect()
    }
}

/// One line of the metrics log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_precision: f64,
    pub dev_recall: f64,
    pub dev_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error(transparent)]
    Tagger(#[from] TaggerError),
    #[error("invalid training spec: {}", .0.join("; "))]
    Spec(Vec<String>),
    #[error("training diverged at epoch {epoch}, batch {batch}: {reason}")]
    Diverged { epoch: usize, batch: usize, reason: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub struct TrainOutcome {
    /// Tagger holding the parameters of the best dev epoch.
    pub tagger: Tagger,
    pub log: Vec<EpochMetrics>,
    /// Epoch the returned parameters come from; 0 when untrained.
    pub best_epoch: usize,
}

impl TrainOutcome {
    /// The metrics log as JSON lines.
    pub fn metrics_jsonl(&self) -> String {
        self.log.iter().map(|m| serde_json::to_string(m).expect("metrics serialise") + "\n").collect()
    }
}

struct Adam {
    m: TaggerParams,
    v: TaggerParams,
    step: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(params: &TaggerParams, lr: f64) -> Self {
        Adam { m: params.zeros_like(), v: params.zeros_like(), step: 0, lr }
    }

    fn update(&mut self, params: &mut TaggerParams, grad: &TaggerParams) {
        self.step += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.step);
        let c2 = 1.0 - Self::BETA2.powi(self.step);
        let blocks = params.blocks_mut().into_iter().zip(grad.blocks()).zip(self.m.blocks_mut()).zip(self.v.blocks_mut());
        for ((((_, mut p), (_, g)), (_, mut m)), (_, mut v)) in blocks {
            for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
                *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
            }
        }
    }
}

/// Train a fresh tagger on `train` and keep the parameters of the epoch
/// with the best F1 on `dev` (on `train` when `dev` is empty); among epochs
/// with equal dev F1 the one with the lowest training loss wins. Entries of
/// frozen transitions never receive gradient and keep their value.
pub fn train(config: &TaggerConfig, spec: &TrainSpec, train: &[Example], dev: &[Example]) -> Result<TrainOutcome, TrainError> {
    let problems = spec.validate();
    if !problems.is_empty() {
        return Err(TrainError::Spec(problems));
    }
    let vocabs = build_vocab(config, train)?;
    let mut tagger = Tagger::new(config.clone(), vocabs)?;
    let encoded = train.iter().map(|ex| tagger.encode(ex)).collect::<Result<Vec<_>, _>>()?;
    let dev = if dev.is_empty() { train } else { dev };

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
    let mut adam = Adam::new(&tagger.params, spec.learning_rate);
    let mut best = (f64::NEG_INFINITY, f64::INFINITY, tagger.params.clone(), 0);
    let mut log = Vec::new();
    let mut since_best = 0;
    let mut order: Vec<usize> = (0..encoded.len()).collect();

    for epoch in 1..=spec.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for (batch, chunk) in order.chunks(spec.batch_size).enumerate() {
            let mut grad = tagger.params.zeros_like();
            let mut batch_loss = 0.0;
            for &i in chunk {
                let (loss, g) = tagger.loss_and_grad(&encoded[i], Some(&mut dropout_rng)).map_err(|e| match e {
                    TaggerError::NonFiniteGradient(name) => {
                        TrainError::Diverged { epoch, batch, reason: format!("non-finite gradient in `{name}`") }
                    }
                    other => other.into(),
                })?;
                batch_loss += loss.total;
                grad.add_assign(&g);
            }
            if !batch_loss.is_finite() {
                return Err(TrainError::Diverged { epoch, batch, reason: format!("loss is {batch_loss}") });
            }
            epoch_loss += batch_loss;
            grad.scale(1.0 / chunk.len() as f64);
            let norm = grad.global_norm();
            if norm > spec.clip_norm {
                grad.scale(spec.clip_norm / norm);
            }
            adam.update(&mut tagger.params, &grad);
        }
        let report = evaluate(&tagger, dev)?;
        log.push(EpochMetrics {
            epoch,
            train_loss: epoch_loss / encoded.len() as f64,
            dev_precision: report.precision,
            dev_recall: report.recall,
            dev_f1: report.f1,
        });
        let train_loss = log.last().map_or(f64::INFINITY, |m: &EpochMetrics| m.train_loss);
        if report.f1 > best.0 {
            best = (report.f1, train_loss, tagger.params.clone(), epoch);
            since_best = 0;
        } else {
            if report.f1 == best.0 && train_loss < best.1 {
                best = (report.f1, train_loss, tagger.params.clone(), epoch);
            }
            since_best += 1;
            if since_best >= spec.patience {
                break;
            }
        }
    }
    let (_, _, params, best_epoch) = best;
    tagger.params = params;
    Ok(TrainOutcome { tagger, log, best_epoch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::SyntaxEncoding;
    use crate::tagger::Injection;

    fn tiny() -> (TaggerConfig, Vec<Example>) {
        let corpus = synthetic::generate(12, 2);
        let cfg = TaggerConfig { word_dim: 8, hidden: 8, ..TaggerConfig::default() };
        let ex = corpus.examples(&cfg, &corpus.all(), false).unwrap();
        (cfg, ex)
    }

    #[test]
    fn zero_epochs_keep_initial_params() {
        let (cfg, ex) = tiny();
        let spec = TrainSpec { epochs: 0, ..TrainSpec::default() };
        let out = train(&cfg, &spec, &ex, &[]).unwrap();
        let fresh = Tagger::new(cfg, out.tagger.vocabs.clone()).unwrap();
        assert_eq!(out.tagger.params, fresh.params);
        assert!(out.log.is_empty());
        assert_eq!(out.best_epoch, 0);
    }

    #[test]
    fn same_seed_same_log_and_frozen_entries_stay() {
        let (cfg, ex) = tiny();
        let spec = TrainSpec { epochs: 3, ..TrainSpec::default() };
        let a = train(&cfg, &spec, &ex, &[]).unwrap();
        let b = train(&cfg, &spec, &ex, &[]).unwrap();
        assert_eq!(a.metrics_jsonl(), b.metrics_jsonl());
        assert_eq!(a.log.len(), 3);
        let frozen = a.tagger.frozen_transitions();
        assert!(a.tagger.params.transitions.iter().zip(frozen).all(|(&v, &f)| !f || v == crate::tagger::crf::FORBIDDEN));
        let best = a.log.iter().map(|m| m.dev_f1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a.log[a.best_epoch - 1].dev_f1, best);
    }

    #[test]
    fn spec_validation_lists_every_field() {
        let spec = TrainSpec { batch_size: 0, learning_rate: -1.0, clip_norm: 0.0, patience: 0, ..TrainSpec::default() };
        assert_eq!(spec.validate().len(), 4);
        let cfg = ExperimentConfig {
            tagger: TaggerConfig { hidden: 0, dropout: 2.0, ..TaggerConfig::default() },
            train: spec,
        };
        let errors = cfg.validate();
        assert_eq!(errors.len(), 6);
        assert!(errors[0].starts_with("tagger.hidden"));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig {
            tagger: TaggerConfig { injection: Injection::Input, encoding: SyntaxEncoding::Dep, ..TaggerConfig::default() },
            train: TrainSpec::default(),
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&json).unwrap(), cfg);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"tagger": {"injection": "autoencoder"}}"#).unwrap();
        assert_eq!(partial.tagger.injection, Injection::AutoEncoder);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"tagger": {"hiden": 3}}"#).is_err());
    }
}
