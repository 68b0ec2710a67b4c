use ndarray::{s, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::crf;
use super::lstm::{self, LstmCache};
use super::params::{Head, TaggerParams};
use super::vocab::{EncodedSentence, Example, Vocabularies};
use super::{TaggerConfig, TaggerError};
use crate::features::Columns;
use crate::treebank::{bio_to_spans_lenient, SrlFrame};

/// Gradients share the layout of the parameters.
pub type Gradients = TaggerParams;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossParts {
    pub crf: f64,
    /// Unweighted auxiliary syntax loss (zero without heads).
    pub aux: f64,
    /// `crf + aux_weight * aux`.
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tagger {
    pub config: TaggerConfig,
    pub vocabs: Vocabularies,
    pub params: TaggerParams,
    frozen: Array2<bool>,
}

struct Pass {
    masks: Vec<Option<Array2<f64>>>,
    caches: Vec<(LstmCache, LstmCache)>,
    states: Array2<f64>,
}

fn reverse_rows(a: ArrayView2<f64>) -> Array2<f64> {
    a.slice(s![..;-1, ..]).to_owned()
}

fn dropout(a: Array2<f64>, rate: f64, rng: &mut Option<&mut ChaCha8Rng>) -> (Array2<f64>, Option<Array2<f64>>) {
    match rng {
        Some(rng) if rate > 0.0 => {
            let keep = 1.0 - rate;
            let mask = Array2::from_shape_fn(a.dim(), |_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 });
            (a * &mask, Some(mask))
        }
        _ => (a, None),
    }
}

fn log_softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let lse = crf::logsumexp(row.iter().copied());
        row.mapv_inplace(|v| v - lse);
    }
    out
}

fn head_logits(states: ArrayView2<f64>, head: &Head) -> Array2<f64> {
    states.dot(&head.w.t()) + &head.b
}

/// Summed cross-entropy of every head against its gold column.
pub fn multitask_loss(states: ArrayView2<f64>, heads: &[Head], targets: &[Vec<usize>]) -> f64 {
    heads
        .iter()
        .zip(targets)
        .map(|(head, gold)| {
            let logp = log_softmax_rows(&head_logits(states, head));
            gold.iter().enumerate().map(|(t, &y)| -logp[[t, y]]).sum::<f64>()
        })
        .sum()
}

impl Tagger {
    /// Fresh tagger with parameters drawn from `config.seed`.
    pub fn new(config: TaggerConfig, vocabs: Vocabularies) -> Result<Self, TaggerError> {
        let errors = config.validate();
        if !errors.is_empty() {
            return Err(TaggerError::Config(errors));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let params = TaggerParams::init(&config, &vocabs, &mut rng);
        Ok(Self::from_parts(config, vocabs, params))
    }

    pub fn from_parts(config: TaggerConfig, vocabs: Vocabularies, params: TaggerParams) -> Self {
        let frozen = crf::forbidden_transitions(vocabs.tags.items());
        Tagger { config, vocabs, params, frozen }
    }

    /// Transition entries excluded from training.
    pub fn frozen_transitions(&self) -> &Array2<bool> {
        &self.frozen
    }

    pub fn encode(&self, ex: &Example) -> Result<EncodedSentence, TaggerError> {
        self.vocabs.encode(&self.config, ex)
    }

    /// Concatenated lookups, `T x input_dim`.
    pub fn embed(&self, sent: &EncodedSentence) -> Result<Array2<f64>, TaggerError> {
        let len = sent.len();
        if len == 0 {
            return Err(TaggerError::EmptySentence);
        }
        let cfg = &self.config;
        let features = if cfg.injection.feeds_syntax() {
            let f = sent.features.as_ref().ok_or(TaggerError::MissingSyntax(cfg.injection))?;
            if f.len() != self.params.feat_emb.len() {
                return Err(TaggerError::FeatureCount { expected: self.params.feat_emb.len(), found: f.len() });
            }
            Some(f)
        } else {
            None
        };
        let (dw, dp, df) = (cfg.word_dim, cfg.predicate_dim, cfg.feature_dim);
        let mut x = Array2::zeros((len, cfg.input_dim()));
        for t in 0..len {
            let mut row = x.row_mut(t);
            row.slice_mut(s![..dw]).assign(&self.params.word_emb.row(sent.words[t]));
            row.slice_mut(s![dw..dw + dp]).assign(&self.params.pred_emb.row(sent.predicate[t]));
            if let Some(features) = features {
                for (f, col) in features.iter().enumerate() {
                    let off = dw + dp + f * df;
                    row.slice_mut(s![off..off + df]).assign(&self.params.feat_emb[f].row(col[t]));
                }
            }
        }
        Ok(x)
    }

    fn run(&self, x: Array2<f64>, mut rng: Option<&mut ChaCha8Rng>) -> Pass {
        let h = self.config.hidden;
        let rate = self.config.dropout;
        let len = x.nrows();
        let mut masks = Vec::with_capacity(self.params.layers.len() + 1);
        let mut caches = Vec::with_capacity(self.params.layers.len());
        let mut current = x;
        for layer in &self.params.layers {
            let (input, mask) = dropout(current, rate, &mut rng);
            masks.push(mask);
            let fwd = lstm::forward(&layer.forward, input.view());
            let bwd = lstm::forward(&layer.backward, reverse_rows(input.view()).view());
            let mut out = Array2::zeros((len, 2 * h));
            out.slice_mut(s![.., ..h]).assign(&fwd.hidden);
            out.slice_mut(s![.., h..]).assign(&reverse_rows(bwd.hidden.view()));
            caches.push((fwd, bwd));
            current = out;
        }
        let (states, mask) = dropout(current, rate, &mut rng);
        masks.push(mask);
        Pass { masks, caches, states }
    }

    /// Encoder output `T x 2H` for an embedded sentence, without dropout.
    pub fn encode_states(&self, x: Array2<f64>) -> Array2<f64> {
        self.run(x, None).states
    }

    pub fn emissions(&self, states: ArrayView2<f64>) -> Array2<f64> {
        states.dot(&self.params.emit_w.t()) + &self.params.emit_b
    }

    fn targets<'a>(&self, sent: &'a EncodedSentence) -> Result<Option<&'a Vec<Vec<usize>>>, TaggerError> {
        if !self.config.injection.predicts_syntax() {
            return Ok(None);
        }
        sent.targets.as_ref().map(Some).ok_or(TaggerError::MissingTargets(self.config.injection))
    }

    /// Training objective without dropout.
    pub fn loss(&self, sent: &EncodedSentence) -> Result<LossParts, TaggerError> {
        let tags = sent.tags.as_ref().ok_or(TaggerError::MissingTags)?;
        let targets = self.targets(sent)?;
        let states = self.encode_states(self.embed(sent)?);
        let em = self.emissions(states.view());
        let crf = crf::nll(em.view(), self.params.transitions.view(), tags);
        let aux = targets.map_or(0.0, |t| multitask_loss(states.view(), &self.params.heads, t));
        Ok(LossParts { crf, aux, total: crf + self.config.aux_weight * aux })
    }

    /// Objective and its exact gradient. Dropout is applied when `rng` is
    /// given and the configured rate is positive.
    pub fn loss_and_grad(
        &self,
        sent: &EncodedSentence,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(LossParts, Gradients), TaggerError> {
        let tags = sent.tags.as_ref().ok_or(TaggerError::MissingTags)?;
        let targets = self.targets(sent)?;
        let x = self.embed(sent)?;
        let pass = self.run(x, rng);
        let states = &pass.states;
        let h = self.config.hidden;
        let lambda = self.config.aux_weight;
        let mut g = self.params.zeros_like();

        let em = self.emissions(states.view());
        let crf_grad = crf::nll_grad(em.view(), self.params.transitions.view(), tags);
        g.transitions = crf_grad.transitions;
        g.transitions.zip_mut_with(&self.frozen, |v, &frozen| {
            if frozen {
                *v = 0.0;
            }
        });
        let d_em = crf_grad.emissions;
        g.emit_w = d_em.t().dot(states);
        g.emit_b = d_em.sum_axis(Axis(0));
        let mut d_states = d_em.dot(&self.params.emit_w);

        let mut aux = 0.0;
        if let Some(targets) = targets {
            for (f, (head, gold)) in self.params.heads.iter().zip(targets).enumerate() {
                let logp = log_softmax_rows(&head_logits(states.view(), head));
                let mut d_logits = logp.mapv(f64::exp);
                for (t, &y) in gold.iter().enumerate() {
                    aux -= logp[[t, y]];
                    d_logits[[t, y]] -= 1.0;
                }
                d_logits.mapv_inplace(|v| lambda * v);
                g.heads[f].w = d_logits.t().dot(states);
                g.heads[f].b = d_logits.sum_axis(Axis(0));
                d_states += &d_logits.dot(&head.w);
            }
        }

        let mut d = match &pass.masks[self.params.layers.len()] {
            Some(mask) => d_states * mask,
            None => d_states,
        };
        for (l, layer) in self.params.layers.iter().enumerate().rev() {
            let (fwd_cache, bwd_cache) = &pass.caches[l];
            let gf = lstm::backward(&layer.forward, fwd_cache, d.slice(s![.., ..h]));
            let gb = lstm::backward(&layer.backward, bwd_cache, reverse_rows(d.slice(s![.., h..])).view());
            let mut d_in = gf.inputs + reverse_rows(gb.inputs.view());
            if let Some(mask) = &pass.masks[l] {
                d_in *= mask;
            }
            let gl = &mut g.layers[l];
            gl.forward.w = gf.w;
            gl.forward.b = gf.b;
            gl.backward.w = gb.w;
            gl.backward.b = gb.b;
            d = d_in;
        }

        let cfg = &self.config;
        let (dw, dp, df) = (cfg.word_dim, cfg.predicate_dim, cfg.feature_dim);
        for t in 0..sent.len() {
            let row = d.row(t);
            let mut w = g.word_emb.row_mut(sent.words[t]);
            w += &row.slice(s![..dw]);
            let mut p = g.pred_emb.row_mut(sent.predicate[t]);
            p += &row.slice(s![dw..dw + dp]);
            if cfg.injection.feeds_syntax() {
                let features = sent.features.as_ref().expect("embed checked the feature columns");
                for (f, col) in features.iter().enumerate() {
                    let off = dw + dp + f * df;
                    let mut e = g.feat_emb[f].row_mut(col[t]);
                    e += &row.slice(s![off..off + df]);
                }
            }
        }

        if let Some(name) = g.first_non_finite() {
            return Err(TaggerError::NonFiniteGradient(name));
        }
        let crf_loss = crf_grad.loss;
        Ok((LossParts { crf: crf_loss, aux, total: crf_loss + lambda * aux }, g))
    }

    /// Viterbi tag ids for an encoded sentence.
    pub fn decode(&self, sent: &EncodedSentence) -> Result<Vec<usize>, TaggerError> {
        let states = self.encode_states(self.embed(sent)?);
        let em = self.emissions(states.view());
        Ok(crf::viterbi(em.view(), self.params.transitions.view()).0)
    }

    /// Tag strings for the sentence of `ex`.
    pub fn predict_tags(&self, ex: &Example) -> Result<Vec<String>, TaggerError> {
        let ids = self.decode(&self.encode(ex)?)?;
        Ok(ids.into_iter().map(|id| self.vocabs.tags.item(id).to_string()).collect())
    }

    /// Predicted frame for the marked predicate. The predicate token itself
    /// is never part of an argument.
    pub fn predict(&self, ex: &Example) -> Result<SrlFrame, TaggerError> {
        let mut tags = self.predict_tags(ex)?;
        tags[ex.predicate - 1] = super::OUTSIDE.to_string();
        let args = bio_to_spans_lenient(&tags);
        Ok(SrlFrame::new(ex.predicate, args, ex.words.len()).expect("lenient BIO spans are disjoint and skip the predicate"))
    }

    /// Argmax of each auxiliary head, as feature strings.
    pub fn predict_syntax(&self, ex: &Example) -> Result<Option<Columns>, TaggerError> {
        if !self.config.injection.predicts_syntax() {
            return Ok(None);
        }
        let states = self.encode_states(self.embed(&self.encode(ex)?)?);
        let cols = self
            .params
            .heads
            .iter()
            .zip(&self.vocabs.features)
            .map(|(head, vocab)| {
                let logits = head_logits(states.view(), head);
                logits
                    .rows()
                    .into_iter()
                    .map(|row| {
                        let best = row.iter().enumerate().fold(0, |b, (i, &v)| if v > row[b] { i } else { b });
                        vocab.item(best).to_string()
                    })
                    .collect()
            })
            .collect();
        Ok(Some(cols))
    }
}
