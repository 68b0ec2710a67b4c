use ndarray::{Array1, Array2, ArrayViewD, ArrayViewMutD};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::crf::{self, FORBIDDEN};
use super::vocab::Vocabularies;
use super::{Injection, TaggerConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct LstmWeights {
    /// `4H x (D + H)`.
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl LstmWeights {
    pub fn hidden(&self) -> usize {
        self.b.len() / 4
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiLayer {
    pub forward: LstmWeights,
    pub backward: LstmWeights,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Head {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// Every trainable array of a tagger. Also used as the gradient container.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggerParams {
    pub word_emb: Array2<f64>,
    pub pred_emb: Array2<f64>,
    pub feat_emb: Vec<Array2<f64>>,
    pub layers: Vec<BiLayer>,
    pub emit_w: Array2<f64>,
    pub emit_b: Array1<f64>,
    pub transitions: Array2<f64>,
    pub heads: Vec<Head>,
}

/// Shapes of every block, in block order.
pub fn shapes(config: &TaggerConfig, vocabs: &Vocabularies) -> Vec<(String, Vec<usize>)> {
    TaggerParams::zeros(config, vocabs).blocks().into_iter().map(|(n, v)| (n, v.shape().to_vec())).collect()
}

impl TaggerParams {
    pub fn zeros(config: &TaggerConfig, vocabs: &Vocabularies) -> Self {
        let h = config.hidden;
        let k = vocabs.tags.len();
        let with_inputs = matches!(config.injection, Injection::Input | Injection::AutoEncoder);
        let with_heads = matches!(config.injection, Injection::Output | Injection::AutoEncoder);
        let feat_emb = if with_inputs {
            vocabs.features.iter().map(|v| Array2::zeros((v.len(), config.feature_dim))).collect()
        } else {
            Vec::new()
        };
        let input_dim = config.input_dim();
        let layers = (0..config.layers)
            .map(|l| {
                let d = if l == 0 { input_dim } else { 2 * h };
                let lw = || LstmWeights { w: Array2::zeros((4 * h, d + h)), b: Array1::zeros(4 * h) };
                BiLayer { forward: lw(), backward: lw() }
            })
            .collect();
        let heads = if with_heads {
            vocabs.features.iter().map(|v| Head { w: Array2::zeros((v.len(), 2 * h)), b: Array1::zeros(v.len()) }).collect()
        } else {
            Vec::new()
        };
        TaggerParams {
            word_emb: Array2::zeros((vocabs.words.len(), config.word_dim)),
            pred_emb: Array2::zeros((2, config.predicate_dim)),
            feat_emb,
            layers,
            emit_w: Array2::zeros((k, 2 * h)),
            emit_b: Array1::zeros(k),
            transitions: Array2::zeros((k + 2, k + 2)),
            heads,
        }
    }

    /// Random initialisation; forbidden BIO transitions start at their
    /// frozen value.
    pub fn init(config: &TaggerConfig, vocabs: &Vocabularies, rng: &mut ChaCha8Rng) -> Self {
        let mut p = Self::zeros(config, vocabs);
        let mut fill = |a: &mut ArrayViewMutD<f64>, scale: f64| a.iter_mut().for_each(|v| *v = rng.gen_range(-scale..scale));
        let h = config.hidden as f64;
        for (name, mut block) in p.blocks_mut() {
            let scale = if name.ends_with("emb") || name.contains("emb.") {
                0.5
            } else if name.starts_with("lstm") {
                1.0 / h.sqrt()
            } else if name == "crf.transitions" || name.ends_with(".b") {
                0.0
            } else {
                (6.0 / (block.shape()[0] + block.shape()[1]) as f64).sqrt()
            };
            if scale > 0.0 {
                fill(&mut block, scale);
            }
        }
        for layer in &mut p.layers {
            for dir in [&mut layer.forward, &mut layer.backward] {
                let hh = dir.hidden();
                dir.b.slice_mut(ndarray::s![hh..2 * hh]).fill(1.0);
            }
        }
        let mask = crf::forbidden_transitions(vocabs.tags.items());
        p.transitions.zip_mut_with(&mask, |v, &m| {
            if m {
                *v = FORBIDDEN;
            }
        });
        p
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for (_, mut b) in z.blocks_mut() {
            b.fill(0.0);
        }
        z
    }

    pub fn blocks(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        let mut out: Vec<(String, ArrayViewD<'_, f64>)> = vec![
            ("word_emb".into(), self.word_emb.view().into_dyn()),
            ("pred_emb".into(), self.pred_emb.view().into_dyn()),
        ];
        for (f, e) in self.feat_emb.iter().enumerate() {
            out.push((format!("feat_emb.{f}"), e.view().into_dyn()));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            for (dir, w) in [("fwd", &layer.forward), ("bwd", &layer.backward)] {
                out.push((format!("lstm.{l}.{dir}.w"), w.w.view().into_dyn()));
                out.push((format!("lstm.{l}.{dir}.b"), w.b.view().into_dyn()));
            }
        }
        out.push(("emit.w".into(), self.emit_w.view().into_dyn()));
        out.push(("emit.b".into(), self.emit_b.view().into_dyn()));
        out.push(("crf.transitions".into(), self.transitions.view().into_dyn()));
        for (f, head) in self.heads.iter().enumerate() {
            out.push((format!("head.{f}.w"), head.w.view().into_dyn()));
            out.push((format!("head.{f}.b"), head.b.view().into_dyn()));
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        let mut out: Vec<(String, ArrayViewMutD<'_, f64>)> = vec![
            ("word_emb".into(), self.word_emb.view_mut().into_dyn()),
            ("pred_emb".into(), self.pred_emb.view_mut().into_dyn()),
        ];
        for (f, e) in self.feat_emb.iter_mut().enumerate() {
            out.push((format!("feat_emb.{f}"), e.view_mut().into_dyn()));
        }
        for (l, layer) in self.layers.iter_mut().enumerate() {
            let BiLayer { forward, backward } = layer;
            for (dir, w) in [("fwd", forward), ("bwd", backward)] {
                out.push((format!("lstm.{l}.{dir}.w"), w.w.view_mut().into_dyn()));
                out.push((format!("lstm.{l}.{dir}.b"), w.b.view_mut().into_dyn()));
            }
        }
        out.push(("emit.w".into(), self.emit_w.view_mut().into_dyn()));
        out.push(("emit.b".into(), self.emit_b.view_mut().into_dyn()));
        out.push(("crf.transitions".into(), self.transitions.view_mut().into_dyn()));
        for (f, head) in self.heads.iter_mut().enumerate() {
            out.push((format!("head.{f}.w"), head.w.view_mut().into_dyn()));
            out.push((format!("head.{f}.b"), head.b.view_mut().into_dyn()));
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }

    /// Name of the first block holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<String> {
        self.blocks().into_iter().find(|(_, b)| b.iter().any(|v| !v.is_finite())).map(|(n, _)| n)
    }

    pub fn global_norm(&self) -> f64 {
        self.blocks().iter().map(|(_, b)| b.iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, mut b) in self.blocks_mut() {
            b.mapv_inplace(|v| v * factor);
        }
    }

    pub fn add_assign(&mut self, other: &TaggerParams) {
        for ((_, mut a), (_, b)) in self.blocks_mut().into_iter().zip(other.blocks()) {
            a += &b;
        }
    }
}
