//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use synsrl::tagger::{EncodedSentence, Tagger};
use synsrl::treebank::{Bracket, ConstTree};

pub const PHRASES: [&str; 6] = ["S", "NP", "VP", "PP", "ADJP", "SBAR"];
pub const TAGS: [&str; 5] = ["DT", "NN", "VB", "IN", "JJ"];

/// Random tree over `n` words named `w1..wn`, at most `max_depth` nodes deep
/// counting the pre-terminal. Phrase labels come from `PHRASES`, so no
/// punctuation or coordination appears.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize, max_depth: usize) -> ConstTree {
    let mut next = 1;
    let b = gen(rng, n, 1, max_depth.max(2), &mut next);
    let b = if matches!(b, Bracket::Word { .. }) { Bracket::phrase("S", vec![b]) } else { b };
    ConstTree::from_bracket(&b).unwrap()
}

fn gen(rng: &mut ChaCha8Rng, n: usize, depth: usize, max_depth: usize, next: &mut usize) -> Bracket {
    if n == 1 && (depth == max_depth || rng.gen_bool(0.6)) {
        let w = format!("w{next}");
        *next += 1;
        return Bracket::word(TAGS[rng.gen_range(0..TAGS.len())], w);
    }
    let label = PHRASES[rng.gen_range(0..PHRASES.len())];
    if depth + 1 >= max_depth {
        let words = (0..n)
            .map(|_| {
                let w = format!("w{next}");
                *next += 1;
                Bracket::word(TAGS[rng.gen_range(0..TAGS.len())], w)
            })
            .collect();
        return Bracket::phrase(label, words);
    }
    let k = if n == 1 { 1 } else { rng.gen_range(1..=n.min(4)) };
    let k = if k == 1 && n > 1 && rng.gen_bool(0.7) { 2 } else { k };
    // cut n words into k non-empty parts
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() + 1 < k {
        let c = rng.gen_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort();
    cuts.push(n);
    let mut prev = 0;
    let children = cuts
        .into_iter()
        .map(|c| {
            let size = c - prev;
            prev = c;
            gen(rng, size, depth + 1, max_depth, next)
        })
        .collect();
    Bracket::phrase(label, children)
}

/// Score of `tags` summed left to right: start, then transition and
/// emission per step, then stop.
pub fn path_score(em: ArrayView2<f64>, tr: ArrayView2<f64>, tags: &[usize]) -> f64 {
    let k = em.ncols();
    let mut prev = k;
    let mut s = 0.0;
    for (t, &y) in tags.iter().enumerate() {
        s = s + tr[[prev, y]] + em[[t, y]];
        prev = y;
    }
    s + tr[[prev, k + 1]]
}

/// Every tag sequence of length `t` over `k` tags.
pub fn all_paths(t: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..t {
        out = out.into_iter().flat_map(|p| (0..k).map(move |y| [p.clone(), vec![y]].concat())).collect();
    }
    out
}

/// Brute-force log partition and best path. Ties go to the sequence with
/// the lowest tag at the latest position where the candidates differ.
pub fn brute_force(em: ArrayView2<f64>, tr: ArrayView2<f64>) -> (f64, Vec<usize>, f64) {
    let (t, k) = em.dim();
    let paths = all_paths(t, k);
    let scores: Vec<f64> = paths.iter().map(|p| path_score(em, tr, p)).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    let best = paths
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s == max)
        .map(|(p, _)| p)
        .min_by(|a, b| a.iter().rev().cmp(b.iter().rev()))
        .unwrap()
        .clone();
    (log_z, best, max)
}

/// Per-block relative error between the analytic gradient and central
/// differences of the loss.
pub fn gradient_errors(tagger: &Tagger, sent: &EncodedSentence, eps: f64) -> Vec<(String, f64)> {
    let (_, grad) = tagger.loss_and_grad(sent, None).unwrap();
    let analytic = grad.blocks();
    let mut out = Vec::new();
    for (b, (name, block)) in analytic.iter().enumerate() {
        let mut numeric = Vec::with_capacity(block.len());
        for idx in 0..block.len() {
            let bump = |delta: f64| {
                let mut p = tagger.clone();
                let (_, mut v) = p.params.blocks_mut().swap_remove(b);
                *v.iter_mut().nth(idx).unwrap() += delta;
                p.loss(sent).unwrap().total
            };
            numeric.push((bump(eps) - bump(-eps)) / (2.0 * eps));
        }
        let a: Vec<f64> = block.iter().copied().collect();
        let diff = a.iter().zip(&numeric).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nn = numeric.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = na.max(nn);
        out.push((name.clone(), if scale < 1e-12 { 0.0 } else { diff / scale }));
    }
    out
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, integer: bool) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| {
        if integer {
            rng.gen_range(-2i32..=2) as f64
        } else {
            rng.gen_range(-3.0..3.0)
        }
    })
}
