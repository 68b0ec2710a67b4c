//! Linear-chain CRF over `K` tags.
//!
//! Emissions are `T x K`. Transitions are `(K + 2) x (K + 2)`, where row and
//! column `K` is the start state and `K + 1` the stop state; entry `[i, j]`
//! scores moving from tag `i` to tag `j`.

use ndarray::{Array2, ArrayView2};

/// Score given to transitions that would break BIO well-formedness.
pub const FORBIDDEN: f64 = -1.0e4;

pub fn start(k: usize) -> usize {
    k
}

pub fn stop(k: usize) -> usize {
    k + 1
}

pub fn logsumexp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Unnormalised score of a tag sequence, accumulated left to right.
pub fn sequence_score(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>, tags: &[usize]) -> f64 {
    let k = emissions.ncols();
    let mut prev = start(k);
    let mut score = 0.0;
    for (t, &y) in tags.iter().enumerate() {
        score = score + transitions[[prev, y]] + emissions[[t, y]];
        prev = y;
    }
    score + transitions[[prev, stop(k)]]
}

fn forward(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>) -> Array2<f64> {
    let (len, k) = emissions.dim();
    let mut alpha = Array2::zeros((len, k));
    for j in 0..k {
        alpha[[0, j]] = transitions[[start(k), j]] + emissions[[0, j]];
    }
    for t in 1..len {
        for j in 0..k {
            alpha[[t, j]] = logsumexp((0..k).map(|i| alpha[[t - 1, i]] + transitions[[i, j]])) + emissions[[t, j]];
        }
    }
    alpha
}

fn backward(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>) -> Array2<f64> {
    let (len, k) = emissions.dim();
    let mut beta = Array2::zeros((len, k));
    for i in 0..k {
        beta[[len - 1, i]] = transitions[[i, stop(k)]];
    }
    for t in (0..len - 1).rev() {
        for i in 0..k {
            beta[[t, i]] =
                logsumexp((0..k).map(|j| transitions[[i, j]] + emissions[[t + 1, j]] + beta[[t + 1, j]]));
        }
    }
    beta
}

/// `log Z` by the forward algorithm.
pub fn log_partition(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>) -> f64 {
    let k = emissions.ncols();
    let alpha = forward(emissions, transitions);
    let last = alpha.nrows() - 1;
    logsumexp((0..k).map(|j| alpha[[last, j]] + transitions[[j, stop(k)]]))
}

/// Negative log-likelihood of `tags`.
pub fn nll(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>, tags: &[usize]) -> f64 {
    log_partition(emissions, transitions) - sequence_score(emissions, transitions, tags)
}

pub struct CrfGrad {
    pub loss: f64,
    pub emissions: Array2<f64>,
    pub transitions: Array2<f64>,
}

/// Negative log-likelihood with its gradients (expected minus observed
/// counts, from forward-backward marginals).
pub fn nll_grad(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>, tags: &[usize]) -> CrfGrad {
    let (len, k) = emissions.dim();
    let alpha = forward(emissions, transitions);
    let beta = backward(emissions, transitions);
    let log_z = logsumexp((0..k).map(|j| alpha[[len - 1, j]] + transitions[[j, stop(k)]]));

    let mut d_em = Array2::zeros((len, k));
    let mut d_tr = Array2::zeros(transitions.dim());
    for t in 0..len {
        for j in 0..k {
            d_em[[t, j]] = (alpha[[t, j]] + beta[[t, j]] - log_z).exp();
        }
    }
    for j in 0..k {
        d_tr[[start(k), j]] = d_em[[0, j]];
        d_tr[[j, stop(k)]] = d_em[[len - 1, j]];
    }
    for t in 0..len - 1 {
        for i in 0..k {
            for j in 0..k {
                d_tr[[i, j]] +=
                    (alpha[[t, i]] + transitions[[i, j]] + emissions[[t + 1, j]] + beta[[t + 1, j]] - log_z).exp();
            }
        }
    }
    let mut prev = start(k);
    for (t, &y) in tags.iter().enumerate() {
        d_em[[t, y]] -= 1.0;
        d_tr[[prev, y]] -= 1.0;
        prev = y;
    }
    d_tr[[prev, stop(k)]] -= 1.0;

    let loss = log_z - sequence_score(emissions, transitions, tags);
    CrfGrad { loss, emissions: d_em, transitions: d_tr }
}

/// Best tag sequence and its score. Among equal-scoring sequences the one
/// with the lowest tag at the latest differing position wins.
pub fn viterbi(emissions: ArrayView2<f64>, transitions: ArrayView2<f64>) -> (Vec<usize>, f64) {
    let (len, k) = emissions.dim();
    let mut delta = Array2::zeros((len, k));
    let mut back = Array2::<usize>::zeros((len, k));
    for j in 0..k {
        delta[[0, j]] = transitions[[start(k), j]] + emissions[[0, j]];
    }
    for t in 1..len {
        for j in 0..k {
            let mut best = 0;
            let mut best_score = delta[[t - 1, 0]] + transitions[[0, j]];
            for i in 1..k {
                let s = delta[[t - 1, i]] + transitions[[i, j]];
                if s > best_score {
                    best = i;
                    best_score = s;
                }
            }
            delta[[t, j]] = best_score + emissions[[t, j]];
            back[[t, j]] = best;
        }
    }
    let mut last = 0;
    let mut best_score = delta[[len - 1, 0]] + transitions[[0, stop(k)]];
    for j in 1..k {
        let s = delta[[len - 1, j]] + transitions[[j, stop(k)]];
        if s > best_score {
            last = j;
            best_score = s;
        }
    }
    let mut path = vec![last; len];
    for t in (1..len).rev() {
        path[t - 1] = back[[t, path[t]]];
    }
    (path, best_score)
}

/// Mask of transitions that break BIO well-formedness over `tags`
/// (`O`, `B-X`, `I-X`), plus moves into the start state or out of the stop
/// state.
pub fn forbidden_transitions<S: AsRef<str>>(tags: &[S]) -> Array2<bool> {
    let k = tags.len();
    let mut mask = Array2::from_elem((k + 2, k + 2), false);
    for (j, tag) in tags.iter().enumerate() {
        let Some(label) = tag.as_ref().strip_prefix("I-") else { continue };
        for i in 0..k + 2 {
            let allowed = i < k && {
                let prev = tags[i].as_ref();
                prev.strip_prefix("B-") == Some(label) || prev.strip_prefix("I-") == Some(label)
            };
            mask[[i, j]] = !allowed;
        }
    }
    for i in 0..k + 2 {
        mask[[i, start(k)]] = true;
        mask[[stop(k), i]] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    #[test]
    fn single_step_loss() {
        let em = array![[0.5, -1.0, 2.0]];
        let tr = Array2::zeros((5, 5));
        let expected = logsumexp([0.5, -1.0, 2.0]) - 0.5;
        assert!((nll(em.view(), tr.view(), &[0]) - expected).abs() < 1e-12);
        assert_eq!(viterbi(em.view(), tr.view()).0, [2]);
    }

    #[test]
    fn uniform_closed_form() {
        for (k, t) in [(2usize, 1usize), (3, 4), (5, 6)] {
            let em = Array2::zeros((t, k));
            let tr = Array2::zeros((k + 2, k + 2));
            let loss = nll(em.view(), tr.view(), &vec![0; t]);
            assert!((loss - t as f64 * (k as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let em = array![[0.3, -0.2, 0.7], [1.1, 0.0, -0.4], [-0.5, 0.9, 0.2]];
        let mut tr = Array2::zeros((5, 5));
        for (idx, v) in tr.iter_mut().enumerate() {
            *v = ((idx * 7 % 11) as f64 - 5.0) / 10.0;
        }
        let tags = [2, 0, 1];
        let g = nll_grad(em.view(), tr.view(), &tags);
        let eps = 1e-6;
        for idx in 0..em.len() {
            let (r, c) = (idx / 3, idx % 3);
            let mut p = em.clone();
            p[[r, c]] += eps;
            let mut m = em.clone();
            m[[r, c]] -= eps;
            let fd = (nll(p.view(), tr.view(), &tags) - nll(m.view(), tr.view(), &tags)) / (2.0 * eps);
            assert!((fd - g.emissions[[r, c]]).abs() < 1e-7);
        }
        for r in 0..5 {
            for c in 0..5 {
                let mut p = tr.clone();
                p[[r, c]] += eps;
                let mut m = tr.clone();
                m[[r, c]] -= eps;
                let fd = (nll(em.view(), p.view(), &tags) - nll(em.view(), m.view(), &tags)) / (2.0 * eps);
                assert!((fd - g.transitions[[r, c]]).abs() < 1e-7, "[{r},{c}]");
            }
        }
    }

    #[test]
    fn viterbi_prefers_lowest_tag_on_ties() {
        let em = Array2::zeros((3, 3));
        let tr = Array2::zeros((5, 5));
        assert_eq!(viterbi(em.view(), tr.view()).0, [0, 0, 0]);
    }

    #[test]
    fn forbidden_mask() {
        let tags = ["O", "B-A0", "I-A0", "B-A1", "I-A1"];
        let m = forbidden_transitions(&tags);
        assert!(m[[0, 2]]); // O -> I-A0
        assert!(!m[[1, 2]]); // B-A0 -> I-A0
        assert!(!m[[2, 2]]);
        assert!(m[[3, 2]]); // B-A1 -> I-A0
        assert!(m[[start(5), 4]]);
        assert!(!m[[start(5), 3]]);
        assert!(!m[[4, stop(5)]]);
        assert!(m[[0, start(5)]]);
    }
}
