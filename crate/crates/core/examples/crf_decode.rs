//! Linear-chain CRF on a hand-written BIO problem: log partition, the
//! Viterbi path, and how forbidden transitions shape it.

use ndarray::array;
use synsrl::tagger::crf::{forbidden_transitions, log_partition, nll, viterbi, FORBIDDEN};

fn main() {
    let tags = ["O", "B-A0", "I-A0"];
    // rows are words, columns follow `tags`
    let emissions = array![[0.2, 0.1, 1.5], [0.0, 0.3, 1.2], [1.0, 0.0, 0.1]];
    let k = tags.len();
    let free = ndarray::Array2::<f64>::zeros((k + 2, k + 2));
    let mut constrained = free.clone();
    for ((i, j), &bad) in forbidden_transitions(&tags).indexed_iter() {
        if bad {
            constrained[[i, j]] = FORBIDDEN;
        }
    }
    for (name, tr) in [("unconstrained", &free), ("BIO-constrained", &constrained)] {
        let (path, score) = viterbi(emissions.view(), tr.view());
        let named: Vec<&str> = path.iter().map(|&t| tags[t]).collect();
        println!("{name}: log Z {:.4}, best {:?} (score {score:.2})", log_partition(emissions.view(), tr.view()), named);
        println!("  nll of the best path {:.4}", nll(emissions.view(), tr.view(), &path));
    }
}
