//! Encode bracketed trees as Full-C `(r, l)` pairs, one word per row.
//!
//! `cargo run --example encode_full_c -- [TREES.ptb]`; without a file a
//! built-in sentence is used.

use synsrl::const_codec::{encode_full_c, normalize_unaries};
use synsrl::treebank::parse_ptb;

const DEMO: &str = "(S (NP (DT The) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat)) (PP (IN in) (NP (DT the) (NN park)))) (. .))";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("read trees"),
        None => DEMO.to_string(),
    };
    for (sentence, tree) in parse_ptb(&text).expect("valid PTB input") {
        let seq = encode_full_c(&normalize_unaries(&tree));
        for (word, label) in sentence.tokens().iter().zip(&seq.labels) {
            let (r, l) = label.columns();
            println!("{word:<10} {r:>3} {l}");
        }
        println!();
    }
}
