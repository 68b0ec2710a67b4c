//! The five per-word dependency features of a CoNLL-style sentence.
//!
//! `cargo run --example dep_features -- [DEPS.conll]`

use synsrl::dep_codec::encode_dep;
use synsrl::treebank::parse_conll_dep;

const DEMO: &str = "1\tThe\t2\tdet\n2\tseeds\t4\tnsubj\n3\talready\t4\tdep\n4\tare\t0\troot\n\
                    5\tin\t4\tprep\n6\tthe\t7\tdet\n7\tscript\t5\tpobj\n";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("read dependencies"),
        None => DEMO.to_string(),
    };
    for (sentence, graph) in parse_conll_dep(&text).expect("valid dependency file") {
        println!("{:<10} {:>4} {:>5} {:>3} {:>4} dl", "word", "left", "right", "rg", "edge");
        for (word, f) in sentence.tokens().iter().zip(encode_dep(&graph).feats) {
            println!("{word:<10} {:>4} {:>5} {:>3} {:>4} {}", f.left, f.right, f.rg, f.edge, f.dl);
        }
        println!();
    }
}
