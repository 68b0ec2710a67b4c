//! How often the features of a noisy parse differ from those of the gold
//! parse, per encoding.

use synsrl::features::{syntax_columns, SyntaxEncoding};
use synsrl::train::{divergence_rate, synthetic};

fn main() {
    let corpus = synthetic::generate(300, 5);
    for encoding in SyntaxEncoding::ALL {
        let (mut gold, mut noisy) = (Vec::new(), Vec::new());
        for s in &corpus.sentences {
            for f in &s.frames {
                let rows = |tree, deps| {
                    let cols = syntax_columns(encoding, s.sentence.len(), tree, deps, f.predicate()).expect("features");
                    (0..s.sentence.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>()
                };
                gold.push(rows(Some(&s.tree), s.deps.as_ref()));
                noisy.push(rows(s.noisy_tree.as_ref(), s.noisy_deps.as_ref()));
            }
        }
        let rate = divergence_rate(&gold, &noisy).expect("aligned sentences");
        println!("{:<7} {:.2}% of words change", encoding.title(), rate * 100.0);
    }
}
