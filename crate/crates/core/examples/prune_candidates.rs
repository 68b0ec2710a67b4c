//! Xue-Palmer argument candidates and the SRL-C tags they induce for each
//! word taken as predicate.

use synsrl::pruner::{prune_xue_palmer, tag_srl_c};
use synsrl::treebank::parse_ptb;

fn main() {
    let text = "(S (NP (DT The) (NN chef)) (VP (VBD cooked) (NP (DT a) (NN meal)) (PP (IN for) (NP (DT the) (NNS guests)))) (. .))";
    let (sentence, tree) = parse_ptb(text).expect("valid tree").remove(0);
    let predicate = 3;
    let cands = prune_xue_palmer(&tree, predicate).expect("predicate in range");
    println!("predicate: {} ({} climbing steps)", sentence.token(predicate), cands.steps);
    for c in &cands.candidates {
        let words: Vec<&str> = (c.span.start..=c.span.end).map(|p| sentence.token(p)).collect();
        println!("  {:<4} {}", c.label, words.join(" "));
    }
    let tags = tag_srl_c(sentence.len(), &cands);
    let row: Vec<String> = sentence.tokens().iter().zip(&tags.tags).map(|(w, t)| format!("{w}/{}", t.as_str())).collect();
    println!("{}", row.join(" "));
}
