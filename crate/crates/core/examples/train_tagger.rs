//! Train a tagger on a synthetic corpus and print the per-epoch log.
//!
//! `cargo run --example train_tagger -- [INJECTION] [ENCODING] [EPOCHS]`,
//! e.g. `input srl-c 20`.

use synsrl::features::SyntaxEncoding;
use synsrl::tagger::{Injection, TaggerConfig};
use synsrl::train::{evaluate, split, synthetic, train, TrainSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let injection: Injection = args.next().map_or(Ok(Injection::Input), |s| s.parse()).expect("injection mode");
    let encoding: SyntaxEncoding = args.next().map_or(Ok(SyntaxEncoding::SrlC), |s| s.parse()).expect("encoding");
    let epochs = args.next().map_or(20, |s| s.parse().expect("epochs must be a number"));

    let corpus = synthetic::generate(200, 3);
    let parts = split(corpus.len(), 3);
    let config = TaggerConfig { injection, encoding, ..TaggerConfig::default() };
    let spec = TrainSpec { epochs, ..TrainSpec::default() };
    let examples = |idx: &[usize]| corpus.examples(&config, idx, false).expect("corpus carries the needed syntax");
    let (tr, dev, test) = (examples(&parts.train), examples(&parts.dev), examples(&parts.test));

    let out = train(&config, &spec, &tr, &dev).expect("training succeeds");
    for m in &out.log {
        println!("epoch {:>3}  loss {:>8.4}  dev F1 {:.4}", m.epoch, m.train_loss, m.dev_f1);
    }
    println!("best epoch {}; test {}", out.best_epoch, evaluate(&out.tagger, &test).expect("evaluation"));
    let ex = &test[0];
    println!("{}", ex.words.join(" "));
    println!("predicted {:?}", out.tagger.predict_tags(ex).expect("prediction"));
}
