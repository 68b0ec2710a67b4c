//! Save a trained tagger, load it back and check it predicts the same.

use synsrl::tagger::{checkpoint, Injection, TaggerConfig};
use synsrl::train::{synthetic, train, TrainSpec};

fn main() {
    let corpus = synthetic::bundled();
    let config = TaggerConfig { injection: Injection::Output, ..TaggerConfig::default() };
    let examples = corpus.examples(&config, &corpus.all(), false).expect("bundled corpus has syntax");
    let out = train(&config, &TrainSpec { epochs: 5, ..TrainSpec::default() }, &examples, &[]).expect("training");

    let path = std::env::temp_dir().join("synsrl-example.ckpt");
    checkpoint::save(&out.tagger, &path).expect("save");
    let loaded = checkpoint::load(&path).expect("load");
    let size = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    println!("{} parameters, {size} bytes at {}", loaded.params.parameter_count(), path.display());
    let same = examples.iter().all(|ex| loaded.predict(ex).ok() == out.tagger.predict(ex).ok());
    println!("predictions identical after reload: {same}");
    std::fs::remove_file(&path).ok();
}
