//! Write a synthetic corpus (trees, dependencies, frames and a noisy parse).
//!
//! `cargo run --example make_synthetic -- OUT_DIR [N] [SEED]`; with no size
//! and seed this regenerates the bundled corpus.

use std::fs;
use std::path::PathBuf;

use synsrl::train::synthetic;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data".to_string()));
    let n = args.next().map_or(synthetic::BUNDLED_SIZE, |s| s.parse().expect("size must be a number"));
    let seed = args.next().map_or(synthetic::BUNDLED_SEED, |s| s.parse().expect("seed must be a number"));
    let texts = synthetic::generate(n, seed).to_texts();
    fs::create_dir_all(&dir).expect("create output directory");
    let name = format!("synthetic{n}");
    let write = |ext: &str, text: &str| fs::write(dir.join(format!("{name}.{ext}")), text).expect("write corpus file");
    write("trees", &texts.trees);
    write("frames", &texts.frames);
    for (ext, text) in [("deps", &texts.deps), ("noisy.trees", &texts.noisy_trees), ("noisy.deps", &texts.noisy_deps)] {
        if let Some(text) = text {
            write(ext, text);
        }
    }
    println!("wrote {n} sentences to {}", dir.display());
}
