//! Every injection mode crossed with every encoding on one synthetic corpus,
//! reported as TSV with gold and noisy test parses.
//!
//! `cargo run --example injection_matrix -- [SENTENCES] [SEED]`

use synsrl::tagger::TaggerConfig;
use synsrl::train::{run_matrix, synthetic, write_matrix_tsv, Grid, TrainSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(200, |s| s.parse().expect("size must be a number"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed must be a number"));
    let corpus = synthetic::generate(n, seed);
    let spec = TrainSpec { epochs: 30, patience: 10, ..TrainSpec::default() };
    let rows = run_matrix(&corpus, &Grid::full(TaggerConfig::default(), spec, seed)).expect("matrix runs");
    print!("{}", write_matrix_tsv(&rows));
}
