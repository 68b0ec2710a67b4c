use std::fmt::Write as _;

use super::corpus::{split, Corpus};
use super::{evaluate, train, TrainError, TrainSpec};
use crate::features::SyntaxEncoding;
use crate::tagger::{Injection, TaggerConfig};

/// Cells to train plus the shared model and schedule settings. The seed
/// drives the split, initialisation, shuffling and dropout of every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub cells: Vec<(Injection, Option<SyntaxEncoding>)>,
    pub tagger: TaggerConfig,
    pub train: TrainSpec,
    pub seed: u64,
}

impl Grid {
    /// Baseline, then input, output and autoencoder each over Full-C,
    /// SRL-C and Dep.
    pub fn full(tagger: TaggerConfig, train: TrainSpec, seed: u64) -> Self {
        let mut cells = vec![(Injection::Baseline, None)];
        for inj in [Injection::Input, Injection::Output, Injection::AutoEncoder] {
            cells.extend(SyntaxEncoding::ALL.into_iter().map(|e| (inj, Some(e))));
        }
        Grid { cells, tagger, train, seed }
    }

    pub fn baseline_only(tagger: TaggerConfig, train: TrainSpec, seed: u64) -> Self {
        Grid { cells: vec![(Injection::Baseline, None)], tagger, train, seed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRow {
    pub injection: Injection,
    pub encoding: Option<SyntaxEncoding>,
    pub dev_f1: f64,
    /// Test F1 with gold syntax on the input side.
    pub test_f1: f64,
    /// Test F1 with the noisy parse on the input side, when the corpus has one.
    pub test_f1_noisy: Option<f64>,
    pub epochs: usize,
}

/// Train and score every grid cell on an 80/10/10 split of `corpus`.
pub fn run_matrix(corpus: &Corpus, grid: &Grid) -> Result<Vec<MatrixRow>, TrainError> {
    let parts = split(corpus.len(), grid.seed);
    let spec = TrainSpec { seed: grid.seed, ..grid.train.clone() };
    let mut rows = Vec::with_capacity(grid.cells.len());
    for &(injection, encoding) in &grid.cells {
        let config = TaggerConfig {
            injection,
            encoding: encoding.unwrap_or(grid.tagger.encoding),
            seed: grid.seed,
            ..grid.tagger.clone()
        };
        let train_ex = corpus.examples(&config, &parts.train, false)?;
        let dev_ex = corpus.examples(&config, &parts.dev, false)?;
        let test_ex = corpus.examples(&config, &parts.test, false)?;
        let out = train(&config, &spec, &train_ex, &dev_ex)?;
        let dev_f1 = evaluate(&out.tagger, &dev_ex)?.f1;
        let test_f1 = evaluate(&out.tagger, &test_ex)?.f1;
        let test_f1_noisy = if corpus.has_noisy() {
            let noisy = corpus.examples(&config, &parts.test, true)?;
            Some(evaluate(&out.tagger, &noisy)?.f1)
        } else {
            None
        };
        rows.push(MatrixRow { injection, encoding, dev_f1, test_f1, test_f1_noisy, epochs: out.log.len() });
    }
    Ok(rows)
}

/// Tab-separated report with a header line; absent values print as `-`.
pub fn write_matrix_tsv(rows: &[MatrixRow]) -> String {
    let mut out = String::from("injection\tencoding\tdev_f1\ttest_f1\ttest_f1_noisy\n");
    for r in rows {
        let enc = r.encoding.map_or("-", |e| e.title());
        let noisy = r.test_f1_noisy.map_or_else(|| "-".to_string(), |v| format!("{:.4}", v * 100.0));
        let _ = writeln!(
            out,
            "{}\t{enc}\t{:.4}\t{:.4}\t{noisy}",
            r.injection,
            r.dev_f1 * 100.0,
            r.test_f1 * 100.0
        );
    }
    out
}
