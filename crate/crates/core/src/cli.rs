//! Command-line front end. Exit codes: 0 success, 1 data error, 2 usage
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::const_codec::{decode_full_c, encode_full_c, normalize_unaries, DecodeMode};
use crate::dep_codec::encode_dep;
use crate::features::{
    full_c_from_block, read_blocks, read_blocks_ragged, write_dep_block, write_full_c_block, write_srl_c_block,
    SyntaxEncoding,
};
use crate::pruner::srl_c_features;
use crate::tagger::checkpoint;
use crate::treebank::{parse_conll_dep, parse_frames, parse_ptb, write_ptb, Sentence, SrlFrame};
use crate::train::{
    divergence_rate, evaluate, run_matrix, split, srl_f1, synthetic, train, write_matrix_tsv, Corpus, CorpusTexts,
    ExperimentConfig, Grid,
};

#[derive(Debug, Parser)]
#[command(name = "synsrl", version, about = "Syntax encodings and a syntax-aware SRL tagger")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write word-level syntax features as TSV.
    Encode(EncodeArgs),
    /// Rebuild bracketed trees from a Full-C TSV.
    Decode(DecodeArgs),
    /// Train a tagger from a JSON config.
    Train(TrainArgs),
    /// Score predicted frames, or a checkpoint, against gold frames.
    Eval(EvalArgs),
    /// Fraction of words whose feature rows differ between two TSV files.
    Stats(StatsArgs),
    /// Train and score the injection-by-encoding grid.
    Matrix(MatrixArgs),
}

#[derive(Debug, clap::Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub format: SyntaxEncoding,
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[arg(long)]
    pub deps: Option<PathBuf>,
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Lenient,
}

#[derive(Debug, clap::Args)]
pub struct DecodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// One sentence per line, tokens separated by spaces; replaces the TSV
    /// token column.
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct DataArgs {
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[arg(long)]
    pub deps: Option<PathBuf>,
    #[arg(long)]
    pub frames: Option<PathBuf>,
    #[arg(long)]
    pub noisy_trees: Option<PathBuf>,
    #[arg(long)]
    pub noisy_deps: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Checkpoint to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics log (JSON lines) to write.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Overrides both seeds of the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Predicted frames; compared with --gold sentence by sentence.
    #[arg(long, conflicts_with = "checkpoint")]
    pub pred: Option<PathBuf>,
    /// Gold frames.
    #[arg(long)]
    pub gold: PathBuf,
    /// Tagger checkpoint to run over the gold sentences.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub trees: Option<PathBuf>,
    #[arg(long)]
    pub deps: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct StatsArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Generate a synthetic corpus of this many sentences instead of reading files.
    #[arg(long, conflicts_with_all = ["trees", "frames"])]
    pub synthetic: Option<usize>,
    /// JSON config for model size and schedule; injection and encoding are ignored.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{context}: {e}"))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if !path.is_file() {
        return Err(CliError::Usage(format!("input file {} does not exist", path.display())));
    }
    fs::read_to_string(path).map_err(data(&path.display().to_string()))
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, why: &str) -> Result<&'a Path, CliError> {
    path.as_deref().ok_or_else(|| CliError::Usage(format!("{why} needs --{flag}")))
}

fn check_output(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(CliError::Usage(format!("output directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(data(&path.display().to_string())),
        None => stdout.write_all(text.as_bytes()).map_err(data("stdout")),
    }
}

fn check_outputs<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<(), CliError> {
    paths.into_iter().try_for_each(|p| check_output(p))
}

fn load_corpus(args: &DataArgs) -> Result<Corpus, CliError> {
    let trees = require(&args.trees, "trees", "this command")?;
    let frames = require(&args.frames, "frames", "this command")?;
    let opt = |p: &Option<PathBuf>| p.as_deref().map(read_input).transpose();
    let texts = CorpusTexts {
        trees: read_input(trees)?,
        deps: opt(&args.deps)?,
        frames: read_input(frames)?,
        noisy_trees: opt(&args.noisy_trees)?,
        noisy_deps: opt(&args.noisy_deps)?,
    };
    Corpus::from_texts(&texts).map_err(data("corpus"))
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = read_input(path)?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let problems = config.validate();
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(CliError::Usage(format!("{}: invalid config\n  {}", path.display(), problems.join("\n  "))))
    }
}

fn cmd_encode(args: &EncodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_outputs(&args.out)?;
    let mut out = String::new();
    match args.format {
        SyntaxEncoding::FullC => {
            let trees = parse_ptb(&read_input(require(&args.trees, "trees", "full-c")?)?).map_err(data("trees"))?;
            for (sentence, tree) in &trees {
                write_full_c_block(&mut out, sentence, &encode_full_c(&normalize_unaries(tree)));
            }
        }
        SyntaxEncoding::SrlC => {
            let trees_path = require(&args.trees, "trees", "srl-c")?;
            let frames_path = require(&args.frames, "frames", "srl-c")?;
            let trees = parse_ptb(&read_input(trees_path)?).map_err(data("trees"))?;
            let frames = parse_frames(&read_input(frames_path)?).map_err(data("frames"))?;
            if trees.len() != frames.len() {
                return Err(CliError::Data(format!("{} trees but {} frame blocks", trees.len(), frames.len())));
            }
            for (i, ((sentence, tree), (fs, frames))) in trees.iter().zip(&frames).enumerate() {
                if sentence != fs {
                    return Err(CliError::Data(format!("sentence {i}: tokens of trees and frames differ")));
                }
                for frame in frames {
                    let seq = srl_c_features(tree, frame.predicate()).map_err(data(&format!("sentence {i}")))?;
                    write_srl_c_block(&mut out, sentence, frame.predicate(), &seq);
                }
            }
        }
        SyntaxEncoding::Dep => {
            let deps = parse_conll_dep(&read_input(require(&args.deps, "deps", "dep")?)?).map_err(data("deps"))?;
            for (sentence, graph) in &deps {
                write_dep_block(&mut out, sentence, &encode_dep(graph));
            }
        }
    }
    emit(&args.out, &out, stdout)
}

fn sentence_lenient(tokens: &[String]) -> Sentence {
    let tokens = tokens.iter().map(|t| if t.is_empty() { "_".to_string() } else { t.clone() });
    Sentence::new(tokens).expect("every token is non-empty")
}

fn cmd_decode(args: &DecodeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    check_outputs(&args.out)?;
    let text = read_input(&args.input)?;
    let blocks = match args.mode {
        ModeArg::Strict => read_blocks(&text).map_err(data("input"))?,
        ModeArg::Lenient => read_blocks_ragged(&text),
    };
    let token_lines: Option<Vec<Vec<String>>> = match &args.tokens {
        Some(p) => {
            let t = read_input(p)?;
            let lines: Vec<Vec<String>> = t
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| l.split_whitespace().map(str::to_string).collect())
                .collect();
            if lines.len() != blocks.len() {
                return Err(CliError::Data(format!("{} token lines for {} sentences", lines.len(), blocks.len())));
            }
            Some(lines)
        }
        None => None,
    };
    let mode = match args.mode {
        ModeArg::Strict => DecodeMode::Strict,
        ModeArg::Lenient => DecodeMode::Lenient,
    };
    let mut out = String::new();
    let mut failures = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let tokens = token_lines.as_ref().map_or(&block.tokens, |t| &t[i]);
        let result = (|| {
            let seq = full_c_from_block(block, mode).map_err(|e| e.to_string())?;
            let sentence = match mode {
                DecodeMode::Strict => Sentence::new(tokens.clone()).map_err(|e| e.to_string())?,
                DecodeMode::Lenient => sentence_lenient(tokens),
            };
            decode_full_c(&seq, &sentence, mode).map_err(|e| e.to_string())
        })();
        match result {
            Ok(tree) => {
                out.push_str(&write_ptb(&tree));
                out.push('\n');
            }
            Err(e) => failures.push(format!("sentence {i}: {e}")),
        }
    }
    if !failures.is_empty() {
        for f in &failures {
            let _ = writeln!(stderr, "{f}");
        }
        return Err(CliError::Data(format!("{} of {} sentences failed to decode", failures.len(), blocks.len())));
    }
    emit(&args.out, &out, stdout)
}

fn cmd_train(args: &TrainArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    check_outputs(std::iter::once(&args.out).chain(&args.metrics))?;
    let mut config = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.tagger.seed = seed;
        config.train.seed = seed;
    }
    let corpus = load_corpus(&args.data)?;
    let parts = split(corpus.len(), config.train.seed);
    let examples = |idx: &[usize]| corpus.examples(&config.tagger, idx, false).map_err(data("corpus"));
    let (train_ex, dev_ex, test_ex) = (examples(&parts.train)?, examples(&parts.dev)?, examples(&parts.test)?);
    let outcome = train(&config.tagger, &config.train, &train_ex, &dev_ex).map_err(data("training"))?;
    checkpoint::save(&outcome.tagger, &args.out).map_err(data(&args.out.display().to_string()))?;
    if let Some(path) = &args.metrics {
        fs::write(path, outcome.metrics_jsonl()).map_err(data(&path.display().to_string()))?;
    }
    let test = evaluate(&outcome.tagger, &test_ex).map_err(data("evaluation"))?;
    let _ = writeln!(stderr, "best epoch {} of {}; test {test}", outcome.best_epoch, outcome.log.len());
    Ok(())
}

fn read_frames_file(path: &Path) -> Result<Vec<(Sentence, Vec<SrlFrame>)>, CliError> {
    parse_frames(&read_input(path)?).map_err(data(&path.display().to_string()))
}

fn flatten(frames: Vec<(Sentence, Vec<SrlFrame>)>) -> Vec<SrlFrame> {
    frames.into_iter().flat_map(|(_, f)| f).collect()
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = match (&args.pred, &args.checkpoint) {
        (Some(pred), None) => {
            let pred = read_frames_file(pred)?;
            let gold = read_frames_file(&args.gold)?;
            if pred.len() != gold.len() {
                return Err(CliError::Data(format!("{} predicted sentences but {} gold", pred.len(), gold.len())));
            }
            srl_f1(&flatten(pred), &flatten(gold)).map_err(data("alignment"))?
        }
        (None, Some(ckpt)) => {
            if !ckpt.is_file() {
                return Err(CliError::Usage(format!("checkpoint {} does not exist", ckpt.display())));
            }
            let tagger = checkpoint::load(ckpt).map_err(data(&ckpt.display().to_string()))?;
            let data_args = DataArgs {
                trees: args.trees.clone(),
                deps: args.deps.clone(),
                frames: Some(args.gold.clone()),
                noisy_trees: None,
                noisy_deps: None,
            };
            let corpus = if tagger.config.injection.feeds_syntax() || args.trees.is_some() {
                load_corpus(&data_args)?
            } else {
                frames_only_corpus(&read_frames_file(&args.gold)?)
            };
            let examples = corpus.examples(&tagger.config, &corpus.all(), false).map_err(data("corpus"))?;
            evaluate(&tagger, &examples).map_err(data("evaluation"))?
        }
        _ => return Err(CliError::Usage("eval needs exactly one of --pred or --checkpoint".into())),
    };
    writeln!(stdout, "{report}").map_err(data("stdout"))
}

/// Corpus without syntax for modes that never read it; a flat tree stands
/// in for the missing parse.
fn frames_only_corpus(frames: &[(Sentence, Vec<SrlFrame>)]) -> Corpus {
    use crate::train::AnnotatedSentence;
    use crate::treebank::{Bracket, ConstTree};
    let sentences = frames
        .iter()
        .map(|(sentence, frames)| {
            let words = sentence.tokens().iter().map(|w| Bracket::word("XX", w.as_str())).collect();
            AnnotatedSentence {
                sentence: sentence.clone(),
                tree: ConstTree::from_bracket(&Bracket::phrase("X", words)).expect("flat tree over non-empty tokens"),
                deps: None,
                frames: frames.clone(),
                noisy_tree: None,
                noisy_deps: None,
            }
        })
        .collect();
    Corpus { sentences }
}

fn cmd_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let read = |p: &Path| -> Result<Vec<Vec<Vec<String>>>, CliError> {
        let blocks = read_blocks(&read_input(p)?).map_err(data(&p.display().to_string()))?;
        Ok(blocks.into_iter().map(|b| b.rows).collect())
    };
    let rate = divergence_rate(&read(&args.a)?, &read(&args.b)?).map_err(data("alignment"))?;
    writeln!(stdout, "{rate:.4}").map_err(data("stdout"))
}

/// Model size and schedule used by `matrix` when no config is given.
pub fn default_matrix_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.train.epochs = 80;
    c.train.patience = 20;
    c
}

fn cmd_matrix(args: &MatrixArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_outputs(&args.out)?;
    let config = match &args.config {
        Some(p) => read_config(p)?,
        None => default_matrix_config(),
    };
    let corpus = match (args.synthetic, &args.data.trees) {
        (Some(n), _) => synthetic::generate(n, args.seed),
        (None, Some(_)) => load_corpus(&args.data)?,
        (None, None) => synthetic::bundled(),
    };
    let grid = Grid::full(config.tagger, config.train, args.seed);
    let rows = run_matrix(&corpus, &grid).map_err(data("matrix"))?;
    emit(&args.out, &write_matrix_tsv(&rows), stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Encode(a) => cmd_encode(a, stdout),
        Command::Decode(a) => cmd_decode(a, stdout, stderr),
        Command::Train(a) => cmd_train(a, stderr),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Stats(a) => cmd_stats(a, stdout),
        Command::Matrix(a) => cmd_matrix(a, stdout),
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                2
            } else {
                let _ = write!(stdout, "{e}");
                0
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}
