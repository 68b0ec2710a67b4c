//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synsrl::const_codec::{decode_full_c, encode_full_c, normalize_unaries, skeleton, DecodeMode};
use synsrl::dep_codec::encode_dep;
use synsrl::features::SyntaxEncoding;
use synsrl::pruner::{prune_xue_palmer, pruning_recall, tag_srl_c, SrlCTag};
use synsrl::tagger::{build_vocab, crf, multitask_loss, Example, Head, Injection, Tagger, TaggerConfig};
use synsrl::train::{divergence_rate, evaluate, split, synthetic, train, TrainSpec};
use synsrl::treebank::{parse_conll_dep, write_ptb, Argument, Bracket, SrlFrame};

type Outcome = Result<String, String>;

/// Name, check and optional runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn full_c_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let total = 10_000;
    for i in 0..total {
        let n = rng.gen_range(1..=12);
        let tree = normalize_unaries(&common::random_tree(&mut rng, n, 8));
        let seq = encode_full_c(&tree);
        let back = decode_full_c(&seq, &tree.sentence(), DecodeMode::Strict).map_err(|e| format!("tree {i}: {e}"))?;
        let want = skeleton(&tree);
        ensure(back == want, || format!("tree {i}: {} decoded as {}", write_ptb(&want), write_ptb(&back)))?;
    }
    Ok(format!("{total} trees reconstructed"))
}

fn dependency_golden() -> Outcome {
    let text = "1\tThe\t2\tdet\n2\tseeds\t4\tnsubj\n3\talready\t4\tdep\n4\tare\t0\troot\n\
                5\tin\t4\tprep\n6\tthe\t7\tdet\n7\tscript\t5\tpobj\n";
    let parsed = parse_conll_dep(text).map_err(|e| e.to_string())?;
    let feats = encode_dep(&parsed[0].1).feats;
    let rows: [Vec<String>; 5] = [
        feats.iter().map(|f| f.left.to_string()).collect(),
        feats.iter().map(|f| f.right.to_string()).collect(),
        feats.iter().map(|f| f.rg.to_string()).collect(),
        feats.iter().map(|f| f.edge.to_string()).collect(),
        feats.iter().map(|f| f.dl.clone()).collect(),
    ];
    let want = [
        "0 1 0 2 0 0 1",
        "0 0 0 1 1 0 0",
        "1 2 1 4 -1 1 -2",
        "L L N R R L R",
        "det nsubj dep root prep det pobj",
    ];
    for (name, (got, want)) in ["left", "right", "rg", "edge", "dl"].iter().zip(rows.iter().zip(want)) {
        ensure(got.join(" ") == want, || format!("{name}: got `{}`, want `{want}`", got.join(" ")))?;
    }
    Ok("all five rows match".to_string())
}

fn crf_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ties = 0;
    for i in 0..500 {
        let t = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=5);
        let integer = i % 3 == 0;
        let em = common::random_matrix(&mut rng, t, k, integer);
        let tr = common::random_matrix(&mut rng, k + 2, k + 2, integer);
        let (log_z, best, max) = common::brute_force(em.view(), tr.view());
        let z = crf::log_partition(em.view(), tr.view());
        ensure((z - log_z).abs() <= 1e-8 * log_z.abs().max(1.0), || format!("instance {i}: log Z {z} vs {log_z}"))?;
        let (path, score) = crf::viterbi(em.view(), tr.view());
        ensure(path == best, || format!("instance {i}: viterbi {path:?} vs enumeration {best:?}"))?;
        ensure((score - max).abs() <= 1e-12 * max.abs().max(1.0), || format!("instance {i}: score {score} vs {max}"))?;
        let paths = common::all_paths(t, k);
        if paths.iter().filter(|p| common::path_score(em.view(), tr.view(), p) == max).count() > 1 {
            ties += 1;
        }
    }
    Ok(format!("500 instances, {ties} with tied optima"))
}

fn gradient_example(n: usize, m: usize) -> Example {
    let cols: Vec<Vec<String>> = (0..m).map(|f| (0..n).map(|i| format!("v{}", (i * (f + 1)) % 3)).collect()).collect();
    Example {
        words: (0..n).map(|i| format!("w{}", i % 4)).collect(),
        predicate: 3,
        syntax: Some(cols.clone()),
        target_syntax: Some(cols),
        frame: Some(SrlFrame::new(3, vec![Argument::new("A0", 1, 2), Argument::new("A1", 4, n)], n).unwrap()),
    }
}

fn gradient_checks() -> Outcome {
    let mut cases = vec![(Injection::Baseline, SyntaxEncoding::SrlC)];
    for inj in [Injection::Input, Injection::Output, Injection::AutoEncoder] {
        cases.extend(SyntaxEncoding::ALL.into_iter().map(|e| (inj, e)));
    }
    let mut worst: f64 = 0.0;
    for (injection, encoding) in cases {
        let cfg = TaggerConfig {
            injection,
            encoding,
            word_dim: 3,
            predicate_dim: 2,
            feature_dim: 2,
            hidden: 4,
            layers: 2,
            ..TaggerConfig::default()
        };
        let ex = gradient_example(5, encoding.feature_count());
        let vocabs = build_vocab(&cfg, std::slice::from_ref(&ex)).map_err(|e| e.to_string())?;
        let tagger = Tagger::new(cfg, vocabs).map_err(|e| e.to_string())?;
        let sent = tagger.encode(&ex).map_err(|e| e.to_string())?;
        for (block, err) in common::gradient_errors(&tagger, &sent, 1e-4) {
            worst = worst.max(err);
            ensure(err < 1e-4, || format!("{injection}/{}: block {block} relative error {err:.3e}", encoding.title()))?;
        }
    }
    Ok(format!("10 configurations, worst block error {worst:.2e}"))
}

fn overfit() -> Outcome {
    let corpus = synthetic::bundled();
    let cfg = TaggerConfig::default();
    let examples = corpus.examples(&cfg, &corpus.all(), false).map_err(|e| e.to_string())?;
    let spec = TrainSpec { epochs: 200, patience: 200, ..TrainSpec::default() };
    let a = train(&cfg, &spec, &examples, &[]).map_err(|e| e.to_string())?;
    let b = train(&cfg, &spec, &examples, &[]).map_err(|e| e.to_string())?;
    let f1 = evaluate(&a.tagger, &examples).map_err(|e| e.to_string())?.f1;
    ensure(f1 == 1.0, || format!("train F1 {f1}"))?;
    ensure(a.metrics_jsonl() == b.metrics_jsonl() && a.tagger.params == b.tagger.params, || {
        "two runs with the same seed differ".to_string()
    })?;
    let first = a.log.iter().position(|m| m.dev_f1 == 1.0).map_or(0, |p| p + 1);
    Ok(format!("train F1 1.0 first reached at epoch {first}, runs identical"))
}

fn directional() -> Outcome {
    let corpus = synthetic::generate(300, 17);
    let spec_for = |seed| TrainSpec { epochs: 15, patience: 15, seed, ..TrainSpec::default() };
    let mut wins = 0;
    let mut detail = Vec::new();
    for seed in 1..=3 {
        let parts = split(corpus.len(), seed);
        let mut f1 = [0.0; 2];
        for (slot, injection) in [Injection::Baseline, Injection::Input].into_iter().enumerate() {
            let cfg = TaggerConfig { injection, encoding: SyntaxEncoding::SrlC, seed, ..TaggerConfig::default() };
            let tr = corpus.examples(&cfg, &parts.train, false).map_err(|e| e.to_string())?;
            let dev = corpus.examples(&cfg, &parts.dev, false).map_err(|e| e.to_string())?;
            let out = train(&cfg, &spec_for(seed), &tr, &dev).map_err(|e| e.to_string())?;
            f1[slot] = evaluate(&out.tagger, &dev).map_err(|e| e.to_string())?.f1;
        }
        if f1[1] >= f1[0] {
            wins += 1;
        }
        detail.push(format!("seed {seed}: {:.4} vs {:.4}", f1[1], f1[0]));
    }
    let line = format!("input+SRL-C vs baseline dev F1, {}", detail.join(", "));
    ensure(wins >= 2, || line.clone())?;
    Ok(line)
}

fn multitask() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = 7;
    for m in [1, 2, 5] {
        let sizes: Vec<usize> = (0..m).map(|f| 3 + 2 * f).collect();
        let heads: Vec<Head> = sizes
            .iter()
            .map(|&v| Head { w: ndarray::Array2::zeros((v, 6)), b: ndarray::Array1::zeros(v) })
            .collect();
        let states = common::random_matrix(&mut rng, t, 6, false);
        let targets: Vec<Vec<usize>> = sizes.iter().map(|&v| (0..t).map(|_| rng.gen_range(0..v)).collect()).collect();
        let got = multitask_loss(states.view(), &heads, &targets);
        let want: f64 = sizes.iter().map(|&v| t as f64 * (v as f64).ln()).sum();
        ensure((got - want).abs() < 1e-9, || format!("m = {m}: {got} vs closed form {want}"))?;
    }

    let corpus = synthetic::bundled();
    let spec = TrainSpec { epochs: 200, patience: 200, ..TrainSpec::default() };
    let mut detail = Vec::new();
    for encoding in SyntaxEncoding::ALL {
        let cfg = TaggerConfig { injection: Injection::AutoEncoder, encoding, ..TaggerConfig::default() };
        let examples = corpus.examples(&cfg, &corpus.all(), false).map_err(|e| e.to_string())?;
        let out = train(&cfg, &spec, &examples, &[]).map_err(|e| e.to_string())?;
        let mut aux = 0.0;
        let mut words = 0;
        for ex in &examples {
            let sent = out.tagger.encode(ex).map_err(|e| e.to_string())?;
            aux += out.tagger.loss(&sent).map_err(|e| e.to_string())?.aux;
            words += ex.words.len();
        }
        let bound = 0.01 * words as f64 * encoding.feature_count() as f64;
        ensure(aux < bound, || format!("{}: aux {aux:.4} not below {bound:.4}", encoding.title()))?;
        detail.push(format!("{} aux {aux:.4} < {bound:.2}", encoding.title()));
    }
    Ok(format!("closed form holds for m = 1, 2, 5; {}", detail.join(", ")))
}

/// Spans of the sisters of every node on the path from word `pred` to the
/// root, followed by the spans of its children for a PP sister when
/// `expand_pp` is set. Returns the number of edges on that path.
fn spine_sisters(b: &Bracket, start: usize, pred: usize, expand_pp: bool, out: &mut Vec<(usize, usize)>) -> usize {
    fn width(b: &Bracket) -> usize {
        match b {
            Bracket::Word { .. } => 1,
            Bracket::Phrase { children, .. } => children.iter().map(width).sum(),
        }
    }
    let Bracket::Phrase { children, .. } = b else { return 0 };
    let mut at = start;
    let mut climbs = 0;
    for child in children {
        let w = width(child);
        if (at..at + w).contains(&pred) {
            climbs = 1 + spine_sisters(child, at, pred, expand_pp, out);
        }
        at += w;
    }
    let mut at = start;
    for child in children {
        let w = width(child);
        if !(at..at + w).contains(&pred) {
            out.push((at, at + w - 1));
            if expand_pp && child.label() == "PP" {
                if let Bracket::Phrase { children: grand, .. } = child {
                    let mut g_at = at;
                    for g in grand {
                        out.push((g_at, g_at + width(g) - 1));
                        g_at += width(g);
                    }
                }
            }
        }
        at += w;
    }
    climbs
}

fn pruning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for i in 0..10_000 {
        let n = rng.gen_range(1..=12);
        let tree = common::random_tree(&mut rng, n, 8);
        let pred = rng.gen_range(1..=n);
        let cands = prune_xue_palmer(&tree, pred).map_err(|e| e.to_string())?;
        let mut oracle = Vec::new();
        let climbs = spine_sisters(&tree.to_bracket(), 1, pred, true, &mut oracle);
        let mut got: Vec<(usize, usize)> = cands.spans().map(|s| (s.start, s.end)).collect();
        got.sort();
        oracle.sort();
        ensure(got == oracle, || format!("tree {i} ({}), predicate {pred}: {got:?} vs {oracle:?}", write_ptb(&tree)))?;
        ensure(cands.steps == climbs && cands.steps <= tree.depth(), || {
            format!("tree {i}: {} steps, depth {}", cands.steps, tree.depth())
        })?;
        let tags = tag_srl_c(n, &cands).tags;
        let well_formed = tags.iter().enumerate().all(|(j, t)| match t {
            SrlCTag::I | SrlCTag::A => j > 0 && tags[j - 1] != SrlCTag::O,
            _ => true,
        });
        ensure(well_formed, || format!("tree {i}: ill-formed tags {tags:?}"))?;
        let mut sisters = Vec::new();
        spine_sisters(&tree.to_bracket(), 1, pred, false, &mut sisters);
        let args = sisters.into_iter().map(|(s, e)| Argument::new("A1", s, e)).collect();
        let frame = SrlFrame::new(pred, args, n).map_err(|e| format!("tree {i}: {e}"))?;
        let recall = pruning_recall([(&cands, &frame)]);
        ensure(recall == 1.0, || format!("tree {i}: recall {recall}"))?;
    }
    let corpus = synthetic::generate(300, 29);
    let mut pairs = Vec::new();
    for s in &corpus.sentences {
        for f in &s.frames {
            pairs.push((prune_xue_palmer(&s.tree, f.predicate()).map_err(|e| e.to_string())?, f.clone()));
        }
    }
    let recall = pruning_recall(pairs.iter().map(|(c, f)| (c, f)));
    ensure(recall == 1.0, || format!("synthetic recall {recall}"))?;
    Ok(format!("10000 random trees match the oracle; synthetic recall 1.0 over {} frames", pairs.len()))
}

fn divergence() -> Outcome {
    let a: Vec<Vec<&str>> = vec![vec!["x"; 12], vec!["y"; 8]];
    let same = divergence_rate(&a, &a).map_err(|e| e.to_string())?;
    let other: Vec<Vec<&str>> = vec![vec!["z"; 12], vec!["z"; 8]];
    let all = divergence_rate(&a, &other).map_err(|e| e.to_string())?;
    let mut three = a.clone();
    three[0][0] = "q";
    three[0][5] = "q";
    three[1][7] = "q";
    let part = divergence_rate(&a, &three).map_err(|e| e.to_string())?;
    ensure(same == 0.0 && all == 1.0, || format!("identical {same}, disjoint {all}"))?;
    ensure((part - 0.15).abs() < 1e-15, || format!("3 of 20 gives {part}"))?;
    let (mut ra, mut rb) = (a.clone(), three.clone());
    ra.reverse();
    rb.reverse();
    let reordered = divergence_rate(&ra, &rb).map_err(|e| e.to_string())?;
    ensure(reordered == part, || format!("reordered {reordered} vs {part}"))?;
    Ok("0.0, 1.0 and 0.15 exact, order invariant".to_string())
}

fn matrix_determinism() -> Outcome {
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let args = ["synsrl", "matrix", "--seed", "4"];
        let code = synsrl::cli::run(args, &mut out, &mut err);
        (code, out, String::from_utf8_lossy(&err).into_owned())
    };
    let (code_a, a, err) = run();
    ensure(code_a == 0, || format!("matrix exited {code_a}: {err}"))?;
    let (code_b, b, _) = run();
    ensure(code_b == 0 && a == b, || "two matrix runs differ".to_string())?;
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    Ok(format!("{rows} rows, byte-identical"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Full-C round trip", full_c_round_trip, Some(30)),
        ("dependency features golden rows", dependency_golden, None),
        ("CRF oracle equivalence", crf_oracle, Some(60)),
        ("gradient checks", gradient_checks, Some(60)),
        ("overfit capacity", overfit, Some(60)),
        ("directional oracle", directional, None),
        ("multi-task objective", multitask, None),
        ("pruning", pruning, None),
        ("divergence statistic", divergence, None),
        ("matrix determinism", matrix_determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let clock = Instant::now();
        let mut result = check();
        let took = clock.elapsed();
        if let (Ok(msg), Some(limit)) = (&result, budget) {
            if took > Duration::from_secs(limit) {
                result = Err(format!("{msg}, but took {took:.1?} (limit {limit}s)"));
            }
        }
        match result {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} [{took:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
