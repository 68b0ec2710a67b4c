//! Seeded toy-English corpus with gold trees, dependencies and frames.
//!
//! Sentences follow `S -> (PP ,) NP VP (.)` with `VP -> V NP{0,2} (PP)`.
//! The last object may carry its own PP, which produces the classic
//! attachment ambiguity: the words of `saw the man with the hat` are the same
//! whether the PP is an argument of the verb or part of the object. Every
//! argument is a sister of the predicate or of one of its ancestors, so the
//! pruner finds all of them. The noisy parse flips a share of the ambiguous
//! attachments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::{AnnotatedSentence, Corpus, CorpusTexts};
use crate::treebank::{Argument, Bracket, ConstTree, DepGraph, Governor, Sentence, SrlFrame};

const DETS: [&str; 4] = ["the", "a", "this", "every"];
const ADJS: [&str; 5] = ["big", "old", "red", "small", "quiet"];
const NOUNS: [&str; 12] =
    ["dog", "man", "park", "book", "hat", "river", "city", "garden", "letter", "child", "table", "road"];
const PREPS: [&str; 4] = ["with", "in", "near", "on"];
const INTRANSITIVE: [&str; 3] = ["slept", "waited", "smiled"];
const TRANSITIVE: [&str; 6] = ["saw", "found", "took", "moved", "painted", "sold"];
const DITRANSITIVE: [&str; 3] = ["gave", "sent", "showed"];

/// Probability that an ambiguous attachment is flipped in the noisy parse.
pub const DEFAULT_NOISE: f64 = 0.5;

#[derive(Clone, Debug)]
struct NpPlan {
    det: &'static str,
    adj: Option<&'static str>,
    noun: &'static str,
    pp: Option<Box<PpPlan>>,
}

#[derive(Clone, Debug)]
struct PpPlan {
    prep: &'static str,
    np: NpPlan,
}

#[derive(Clone, Debug)]
struct Plan {
    front: Option<PpPlan>,
    subj: NpPlan,
    verb: &'static str,
    objs: Vec<NpPlan>,
    vp_pp: Option<PpPlan>,
    period: bool,
}

fn pick(rng: &mut ChaCha8Rng, items: &[&'static str]) -> &'static str {
    items.choose(rng).expect("non-empty word list")
}

fn np_plan(rng: &mut ChaCha8Rng, allow_pp: bool) -> NpPlan {
    NpPlan {
        det: pick(rng, &DETS),
        adj: rng.gen_bool(0.3).then(|| pick(rng, &ADJS)),
        noun: pick(rng, &NOUNS),
        pp: (allow_pp && rng.gen_bool(0.3)).then(|| Box::new(pp_plan(rng))),
    }
}

fn pp_plan(rng: &mut ChaCha8Rng) -> PpPlan {
    PpPlan { prep: pick(rng, &PREPS), np: np_plan(rng, false) }
}

fn plan(rng: &mut ChaCha8Rng) -> Plan {
    let front = rng.gen_bool(0.25).then(|| pp_plan(rng));
    let subj = np_plan(rng, true);
    let kind = rng.gen_range(0..4);
    let (verb, n_objs) = match kind {
        0 => (pick(rng, &INTRANSITIVE), 0),
        3 => (pick(rng, &DITRANSITIVE), 2),
        _ => (pick(rng, &TRANSITIVE), 1),
    };
    let objs = (0..n_objs).map(|i| np_plan(rng, i + 1 == n_objs)).collect();
    let vp_pp = rng.gen_bool(0.4).then(|| pp_plan(rng));
    Plan { front, subj, verb, objs, vp_pp, period: rng.gen_bool(0.7) }
}

/// Move the trailing PP between the verb phrase and the last object.
fn flip_attachment(plan: &mut Plan) -> bool {
    let Some(last) = plan.objs.last_mut() else { return false };
    match (plan.vp_pp.take(), last.pp.take()) {
        (Some(pp), None) => last.pp = Some(Box::new(pp)),
        (None, Some(pp)) => plan.vp_pp = Some(*pp),
        (vp, np) => {
            plan.vp_pp = vp;
            last.pp = np;
            return false;
        }
    }
    true
}

#[derive(Default)]
struct Builder {
    words: Vec<String>,
    heads: Vec<usize>,
    labels: Vec<String>,
}

impl Builder {
    fn word(&mut self, tag: &str, word: &str) -> (Bracket, usize) {
        self.words.push(word.to_string());
        self.heads.push(0);
        self.labels.push(String::new());
        (Bracket::word(tag, word), self.words.len())
    }

    fn attach(&mut self, dependent: usize, governor: usize, label: &str) {
        self.heads[dependent - 1] = governor;
        self.labels[dependent - 1] = label.to_string();
    }

    fn np(&mut self, np: &NpPlan) -> (Bracket, usize) {
        let (det, d) = self.word("DT", np.det);
        let adj = np.adj.map(|a| self.word("JJ", a));
        let (noun, n) = self.word("NN", np.noun);
        self.attach(d, n, "det");
        let mut base = vec![det];
        if let Some((b, a)) = adj {
            self.attach(a, n, "amod");
            base.push(b);
        }
        base.push(noun);
        let base = Bracket::phrase("NP", base);
        match &np.pp {
            Some(pp) => {
                let (pb, ph) = self.pp(pp);
                self.attach(ph, n, "prep");
                (Bracket::phrase("NP", vec![base, pb]), n)
            }
            None => (base, n),
        }
    }

    fn pp(&mut self, pp: &PpPlan) -> (Bracket, usize) {
        let (prep, p) = self.word("IN", pp.prep);
        let (nb, nh) = self.np(&pp.np);
        self.attach(nh, p, "pobj");
        (Bracket::phrase("PP", vec![prep, nb]), p)
    }

    /// Build a constituent and return it with its head and span.
    fn span<F>(&mut self, build: F) -> (Bracket, usize, usize, usize)
    where
        F: FnOnce(&mut Self) -> (Bracket, usize),
    {
        let start = self.words.len() + 1;
        let (b, h) = build(self);
        (b, h, start, self.words.len())
    }
}

struct Built {
    sentence: Sentence,
    tree: ConstTree,
    deps: DepGraph,
    frame: SrlFrame,
}

fn build(plan: &Plan) -> Built {
    let mut b = Builder::default();
    let mut s_children = Vec::new();
    let mut args = Vec::new();
    let mut verb_deps = Vec::new();
    if let Some(front) = &plan.front {
        let (fb, fh, start, end) = b.span(|b| b.pp(front));
        let (comma, c) = b.word(",", ",");
        s_children.extend([fb, comma]);
        args.push(Argument::new("AM-TMP", start, end));
        verb_deps.extend([(fh, "prep"), (c, "punct")]);
    }
    let (sb, sh, start, end) = b.span(|b| b.np(&plan.subj));
    s_children.push(sb);
    args.push(Argument::new("A0", start, end));
    verb_deps.push((sh, "nsubj"));

    let (vb, v) = b.word("VBD", plan.verb);
    let mut vp_children = vec![vb];
    let obj_roles: &[(&str, &str)] = match plan.objs.len() {
        0 => &[],
        1 => &[("A1", "dobj")],
        _ => &[("A2", "iobj"), ("A1", "dobj")],
    };
    for (obj, &(role, rel)) in plan.objs.iter().zip(obj_roles) {
        let (ob, oh, start, end) = b.span(|b| b.np(obj));
        vp_children.push(ob);
        args.push(Argument::new(role, start, end));
        verb_deps.push((oh, rel));
    }
    if let Some(pp) = &plan.vp_pp {
        let (pb, ph, start, end) = b.span(|b| b.pp(pp));
        vp_children.push(pb);
        args.push(Argument::new("AM-LOC", start, end));
        verb_deps.push((ph, "prep"));
    }
    s_children.push(Bracket::phrase("VP", vp_children));
    if plan.period {
        let (pb, p) = b.word(".", ".");
        s_children.push(pb);
        verb_deps.push((p, "punct"));
    }
    for (d, rel) in verb_deps {
        b.attach(d, v, rel);
    }
    b.labels[v - 1] = "root".to_string();

    let tree = ConstTree::from_bracket(&Bracket::phrase("S", s_children)).expect("generated tree is well formed");
    let governors = b.heads.iter().map(|&h| if h == 0 { Governor::Root } else { Governor::Token(h) }).collect();
    let len = b.words.len();
    Built {
        sentence: Sentence::new(b.words).expect("generated tokens are non-empty"),
        tree,
        deps: DepGraph::new(governors, b.labels).expect("generated dependencies form a tree"),
        frame: SrlFrame::new(v, args, len).expect("generated arguments are disjoint"),
    }
}

/// `n` sentences with one frame each; the noisy parse flips each ambiguous
/// attachment with probability `noise`.
pub fn generate_with_noise(n: usize, seed: u64, noise: f64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = (0..n)
        .map(|_| {
            let gold_plan = plan(&mut rng);
            let gold = build(&gold_plan);
            let mut noisy_plan = gold_plan.clone();
            if rng.gen::<f64>() < noise {
                flip_attachment(&mut noisy_plan);
            }
            let noisy = build(&noisy_plan);
            AnnotatedSentence {
                sentence: gold.sentence,
                tree: gold.tree,
                deps: Some(gold.deps),
                frames: vec![gold.frame],
                noisy_tree: Some(noisy.tree),
                noisy_deps: Some(noisy.deps),
            }
        })
        .collect();
    Corpus { sentences }
}

pub fn generate(n: usize, seed: u64) -> Corpus {
    generate_with_noise(n, seed, DEFAULT_NOISE)
}

/// Size and seed of the corpus shipped in `data/`.
pub const BUNDLED_SIZE: usize = 20;
pub const BUNDLED_SEED: u64 = 7;

/// The 20-sentence corpus shipped with the crate, equal to
/// `generate(BUNDLED_SIZE, BUNDLED_SEED)`.
pub fn bundled() -> Corpus {
    Corpus::from_texts(&bundled_texts()).expect("bundled corpus parses")
}

pub fn bundled_texts() -> CorpusTexts {
    CorpusTexts {
        trees: include_str!("../../data/synthetic20.trees").to_string(),
        deps: Some(include_str!("../../data/synthetic20.deps").to_string()),
        frames: include_str!("../../data/synthetic20.frames").to_string(),
        noisy_trees: Some(include_str!("../../data/synthetic20.noisy.trees").to_string()),
        noisy_deps: Some(include_str!("../../data/synthetic20.noisy.deps").to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pruner::{prune_xue_palmer, pruning_recall};

    #[test]
    fn deterministic_and_round_trips_through_files() {
        let a = generate(30, 3);
        assert_eq!(a, generate(30, 3));
        assert_eq!(Corpus::from_texts(&a.to_texts()).unwrap(), a);
    }

    #[test]
    fn bundled_files_match_generator() {
        assert_eq!(bundled_texts(), generate(BUNDLED_SIZE, BUNDLED_SEED).to_texts());
    }

    #[test]
    fn arguments_are_candidates() {
        let c = generate(200, 11);
        let cands: Vec<_> =
            c.sentences.iter().map(|s| prune_xue_palmer(&s.tree, s.frames[0].predicate()).unwrap()).collect();
        let pairs = cands.iter().zip(c.sentences.iter().map(|s| &s.frames[0]));
        assert_eq!(pruning_recall(pairs), 1.0);
    }

    #[test]
    fn noise_only_touches_ambiguous_sites() {
        let c = generate_with_noise(200, 5, 1.0);
        let changed = c.sentences.iter().filter(|s| s.noisy_tree.as_ref() != Some(&s.tree)).count();
        assert!(changed > 0);
        for s in &c.sentences {
            assert_eq!(s.noisy_tree.as_ref().unwrap().sentence(), s.sentence);
        }
        let clean = generate_with_noise(50, 5, 0.0);
        assert!(clean.sentences.iter().all(|s| s.noisy_tree.as_ref() == Some(&s.tree)));
    }

    #[test]
    fn example_sentence_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut p = plan(&mut rng);
        p.front = None;
        p.period = true;
        p.subj = NpPlan { det: "the", adj: None, noun: "man", pp: None };
        p.verb = "saw";
        p.objs = vec![NpPlan { det: "a", adj: None, noun: "dog", pp: None }];
        p.vp_pp = Some(PpPlan { prep: "with", np: NpPlan { det: "the", adj: None, noun: "hat", pp: None } });
        let built = build(&p);
        assert_eq!(
            crate::treebank::write_ptb(&built.tree),
            "(S (NP (DT the) (NN man)) (VP (VBD saw) (NP (DT a) (NN dog)) (PP (IN with) (NP (DT the) (NN hat)))) (. .))"
        );
        assert_eq!(
            built.frame.args(),
            [Argument::new("A0", 1, 2), Argument::new("A1", 4, 5), Argument::new("AM-LOC", 6, 8)]
        );
        assert!(flip_attachment(&mut p));
        let flipped = build(&p);
        assert_eq!(flipped.frame.args()[1], Argument::new("A1", 4, 8));
        assert_eq!(flipped.deps.governor(6), Governor::Token(5));
    }
}
