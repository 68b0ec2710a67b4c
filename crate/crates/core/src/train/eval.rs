use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::tagger::{Example, Tagger, TaggerError};
use crate::treebank::SrlFrame;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{pred} predicted frames but {gold} gold frames")]
    FrameCount { pred: usize, gold: usize },
    #[error("frame {index}: predicted predicate {pred} but gold predicate {gold}")]
    Predicate { index: usize, pred: usize, gold: usize },
    #[error("{a} sentences on one side but {b} on the other")]
    SentenceCount { a: usize, b: usize },
    #[error("sentence {sentence}: {a} words on one side but {b} on the other")]
    SentenceLength { sentence: usize, a: usize, b: usize },
}

/// Labelled span precision, recall and F1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_counts(correct: usize, predicted: usize, gold: usize) -> Self {
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        EvalReport { precision, recall, f1, correct, predicted, gold }
    }
}

/// `P<TAB>p<TAB>R<TAB>r<TAB>F1<TAB>f` with four decimals.
impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P\t{:.4}\tR\t{:.4}\tF1\t{:.4}", self.precision, self.recall, self.f1)
    }
}

/// Score predicted frames against gold frames paired by position. An
/// argument is correct when label, start and end match a gold argument of
/// the same predicate.
pub fn srl_f1(pred: &[SrlFrame], gold: &[SrlFrame]) -> Result<EvalReport, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::FrameCount { pred: pred.len(), gold: gold.len() });
    }
    let (mut correct, mut predicted, mut total) = (0, 0, 0);
    for (index, (p, g)) in pred.iter().zip(gold).enumerate() {
        if p.predicate() != g.predicate() {
            return Err(EvalError::Predicate { index, pred: p.predicate(), gold: g.predicate() });
        }
        let gold_args: HashSet<_> = g.args().iter().collect();
        correct += p.args().iter().filter(|a| gold_args.contains(a)).count();
        predicted += p.args().len();
        total += g.args().len();
    }
    Ok(EvalReport::from_counts(correct, predicted, total))
}

/// Predict every example and score against its gold frame.
pub fn evaluate(tagger: &Tagger, examples: &[Example]) -> Result<EvalReport, TaggerError> {
    let mut pred = Vec::with_capacity(examples.len());
    let mut gold = Vec::with_capacity(examples.len());
    for ex in examples {
        pred.push(tagger.predict(ex)?);
        gold.push(ex.frame.clone().ok_or(TaggerError::MissingTags)?);
    }
    Ok(srl_f1(&pred, &gold).expect("predictions are aligned with their examples"))
}

/// Fraction of word positions whose feature tuples differ. Both sides hold
/// one entry per sentence and one tuple per word.
pub fn divergence_rate<T: PartialEq>(a: &[Vec<T>], b: &[Vec<T>]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::SentenceCount { a: a.len(), b: b.len() });
    }
    let mut words = 0usize;
    let mut differ = 0usize;
    for (sentence, (sa, sb)) in a.iter().zip(b).enumerate() {
        if sa.len() != sb.len() {
            return Err(EvalError::SentenceLength { sentence, a: sa.len(), b: sb.len() });
        }
        words += sa.len();
        differ += sa.iter().zip(sb).filter(|(x, y)| x != y).count();
    }
    Ok(ratio(differ, words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Argument;

    fn frame(pred: usize, args: &[(&str, usize, usize)]) -> SrlFrame {
        SrlFrame::new(pred, args.iter().map(|&(l, s, e)| Argument::new(l, s, e)).collect(), 12).unwrap()
    }

    #[test]
    fn arithmetic_case() {
        let pred = [frame(1, &[("A0", 2, 3), ("A1", 4, 4)])];
        let gold = [frame(1, &[("A0", 2, 3), ("A1", 5, 5), ("A2", 6, 7), ("AM", 8, 8)])];
        let r = srl_f1(&pred, &gold).unwrap();
        assert_eq!((r.precision, r.recall), (0.5, 0.25));
        assert!((r.f1 - 1.0 / 3.0).abs() < 1e-15);
        let swapped = srl_f1(&gold, &pred).unwrap();
        assert_eq!((swapped.precision, swapped.recall, swapped.f1), (r.recall, r.precision, r.f1));
    }

    #[test]
    fn labels_must_match() {
        let r = srl_f1(&[frame(1, &[("A1", 2, 3)])], &[frame(1, &[("A0", 2, 3)])]).unwrap();
        assert_eq!(r.f1, 0.0);
        assert_eq!(r.to_string(), "P\t0.0000\tR\t0.0000\tF1\t0.0000");
    }

    #[test]
    fn misaligned_lists() {
        assert!(srl_f1(&[frame(1, &[])], &[]).is_err());
        assert_eq!(
            srl_f1(&[frame(1, &[])], &[frame(2, &[])]),
            Err(EvalError::Predicate { index: 0, pred: 1, gold: 2 })
        );
    }

    #[test]
    fn divergence_counts() {
        let a = vec![vec![1, 2, 3], vec![4]];
        let b = vec![vec![1, 0, 3], vec![0]];
        assert_eq!(divergence_rate(&a, &b).unwrap(), 0.5);
        assert_eq!(divergence_rate::<u8>(&[], &[]).unwrap(), 0.0);
        assert!(divergence_rate(&a, &[vec![1, 2, 3], vec![]]).is_err());
    }
}
