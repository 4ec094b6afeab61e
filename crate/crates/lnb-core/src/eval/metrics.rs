//! Classification metrics on paired prediction/gold slices.

use crate::error::{Error, Result};
use crate::featurize::Polarity;

fn check_pair(predictions: &[Polarity], golds: &[Polarity]) -> Result<()> {
    if predictions.len() != golds.len() {
        return Err(Error::LengthMismatch {
            predicted: predictions.len(),
            actual: golds.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    Ok(())
}

/// F1 of the negative class: harmonic mean of negative precision and
/// recall, 0 when both are 0.
pub fn f1_negative(predictions: &[Polarity], golds: &[Polarity]) -> Result<f64> {
    check_pair(predictions, golds)?;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (pred, gold) in predictions.iter().zip(golds) {
        match (pred, gold) {
            (Polarity::Negative, Polarity::Negative) => tp += 1,
            (Polarity::Negative, Polarity::Positive) => fp += 1,
            (Polarity::Positive, Polarity::Negative) => fn_ += 1,
            (Polarity::Positive, Polarity::Positive) => {}
        }
    }
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Fraction of predictions matching the gold labels.
pub fn accuracy(predictions: &[Polarity], golds: &[Polarity]) -> Result<f64> {
    check_pair(predictions, golds)?;
    let correct = predictions
        .iter()
        .zip(golds)
        .filter(|(p, g)| p == g)
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::Polarity::{Negative, Positive};

    #[test]
    fn perfect_predictions_score_one() {
        let golds = [Positive, Negative, Negative, Positive];
        assert_eq!(f1_negative(&golds, &golds).unwrap(), 1.0);
        assert_eq!(accuracy(&golds, &golds).unwrap(), 1.0);
    }

    #[test]
    fn never_predicting_negative_zeroes_f1() {
        let preds = [Positive, Positive, Positive, Positive];
        let golds = [Positive, Positive, Negative, Negative];
        assert_eq!(f1_negative(&preds, &golds).unwrap(), 0.0);
        assert_eq!(accuracy(&preds, &golds).unwrap(), 0.5);
    }

    #[test]
    fn f1_matches_hand_arithmetic() {
        // TP = 3, FP = 1, FN = 2: precision 0.75, recall 0.6.
        let preds = [
            Negative, Negative, Negative, Negative, Positive, Positive, Positive,
        ];
        let golds = [
            Negative, Negative, Negative, Positive, Negative, Negative, Positive,
        ];
        let f1 = f1_negative(&preds, &golds).unwrap();
        assert!((f1 - 2.0 * 0.45 / 1.35).abs() < 1e-12);
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_or_empty_inputs_are_rejected() {
        assert!(matches!(
            f1_negative(&[Positive], &[]),
            Err(Error::LengthMismatch {
                predicted: 1,
                actual: 0
            })
        ));
        assert!(matches!(accuracy(&[], &[]), Err(Error::EmptyEvaluation)));
    }
}
