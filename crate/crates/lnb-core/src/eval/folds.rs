//! Seeded stratified k-fold splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::featurize::{Document, Polarity};

/// One fold: document indices for training and testing. Both lists are
/// sorted; across the k folds the test lists partition the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits labeled documents into k folds with per-class proportions within
/// one document of the corpus proportions.
///
/// Each class's indices are shuffled once, then dealt round-robin to the
/// folds, so the partition is a deterministic function of the seed.
pub fn stratified_kfold(docs: &[Document], k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if docs.is_empty() {
        return Err(Error::NoTrainingData);
    }
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (idx, doc) in docs.iter().enumerate() {
        match doc.label {
            Some(Polarity::Positive) => pos.push(idx),
            Some(Polarity::Negative) => neg.push(idx),
            None => return Err(Error::UnlabeledDoc(doc.domain.clone())),
        }
    }
    for (class, indices) in [("positive", &pos), ("negative", &neg)] {
        if indices.len() < k {
            return Err(Error::InsufficientClassSize {
                scope: format!("domain {:?}", docs[0].domain),
                class,
                available: indices.len(),
                needed: k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let mut in_fold = vec![0usize; docs.len()];
    for class_indices in [&pos, &neg] {
        for (i, &doc_idx) in class_indices.iter().enumerate() {
            in_fold[doc_idx] = i % k;
        }
    }
    let mut splits = vec![
        FoldSplit {
            train: Vec::new(),
            test: Vec::new(),
        };
        k
    ];
    for (doc_idx, &fold) in in_fold.iter().enumerate() {
        for (j, split) in splits.iter_mut().enumerate() {
            if j == fold {
                split.test.push(doc_idx);
            } else {
                split.train.push(doc_idx);
            }
        }
    }
    Ok(splits)
}
