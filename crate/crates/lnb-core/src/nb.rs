//! Multinomial naive Bayes over real-valued count tables.
//!
//! The scorer is shared by plain NB (integer counts from training
//! documents) and the lifelong learner (fractional revised counts), so
//! [`CountTable`] stores counts as `f64`. Scoring runs in log space;
//! agreement with the direct product-form posterior is covered by tests
//! rather than assumed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::{Document, Polarity, CLASSES};

/// A pair of per-class values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerClass<T> {
    #[serde(rename = "positive")]
    pub pos: T,
    #[serde(rename = "negative")]
    pub neg: T,
}

impl<T> PerClass<T> {
    pub fn new(pos: T, neg: T) -> Self {
        PerClass { pos, neg }
    }

    pub fn get(&self, class: Polarity) -> &T {
        match class {
            Polarity::Positive => &self.pos,
            Polarity::Negative => &self.neg,
        }
    }

    pub fn get_mut(&mut self, class: Polarity) -> &mut T {
        match class {
            Polarity::Positive => &mut self.pos,
            Polarity::Negative => &mut self.neg,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> PerClass<U> {
        PerClass {
            pos: f(self.pos),
            neg: f(self.neg),
        }
    }
}

/// Per-class word counts, per-class document counts, and the vocabulary.
///
/// The vocabulary is explicit rather than derived because a model may carry
/// words whose count in one or both classes is zero (smoothing still
/// assigns them probability mass).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountTable {
    pub word_counts: PerClass<BTreeMap<String, f64>>,
    pub doc_counts: PerClass<u64>,
    pub vocab: BTreeSet<String>,
}

impl CountTable {
    /// Count for a word in a class; zero when absent.
    pub fn count(&self, class: Polarity, word: &str) -> f64 {
        self.word_counts
            .get(class)
            .get(word)
            .copied()
            .unwrap_or(0.0)
    }

    /// Sum of all word counts in a class, accumulated in sorted word order
    /// so identical tables always produce bitwise-identical totals.
    pub fn total(&self, class: Polarity) -> f64 {
        self.word_counts.get(class).values().sum()
    }

    /// Adds to a word's count and makes sure the word is in the vocabulary.
    pub fn add_count(&mut self, class: Polarity, word: &str, amount: f64) {
        if let Some(slot) = self.word_counts.get_mut(class).get_mut(word) {
            *slot += amount;
        } else {
            self.word_counts
                .get_mut(class)
                .insert(word.to_string(), amount);
            self.vocab.insert(word.to_string());
        }
    }
}

/// A trained multinomial naive Bayes model.
///
/// Immutable after construction; scoring methods are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct NBModel {
    table: CountTable,
    lambda: f64,
    priors: PerClass<f64>,
    totals: PerClass<f64>,
}

impl NBModel {
    /// Builds a model directly from a count table.
    ///
    /// Priors are the per-class document fractions. A class with zero
    /// documents keeps prior 0 and can never win classification; this is
    /// logged as a warning, not an error, so single-class corpora remain
    /// usable.
    pub fn from_counts(table: CountTable, lambda: f64) -> Result<NBModel> {
        assert!(
            lambda > 0.0 && lambda.is_finite(),
            "smoothing parameter must be positive, got {lambda}"
        );
        if table.vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let total_docs = table.doc_counts.pos + table.doc_counts.neg;
        if total_docs == 0 {
            return Err(Error::NoTrainingData);
        }
        for class in CLASSES {
            for (word, &count) in table.word_counts.get(class) {
                assert!(
                    count >= 0.0 && count.is_finite(),
                    "count for {word:?} in class {class} is {count}"
                );
                assert!(
                    count == 0.0 || table.vocab.contains(word),
                    "counted word {word:?} missing from vocabulary"
                );
            }
        }
        let priors = PerClass::new(
            table.doc_counts.pos as f64 / total_docs as f64,
            table.doc_counts.neg as f64 / total_docs as f64,
        );
        if let Some(class) = single_class_of(&table) {
            log::warn!(
                "all {total_docs} training documents are {class}; the other class has prior 0"
            );
        }
        let totals = PerClass::new(
            table.total(Polarity::Positive),
            table.total(Polarity::Negative),
        );
        Ok(NBModel {
            table,
            lambda,
            priors,
            totals,
        })
    }

    /// Smoothed word probability: (λ + N_{c,w}) / (λ|V| + Σ_v N_{c,v}).
    ///
    /// Defined for any word; words outside the table use count zero.
    pub fn word_prob(&self, word: &str, class: Polarity) -> f64 {
        let v = self.table.vocab.len() as f64;
        (self.lambda + self.table.count(class, word)) / (self.lambda * v + self.totals.get(class))
    }

    /// Unnormalized per-class log scores: log prior + Σ log word prob,
    /// one term per token occurrence. A zero-prior class scores −∞.
    pub fn log_posterior(&self, doc: &Document) -> Result<PerClass<f64>> {
        if doc.tokens.is_empty() {
            return Err(Error::EmptyDocument);
        }
        let mut scores = PerClass::new(0.0, 0.0);
        for class in CLASSES {
            let mut score = self.priors.get(class).ln();
            for token in &doc.tokens {
                score += self.word_prob(token, class).ln();
            }
            *scores.get_mut(class) = score;
        }
        Ok(scores)
    }

    /// Normalized posterior over the two classes.
    pub fn posterior(&self, doc: &Document) -> Result<PerClass<f64>> {
        let lp = self.log_posterior(doc)?;
        let max = lp.pos.max(lp.neg);
        let ep = (lp.pos - max).exp();
        let en = (lp.neg - max).exp();
        let z = ep + en;
        Ok(PerClass::new(ep / z, en / z))
    }

    /// Argmax classification; an exact score tie goes to the positive
    /// class.
    pub fn classify(&self, doc: &Document) -> Result<Polarity> {
        let lp = self.log_posterior(doc)?;
        Ok(if lp.neg > lp.pos {
            Polarity::Negative
        } else {
            Polarity::Positive
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn priors(&self) -> PerClass<f64> {
        self.priors
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    pub fn vocab_size(&self) -> usize {
        self.table.vocab.len()
    }

    /// The only class with training documents, if the corpus was
    /// single-class.
    pub fn single_class(&self) -> Option<Polarity> {
        single_class_of(&self.table)
    }
}

fn single_class_of(table: &CountTable) -> Option<Polarity> {
    match (table.doc_counts.pos, table.doc_counts.neg) {
        (_, 0) => Some(Polarity::Positive),
        (0, _) => Some(Polarity::Negative),
        _ => None,
    }
}

/// Trains a model from labeled documents: counts tallied by token
/// multiplicity, priors from document fractions, vocabulary from all
/// distinct tokens.
pub fn train_nb(docs: &[Document], lambda: f64) -> Result<NBModel> {
    if docs.is_empty() {
        return Err(Error::NoTrainingData);
    }
    let mut table = CountTable::default();
    for doc in docs {
        let class = doc
            .label
            .ok_or_else(|| Error::UnlabeledDoc(doc.domain.clone()))?;
        *table.doc_counts.get_mut(class) += 1;
        for token in &doc.tokens {
            table.add_count(class, token, 1.0);
        }
    }
    NBModel::from_counts(table, lambda)
}
