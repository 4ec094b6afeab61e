//! Plain-arithmetic reference computations and random fixtures shared by
//! the integration suites.
//!
//! The reference posterior below deliberately avoids the library's
//! log-space scoring: it multiplies raw probabilities straight from a
//! count table, so agreement with the library is evidence, not tautology.

// Each suite compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lnb_core::{CountTable, Document, PerClass, Polarity, TaskKnowledge, CLASSES};

/// Word pool shared by the random generators below.
pub const POOL: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet",
];

/// Normalized posterior computed with plain products over the table's
/// counts: prior(c) * prod (lambda + n_cw) / (lambda|V| + total_c).
pub fn brute_posterior(table: &CountTable, lambda: f64, doc: &Document) -> PerClass<f64> {
    let total_docs = (table.doc_counts.pos + table.doc_counts.neg) as f64;
    let vocab = table.vocab.len() as f64;
    let mut raw = PerClass::new(0.0f64, 0.0f64);
    for class in CLASSES {
        let prior = *table.doc_counts.get(class) as f64 / total_docs;
        let denom = lambda * vocab + table.total(class);
        let mut product = prior;
        for token in &doc.tokens {
            product *= (lambda + table.count(class, token)) / denom;
        }
        *raw.get_mut(class) = product;
    }
    let z = raw.pos + raw.neg;
    raw.map(|p| p / z)
}

/// Arg-max under the reference posterior; ties go positive.
pub fn brute_classify(table: &CountTable, lambda: f64, doc: &Document) -> Polarity {
    let posterior = brute_posterior(table, lambda, doc);
    if posterior.pos >= posterior.neg {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// A labeled document over the given vocabulary.
pub fn random_doc(rng: &mut ChaCha8Rng, vocab: &[&str], max_len: usize, domain: &str) -> Document {
    let len = rng.gen_range(1..=max_len);
    let tokens = (0..len)
        .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
        .collect();
    let label = if rng.gen_bool(0.5) {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    Document {
        tokens,
        label: Some(label),
        domain: domain.to_string(),
    }
}

/// A small random training set guaranteed to contain both classes.
pub fn random_corpus(rng: &mut ChaCha8Rng, vocab: &[&str], max_docs: usize) -> Vec<Document> {
    let n = rng.gen_range(2..=max_docs.max(2));
    let mut docs: Vec<Document> = (0..n).map(|_| random_doc(rng, vocab, 6, "rand")).collect();
    docs[0].label = Some(Polarity::Positive);
    docs[1].label = Some(Polarity::Negative);
    docs
}

/// A random retained task over the word pool; counts are integers and a
/// word absent from both classes is absent from the vocabulary.
pub fn random_task(rng: &mut ChaCha8Rng, domain: &str) -> TaskKnowledge {
    let mut word_counts: PerClass<BTreeMap<String, u64>> = PerClass::default();
    let mut vocab = BTreeSet::new();
    for word in POOL {
        if rng.gen_bool(0.3) {
            continue;
        }
        let pos = rng.gen_range(0..30u64);
        let neg = rng.gen_range(0..30u64);
        if pos == 0 && neg == 0 {
            continue;
        }
        if pos > 0 {
            word_counts
                .get_mut(Polarity::Positive)
                .insert(word.to_string(), pos);
        }
        if neg > 0 {
            word_counts
                .get_mut(Polarity::Negative)
                .insert(word.to_string(), neg);
        }
        vocab.insert(*word);
    }
    if vocab.is_empty() {
        word_counts
            .get_mut(Polarity::Positive)
            .insert(POOL[0].to_string(), 1);
        vocab.insert(POOL[0]);
    }
    TaskKnowledge {
        domain_id: domain.to_string(),
        doc_counts: PerClass::new(rng.gen_range(1..20), rng.gen_range(1..20)),
        vocab_size: vocab.len(),
        word_counts,
    }
}

/// A random count table with integer and fractional counts, including
/// words present in only one class's count map and zero-count words.
pub fn random_table(rng: &mut ChaCha8Rng) -> CountTable {
    let words = rng.gen_range(1..=12);
    let mut table = CountTable::default();
    for i in 0..words {
        let word = format!("w{i}");
        table.vocab.insert(word.clone());
        for class in CLASSES {
            if rng.gen_bool(0.7) {
                let count = rng.gen_range(0.0..9.0f64);
                table.add_count(class, &word, count);
            }
        }
    }
    table.doc_counts = PerClass::new(rng.gen_range(1..=10), rng.gen_range(1..=10));
    table
}
