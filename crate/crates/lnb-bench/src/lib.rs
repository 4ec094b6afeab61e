//! Fixture builders shared by the pipeline benchmarks.

use lnb_core::{featurize_reviews, generate_synthetic, DomainCorpus, SyntheticSpec};

/// Deterministic synthetic corpora sized for benchmarking.
pub fn corpora(domains: usize, docs_per_domain: usize) -> Vec<DomainCorpus> {
    let spec = SyntheticSpec {
        domains,
        docs_per_domain,
        shared_vocab: 60,
        noise_vocab: 40,
        strength: 0.8,
        doc_len: 30,
        seed: 7,
    };
    let dataset = generate_synthetic(&spec).expect("benchmark spec is valid");
    dataset
        .reviews
        .iter()
        .map(|(domain, reviews)| DomainCorpus {
            domain_id: domain.clone(),
            docs: featurize_reviews(domain, reviews).expect("generated docs featurize"),
        })
        .collect()
}

/// A review long enough to exercise tokenization and negation marking.
pub fn long_review_text() -> String {
    let mut text = String::new();
    for i in 0..40 {
        text.push_str("This product is not good, I don't like part ");
        text.push_str(&i.to_string());
        text.push_str(" but the build quality seems excellent overall. ");
    }
    text
}
