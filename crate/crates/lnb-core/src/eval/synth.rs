//! Synthetic review generation and class-balanced resampling.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{DomainCorpus, Sequence};
use crate::error::{Error, Result};
use crate::eval::{domain_seed, SALT_BALANCE, SALT_DOCS, SALT_LEAN, SALT_SEQ};
use crate::featurize::{Polarity, RawReview, CLASSES};
use crate::nb::PerClass;

/// Knobs for the synthetic corpus.
///
/// Every domain mixes one shared sentiment vocabulary with its own noise
/// words. `strength` is the probability mass a class puts on the shared
/// words, so high strength means cross-domain knowledge is reliable and
/// low strength means each domain is mostly on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub domains: usize,
    /// Documents per domain, split evenly between the classes.
    pub docs_per_domain: usize,
    /// Shared sentiment words per polarity.
    pub shared_vocab: usize,
    /// Domain-specific words per domain.
    pub noise_vocab: usize,
    /// Mass in (0, 1] that each class puts on the shared vocabulary.
    pub strength: f64,
    /// Words per document.
    pub doc_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            domains: 20,
            docs_per_domain: 40,
            shared_vocab: 40,
            noise_vocab: 20,
            strength: 0.8,
            doc_len: 12,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: &str| Err(Error::InvalidConfig(detail.to_string()));
        if self.domains < 2 {
            return bad("domains must be at least 2");
        }
        if self.domains > WORD_SPACE {
            return bad("domains must be at most 676");
        }
        if self.docs_per_domain < 2 || self.docs_per_domain % 2 != 0 {
            return bad("docs_per_domain must be even and at least 2");
        }
        if self.shared_vocab == 0 || self.shared_vocab > WORD_SPACE {
            return bad("shared_vocab must be between 1 and 676");
        }
        if self.noise_vocab > WORD_SPACE {
            return bad("noise_vocab must be at most 676");
        }
        if !(self.strength > 0.0 && self.strength <= 1.0) {
            return bad("strength must be in (0, 1]");
        }
        if self.doc_len == 0 {
            return bad("doc_len must be at least 1");
        }
        Ok(())
    }
}

/// The generating distributions, written alongside the corpus so scores
/// can be checked against ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub spec: SyntheticSpec,
    /// `word_probs[domain]` maps each word to its sampling probability
    /// per class. Zero-probability words are omitted.
    pub word_probs: BTreeMap<String, PerClass<BTreeMap<String, f64>>>,
}

/// One generated corpus: labeled reviews per domain, the generating
/// distributions, and learning orders over the domains.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub reviews: Vec<(String, Vec<RawReview>)>,
    pub truth: SyntheticTruth,
    pub sequences: Vec<Sequence>,
}

/// Distinct two-letter suffixes.
const WORD_SPACE: usize = 26 * 26;

// Two lowercase letters, most significant first. The generated words are
// pure ASCII letters, so they survive tokenization unchanged and can
// never collide with a negation trigger.
fn base26(i: usize) -> String {
    assert!(i < WORD_SPACE);
    let digits = [b'a' + (i / 26) as u8, b'a' + (i % 26) as u8];
    String::from_utf8(digits.to_vec()).expect("ascii")
}

fn shared_word(class: Polarity, i: usize) -> String {
    match class {
        Polarity::Positive => format!("pw{}", base26(i)),
        Polarity::Negative => format!("nw{}", base26(i)),
    }
}

fn noise_word(domain_index: usize, i: usize) -> String {
    format!("xw{}{}", base26(domain_index), base26(i))
}

// Mass split between words that agree with the class and words that
// oppose it, inside both the shared and the noise vocabulary.
const ALIGNED_SHARE: f64 = 0.8;

/// Per-class sampling distribution for one domain. Noise words lean
/// toward one class; a class spreads `strength` over the shared words
/// (mostly its own polarity) and the rest over the domain's noise words
/// (mostly those leaning its way). Absent groups forfeit their mass and
/// the rest is renormalized.
fn class_distribution(
    spec: &SyntheticSpec,
    domain_index: usize,
    class: Polarity,
    leanings: &[Polarity],
) -> Vec<(String, f64)> {
    let mut groups: Vec<(Vec<String>, f64)> = Vec::new();
    let shared = |polarity: Polarity| -> Vec<String> {
        (0..spec.shared_vocab)
            .map(|i| shared_word(polarity, i))
            .collect()
    };
    groups.push((shared(class), spec.strength * ALIGNED_SHARE));
    groups.push((shared(class.flip()), spec.strength * (1.0 - ALIGNED_SHARE)));
    let noise = |wanted: Polarity| -> Vec<String> {
        leanings
            .iter()
            .enumerate()
            .filter(|(_, lean)| **lean == wanted)
            .map(|(i, _)| noise_word(domain_index, i))
            .collect()
    };
    let noise_mass = 1.0 - spec.strength;
    groups.push((noise(class), noise_mass * ALIGNED_SHARE));
    groups.push((noise(class.flip()), noise_mass * (1.0 - ALIGNED_SHARE)));

    let mut weighted: Vec<(String, f64)> = Vec::new();
    for (words, mass) in groups {
        if words.is_empty() || mass == 0.0 {
            continue;
        }
        let per_word = mass / words.len() as f64;
        weighted.extend(words.into_iter().map(|w| (w, per_word)));
    }
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    assert!(total > 0.0, "shared groups always carry mass");
    for entry in &mut weighted {
        entry.1 /= total;
    }
    weighted
}

/// Generate a labeled multi-domain corpus together with its ground-truth
/// distributions and ten learning orders (the identity order plus nine
/// seeded shuffles). Fully determined by the [`SyntheticSpec`].
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let domain_ids: Vec<String> = (0..spec.domains).map(|i| format!("d{:02}", i)).collect();

    let mut reviews = Vec::new();
    let mut word_probs = BTreeMap::new();
    for (domain_index, domain_id) in domain_ids.iter().enumerate() {
        let mut lean_rng = ChaCha8Rng::seed_from_u64(domain_seed(spec.seed, domain_id, SALT_LEAN));
        let leanings: Vec<Polarity> = (0..spec.noise_vocab)
            .map(|_| {
                if lean_rng.gen_bool(0.5) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                }
            })
            .collect();

        let mut probs = PerClass::new(BTreeMap::new(), BTreeMap::new());
        let mut samplers = Vec::new();
        for class in CLASSES {
            let dist = class_distribution(spec, domain_index, class, &leanings);
            *probs.get_mut(class) = dist.iter().cloned().collect();
            let words: Vec<String> = dist.iter().map(|(w, _)| w.clone()).collect();
            let weights: Vec<f64> = dist.iter().map(|(_, w)| *w).collect();
            let sampler = WeightedIndex::new(&weights).expect("positive weights");
            samplers.push((class, words, sampler));
        }
        word_probs.insert(domain_id.clone(), probs);

        let mut doc_rng = ChaCha8Rng::seed_from_u64(domain_seed(spec.seed, domain_id, SALT_DOCS));
        let mut domain_reviews = Vec::new();
        for (class, words, sampler) in &samplers {
            for _ in 0..spec.docs_per_domain / 2 {
                let text: Vec<&str> = (0..spec.doc_len)
                    .map(|_| words[sampler.sample(&mut doc_rng)].as_str())
                    .collect();
                domain_reviews.push(RawReview {
                    text: text.join(" "),
                    label: Some(*class),
                    domain: domain_id.clone(),
                });
            }
        }
        reviews.push((domain_id.clone(), domain_reviews));
    }

    let mut sequences = vec![Sequence {
        name: "S1".to_string(),
        domains: domain_ids.clone(),
    }];
    let mut seq_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ SALT_SEQ);
    for i in 2..=10 {
        let mut order = domain_ids.clone();
        order.shuffle(&mut seq_rng);
        sequences.push(Sequence {
            name: format!("S{}", i),
            domains: order,
        });
    }

    Ok(SyntheticDataset {
        reviews,
        truth: SyntheticTruth {
            spec: spec.clone(),
            word_probs,
        },
        sequences,
    })
}

/// Indices of a class-balanced subsample: `per_class` picks from each
/// class, without replacement, returned in ascending order. Deterministic
/// in (seed, domain).
pub fn balanced_sample_indices(
    labels: &[Polarity],
    per_class: usize,
    seed: u64,
    domain: &str,
) -> Result<Vec<usize>> {
    if per_class == 0 {
        return Err(Error::InvalidConfig(
            "per-class sample size must be at least 1".to_string(),
        ));
    }
    let mut by_class = PerClass::new(Vec::new(), Vec::new());
    for (i, label) in labels.iter().enumerate() {
        by_class.get_mut(*label).push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(domain_seed(seed, domain, SALT_BALANCE));
    let mut picked = Vec::with_capacity(per_class * 2);
    for class in CLASSES {
        let pool = by_class.get(class);
        if pool.len() < per_class {
            return Err(Error::InsufficientClassSize {
                scope: format!("domain {:?}", domain),
                class: class.as_str(),
                available: pool.len(),
                needed: per_class,
            });
        }
        let sample = rand::seq::index::sample(&mut rng, pool.len(), per_class);
        picked.extend(sample.into_iter().map(|i| pool[i]));
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Class-balanced copy of a corpus with `per_class` documents per class,
/// preserving original document order.
pub fn make_balanced(corpus: &DomainCorpus, per_class: usize, seed: u64) -> Result<DomainCorpus> {
    let labels: Vec<Polarity> = corpus
        .docs
        .iter()
        .map(|doc| {
            doc.label
                .ok_or_else(|| Error::UnlabeledDoc(corpus.domain_id.clone()))
        })
        .collect::<Result<_>>()?;
    let indices = balanced_sample_indices(&labels, per_class, seed, &corpus.domain_id)?;
    Ok(DomainCorpus {
        domain_id: corpus.domain_id.clone(),
        docs: indices.iter().map(|&i| corpus.docs[i].clone()).collect(),
    })
}
