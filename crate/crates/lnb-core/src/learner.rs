//! Knowledge-based learning: building a revised classifier for a target
//! domain from its own counts plus the knowledge base.
//!
//! The revision partitions the union vocabulary into three kinds of words:
//!
//! * domain-reliable words (`v_kb`): a strict majority of non-target tasks
//!   agree on the word's polarity, so the KB's pooled counts are trusted
//!   and split between classes by the reliability ratio R;
//! * target-dependent words (`v_t`): the target's own probability ratio is
//!   decisive, so the target counts are used unchanged;
//! * everything else: target and KB counts are simply added.
//!
//! Reliability wins when a word qualifies for both sets. The revised counts
//! feed the ordinary smoothed NB scorer, so classification cost does not
//! depend on the knowledge base size.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::featurize::{Document, Polarity, CLASSES};
use crate::kb::{KBAggregates, KnowledgeBase, TaskKnowledge};
use crate::nb::{CountTable, NBModel, PerClass};

/// Per-word class-probability ratios inside the target domain.
///
/// Only the positive-over-negative ratio is stored; the other direction is
/// its exact reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    q_pos: BTreeMap<String, f64>,
}

impl RatioTable {
    /// Q for a class: ratio of the word's probability in `class` over the
    /// opposite class. `None` for words outside the target vocabulary.
    pub fn q(&self, class: Polarity, word: &str) -> Option<f64> {
        let q_pos = self.q_pos.get(word)?;
        Some(match class {
            Polarity::Positive => *q_pos,
            Polarity::Negative => q_pos.recip(),
        })
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.q_pos.keys().map(String::as_str)
    }
}

/// The two vocabulary subsets driving branch selection, with the
/// thresholds they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSets {
    pub v_t: BTreeSet<String>,
    pub v_kb: BTreeSet<String>,
    pub sigma: f64,
    /// Strict lower bound for domain-level counts: n/2.
    pub majority_threshold: f64,
}

/// Which rule produced a word's revised counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Domain-reliable: KB counts split by the reliability ratio.
    Kb,
    /// Target-dependent: target counts used unchanged.
    Target,
    /// Neither set claimed the word: counts added.
    Combined,
}

/// A target classifier built from revised counts.
///
/// Scoring delegates to the shared NB machinery over the union vocabulary;
/// the word sets and per-word branch provenance are kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisedModel {
    model: NBModel,
    provenance: BTreeMap<String, Branch>,
    word_sets: WordSets,
}

impl RevisedModel {
    pub fn model(&self) -> &NBModel {
        &self.model
    }

    pub fn word_sets(&self) -> &WordSets {
        &self.word_sets
    }

    pub fn branch(&self, word: &str) -> Option<Branch> {
        self.provenance.get(word).copied()
    }

    pub fn provenance(&self) -> &BTreeMap<String, Branch> {
        &self.provenance
    }

    pub fn revised_count(&self, class: Polarity, word: &str) -> f64 {
        self.model.table().count(class, word)
    }

    pub fn classify(&self, doc: &Document) -> Result<Polarity> {
        self.model.classify(doc)
    }

    pub fn log_posterior(&self, doc: &Document) -> Result<PerClass<f64>> {
        self.model.log_posterior(doc)
    }

    pub fn posterior(&self, doc: &Document) -> Result<PerClass<f64>> {
        self.model.posterior(doc)
    }
}

/// Computes Q = P(w|+)/P(w|−) for every word in the target vocabulary,
/// using the target's own counts, vocabulary size, and smoothing.
pub fn compute_ratios(target: &TaskKnowledge, lambda: f64) -> RatioTable {
    if target.doc_counts.pos == 0 || target.doc_counts.neg == 0 {
        log::warn!(
            "target {:?} lacks documents in one class; its ratios rest on smoothing alone",
            target.domain_id
        );
    }
    let q_pos = target
        .vocab()
        .into_iter()
        .map(|word| {
            let q = target.word_prob(word, Polarity::Positive, lambda)
                / target.word_prob(word, Polarity::Negative, lambda);
            (word.to_string(), q)
        })
        .collect();
    RatioTable { q_pos }
}

/// Selects the target-dependent set (ratio ≥ sigma, either direction) and
/// the domain-reliable set (majority count strictly above n/2).
pub fn select_word_sets(ratios: &RatioTable, agg: &KBAggregates, sigma: f64) -> WordSets {
    let v_t = ratios
        .words()
        .filter(|w| {
            let q = ratios
                .q(Polarity::Positive, w)
                .expect("word from own table");
            q >= sigma || q.recip() >= sigma
        })
        .map(str::to_string)
        .collect();
    let majority_threshold = agg.n as f64 / 2.0;
    let v_kb = agg
        .vocab()
        .into_iter()
        .filter(|w| {
            CLASSES
                .iter()
                .any(|&c| f64::from(agg.m_count(c, w)) > majority_threshold)
        })
        .map(str::to_string)
        .collect();
    WordSets {
        v_t,
        v_kb,
        sigma,
        majority_threshold,
    }
}

/// Produces the revised count for one word under its selected branch.
fn revise_word(
    word: &str,
    target: &TaskKnowledge,
    agg: &KBAggregates,
    sets: &WordSets,
) -> (Branch, PerClass<f64>) {
    if sets.v_kb.contains(word) {
        let m_pos = agg.m_count(Polarity::Positive, word);
        let m_neg = agg.m_count(Polarity::Negative, word);
        let total = m_pos + m_neg;
        // Membership in v_kb requires a count above n/2 ≥ 0, so total ≥ 1.
        assert!(
            total > 0,
            "domain-reliable word {word:?} has no majority votes"
        );
        let r = f64::from(m_pos) / f64::from(total);
        let counts = PerClass::new(
            r * agg.kb_count(Polarity::Positive, word) as f64,
            (1.0 - r) * agg.kb_count(Polarity::Negative, word) as f64,
        );
        (Branch::Kb, counts)
    } else if sets.v_t.contains(word) {
        let counts = PerClass::new(
            target.count(Polarity::Positive, word) as f64,
            target.count(Polarity::Negative, word) as f64,
        );
        (Branch::Target, counts)
    } else {
        let counts = PerClass::new(
            (agg.kb_count(Polarity::Positive, word) + target.count(Polarity::Positive, word))
                as f64,
            (agg.kb_count(Polarity::Negative, word) + target.count(Polarity::Negative, word))
                as f64,
        );
        (Branch::Combined, counts)
    }
}

/// Revises every word in the union of the target and KB vocabularies and
/// wraps the result in a scorable model.
///
/// Class priors come from the target's own document counts; the smoothing
/// denominator runs over the whole union vocabulary.
pub fn revise_counts(
    target: &TaskKnowledge,
    agg: &KBAggregates,
    sets: &WordSets,
    lambda: f64,
) -> RevisedModel {
    let mut union: BTreeSet<&str> = target.vocab();
    union.extend(agg.vocab());

    let mut table = CountTable {
        doc_counts: target.doc_counts,
        ..CountTable::default()
    };
    let mut provenance = BTreeMap::new();
    for word in union {
        let (branch, counts) = revise_word(word, target, agg, sets);
        provenance.insert(word.to_string(), branch);
        table.vocab.insert(word.to_string());
        for class in CLASSES {
            let count = *counts.get(class);
            if count > 0.0 {
                table.add_count(class, word, count);
            }
        }
    }
    let model = NBModel::from_counts(table, lambda)
        .expect("target knowledge guarantees vocabulary and documents");
    RevisedModel {
        model,
        provenance,
        word_sets: sets.clone(),
    }
}

/// Full revision pipeline for one target domain.
///
/// `target` may be a task already stored in the KB (its stored counts are
/// excluded from aggregation by domain id) or one not yet learned; both
/// cases run identically, which is what makes the same code path serve new
/// tasks and re-visits of past tasks.
pub fn build_lnb_model(
    kb: &KnowledgeBase,
    target: &TaskKnowledge,
    gamma: f64,
    sigma: f64,
    lambda: f64,
) -> Result<RevisedModel> {
    let agg = kb.aggregate(&target.domain_id, gamma, lambda)?;
    Ok(build_lnb_from_aggregates(target, &agg, sigma, lambda))
}

/// Revision given precomputed aggregates, for callers that already hold
/// them or build them outside a [`KnowledgeBase`].
pub fn build_lnb_from_aggregates(
    target: &TaskKnowledge,
    agg: &KBAggregates,
    sigma: f64,
    lambda: f64,
) -> RevisedModel {
    let ratios = compute_ratios(target, lambda);
    let sets = select_word_sets(&ratios, agg, sigma);
    revise_counts(target, agg, &sets, lambda)
}

/// Classifies a document under a revised model.
pub fn lnb_classify(model: &RevisedModel, doc: &Document) -> Result<Polarity> {
    model.classify(doc)
}
