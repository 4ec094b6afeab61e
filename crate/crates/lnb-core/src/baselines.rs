//! Comparison systems: pooled naive Bayes (target-only, source-only,
//! source-plus-target) and equal-weight lifelong voting.
//!
//! Pooled models can be trained either from raw documents or from retained
//! [`TaskKnowledge`] counts; count additivity makes the two routes agree,
//! and the count route is what lets previous-task evaluation run without
//! touching any past domain's documents.

use std::collections::BTreeSet;

use crate::corpus::DomainCorpus;
use crate::error::{Error, Result};
use crate::featurize::{Document, Polarity, CLASSES};
use crate::kb::TaskKnowledge;
use crate::nb::{train_nb, CountTable, NBModel, PerClass};

/// Trains one NB model on the concatenation of the selected corpora.
///
/// The predicate picks domains by id: the target alone gives the
/// target-only baseline, everything but the target the source-only one,
/// and everything the source-plus-target one.
pub fn train_pooled(
    corpora: &[DomainCorpus],
    include: impl Fn(&str) -> bool,
    lambda: f64,
) -> Result<NBModel> {
    let docs: Vec<Document> = corpora
        .iter()
        .filter(|c| include(&c.domain_id))
        .flat_map(|c| c.docs.iter().cloned())
        .collect();
    train_nb(&docs, lambda)
}

/// Builds an NB model from retained task counts, summing when several
/// tasks are given. Word counts, document counts, and vocabulary all pool
/// additively, so this matches training on the concatenated documents.
pub fn model_from_knowledge<'a>(
    tasks: impl IntoIterator<Item = &'a TaskKnowledge>,
    lambda: f64,
) -> Result<NBModel> {
    let mut table = CountTable::default();
    let mut any = false;
    for task in tasks {
        any = true;
        table.doc_counts.pos += task.doc_counts.pos;
        table.doc_counts.neg += task.doc_counts.neg;
        for class in CLASSES {
            for (word, &count) in task.word_counts.get(class) {
                if count > 0 {
                    table.add_count(class, word, count as f64);
                }
            }
            // Words counted only in the other class still belong to the
            // pooled vocabulary.
        }
        for word in task.vocab() {
            table.vocab.insert(word.to_string());
        }
    }
    if !any {
        return Err(Error::NoTrainingData);
    }
    NBModel::from_counts(table, lambda)
}

/// All learned per-domain classifiers, in learning order.
#[derive(Debug, Clone)]
pub struct ClassifierEnsemble {
    members: Vec<(String, NBModel)>,
}

impl ClassifierEnsemble {
    pub fn new(members: Vec<(String, NBModel)>) -> Result<ClassifierEnsemble> {
        if members.is_empty() {
            return Err(Error::NoTrainingData);
        }
        let mut seen = BTreeSet::new();
        for (domain, _) in &members {
            if !seen.insert(domain.clone()) {
                return Err(Error::DuplicateDomain(domain.clone()));
            }
        }
        Ok(ClassifierEnsemble { members })
    }

    pub fn members(&self) -> &[(String, NBModel)] {
        &self.members
    }

    /// Member count; construction guarantees it is at least 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Equal-weight vote over every ensemble member.
///
/// The negative class needs a strict majority; an exact tie goes to the
/// positive class, the same rule the individual scorers use.
pub fn llv_vote(ensemble: &ClassifierEnsemble, doc: &Document) -> Result<Polarity> {
    let mut votes = PerClass::new(0usize, 0usize);
    for (_, model) in ensemble.members() {
        *votes.get_mut(model.classify(doc)?) += 1;
    }
    Ok(if votes.neg > votes.pos {
        Polarity::Negative
    } else {
        Polarity::Positive
    })
}
