//! The three experiment protocols: new-task, previous-task, task-effect.
//!
//! Every protocol mines per-fold knowledge first and evaluates from that
//! knowledge alone. Scoring work is independent per (target, fold) cell
//! and runs in parallel; results are merged single-threaded in a fixed
//! order, so reports are byte-stable across runs and thread counts.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::baselines::{llv_vote, model_from_knowledge, ClassifierEnsemble};
use crate::corpus::{DomainCorpus, Sequence};
use crate::error::{Error, Result};
use crate::eval::folds::stratified_kfold;
use crate::eval::report::{EvalReport, MetricRow, SkippedDomain, SystemId, SYSTEMS};
use crate::eval::{domain_seed, ExperimentConfig, Metric, PastSplit, SALT_FOLDS};
use crate::featurize::{Document, Polarity};
use crate::kb::{aggregate_tasks, mine_knowledge, TaskKnowledge};
use crate::learner::build_lnb_from_aggregates;
use crate::nb::NBModel;

/// One cross-validation fold of one domain after mining: counts from the
/// training split plus the held-out test documents. The raw training
/// documents are not retained.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedFold {
    pub knowledge: TaskKnowledge,
    pub test_docs: Vec<Document>,
}

/// Everything the protocols ever need from one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedFolds {
    pub domain_id: String,
    pub folds: Vec<MinedFold>,
    /// Counts over the whole corpus, for full-corpus past knowledge.
    pub full: TaskKnowledge,
}

/// Splits a domain into seeded stratified folds and mines knowledge from
/// each training split. The fold seed depends only on (config seed,
/// domain id), so adding or reordering domains never reshuffles another
/// domain's folds.
pub fn mine_domain_folds(corpus: &DomainCorpus, config: &ExperimentConfig) -> Result<MinedFolds> {
    let seed = domain_seed(config.seed, &corpus.domain_id, SALT_FOLDS);
    let splits = stratified_kfold(&corpus.docs, config.folds, seed)?;
    let mut folds = Vec::with_capacity(splits.len());
    for split in &splits {
        let train: Vec<Document> = split
            .train
            .iter()
            .map(|&i| corpus.docs[i].clone())
            .collect();
        let knowledge = mine_knowledge(&corpus.domain_id, &train)?;
        let test_docs = split.test.iter().map(|&i| corpus.docs[i].clone()).collect();
        folds.push(MinedFold {
            knowledge,
            test_docs,
        });
    }
    let full = mine_knowledge(&corpus.domain_id, &corpus.docs)?;
    Ok(MinedFolds {
        domain_id: corpus.domain_id.clone(),
        folds,
        full,
    })
}

fn golds_of(docs: &[Document]) -> Result<Vec<Polarity>> {
    docs.iter()
        .map(|d| d.label.ok_or_else(|| Error::UnlabeledDoc(d.domain.clone())))
        .collect()
}

fn score_with<F: Fn(&Document) -> Result<Polarity>>(
    classify: F,
    test: &[Document],
    golds: &[Polarity],
    metric: Metric,
) -> Result<f64> {
    let predictions: Vec<Polarity> = test.iter().map(classify).collect::<Result<_>>()?;
    metric.compute(&predictions, golds)
}

fn index_mined<'a>(
    mined: &'a [MinedFolds],
    config: &ExperimentConfig,
) -> Result<BTreeMap<&'a str, &'a MinedFolds>> {
    let mut map = BTreeMap::new();
    for m in mined {
        if m.folds.len() != config.folds {
            return Err(Error::InvalidConfig(format!(
                "domain {:?} has {} mined folds, config expects {}",
                m.domain_id,
                m.folds.len(),
                config.folds
            )));
        }
        if map.insert(m.domain_id.as_str(), m).is_some() {
            return Err(Error::DuplicateDomain(m.domain_id.clone()));
        }
    }
    Ok(map)
}

fn check_sequence(seq: &Sequence, known: impl Fn(&str) -> bool) -> Result<()> {
    if seq.domains.len() < 2 {
        return Err(Error::SequenceTooShort {
            name: seq.name.clone(),
            len: seq.domains.len(),
        });
    }
    for domain in &seq.domains {
        if !known(domain) {
            return Err(Error::UnknownDomainInSequence {
                sequence: seq.name.clone(),
                domain: domain.clone(),
            });
        }
    }
    Ok(())
}

/// Evaluates every domain as the new target with all other domains as
/// past knowledge.
///
/// Per (target, fold): the target's model comes from its training split;
/// past knowledge comes from each other domain's same-index training
/// split or full corpus, per `config.past_split`. Domains too small to
/// fold are left out entirely (as target and as past) and flagged.
pub fn run_new_task_eval(
    corpora: &[DomainCorpus],
    config: &ExperimentConfig,
) -> Result<EvalReport> {
    config.validate()?;
    if corpora.len() < 2 {
        return Err(Error::NotEnoughDomains {
            needed: 2,
            available: corpora.len(),
        });
    }
    let mut ids = BTreeSet::new();
    for corpus in corpora {
        if !ids.insert(corpus.domain_id.as_str()) {
            return Err(Error::DuplicateDomain(corpus.domain_id.clone()));
        }
    }

    let mut mined: Vec<MinedFolds> = Vec::new();
    let mut skipped = Vec::new();
    for corpus in corpora {
        match mine_domain_folds(corpus, config) {
            Ok(m) => mined.push(m),
            Err(e @ (Error::InsufficientClassSize { .. } | Error::NoTrainingData)) => {
                skipped.push(SkippedDomain {
                    domain: corpus.domain_id.clone(),
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    if mined.len() < 2 {
        return Err(Error::NotEnoughDomains {
            needed: 2,
            available: mined.len(),
        });
    }

    // Single-domain fold models serve NB-T and the voting bench.
    let mut singles: BTreeMap<(&str, usize), NBModel> = BTreeMap::new();
    for m in &mined {
        for f in 0..config.folds {
            let model = model_from_knowledge([&m.folds[f].knowledge], config.lambda)?;
            singles.insert((m.domain_id.as_str(), f), model);
        }
    }
    let mut full_models: BTreeMap<&str, NBModel> = BTreeMap::new();
    if config.past_split == PastSplit::Full {
        for m in &mined {
            full_models.insert(
                m.domain_id.as_str(),
                model_from_knowledge([&m.full], config.lambda)?,
            );
        }
    }

    let cells: Vec<(usize, usize)> = (0..mined.len())
        .flat_map(|t| (0..config.folds).map(move |f| (t, f)))
        .collect();
    let scored: Vec<[f64; 5]> = cells
        .par_iter()
        .map(|&(t, f)| {
            let target = &mined[t];
            let target_tk = &target.folds[f].knowledge;
            let test = &target.folds[f].test_docs;
            let golds = golds_of(test)?;
            let past = || {
                mined
                    .iter()
                    .enumerate()
                    .filter(move |(i, _)| *i != t)
                    .map(move |(_, m)| match config.past_split {
                        PastSplit::TrainFolds => &m.folds[f].knowledge,
                        PastSplit::Full => &m.full,
                    })
            };

            let agg = aggregate_tasks(past(), &target.domain_id, config.gamma, config.lambda)?;
            let lnb = build_lnb_from_aggregates(target_tk, &agg, config.sigma, config.lambda);
            let nbt = &singles[&(target.domain_id.as_str(), f)];
            let nbs = model_from_knowledge(past(), config.lambda)?;
            let nbst = model_from_knowledge(past().chain([target_tk]), config.lambda)?;
            let mut members: Vec<(String, NBModel)> = Vec::new();
            for (i, m) in mined.iter().enumerate() {
                if i == t {
                    if config.llv_include_target {
                        members.push((
                            m.domain_id.clone(),
                            singles[&(m.domain_id.as_str(), f)].clone(),
                        ));
                    }
                } else {
                    let model = match config.past_split {
                        PastSplit::TrainFolds => singles[&(m.domain_id.as_str(), f)].clone(),
                        PastSplit::Full => full_models[m.domain_id.as_str()].clone(),
                    };
                    members.push((m.domain_id.clone(), model));
                }
            }
            let ensemble = ClassifierEnsemble::new(members)?;

            let metric = config.metric;
            Ok([
                score_with(|d| nbt.classify(d), test, &golds, metric)?,
                score_with(|d| nbs.classify(d), test, &golds, metric)?,
                score_with(|d| nbst.classify(d), test, &golds, metric)?,
                score_with(|d| llv_vote(&ensemble, d), test, &golds, metric)?,
                score_with(|d| lnb.classify(d), test, &golds, metric)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (&(t, f), values) in cells.iter().zip(&scored) {
        for (system, value) in SYSTEMS.iter().zip(values) {
            rows.push(MetricRow {
                system: *system,
                sequence: None,
                domain: mined[t].domain_id.clone(),
                fold: f,
                future_domains: None,
                value: *value,
            });
        }
    }
    Ok(EvalReport {
        metric: config.metric,
        rows,
        skipped,
    })
}

/// The distinct domains learned within the first `f` future positions of
/// a sequence, minus the target itself.
fn future_set(seq: &Sequence, f: usize) -> BTreeSet<&str> {
    let target = seq.domains[0].as_str();
    seq.domains[1..=f]
        .iter()
        .map(String::as_str)
        .filter(|d| *d != target)
        .collect()
}

/// Targets to re-evaluate for one sequence: every domain learned before
/// the final position, in first-appearance order.
fn prev_targets(seq: &Sequence) -> Vec<&str> {
    let mut seen = BTreeSet::new();
    seq.domains[..seq.domains.len() - 1]
        .iter()
        .filter(|d| seen.insert(d.as_str()))
        .map(String::as_str)
        .collect()
}

/// Scores all five systems for every wanted target and fold within one
/// learned-domain set.
fn score_learned_set<'a>(
    members: &[&'a MinedFolds],
    wanted: &BTreeSet<&'a str>,
    config: &ExperimentConfig,
) -> Result<BTreeMap<(&'a str, usize), [f64; 5]>> {
    let mut singles: BTreeMap<(&str, usize), NBModel> = BTreeMap::new();
    for m in members {
        for f in 0..config.folds {
            let model = model_from_knowledge([&m.folds[f].knowledge], config.lambda)?;
            singles.insert((m.domain_id.as_str(), f), model);
        }
    }
    // NB-ST pools every learned domain, target included, so it is one
    // model per fold; same for the full voting bench.
    let mut nbst: Vec<NBModel> = Vec::new();
    let mut benches: Vec<Option<ClassifierEnsemble>> = Vec::new();
    for f in 0..config.folds {
        nbst.push(model_from_knowledge(
            members.iter().map(|m| &m.folds[f].knowledge),
            config.lambda,
        )?);
        benches.push(if config.llv_include_target {
            let all = members
                .iter()
                .map(|m| {
                    (
                        m.domain_id.clone(),
                        singles[&(m.domain_id.as_str(), f)].clone(),
                    )
                })
                .collect();
            Some(ClassifierEnsemble::new(all)?)
        } else {
            None
        });
    }

    let cells: Vec<(&str, usize)> = wanted
        .iter()
        .flat_map(|t| (0..config.folds).map(move |f| (*t, f)))
        .collect();
    let scored: Vec<((&'a str, usize), [f64; 5])> = cells
        .par_iter()
        .map(|&(t, f)| {
            let target = members
                .iter()
                .find(|m| m.domain_id == t)
                .expect("wanted targets are learned");
            let target_tk = &target.folds[f].knowledge;
            let test = &target.folds[f].test_docs;
            let golds = golds_of(test)?;

            let agg = aggregate_tasks(
                members.iter().map(|m| &m.folds[f].knowledge),
                t,
                config.gamma,
                config.lambda,
            )?;
            let lnb = build_lnb_from_aggregates(target_tk, &agg, config.sigma, config.lambda);
            let nbt = &singles[&(t, f)];
            let nbs = model_from_knowledge(
                members
                    .iter()
                    .filter(|m| m.domain_id != t)
                    .map(|m| &m.folds[f].knowledge),
                config.lambda,
            )?;
            let filtered;
            let ensemble = match &benches[f] {
                Some(bench) => bench,
                None => {
                    let others = members
                        .iter()
                        .filter(|m| m.domain_id != t)
                        .map(|m| {
                            (
                                m.domain_id.clone(),
                                singles[&(m.domain_id.as_str(), f)].clone(),
                            )
                        })
                        .collect();
                    filtered = ClassifierEnsemble::new(others)?;
                    &filtered
                }
            };

            let metric = config.metric;
            let values = [
                score_with(|d| nbt.classify(d), test, &golds, metric)?,
                score_with(|d| nbs.classify(d), test, &golds, metric)?,
                score_with(|d| nbst[f].classify(d), test, &golds, metric)?,
                score_with(|d| llv_vote(ensemble, d), test, &golds, metric)?,
                score_with(|d| lnb.classify(d), test, &golds, metric)?,
            ];
            Ok(((t, f), values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(scored.into_iter().collect())
}

/// Previous-task evaluation from already-mined knowledge: no raw
/// documents are reachable through this signature.
///
/// Each sequence learns its domains in order; afterwards every domain
/// seen before the final position is re-evaluated as the target against
/// the knowledge of all learned domains. Sequences over the same domain
/// set share scores, because every system here depends only on which
/// domains were learned, never on their order.
pub fn run_prev_task_eval_mined(
    mined: &[MinedFolds],
    config: &ExperimentConfig,
) -> Result<EvalReport> {
    config.validate()?;
    if config.sequences.is_empty() {
        return Err(Error::InvalidConfig(
            "previous-task evaluation needs at least one sequence".to_string(),
        ));
    }
    let by_domain = index_mined(mined, config)?;
    for seq in &config.sequences {
        check_sequence(seq, |d| by_domain.contains_key(d))?;
    }

    let mut groups: BTreeMap<BTreeSet<&str>, Vec<&Sequence>> = BTreeMap::new();
    for seq in &config.sequences {
        let learned: BTreeSet<&str> = seq.domains.iter().map(String::as_str).collect();
        groups.entry(learned).or_default().push(seq);
    }

    let mut rows = Vec::new();
    for (learned, seqs) in &groups {
        let members: Vec<&MinedFolds> = learned.iter().map(|d| by_domain[d]).collect();
        let mut wanted: BTreeSet<&str> = BTreeSet::new();
        for seq in seqs {
            wanted.extend(prev_targets(seq));
        }
        let scores = score_learned_set(&members, &wanted, config)?;
        for seq in seqs {
            for target in prev_targets(seq) {
                for f in 0..config.folds {
                    let values = &scores[&(target, f)];
                    for (system, value) in SYSTEMS.iter().zip(values) {
                        rows.push(MetricRow {
                            system: *system,
                            sequence: Some(seq.name.clone()),
                            domain: target.to_string(),
                            fold: f,
                            future_domains: None,
                            value: *value,
                        });
                    }
                }
            }
        }
    }
    Ok(EvalReport {
        metric: config.metric,
        rows,
        skipped: Vec::new(),
    })
}

/// Previous-task evaluation from raw corpora. Consumes the corpora:
/// each domain's documents are dropped right after mining, before any
/// evaluation starts.
pub fn run_prev_task_eval(
    corpora: Vec<DomainCorpus>,
    config: &ExperimentConfig,
) -> Result<EvalReport> {
    config.validate()?;
    let needed: BTreeSet<String> = config
        .sequences
        .iter()
        .flat_map(|s| s.domains.iter().cloned())
        .collect();
    let mut mined = Vec::new();
    for corpus in corpora {
        if needed.contains(&corpus.domain_id) {
            mined.push(mine_domain_folds(&corpus, config)?);
        }
    }
    run_prev_task_eval_mined(&mined, config)
}

/// Task-effect evaluation: each sequence's first domain is the target;
/// for every future-domain count f, the revised model is built from the
/// knowledge of the next f domains alone.
pub fn run_task_effect(corpora: &[DomainCorpus], config: &ExperimentConfig) -> Result<EvalReport> {
    config.validate()?;
    if config.sequences.is_empty() {
        return Err(Error::InvalidConfig(
            "task-effect evaluation needs at least one sequence".to_string(),
        ));
    }
    let mut available: BTreeMap<&str, &DomainCorpus> = BTreeMap::new();
    for corpus in corpora {
        if available
            .insert(corpus.domain_id.as_str(), corpus)
            .is_some()
        {
            return Err(Error::DuplicateDomain(corpus.domain_id.clone()));
        }
    }
    for seq in &config.sequences {
        check_sequence(seq, |d| available.contains_key(d))?;
    }
    let needed: BTreeSet<&str> = config
        .sequences
        .iter()
        .flat_map(|s| s.domains.iter().map(String::as_str))
        .collect();
    let mined: BTreeMap<&str, MinedFolds> = needed
        .iter()
        .map(|d| mine_domain_folds(available[d], config).map(|m| (*d, m)))
        .collect::<Result<_>>()?;

    let mut skipped = Vec::new();
    let mut cells: Vec<(usize, usize, usize)> = Vec::new();
    for (si, seq) in config.sequences.iter().enumerate() {
        for f in 1..seq.domains.len() {
            if future_set(seq, f).is_empty() {
                skipped.push(SkippedDomain {
                    domain: seq.domains[0].clone(),
                    reason: format!(
                        "sequence {:?} has no future domain distinct from the target at count {}",
                        seq.name, f
                    ),
                });
                continue;
            }
            for fold in 0..config.folds {
                cells.push((si, f, fold));
            }
        }
    }

    let scored: Vec<f64> = cells
        .par_iter()
        .map(|&(si, f, fold)| {
            let seq = &config.sequences[si];
            let target = seq.domains[0].as_str();
            let futures = future_set(seq, f);
            let target_m = &mined[target];
            let target_tk = &target_m.folds[fold].knowledge;
            let test = &target_m.folds[fold].test_docs;
            let golds = golds_of(test)?;
            let agg = aggregate_tasks(
                futures.iter().map(|d| &mined[*d].folds[fold].knowledge),
                target,
                config.gamma,
                config.lambda,
            )?;
            let lnb = build_lnb_from_aggregates(target_tk, &agg, config.sigma, config.lambda);
            score_with(|d| lnb.classify(d), test, &golds, config.metric)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = cells
        .iter()
        .zip(scored)
        .map(|(&(si, f, fold), value)| MetricRow {
            system: SystemId::Lnb,
            sequence: Some(config.sequences[si].name.clone()),
            domain: config.sequences[si].domains[0].clone(),
            fold,
            future_domains: Some(f),
            value,
        })
        .collect();
    Ok(EvalReport {
        metric: config.metric,
        rows,
        skipped,
    })
}
