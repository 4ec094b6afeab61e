//! Cross-module behavior obligations checked over randomized inputs:
//! probability normalization, scoring equivalences, order invariances,
//! count additivity, branch partitioning, fold stratification, and
//! persistence fidelity.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_posterior, random_corpus, random_doc, random_task, POOL};
use lnb_core::baselines::{llv_vote, model_from_knowledge, train_pooled, ClassifierEnsemble};
use lnb_core::eval::stratified_kfold;
use lnb_core::learner::compute_ratios;
use lnb_core::{
    aggregate_tasks, build_lnb_from_aggregates, mine_knowledge, train_nb, Branch, CountTable,
    Document, KnowledgeBase, NBModel, PerClass, Polarity, TaskKnowledge, CLASSES,
};

prop_compose! {
    /// Random count table: fractional counts, one-sided words, and some
    /// zero-count vocabulary entries.
    fn arb_table()(
        entries in prop::collection::vec((0..12u8, any::<bool>(), 0.01..9.0f64), 1..40),
        vocab_only in prop::collection::vec(0..12u8, 0..5),
        pos_docs in 1..10u64,
        neg_docs in 1..10u64,
    ) -> CountTable {
        let mut table = CountTable::default();
        for (idx, positive, count) in entries {
            let class = if positive { Polarity::Positive } else { Polarity::Negative };
            table.add_count(class, &format!("w{idx}"), count);
        }
        for idx in vocab_only {
            table.vocab.insert(format!("w{idx}"));
        }
        table.doc_counts = PerClass::new(pos_docs, neg_docs);
        table
    }
}

prop_compose! {
    fn arb_table_and_doc()(
        table in arb_table(),
        token_ids in prop::collection::vec(0..14u8, 1..8),
    ) -> (CountTable, Document) {
        // Ids 12 and 13 never occur in tables, so out-of-vocabulary
        // tokens are exercised too.
        let doc = Document {
            tokens: token_ids.iter().map(|i| format!("w{i}")).collect(),
            label: None,
            domain: "probe".into(),
        };
        (table, doc)
    }
}

proptest! {
    /// Smoothed word probabilities form a distribution over the vocabulary
    /// for each class.
    #[test]
    fn word_probs_normalize(table in arb_table(), lambda in 0.05..1.0f64) {
        let model = NBModel::from_counts(table, lambda).expect("non-empty vocab");
        for class in CLASSES {
            let sum: f64 = model
                .table()
                .vocab
                .iter()
                .map(|w| model.word_prob(w, class))
                .sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9, "class {class:?} sums to {sum}");
        }
    }

    /// The library's log-space scoring agrees with plain probability
    /// products computed straight from the counts.
    #[test]
    fn log_scoring_matches_plain_products(
        (table, probe) in arb_table_and_doc(),
        lambda in 0.05..1.0f64,
    ) {
        let model = NBModel::from_counts(table.clone(), lambda).expect("non-empty vocab");
        let linear = model.posterior(&probe).expect("scorable");
        let reference = brute_posterior(&table, lambda, &probe);
        prop_assert!((linear.pos - reference.pos).abs() <= 1e-9);
        prop_assert!((linear.neg - reference.neg).abs() <= 1e-9);
    }

    /// Bag-of-words: token order cannot move the posterior.
    #[test]
    fn token_order_is_irrelevant((table, probe) in arb_table_and_doc()) {
        let model = NBModel::from_counts(table, 0.1).expect("non-empty vocab");
        let mut reversed = probe.clone();
        reversed.tokens.reverse();
        let a = model.posterior(&probe).expect("scorable");
        let b = model.posterior(&reversed).expect("scorable");
        prop_assert!((a.pos - b.pos).abs() <= 1e-12);
        prop_assert!((a.neg - b.neg).abs() <= 1e-12);
    }

    /// Stratified folds partition the corpus and spread each class across
    /// test folds as evenly as integer arithmetic allows.
    #[test]
    fn fold_assignment_partitions_and_stratifies(
        pos in 2..20usize,
        neg in 2..20usize,
        k in 2..5usize,
        seed in any::<u64>(),
    ) {
        prop_assume!(pos >= k && neg >= k);
        let mut docs = Vec::new();
        for _ in 0..pos {
            docs.push(Document {
                tokens: vec!["x".into()],
                label: Some(Polarity::Positive),
                domain: "d".into(),
            });
        }
        for _ in 0..neg {
            docs.push(Document {
                tokens: vec!["x".into()],
                label: Some(Polarity::Negative),
                domain: "d".into(),
            });
        }
        let folds = stratified_kfold(&docs, k, seed).expect("splittable");
        prop_assert_eq!(folds.len(), k);

        let mut seen = BTreeSet::new();
        for fold in &folds {
            for &i in &fold.test {
                prop_assert!(seen.insert(i), "index {} in two test folds", i);
            }
            let mut complement: Vec<usize> =
                (0..docs.len()).filter(|i| !fold.test.contains(i)).collect();
            complement.sort_unstable();
            prop_assert_eq!(&fold.train, &complement);

            let test_pos = fold.test.iter().filter(|&&i| i < pos).count();
            let test_neg = fold.test.len() - test_pos;
            prop_assert!(test_pos >= pos / k && test_pos <= pos.div_ceil(k));
            prop_assert!(test_neg >= neg / k && test_neg <= neg.div_ceil(k));
        }
        prop_assert_eq!(seen.len(), docs.len());
    }
}

#[test]
fn target_ratio_directions_are_reciprocal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for round in 0..50 {
        let task = random_task(&mut rng, &format!("d{round}"));
        let ratios = compute_ratios(&task, 0.1);
        for word in task.vocab() {
            let q_pos = ratios.q(Polarity::Positive, word).expect("vocab word");
            let q_neg = ratios.q(Polarity::Negative, word).expect("vocab word");
            assert!(q_pos > 0.0 && q_neg > 0.0);
            assert!(
                (q_pos * q_neg - 1.0).abs() <= 1e-12,
                "{word}: {q_pos} * {q_neg}"
            );
        }
        assert_eq!(ratios.q(Polarity::Positive, "never-seen"), None);
    }
}

#[test]
fn aggregation_and_revision_ignore_task_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let tasks: Vec<TaskKnowledge> = (0..6)
            .map(|i| random_task(&mut rng, &format!("d{i}")))
            .collect();
        let target = random_task(&mut rng, "target");
        let base_agg = aggregate_tasks(&tasks, "target", 2.0, 0.1).expect("non-empty");
        let base_model = build_lnb_from_aggregates(&target, &base_agg, 3.0, 0.1);

        let mut permuted = tasks.clone();
        permuted.shuffle(&mut rng);
        let agg = aggregate_tasks(&permuted, "target", 2.0, 0.1).expect("non-empty");
        // Bitwise equality: u64 count sums and integer domain tallies are
        // order-proof, and revision consumes only those.
        assert_eq!(agg, base_agg);
        assert_eq!(
            build_lnb_from_aggregates(&target, &agg, 3.0, 0.1),
            base_model
        );
    }
}

#[test]
fn pooled_counts_are_task_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let a = random_task(&mut rng, "a");
        let b = random_task(&mut rng, "b");
        let pooled = model_from_knowledge([&a, &b], 0.1).expect("non-empty");
        let union: BTreeSet<&str> = a.vocab().union(&b.vocab()).copied().collect();
        assert_eq!(
            pooled
                .table()
                .vocab
                .iter()
                .map(String::as_str)
                .collect::<BTreeSet<_>>(),
            union
        );
        for word in union {
            for class in CLASSES {
                let expected = (a.count(class, word) + b.count(class, word)) as f64;
                assert_eq!(pooled.table().count(class, word), expected, "{word:?}");
            }
        }
        assert_eq!(
            pooled.table().doc_counts,
            PerClass::new(
                a.doc_counts.pos + b.doc_counts.pos,
                a.doc_counts.neg + b.doc_counts.neg
            )
        );
    }
}

#[test]
fn count_route_matches_document_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..20 {
        let docs_a = random_corpus(&mut rng, POOL, 8);
        let docs_b = random_corpus(&mut rng, POOL, 8);

        let direct = train_nb(&docs_a, 0.1).expect("trainable");
        let task_a = mine_knowledge("a", &docs_a).expect("minable");
        let via_counts = model_from_knowledge([&task_a], 0.1).expect("non-empty");
        assert_eq!(via_counts, direct);

        let task_b = mine_knowledge("b", &docs_b).expect("minable");
        let pooled_counts = model_from_knowledge([&task_a, &task_b], 0.1).expect("non-empty");
        let corpora = [
            lnb_core::DomainCorpus {
                domain_id: "a".into(),
                docs: docs_a,
            },
            lnb_core::DomainCorpus {
                domain_id: "b".into(),
                docs: docs_b,
            },
        ];
        let pooled_docs = train_pooled(&corpora, |_| true, 0.1).expect("trainable");
        assert_eq!(pooled_counts, pooled_docs);
    }
}

#[test]
fn branch_assignment_partitions_union_vocabulary() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let tasks: Vec<TaskKnowledge> = (0..5)
            .map(|i| random_task(&mut rng, &format!("d{i}")))
            .collect();
        let target = random_task(&mut rng, "target");
        let agg = aggregate_tasks(&tasks, "target", 2.0, 0.1).expect("non-empty");
        let model = build_lnb_from_aggregates(&target, &agg, 3.0, 0.1);

        let union: BTreeSet<String> = agg
            .vocab()
            .iter()
            .chain(target.vocab().iter())
            .map(|w| w.to_string())
            .collect();
        assert_eq!(
            model.provenance().keys().cloned().collect::<BTreeSet<_>>(),
            union
        );
        let sets = model.word_sets();
        for (word, branch) in model.provenance() {
            let expected = if sets.v_kb.contains(word) {
                Branch::Kb
            } else if sets.v_t.contains(word) {
                Branch::Target
            } else {
                Branch::Combined
            };
            assert_eq!(*branch, expected, "{word:?}");
        }
    }
}

#[test]
fn voting_is_member_order_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let members: Vec<(String, NBModel)> = (0..5)
        .map(|i| {
            let docs = random_corpus(&mut rng, POOL, 10);
            (format!("d{i}"), train_nb(&docs, 0.1).expect("trainable"))
        })
        .collect();
    let mut reversed = members.clone();
    reversed.reverse();
    let forward = ClassifierEnsemble::new(members).expect("non-empty");
    let backward = ClassifierEnsemble::new(reversed).expect("non-empty");
    for _ in 0..30 {
        let probe = random_doc(&mut rng, POOL, 6, "probe");
        assert_eq!(
            llv_vote(&forward, &probe).expect("votable"),
            llv_vote(&backward, &probe).expect("votable")
        );
    }
}

#[test]
fn knowledge_base_roundtrip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("kb.file");
    let mut kb = KnowledgeBase::new();
    for i in 0..8 {
        kb.add_task(random_task(&mut rng, &format!("d{i}")))
            .expect("unique");
    }
    kb.save(&path).expect("savable");
    let loaded = KnowledgeBase::load(&path).expect("loadable");
    assert_eq!(loaded.tasks(), kb.tasks());
}

#[test]
fn revised_scoring_stays_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let tasks: Vec<TaskKnowledge> = (0..4)
        .map(|i| random_task(&mut rng, &format!("d{i}")))
        .collect();
    let target = random_task(&mut rng, "target");
    let agg = aggregate_tasks(&tasks, "target", 2.0, 0.1).expect("non-empty");
    let model = build_lnb_from_aggregates(&target, &agg, 3.0, 0.1);
    for _ in 0..30 {
        let probe = random_doc(&mut rng, POOL, 6, "probe");
        let posterior = model.posterior(&probe).expect("scorable");
        assert!((posterior.pos + posterior.neg - 1.0).abs() <= 1e-12);
    }
}
