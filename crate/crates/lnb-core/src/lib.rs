//! Lifelong naive Bayes (LNB) sentiment classification.
//!
//! This crate learns a sequence of binary sentiment-classification tasks
//! (one task per product domain), retains count-based knowledge from each
//! task in a [`KnowledgeBase`], and builds a revised multinomial naive
//! Bayes classifier for any target domain, new or previously learned,
//! without retraining on any past domain's raw documents.
//!
//! The pipeline has three stages:
//!
//! 1. **Mining** ([`kb::mine_knowledge`]): tally per-class word counts and
//!    document counts from a task's training data. Raw documents are not
//!    retained.
//! 2. **Storage** ([`KnowledgeBase`]): an ordered, persistent collection of
//!    [`TaskKnowledge`] records keyed by domain id.
//! 3. **Revision** ([`learner::build_lnb_model`]): abstract word-level,
//!    ratio, and domain-level knowledge from the KB, partition the
//!    vocabulary into KB-reliable / target-dependent / combined words, and
//!    revise the target's counts word by word to produce a [`RevisedModel`]
//!    scored with the ordinary smoothed multinomial rule.
//!
//! [`baselines`] provides the NB-T / NB-S / NB-ST pooled-training baselines
//! and equal-weight lifelong voting (LLV); [`eval`] reproduces the
//! new-task, previous-task, and task-effect experiment protocols with
//! stratified cross-validation and CSV reporting.

pub mod baselines;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod kb;
pub mod learner;
pub mod nb;

pub use corpus::{
    featurize_reviews, load_dir, load_domain_file, load_sequences, parse_record, read_reviews,
    write_reviews, DomainCorpus, RawDocVault, Sequence,
};
pub use error::{Error, Result};
pub use eval::{
    balanced_sample_indices, generate_synthetic, make_balanced, run_new_task_eval,
    run_prev_task_eval, run_task_effect, EvalReport, ExperimentConfig, Metric, PastSplit,
    SyntheticSpec,
};
pub use featurize::{featurize, Document, Polarity, RawReview, CLASSES};
pub use kb::{aggregate_tasks, mine_knowledge, KBAggregates, KnowledgeBase, TaskKnowledge};
pub use learner::{build_lnb_from_aggregates, build_lnb_model, Branch, RevisedModel};
pub use nb::{train_nb, CountTable, NBModel, PerClass};
