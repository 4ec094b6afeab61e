//! Experiment harness: cross-validation, metrics, the three evaluation
//! protocols, dataset shaping, and CSV reporting.
//!
//! Every run is a pure function of (corpus, [`ExperimentConfig`]). All
//! randomness flows from the config seed through per-domain, per-purpose
//! derived seeds, so adding a domain or reordering input files never
//! perturbs another domain's folds or samples.

mod folds;
mod metrics;
mod protocols;
mod report;
mod synth;

pub use folds::{stratified_kfold, FoldSplit};
pub use metrics::{accuracy, f1_negative};
pub use protocols::{
    mine_domain_folds, run_new_task_eval, run_prev_task_eval, run_prev_task_eval_mined,
    run_task_effect, MinedFold, MinedFolds,
};
pub use report::{
    write_new_task_csvs, write_prev_task_csvs, write_task_effect_csvs, EvalReport, MetricRow,
    ReferenceRow, SkippedDomain, SystemId, NEW_TASK_REFERENCES, PREV_TASK_REFERENCES, SYSTEMS,
};
pub use synth::{
    balanced_sample_indices, generate_synthetic, make_balanced, SyntheticDataset, SyntheticSpec,
    SyntheticTruth,
};

use serde::{Deserialize, Serialize};

use crate::corpus::Sequence;
use crate::error::{Error, Result};
use crate::featurize::Polarity;

/// Which score a run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// F1 of the negative class; the natural-distribution headline number,
    /// where negatives are the rare class.
    F1Negative,
    /// Plain accuracy; the balanced-distribution headline number.
    Accuracy,
}

impl Metric {
    pub fn compute(self, predictions: &[Polarity], golds: &[Polarity]) -> Result<f64> {
        match self {
            Metric::F1Negative => f1_negative(predictions, golds),
            Metric::Accuracy => accuracy(predictions, golds),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::F1Negative => "f1_negative",
            Metric::Accuracy => "accuracy",
        }
    }
}

/// Where past-domain knowledge comes from in the new-task protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastSplit {
    /// Mine each past domain's full corpus.
    Full,
    /// Mine each past domain's own per-fold training split (80% under the
    /// default five folds).
    TrainFolds,
}

/// Shared knobs for all experiment runners.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub folds: usize,
    pub seed: u64,
    pub metric: Metric,
    pub past_split: PastSplit,
    /// Whether lifelong voting includes the target's own model.
    pub llv_include_target: bool,
    /// Domain orderings for the previous-task and task-effect protocols.
    pub sequences: Vec<Sequence>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lambda: 0.1,
            gamma: 2.0,
            sigma: 3.0,
            folds: 5,
            seed: 0,
            metric: Metric::F1Negative,
            past_split: PastSplit::TrainFolds,
            llv_include_target: true,
            sequences: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: &str| Err(Error::InvalidConfig(detail.to_string()));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be positive and finite");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive and finite");
        }
        if self.folds < 2 {
            return bad("folds must be at least 2");
        }
        Ok(())
    }
}

/// FNV-1a, written out so seed derivation never shifts under a std or
/// dependency upgrade.
pub(crate) fn fnv1a64(text: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

// Purpose salts keep a domain's fold shuffle, balance sample, and
// synthetic streams independent of each other.
pub(crate) const SALT_FOLDS: u64 = 0x464f_4c44;
pub(crate) const SALT_BALANCE: u64 = 0x4241_4c41;
pub(crate) const SALT_LEAN: u64 = 0x4c45_414e;
pub(crate) const SALT_DOCS: u64 = 0x444f_4353;
pub(crate) const SALT_SEQ: u64 = 0x5345_5153;

/// Seed for one (domain, purpose) random stream.
pub(crate) fn domain_seed(seed: u64, domain_id: &str, salt: u64) -> u64 {
    seed ^ fnv1a64(domain_id) ^ salt
}
