//! Experiment results: per-fold rows, derived averages, and CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::Metric;

/// The five systems every protocol run can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SystemId {
    /// Naive Bayes on the target domain's training data only.
    NbT,
    /// Naive Bayes pooled over the non-target source domains.
    NbS,
    /// Naive Bayes pooled over source and target training data.
    NbSt,
    /// Equal-weight majority vote over all per-domain models.
    Llv,
    /// The revised lifelong model.
    Lnb,
}

impl SystemId {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::NbT => "NB-T",
            SystemId::NbS => "NB-S",
            SystemId::NbSt => "NB-ST",
            SystemId::Llv => "LLV",
            SystemId::Lnb => "LNB",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reporting order: baselines first, the lifelong model last.
pub const SYSTEMS: [SystemId; 5] = [
    SystemId::NbT,
    SystemId::NbS,
    SystemId::NbSt,
    SystemId::Llv,
    SystemId::Lnb,
];

/// One metric value for one (system, target, fold) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub system: SystemId,
    /// Task sequence the value belongs to; `None` for the new-task
    /// protocol, which has no ordering.
    pub sequence: Option<String>,
    /// Target domain evaluated.
    pub domain: String,
    pub fold: usize,
    /// Number of learned future domains; set only by the task-effect
    /// protocol.
    pub future_domains: Option<usize>,
    /// Metric value in [0, 1].
    pub value: f64,
}

/// A domain (or a point of a protocol) left out of a run, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedDomain {
    pub domain: String,
    pub reason: String,
}

/// Everything a protocol run produced. Averages are always recomputed
/// from the stored rows, so no stored number can drift from its
/// constituents.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub metric: Metric,
    pub rows: Vec<MetricRow>,
    pub skipped: Vec<SkippedDomain>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

impl EvalReport {
    /// Per-domain fold means for sequence-free (new-task) rows.
    pub fn domain_values(&self, system: SystemId) -> BTreeMap<&str, f64> {
        let mut folds: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            if row.system == system && row.sequence.is_none() {
                folds.entry(&row.domain).or_default().push(row.value);
            }
        }
        folds
            .into_iter()
            .map(|(d, vs)| (d, mean(vs).expect("non-empty group")))
            .collect()
    }

    /// Mean over [`Self::domain_values`].
    pub fn system_average(&self, system: SystemId) -> Option<f64> {
        mean(self.domain_values(system).into_values())
    }

    /// Per-(sequence, domain) fold means for sequenced rows, excluding
    /// task-effect points.
    pub fn sequence_domain_values(&self, system: SystemId) -> BTreeMap<(&str, &str), f64> {
        let mut folds: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            if row.system == system && row.future_domains.is_none() {
                if let Some(seq) = &row.sequence {
                    folds
                        .entry((seq.as_str(), &row.domain))
                        .or_default()
                        .push(row.value);
                }
            }
        }
        folds
            .into_iter()
            .map(|(k, vs)| (k, mean(vs).expect("non-empty group")))
            .collect()
    }

    /// Per-sequence means over [`Self::sequence_domain_values`].
    pub fn sequence_averages(&self, system: SystemId) -> BTreeMap<&str, f64> {
        let mut domains: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for ((seq, _), v) in self.sequence_domain_values(system) {
            domains.entry(seq).or_default().push(v);
        }
        domains
            .into_iter()
            .map(|(s, vs)| (s, mean(vs).expect("non-empty group")))
            .collect()
    }

    /// Mean over [`Self::sequence_averages`].
    pub fn grand_average(&self, system: SystemId) -> Option<f64> {
        mean(self.sequence_averages(system).into_values())
    }

    /// Task-effect curve: per future-domain count, the mean over
    /// sequences of that sequence's fold mean.
    pub fn curve(&self, system: SystemId) -> BTreeMap<usize, f64> {
        let mut folds: BTreeMap<(usize, &str), Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            if row.system != system {
                continue;
            }
            if let (Some(f), Some(seq)) = (row.future_domains, &row.sequence) {
                folds.entry((f, seq.as_str())).or_default().push(row.value);
            }
        }
        let mut sequences: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for ((f, _), vs) in folds {
            sequences
                .entry(f)
                .or_default()
                .push(mean(vs).expect("non-empty group"));
        }
        sequences
            .into_iter()
            .map(|(f, vs)| (f, mean(vs).expect("non-empty group")))
            .collect()
    }
}

/// A published score carried for side-by-side comparison in summary
/// output; these systems are not implemented here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub system: &'static str,
    pub metric: Metric,
    /// Already on the 0-100 reporting scale.
    pub value: f64,
}

/// Reported new-task scores for the SVM variants and the sentiment
/// lexicon classifier.
pub const NEW_TASK_REFERENCES: [ReferenceRow; 8] = [
    ReferenceRow {
        system: "SVM-T",
        metric: Metric::F1Negative,
        value: 50.39,
    },
    ReferenceRow {
        system: "SVM-S",
        metric: Metric::F1Negative,
        value: 52.66,
    },
    ReferenceRow {
        system: "SVM-ST",
        metric: Metric::F1Negative,
        value: 59.15,
    },
    ReferenceRow {
        system: "LSC",
        metric: Metric::F1Negative,
        value: 56.62,
    },
    ReferenceRow {
        system: "SVM-T",
        metric: Metric::Accuracy,
        value: 76.09,
    },
    ReferenceRow {
        system: "SVM-S",
        metric: Metric::Accuracy,
        value: 75.79,
    },
    ReferenceRow {
        system: "SVM-ST",
        metric: Metric::Accuracy,
        value: 79.29,
    },
    ReferenceRow {
        system: "LSC",
        metric: Metric::Accuracy,
        value: 82.09,
    },
];

/// Reported previous-task scores for the same reference systems.
pub const PREV_TASK_REFERENCES: [ReferenceRow; 8] = [
    ReferenceRow {
        system: "SVM-T",
        metric: Metric::F1Negative,
        value: 50.79,
    },
    ReferenceRow {
        system: "SVM-S",
        metric: Metric::F1Negative,
        value: 48.86,
    },
    ReferenceRow {
        system: "SVM-ST",
        metric: Metric::F1Negative,
        value: 58.20,
    },
    ReferenceRow {
        system: "LSC",
        metric: Metric::F1Negative,
        value: 52.25,
    },
    ReferenceRow {
        system: "SVM-T",
        metric: Metric::Accuracy,
        value: 76.07,
    },
    ReferenceRow {
        system: "SVM-S",
        metric: Metric::Accuracy,
        value: 70.78,
    },
    ReferenceRow {
        system: "SVM-ST",
        metric: Metric::Accuracy,
        value: 78.90,
    },
    ReferenceRow {
        system: "LSC",
        metric: Metric::Accuracy,
        value: 81.10,
    },
];

// CSV cells carry metric values on the 0-100 scale with four decimals.
fn pct(value: f64) -> String {
    format!("{:.4}", value * 100.0)
}

fn csv_io(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{other:?}"),
        )),
    }
}

fn open_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(dir.join(name)).map_err(csv_io)
}

fn write_skipped(report: &EvalReport, dir: &Path, name: &str) -> Result<()> {
    if report.skipped.is_empty() {
        return Ok(());
    }
    let mut w = open_writer(dir, name)?;
    w.write_record(["domain", "reason"]).map_err(csv_io)?;
    for skip in &report.skipped {
        w.write_record([skip.domain.as_str(), skip.reason.as_str()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(
    report: &EvalReport,
    dir: &Path,
    name: &str,
    averages: &BTreeMap<SystemId, f64>,
    references: &[ReferenceRow],
) -> Result<()> {
    let mut w = open_writer(dir, name)?;
    w.write_record(["system", "metric", "value", "source"])
        .map_err(csv_io)?;
    for system in SYSTEMS {
        if let Some(value) = averages.get(&system) {
            w.write_record([
                system.as_str(),
                report.metric.as_str(),
                &pct(*value),
                "this_run",
            ])
            .map_err(csv_io)?;
        }
    }
    for reference in references {
        if reference.metric == report.metric {
            let value = format!("{:.4}", reference.value);
            w.write_record([reference.system, report.metric.as_str(), &value, "reported"])
                .map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `new_task_rows.csv`, `new_task_domains.csv`,
/// `new_task_summary.csv`, and (when domains were skipped)
/// `new_task_skipped.csv` into `dir`.
pub fn write_new_task_csvs(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut rows = open_writer(dir, "new_task_rows.csv")?;
    rows.write_record(["system", "domain", "fold", "value"])
        .map_err(csv_io)?;
    for row in &report.rows {
        let fold = row.fold.to_string();
        rows.write_record([row.system.as_str(), &row.domain, &fold, &pct(row.value)])
            .map_err(csv_io)?;
    }
    rows.flush()?;

    let mut domains = open_writer(dir, "new_task_domains.csv")?;
    domains
        .write_record(["system", "domain", "value"])
        .map_err(csv_io)?;
    let mut averages = BTreeMap::new();
    for system in SYSTEMS {
        for (domain, value) in report.domain_values(system) {
            domains
                .write_record([system.as_str(), domain, &pct(value)])
                .map_err(csv_io)?;
        }
        if let Some(value) = report.system_average(system) {
            averages.insert(system, value);
        }
    }
    domains.flush()?;

    write_summary(
        report,
        dir,
        "new_task_summary.csv",
        &averages,
        &NEW_TASK_REFERENCES,
    )?;
    write_skipped(report, dir, "new_task_skipped.csv")
}

/// Writes `prev_task_rows.csv`, `prev_task_sequences.csv`, and
/// `prev_task_summary.csv` into `dir`.
pub fn write_prev_task_csvs(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut rows = open_writer(dir, "prev_task_rows.csv")?;
    rows.write_record(["system", "sequence", "domain", "fold", "value"])
        .map_err(csv_io)?;
    for row in &report.rows {
        let sequence = row.sequence.as_deref().unwrap_or("");
        let fold = row.fold.to_string();
        rows.write_record([
            row.system.as_str(),
            sequence,
            &row.domain,
            &fold,
            &pct(row.value),
        ])
        .map_err(csv_io)?;
    }
    rows.flush()?;

    let mut sequences = open_writer(dir, "prev_task_sequences.csv")?;
    sequences
        .write_record(["system", "sequence", "value"])
        .map_err(csv_io)?;
    let mut averages = BTreeMap::new();
    for system in SYSTEMS {
        for (sequence, value) in report.sequence_averages(system) {
            sequences
                .write_record([system.as_str(), sequence, &pct(value)])
                .map_err(csv_io)?;
        }
        if let Some(value) = report.grand_average(system) {
            averages.insert(system, value);
        }
    }
    sequences.flush()?;

    write_summary(
        report,
        dir,
        "prev_task_summary.csv",
        &averages,
        &PREV_TASK_REFERENCES,
    )
}

/// Writes `task_effect_rows.csv`, `task_effect_curve.csv`, and (when
/// points were skipped) `task_effect_skipped.csv` into `dir`.
pub fn write_task_effect_csvs(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut rows = open_writer(dir, "task_effect_rows.csv")?;
    rows.write_record([
        "system",
        "sequence",
        "domain",
        "fold",
        "future_domains",
        "value",
    ])
    .map_err(csv_io)?;
    for row in &report.rows {
        let sequence = row.sequence.as_deref().unwrap_or("");
        let fold = row.fold.to_string();
        let future = row
            .future_domains
            .map(|f| f.to_string())
            .unwrap_or_default();
        rows.write_record([
            row.system.as_str(),
            sequence,
            &row.domain,
            &fold,
            &future,
            &pct(row.value),
        ])
        .map_err(csv_io)?;
    }
    rows.flush()?;

    let mut curve = open_writer(dir, "task_effect_curve.csv")?;
    curve
        .write_record(["system", "future_domains", "value"])
        .map_err(csv_io)?;
    for system in SYSTEMS {
        for (future, value) in report.curve(system) {
            let future = future.to_string();
            curve
                .write_record([system.as_str(), &future, &pct(value)])
                .map_err(csv_io)?;
        }
    }
    curve.flush()?;

    write_skipped(report, dir, "task_effect_skipped.csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(
        system: SystemId,
        sequence: Option<&str>,
        domain: &str,
        fold: usize,
        future: Option<usize>,
        value: f64,
    ) -> MetricRow {
        MetricRow {
            system,
            sequence: sequence.map(str::to_string),
            domain: domain.to_string(),
            fold,
            future_domains: future,
            value,
        }
    }

    fn new_task_report() -> EvalReport {
        EvalReport {
            metric: Metric::F1Negative,
            rows: vec![
                row(SystemId::Lnb, None, "books", 0, None, 0.6),
                row(SystemId::Lnb, None, "books", 1, None, 0.8),
                row(SystemId::Lnb, None, "music", 0, None, 0.4),
                row(SystemId::Lnb, None, "music", 1, None, 0.5),
                row(SystemId::NbT, None, "books", 0, None, 0.2),
            ],
            skipped: vec![],
        }
    }

    #[test]
    fn averages_recompute_from_constituents() {
        let report = new_task_report();
        let domains = report.domain_values(SystemId::Lnb);
        assert_eq!(domains.len(), 2);
        assert!((domains["books"] - 0.7).abs() < 1e-12);
        assert!((domains["music"] - 0.45).abs() < 1e-12);
        let average = report.system_average(SystemId::Lnb).unwrap();
        let by_hand = (domains["books"] + domains["music"]) / 2.0;
        assert!((average - by_hand).abs() < 1e-12);
        assert_eq!(report.system_average(SystemId::Llv), None);
    }

    #[test]
    fn sequence_and_grand_averages_chain() {
        let report = EvalReport {
            metric: Metric::Accuracy,
            rows: vec![
                row(SystemId::Lnb, Some("S1"), "a", 0, None, 0.5),
                row(SystemId::Lnb, Some("S1"), "a", 1, None, 0.7),
                row(SystemId::Lnb, Some("S1"), "b", 0, None, 0.9),
                row(SystemId::Lnb, Some("S2"), "a", 0, None, 0.1),
            ],
            skipped: vec![],
        };
        let per_domain = report.sequence_domain_values(SystemId::Lnb);
        assert!((per_domain[&("S1", "a")] - 0.6).abs() < 1e-12);
        let per_seq = report.sequence_averages(SystemId::Lnb);
        assert!((per_seq["S1"] - 0.75).abs() < 1e-12);
        assert!((per_seq["S2"] - 0.1).abs() < 1e-12);
        let grand = report.grand_average(SystemId::Lnb).unwrap();
        assert!((grand - (0.75 + 0.1) / 2.0).abs() < 1e-12);
        // Sequenced rows never leak into the sequence-free view.
        assert!(report.domain_values(SystemId::Lnb).is_empty());
    }

    #[test]
    fn curve_averages_folds_then_sequences() {
        let report = EvalReport {
            metric: Metric::F1Negative,
            rows: vec![
                row(SystemId::Lnb, Some("S1"), "a", 0, Some(1), 0.2),
                row(SystemId::Lnb, Some("S1"), "a", 1, Some(1), 0.4),
                row(SystemId::Lnb, Some("S2"), "b", 0, Some(1), 0.6),
                row(SystemId::Lnb, Some("S1"), "a", 0, Some(2), 0.8),
            ],
            skipped: vec![],
        };
        let curve = report.curve(SystemId::Lnb);
        // f=1: S1 folds mean 0.3, S2 mean 0.6, sequences mean 0.45.
        assert!((curve[&1] - 0.45).abs() < 1e-12);
        assert!((curve[&2] - 0.8).abs() < 1e-12);
        // Task-effect rows stay out of the plain sequence averages.
        assert!(report.sequence_averages(SystemId::Lnb).is_empty());
    }

    #[test]
    fn system_labels_are_stable() {
        let labels: Vec<&str> = SYSTEMS.iter().map(|s| s.as_str()).collect();
        assert_eq!(labels, ["NB-T", "NB-S", "NB-ST", "LLV", "LNB"]);
        assert_eq!(SystemId::Lnb.to_string(), "LNB");
    }

    #[test]
    fn new_task_csvs_have_documented_schema() {
        let dir = tempfile::tempdir().unwrap();
        let mut report = new_task_report();
        report.skipped.push(SkippedDomain {
            domain: "tiny".to_string(),
            reason: "too few negative documents".to_string(),
        });
        write_new_task_csvs(&report, dir.path()).unwrap();

        let rows = std::fs::read_to_string(dir.path().join("new_task_rows.csv")).unwrap();
        assert!(rows.starts_with("system,domain,fold,value\n"));
        assert!(rows.contains("LNB,books,0,60.0000\n"));

        let domains = std::fs::read_to_string(dir.path().join("new_task_domains.csv")).unwrap();
        assert!(domains.contains("LNB,books,70.0000\n"));

        let summary = std::fs::read_to_string(dir.path().join("new_task_summary.csv")).unwrap();
        assert!(summary.starts_with("system,metric,value,source\n"));
        assert!(summary.contains("LNB,f1_negative,57.5000,this_run\n"));
        // References carry only the flavor the run reported.
        assert!(summary.contains("LSC,f1_negative,56.6200,reported\n"));
        assert!(!summary.contains("82.0900"));

        let skipped = std::fs::read_to_string(dir.path().join("new_task_skipped.csv")).unwrap();
        assert!(skipped.contains("tiny,too few negative documents\n"));
    }

    #[test]
    fn prev_and_curve_csvs_write_their_files() {
        let dir = tempfile::tempdir().unwrap();
        let prev = EvalReport {
            metric: Metric::Accuracy,
            rows: vec![row(SystemId::Lnb, Some("S1"), "a", 0, None, 0.5)],
            skipped: vec![],
        };
        write_prev_task_csvs(&prev, dir.path()).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("prev_task_summary.csv")).unwrap();
        assert!(summary.contains("LNB,accuracy,50.0000,this_run\n"));
        assert!(summary.contains("LSC,accuracy,81.1000,reported\n"));
        let sequences =
            std::fs::read_to_string(dir.path().join("prev_task_sequences.csv")).unwrap();
        assert!(sequences.contains("LNB,S1,50.0000\n"));

        let effect = EvalReport {
            metric: Metric::Accuracy,
            rows: vec![row(SystemId::Lnb, Some("S1"), "a", 0, Some(3), 0.25)],
            skipped: vec![],
        };
        write_task_effect_csvs(&effect, dir.path()).unwrap();
        let curve = std::fs::read_to_string(dir.path().join("task_effect_curve.csv")).unwrap();
        assert!(curve.starts_with("system,future_domains,value\n"));
        assert!(curve.contains("LNB,3,25.0000\n"));
        assert!(!dir.path().join("task_effect_skipped.csv").exists());
    }
}
