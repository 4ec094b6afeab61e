//! Knowledge mining, retention, and aggregation.
//!
//! Each learned task leaves behind a [`TaskKnowledge`]: per-class word
//! counts and document counts, nothing else. The [`KnowledgeBase`] stores
//! these in learning order and persists them as schema-versioned JSON.
//! [`KnowledgeBase::aggregate`] produces the cross-task abstractions a
//! target model is revised from: word-level count sums and domain-level
//! polarity-agreement counts. No operation here ever sees document text
//! again after mining.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::{Document, Polarity, CLASSES};
use crate::nb::{CountTable, PerClass};

/// Bumped whenever the KB file layout changes incompatibly.
pub const SCHEMA_VERSION: u64 = 1;

/// Everything retained from one learned task.
///
/// `vocab_size` is stored explicitly (not derived on load) because the
/// per-task Eq'n-style probabilities used in aggregation depend on it; a
/// mismatch with the stored counts is treated as corruption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskKnowledge {
    pub domain_id: String,
    pub doc_counts: PerClass<u64>,
    pub vocab_size: usize,
    pub word_counts: PerClass<BTreeMap<String, u64>>,
}

impl TaskKnowledge {
    /// Count for a word in a class; zero when absent.
    pub fn count(&self, class: Polarity, word: &str) -> u64 {
        self.word_counts.get(class).get(word).copied().unwrap_or(0)
    }

    /// Total word occurrences in a class.
    pub fn total(&self, class: Polarity) -> u64 {
        self.word_counts.get(class).values().sum()
    }

    /// The task's vocabulary: every word counted in either class.
    pub fn vocab(&self) -> BTreeSet<&str> {
        self.word_counts
            .pos
            .keys()
            .chain(self.word_counts.neg.keys())
            .map(String::as_str)
            .collect()
    }

    /// Smoothed in-task word probability using this task's own vocabulary
    /// size and totals.
    pub fn word_prob(&self, word: &str, class: Polarity, lambda: f64) -> f64 {
        (lambda + self.count(class, word) as f64)
            / (lambda * self.vocab_size as f64 + self.total(class) as f64)
    }

    /// The retained counts as a real-valued table, ready for NB scoring.
    pub fn to_count_table(&self) -> CountTable {
        let mut table = CountTable {
            doc_counts: self.doc_counts,
            ..CountTable::default()
        };
        for class in CLASSES {
            for (word, &count) in self.word_counts.get(class) {
                table.add_count(class, word, count as f64);
            }
        }
        table
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.doc_counts.pos + self.doc_counts.neg == 0 {
            return Err(format!("task {:?} has zero documents", self.domain_id));
        }
        for class in CLASSES {
            for (word, &count) in self.word_counts.get(class) {
                if count == 0 && self.count(class.flip(), word) == 0 {
                    return Err(format!(
                        "task {:?} stores word {word:?} with zero count in both classes",
                        self.domain_id
                    ));
                }
            }
        }
        let actual = self.vocab().len();
        if actual != self.vocab_size {
            return Err(format!(
                "task {:?} declares vocab_size {} but stores {} distinct words",
                self.domain_id, self.vocab_size, actual
            ));
        }
        Ok(())
    }
}

/// Tallies a task's knowledge from its labeled training documents.
///
/// The documents themselves are not retained; everything downstream of
/// this call works from counts alone.
pub fn mine_knowledge(domain_id: &str, docs: &[Document]) -> Result<TaskKnowledge> {
    if docs.is_empty() {
        return Err(Error::NoTrainingData);
    }
    let mut word_counts: PerClass<BTreeMap<String, u64>> = PerClass::default();
    let mut doc_counts: PerClass<u64> = PerClass::default();
    for doc in docs {
        let class = doc
            .label
            .ok_or_else(|| Error::UnlabeledDoc(domain_id.to_string()))?;
        *doc_counts.get_mut(class) += 1;
        let counts = word_counts.get_mut(class);
        for token in &doc.tokens {
            *counts.entry(token.clone()).or_insert(0) += 1;
        }
    }
    let vocab_size = word_counts
        .pos
        .keys()
        .chain(word_counts.neg.keys())
        .collect::<BTreeSet<_>>()
        .len();
    Ok(TaskKnowledge {
        domain_id: domain_id.to_string(),
        doc_counts,
        vocab_size,
        word_counts,
    })
}

/// Ordered store of every learned task's knowledge.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    schema_version: u64,
    tasks: Vec<TaskKnowledge>,
}

impl KnowledgeBase {
    pub fn new() -> KnowledgeBase {
        KnowledgeBase {
            schema_version: SCHEMA_VERSION,
            tasks: Vec::new(),
        }
    }

    pub fn tasks(&self) -> &[TaskKnowledge] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn get(&self, domain_id: &str) -> Option<&TaskKnowledge> {
        self.tasks.iter().find(|t| t.domain_id == domain_id)
    }

    pub fn contains(&self, domain_id: &str) -> bool {
        self.get(domain_id).is_some()
    }

    /// Appends a task, preserving learning order.
    pub fn add_task(&mut self, task: TaskKnowledge) -> Result<()> {
        if self.contains(&task.domain_id) {
            return Err(Error::DuplicateDomain(task.domain_id));
        }
        self.tasks.push(task);
        Ok(())
    }

    /// Computes the knowledge abstractions for one target domain from all
    /// other stored tasks.
    pub fn aggregate(&self, target: &str, gamma: f64, lambda: f64) -> Result<KBAggregates> {
        aggregate_tasks(&self.tasks, target, gamma, lambda)
    }

    /// Writes the KB as pretty-printed JSON, atomically (temp file then
    /// rename), so a crash never leaves a half-written KB behind.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("knowledge base serializes");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, json.as_bytes())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Reads a KB back, checking the schema version before shape so an
    /// old-format file reports [`Error::SchemaMismatch`] rather than a
    /// parse failure.
    pub fn load(path: &Path) -> Result<KnowledgeBase> {
        let corrupt = |detail: String| Error::CorruptFile {
            path: path.to_path_buf(),
            detail,
        };
        let raw = fs::read_to_string(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&raw).map_err(|e| corrupt(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| corrupt("missing integer schema_version".to_string()))?;
        if found != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                found,
                expected: SCHEMA_VERSION,
            });
        }
        let kb: KnowledgeBase =
            serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for task in &kb.tasks {
            if !seen.insert(&task.domain_id) {
                return Err(corrupt(format!("duplicate domain {:?}", task.domain_id)));
            }
            task.validate().map_err(corrupt)?;
        }
        Ok(kb)
    }
}

/// Computes the knowledge abstractions for one target domain from any
/// collection of mined tasks, skipping the target itself.
///
/// Word-level counts sum each word's occurrences across non-target
/// tasks. Domain-level counts tally, per word, in how many non-target
/// tasks the in-task smoothed probability ratio P(w|+)/P(w|−) reaches
/// `gamma` (and symmetrically for the inverse). A task only votes on
/// words in its own vocabulary.
pub fn aggregate_tasks<'a>(
    tasks: impl IntoIterator<Item = &'a TaskKnowledge>,
    target: &str,
    gamma: f64,
    lambda: f64,
) -> Result<KBAggregates> {
    let sources: Vec<&TaskKnowledge> = tasks
        .into_iter()
        .filter(|t| t.domain_id != target)
        .collect();
    if sources.is_empty() {
        return Err(Error::NoNonTargetTasks(target.to_string()));
    }
    let mut word_level: PerClass<BTreeMap<String, u64>> = PerClass::default();
    let mut domain_level: PerClass<BTreeMap<String, u32>> = PerClass::default();
    for task in &sources {
        for class in CLASSES {
            let sums = word_level.get_mut(class);
            for (word, &count) in task.word_counts.get(class) {
                *sums.entry(word.clone()).or_insert(0) += count;
            }
        }
        for word in task.vocab() {
            let ratio = task.word_prob(word, Polarity::Positive, lambda)
                / task.word_prob(word, Polarity::Negative, lambda);
            if ratio >= gamma {
                *domain_level.pos.entry(word.to_string()).or_insert(0) += 1;
            }
            if ratio.recip() >= gamma {
                *domain_level.neg.entry(word.to_string()).or_insert(0) += 1;
            }
        }
    }
    Ok(KBAggregates {
        target_domain_id: target.to_string(),
        n: sources.len(),
        word_level,
        domain_level,
        gamma,
    })
}

/// Cross-task knowledge abstracted for one target domain.
#[derive(Debug, Clone, PartialEq)]
pub struct KBAggregates {
    pub target_domain_id: String,
    /// Number of non-target tasks that contributed.
    pub n: usize,
    /// Per-word count sums over the non-target tasks.
    pub word_level: PerClass<BTreeMap<String, u64>>,
    /// Per-word number of non-target tasks whose in-task probability ratio
    /// reached `gamma` for the class.
    pub domain_level: PerClass<BTreeMap<String, u32>>,
    pub gamma: f64,
}

impl KBAggregates {
    pub fn kb_count(&self, class: Polarity, word: &str) -> u64 {
        self.word_level.get(class).get(word).copied().unwrap_or(0)
    }

    pub fn m_count(&self, class: Polarity, word: &str) -> u32 {
        self.domain_level.get(class).get(word).copied().unwrap_or(0)
    }

    /// Every word any non-target task counted.
    pub fn vocab(&self) -> BTreeSet<&str> {
        self.word_level
            .pos
            .keys()
            .chain(self.word_level.neg.keys())
            .map(String::as_str)
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::featurize::Polarity::{Negative, Positive};

    fn doc(label: Polarity, tokens: &[&str]) -> Document {
        Document {
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            label: Some(label),
            domain: "d".into(),
        }
    }

    pub(crate) fn task(
        domain: &str,
        pos: &[(&str, u64)],
        neg: &[(&str, u64)],
        docs: (u64, u64),
    ) -> TaskKnowledge {
        let build = |entries: &[(&str, u64)]| {
            entries
                .iter()
                .map(|&(w, c)| (w.to_string(), c))
                .collect::<BTreeMap<_, _>>()
        };
        let word_counts = PerClass::new(build(pos), build(neg));
        let vocab_size = word_counts
            .pos
            .keys()
            .chain(word_counts.neg.keys())
            .collect::<BTreeSet<_>>()
            .len();
        TaskKnowledge {
            domain_id: domain.to_string(),
            doc_counts: PerClass::new(docs.0, docs.1),
            vocab_size,
            word_counts,
        }
    }

    #[test]
    fn mine_tallies_counts_docs_and_vocab() {
        let tk =
            mine_knowledge("d1", &[doc(Positive, &["a"]), doc(Negative, &["a", "b"])]).unwrap();
        assert_eq!(tk.count(Positive, "a"), 1);
        assert_eq!(tk.count(Negative, "a"), 1);
        assert_eq!(tk.count(Negative, "b"), 1);
        assert_eq!(tk.doc_counts, PerClass::new(1, 1));
        assert_eq!(tk.vocab_size, 2);
    }

    #[test]
    fn mine_counts_multiplicity() {
        let tk = mine_knowledge("d1", &[doc(Positive, &["a", "a"])]).unwrap();
        assert_eq!(tk.count(Positive, "a"), 2);
        assert_eq!(tk.doc_counts.pos, 1);
    }

    #[test]
    fn mine_matches_independent_tally_on_larger_corpus() {
        let words = ["pump", "valve", "seal", "hose", "gauge"];
        let mut docs = Vec::new();
        for i in 0..10 {
            let class = if i % 2 == 0 { Positive } else { Negative };
            let tokens: Vec<&str> = (0..=i).map(|j| words[(i * 3 + j) % words.len()]).collect();
            docs.push(doc(class, &tokens));
        }
        let tk = mine_knowledge("d1", &docs).unwrap();

        // Independent tally with a different data structure and loop shape.
        let mut expect: HashMap<(Polarity, &str), u64> = HashMap::new();
        for d in &docs {
            for t in &d.tokens {
                *expect.entry((d.label.unwrap(), t.as_str())).or_insert(0) += 1;
            }
        }
        for (&(class, word), &count) in &expect {
            assert_eq!(tk.count(class, word), count, "{class} {word}");
        }
        let mined_total: u64 = tk.total(Positive) + tk.total(Negative);
        assert_eq!(mined_total, expect.values().sum::<u64>());
        assert_eq!(tk.doc_counts, PerClass::new(5, 5));
    }

    #[test]
    fn mine_rejects_empty_and_unlabeled() {
        assert!(matches!(
            mine_knowledge("d", &[]),
            Err(Error::NoTrainingData)
        ));
        let unlabeled = Document {
            tokens: vec!["a".into()],
            label: None,
            domain: "d".into(),
        };
        assert!(matches!(
            mine_knowledge("d", &[unlabeled]),
            Err(Error::UnlabeledDoc(_))
        ));
    }

    #[test]
    fn add_task_preserves_order_and_rejects_duplicates() {
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("d1", &[("a", 1)], &[], (1, 0))).unwrap();
        kb.add_task(task("d2", &[("a", 1)], &[], (1, 0))).unwrap();
        assert_eq!(
            kb.tasks()
                .iter()
                .map(|t| t.domain_id.as_str())
                .collect::<Vec<_>>(),
            ["d1", "d2"]
        );
        let err = kb.add_task(task("d1", &[("b", 1)], &[], (1, 0)));
        assert!(matches!(err, Err(Error::DuplicateDomain(d)) if d == "d1"));
        assert_eq!(kb.len(), 2);
    }

    #[test]
    fn aggregate_sums_word_counts_over_non_target_tasks() {
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("p1", &[("good", 3)], &[], (1, 1)))
            .unwrap();
        kb.add_task(task("p2", &[("good", 3)], &[], (1, 1)))
            .unwrap();
        kb.add_task(task("t", &[("good", 9)], &[], (1, 1))).unwrap();
        let agg = kb.aggregate("t", 2.0, 0.1).unwrap();
        assert_eq!(agg.n, 2);
        assert_eq!(agg.kb_count(Positive, "good"), 6);
        assert_eq!(agg.kb_count(Negative, "good"), 0);
    }

    #[test]
    fn aggregate_counts_domains_passing_ratio_threshold() {
        // N_{+,good} = 8, N_{−,good} = 0, |V| = 10, Σ+ = Σ− = 20, λ = 0.1:
        // ratio = (8.1/21)/(0.1/21) = 81.
        let mut filler_pos: Vec<(&str, u64)> = vec![("good", 8), ("w1", 12)];
        let filler_neg: Vec<(&str, u64)> = vec![
            ("w2", 3),
            ("w3", 3),
            ("w4", 3),
            ("w5", 3),
            ("w6", 2),
            ("w7", 2),
            ("w8", 2),
            ("w9", 2),
        ];
        filler_pos.extend(filler_neg.iter().map(|&(w, _)| (w, 0)));
        let source = task("p1", &filler_pos, &filler_neg, (2, 2));
        assert_eq!(source.vocab_size, 10);
        assert_eq!(source.total(Positive), 20);
        assert_eq!(source.total(Negative), 20);

        let mut kb = KnowledgeBase::new();
        kb.add_task(source).unwrap();
        kb.add_task(task("t", &[("good", 1)], &[], (1, 1))).unwrap();
        let agg = kb.aggregate("t", 2.0, 0.1).unwrap();
        let ratio: f64 = (8.1 / 21.0) / (0.1 / 21.0);
        assert!((ratio - 81.0).abs() < 1e-12);
        assert_eq!(agg.m_count(Positive, "good"), 1);
        assert_eq!(agg.m_count(Negative, "good"), 0);
    }

    #[test]
    fn aggregate_skips_words_outside_a_tasks_vocabulary() {
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("p1", &[("only", 5)], &[], (1, 1)))
            .unwrap();
        kb.add_task(task("p2", &[("other", 5)], &[], (1, 1)))
            .unwrap();
        kb.add_task(task("t", &[("x", 1)], &[], (1, 1))).unwrap();
        let agg = kb.aggregate("t", 1.5, 0.1).unwrap();
        // "only" lives in p1 alone, so p2 contributes no vote for it.
        assert!(agg.m_count(Positive, "only") <= 1);
        assert_eq!(agg.kb_count(Positive, "only"), 5);
    }

    #[test]
    fn aggregate_increments_at_most_one_class_when_gamma_above_one() {
        let mut kb = KnowledgeBase::new();
        kb.add_task(task(
            "p1",
            &[("a", 7), ("b", 1)],
            &[("a", 1), ("b", 7)],
            (2, 2),
        ))
        .unwrap();
        kb.add_task(task("t", &[("a", 1)], &[], (1, 1))).unwrap();
        let agg = kb.aggregate("t", 1.01, 0.1).unwrap();
        for word in ["a", "b"] {
            let fired = agg.m_count(Positive, word) + agg.m_count(Negative, word);
            assert!(fired <= 1, "{word} voted for both classes");
        }
    }

    #[test]
    fn aggregate_requires_a_non_target_task() {
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("t", &[("a", 1)], &[], (1, 0))).unwrap();
        assert!(matches!(
            kb.aggregate("t", 2.0, 0.1),
            Err(Error::NoNonTargetTasks(_))
        ));
        assert!(matches!(
            KnowledgeBase::new().aggregate("t", 2.0, 0.1),
            Err(Error::NoNonTargetTasks(_))
        ));
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.json");

        let empty = KnowledgeBase::new();
        empty.save(&path).unwrap();
        assert_eq!(KnowledgeBase::load(&path).unwrap(), empty);

        let mut kb = KnowledgeBase::new();
        kb.add_task(task("d2", &[("b", 2), ("a", 1)], &[("c", 4)], (3, 2)))
            .unwrap();
        kb.add_task(task("d1", &[("x", 9)], &[("x", 1)], (1, 1)))
            .unwrap();
        kb.save(&path).unwrap();
        let loaded = KnowledgeBase::load(&path).unwrap();
        assert_eq!(loaded, kb);
        // Insertion order survives even though it is not sorted.
        assert_eq!(loaded.tasks()[0].domain_id, "d2");
    }

    #[test]
    fn load_rejects_wrong_schema_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.json");
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("d1", &[("a", 1)], &[], (1, 0))).unwrap();
        kb.save(&path).unwrap();
        let bumped = fs::read_to_string(&path)
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 999");
        fs::write(&path, bumped).unwrap();
        assert!(matches!(
            KnowledgeBase::load(&path),
            Err(Error::SchemaMismatch {
                found: 999,
                expected: SCHEMA_VERSION
            })
        ));
    }

    #[test]
    fn load_rejects_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.json");

        fs::write(&path, "{ this is not json").unwrap();
        assert!(matches!(
            KnowledgeBase::load(&path),
            Err(Error::CorruptFile { .. })
        ));

        fs::write(&path, "{\"tasks\": []}").unwrap();
        assert!(matches!(
            KnowledgeBase::load(&path),
            Err(Error::CorruptFile { .. })
        ));

        // Well-formed JSON, wrong invariant: vocab_size disagrees.
        let mut kb = KnowledgeBase::new();
        kb.add_task(task("d1", &[("a", 1)], &[], (1, 0))).unwrap();
        kb.save(&path).unwrap();
        let lying = fs::read_to_string(&path)
            .unwrap()
            .replace("\"vocab_size\": 1", "\"vocab_size\": 7");
        fs::write(&path, lying).unwrap();
        assert!(matches!(
            KnowledgeBase::load(&path),
            Err(Error::CorruptFile { .. })
        ));
    }

    #[test]
    fn load_reports_missing_file_as_io() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent.json");
        assert!(matches!(KnowledgeBase::load(&missing), Err(Error::Io(_))));
    }
}
