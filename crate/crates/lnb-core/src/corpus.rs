//! Corpus files, domain directories, and task-sequence configs.
//!
//! A corpus file holds one JSON record per line with fields `text`,
//! optional `label` ("positive" or "negative"), and `domain`. A corpus
//! directory holds one such file per domain, named `<domain>.jsonl`; the
//! file stem is the domain id.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::featurize::{featurize, Document, RawReview};

/// All featurized documents of one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCorpus {
    pub domain_id: String,
    pub docs: Vec<Document>,
}

/// Parses one corpus line; `line_no` is 1-based for error messages.
pub fn parse_record(line: &str, line_no: usize) -> Result<RawReview> {
    let invalid = |detail: String| Error::InvalidRecord {
        line: line_no,
        detail,
    };
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| invalid(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("record is not a JSON object".into()))?;
    let text = obj
        .get("text")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| invalid("missing string field \"text\"".into()))?;
    if text.trim().is_empty() {
        return Err(invalid("field \"text\" is empty".into()));
    }
    let domain = obj
        .get("domain")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| invalid("missing string field \"domain\"".into()))?;
    let label = match obj.get("label") {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(s)) => {
            Some(crate::featurize::Polarity::parse(s).ok_or_else(|| {
                invalid(format!(
                    "label must be \"positive\" or \"negative\", got {s:?}"
                ))
            })?)
        }
        Some(other) => return Err(invalid(format!("label must be a string, got {other}"))),
    };
    Ok(RawReview {
        text: text.to_string(),
        label,
        domain: domain.to_string(),
    })
}

/// Reads every record of a corpus file. Any malformed line is an error;
/// whether an unlabeled or featureless record is acceptable is the
/// caller's decision.
pub fn read_reviews(path: &Path) -> Result<Vec<RawReview>> {
    let file = fs::File::open(path)?;
    let mut reviews = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        reviews.push(parse_record(&line, idx + 1)?);
    }
    Ok(reviews)
}

/// Writes records in the canonical one-object-per-line form.
pub fn write_reviews(path: &Path, reviews: &[RawReview]) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for review in reviews {
        serde_json::to_writer(&mut out, review).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Featurizes reviews for training, skipping featureless ones with a
/// warning. Errors only when nothing usable remains.
pub fn featurize_reviews(domain_id: &str, reviews: &[RawReview]) -> Result<Vec<Document>> {
    let mut docs = Vec::with_capacity(reviews.len());
    let mut skipped = 0usize;
    for review in reviews {
        match featurize(review) {
            Ok(doc) => docs.push(doc),
            Err(Error::EmptyDocument) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if skipped > 0 {
        log::warn!("{domain_id}: skipped {skipped} review(s) with no usable tokens");
    }
    if docs.is_empty() {
        return Err(Error::NoTrainingData);
    }
    Ok(docs)
}

/// Loads `<domain>.jsonl` as one domain's corpus.
pub fn load_domain_file(path: &Path) -> Result<DomainCorpus> {
    let domain_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let reviews = read_reviews(path)?;
    let docs = featurize_reviews(&domain_id, &reviews)?;
    Ok(DomainCorpus { domain_id, docs })
}

/// Loads every `*.jsonl` in a directory, sorted by domain id so corpus
/// order never depends on directory iteration order.
pub fn load_dir(dir: &Path) -> Result<Vec<DomainCorpus>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::NotEnoughDomains {
            needed: 1,
            available: 0,
        });
    }
    paths.iter().map(|p| load_domain_file(p)).collect()
}

/// One named ordering of domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub name: String,
    pub domains: Vec<String>,
}

/// Parses a sequence file: one `NAME: dom1 dom2 ...` per line, `#`
/// comments and blank lines ignored. Duplicate entries within a sequence
/// are allowed here; protocols decide how to treat them.
pub fn parse_sequences(text: &str) -> Result<Vec<Sequence>> {
    let mut sequences = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| Error::InvalidRecord {
            line: idx + 1,
            detail: "expected \"NAME: domain domain ...\"".into(),
        })?;
        let domains: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if domains.len() < 2 {
            return Err(Error::SequenceTooShort {
                name: name.trim().to_string(),
                len: domains.len(),
            });
        }
        sequences.push(Sequence {
            name: name.trim().to_string(),
            domains,
        });
    }
    Ok(sequences)
}

/// Reads and parses a sequence file.
pub fn load_sequences(path: &Path) -> Result<Vec<Sequence>> {
    parse_sequences(&fs::read_to_string(path)?)
}

/// Checks that every domain a sequence mentions exists in the corpus set.
pub fn validate_sequences(sequences: &[Sequence], known: &BTreeSet<String>) -> Result<()> {
    for seq in sequences {
        for domain in &seq.domains {
            if !known.contains(domain) {
                return Err(Error::UnknownDomainInSequence {
                    sequence: seq.name.clone(),
                    domain: domain.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Holds a domain's raw documents until mining consumes them, then refuses
/// every further access.
///
/// Previous-task evaluation routes all training data through vaults: once
/// a domain's knowledge is mined, the documents are gone, so reverse
/// transfer provably cannot re-read them.
#[derive(Debug)]
pub struct RawDocVault {
    domain_id: String,
    docs: Option<DomainCorpus>,
}

impl RawDocVault {
    pub fn new(corpus: DomainCorpus) -> RawDocVault {
        RawDocVault {
            domain_id: corpus.domain_id.clone(),
            docs: Some(corpus),
        }
    }

    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    /// Surrenders the documents. Exactly one call succeeds.
    pub fn take(&mut self) -> Result<DomainCorpus> {
        self.docs
            .take()
            .ok_or_else(|| Error::TrainingDataDestroyed(self.domain_id.clone()))
    }

    pub fn destroyed(&self) -> bool {
        self.docs.is_none()
    }
}
