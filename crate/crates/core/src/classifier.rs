//! Majority-rule topic assignment for unclassified publications.
//!
//! An unclassified publication takes the topic that occurs most often among
//! its related records, ties going to the smallest topic identifier. Only
//! topics present in the input corpus vote, and topics that were themselves
//! assigned by this rule never vote, so the assignment is a single pass and
//! re-running it is a no-op.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{
    column_indices, delimited_reader, read_file, Corpus, CorpusError, Loaded, RowError,
    RowErrorKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelatedRecordsError {
    #[error("related record for {0} has no related ids")]
    Empty(String),
    #[error("related record for {0} references itself")]
    SelfReference(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatedRecords {
    pub_id: String,
    related_ids: Vec<String>,
}

impl RelatedRecords {
    pub fn new<I, S>(pub_id: impl Into<String>, related_ids: I) -> Result<Self, RelatedRecordsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let pub_id = pub_id.into();
        let related_ids: Vec<String> = related_ids.into_iter().map(Into::into).collect();
        if related_ids.is_empty() {
            return Err(RelatedRecordsError::Empty(pub_id));
        }
        if related_ids.contains(&pub_id) {
            return Err(RelatedRecordsError::SelfReference(pub_id));
        }
        Ok(Self { pub_id, related_ids })
    }

    pub fn pub_id(&self) -> &str {
        &self.pub_id
    }

    pub fn related_ids(&self) -> &[String] {
        &self.related_ids
    }
}

pub fn load_related(path: &Path) -> Result<Loaded<RelatedRecords>, CorpusError> {
    read_related(&read_file(path)?)
}

/// Parses a `pub_id,related_ids` file with `|`-separated related ids.
pub fn read_related(text: &str) -> Result<Loaded<RelatedRecords>, CorpusError> {
    let mut reader = delimited_reader(text);
    let headers = reader.headers()?.clone();
    let [id_col, rel_col] = column_indices(&headers, ["pub_id", "related_ids"])?;
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let (Some(id), Some(rel)) = (row.get(id_col), row.get(rel_col)) else {
            let expected = id_col.max(rel_col) + 1;
            rejected.push(RowError {
                line,
                kind: RowErrorKind::FieldCount { expected, found: row.len() },
            });
            continue;
        };
        let ids = rel.split('|').map(str::trim).filter(|s| !s.is_empty());
        match RelatedRecords::new(id.trim(), ids) {
            Ok(r) => records.push(r),
            Err(RelatedRecordsError::Empty(_)) => {
                rejected.push(RowError { line, kind: RowErrorKind::NoRelatedIds })
            }
            Err(RelatedRecordsError::SelfReference(id)) => {
                rejected.push(RowError { line, kind: RowErrorKind::SelfReference(id) })
            }
        }
    }
    Ok(Loaded { records, rejected })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AssignmentReport {
    /// Unclassified publications that received a topic.
    pub assigned: usize,
    /// Unclassified publications left without a topic.
    pub unassigned: usize,
    /// Related ids pointing outside the corpus.
    pub ignored_external: usize,
    /// Related-record subjects that are not publications of the corpus.
    pub unknown_subjects: usize,
}

/// Picks the most frequent topic, breaking ties by smallest identifier.
pub fn majority_topic<'a>(topics: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in topics {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (t, n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((t, n));
        }
    }
    best.map(|(t, _)| t)
}

pub fn assign_majority(corpus: &Corpus, related: &[RelatedRecords]) -> (Corpus, AssignmentReport) {
    // topics eligible to vote: supplied with the data, not majority-assigned
    let votes: HashMap<&str, Option<&str>> = corpus
        .publications
        .iter()
        .map(|p| {
            let topic = p.topic_id.as_deref().filter(|_| !p.topic_assigned);
            (p.pub_id.as_str(), topic)
        })
        .collect();

    let mut report = AssignmentReport::default();
    let mut by_subject: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in related {
        if votes.contains_key(r.pub_id()) {
            by_subject.entry(r.pub_id()).or_default().extend(r.related_ids().iter().map(String::as_str));
        } else {
            report.unknown_subjects += 1;
        }
    }

    let mut out = corpus.clone();
    for p in out.publications.iter_mut().filter(|p| !p.is_classified()) {
        let mut topics = Vec::new();
        for rid in by_subject.get(p.pub_id.as_str()).into_iter().flatten() {
            match votes.get(rid) {
                None => report.ignored_external += 1,
                Some(Some(t)) => topics.push(*t),
                Some(None) => {}
            }
        }
        match majority_topic(topics) {
            Some(t) => {
                p.topic_id = Some(t.to_string());
                p.topic_assigned = true;
                report.assigned += 1;
            }
            None => report.unassigned += 1,
        }
    }
    (out, report)
}
