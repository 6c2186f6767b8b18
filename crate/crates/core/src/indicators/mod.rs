//! Journal indicators: FNCSI, FNIF, expected JIF and JIF.
//!
//! FNCSI and FNIF normalize within (topic, document type) cells; expected JIF
//! pools document types per topic; JIF uses every publication of the journal,
//! classified or not. Cells in which a journal is the only publisher have no
//! comparison set and are left out of its FNCSI, the remaining cells being
//! reweighted by their publication counts.

pub mod cells;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;
use cells::{build_cells, csi_cell, CellCsi, CellKey, CellStats, CellTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndicatorError {
    #[error("journal {0} has no papers in the cell")]
    JournalNotInCell(String),
}

/// Why an indicator could not be computed for a journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Error)]
#[serde(rename_all = "snake_case")]
pub enum Unrankable {
    #[error("journal has no publications")]
    NoPublications,
    #[error("journal has no classified publications")]
    NoClassifiedPublications,
    #[error("every cell of the journal lacks papers from other journals")]
    NoComparisons,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopicScore {
    /// S^t_A; `None` when no cell of the topic has a comparison set.
    pub fncsi: Option<f64>,
    /// Classified papers of the journal in the topic.
    pub n_pubs: u64,
    /// Papers in cells with a non-empty comparison set.
    pub n_compared: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fncsi {
    pub value: f64,
    pub n_compared: u64,
    pub topic_breakdown: BTreeMap<String, TopicScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalIndicator {
    pub journal_id: String,
    pub categories: Vec<String>,
    pub fncsi: Option<f64>,
    pub fnif: Option<f64>,
    pub expected_jif: Option<f64>,
    pub jif: Option<f64>,
    /// Classified publications.
    pub n_pubs: u64,
    /// All publications, the JIF denominator.
    pub n_items: u64,
    /// Publications in cells with a comparison set.
    pub n_compared: u64,
    pub topic_breakdown: BTreeMap<String, TopicScore>,
}

#[derive(Debug, Default)]
struct TopicAcc {
    n_pubs: u64,
    n_compared: u64,
    /// Σ_d N_{A^{t,d}} · csi over cells with a comparison set.
    csi_weighted: f64,
    /// Σ c_a / μ_{t,d} over the journal's papers in the topic.
    fnif_sum: f64,
}

/// Per-journal running sums, fed cells in (topic, document type) order.
#[derive(Debug, Default)]
struct JournalAcc<'a> {
    topics: BTreeMap<&'a str, TopicAcc>,
}

impl<'a> JournalAcc<'a> {
    fn add_cell(&mut self, key: &'a CellKey, cell: &CellStats, journal_id: &str) {
        let csi: CellCsi = csi_cell(journal_id, cell).expect("journal present in its own cell");
        let own = cell.journal(journal_id).expect("journal present in its own cell");
        let t = self.topics.entry(key.topic_id.as_str()).or_default();
        t.n_pubs += csi.n_journal;
        if let Some(w) = csi.weighted() {
            t.n_compared += csi.n_journal;
            t.csi_weighted += w;
        }
        // zero-mean cells contribute nothing
        if cell.citation_sum() > 0 {
            t.fnif_sum +=
                own.citation_sum() as f64 * cell.total() as f64 / cell.citation_sum() as f64;
        }
    }

    fn n_pubs(&self) -> u64 {
        self.topics.values().map(|t| t.n_pubs).sum()
    }

    fn fncsi(&self) -> Result<Fncsi, Unrankable> {
        if self.n_pubs() == 0 {
            return Err(Unrankable::NoClassifiedPublications);
        }
        let n_compared: u64 = self.topics.values().map(|t| t.n_compared).sum();
        if n_compared == 0 {
            return Err(Unrankable::NoComparisons);
        }
        let weighted: f64 = self.topics.values().map(|t| t.csi_weighted).sum();
        let topic_breakdown = self
            .topics
            .iter()
            .map(|(&id, t)| {
                let score = TopicScore {
                    fncsi: (t.n_compared > 0).then(|| t.csi_weighted / t.n_compared as f64),
                    n_pubs: t.n_pubs,
                    n_compared: t.n_compared,
                };
                (id.to_string(), score)
            })
            .collect();
        Ok(Fncsi { value: weighted / n_compared as f64, n_compared, topic_breakdown })
    }

    fn fnif(&self) -> Result<f64, Unrankable> {
        match self.n_pubs() {
            0 => Err(Unrankable::NoClassifiedPublications),
            n => Ok(self.topics.values().map(|t| t.fnif_sum).sum::<f64>() / n as f64),
        }
    }

    fn expected_jif(&self, topic_means: &BTreeMap<&str, f64>) -> Result<f64, Unrankable> {
        match self.n_pubs() {
            0 => Err(Unrankable::NoClassifiedPublications),
            n => {
                let sum: f64 =
                    self.topics.iter().map(|(t, acc)| topic_means[t] * acc.n_pubs as f64).sum();
                Ok(sum / n as f64)
            }
        }
    }
}

fn accumulate<'a>(journal_id: &'a str, cells: &'a CellTable) -> JournalAcc<'a> {
    let mut acc = JournalAcc::default();
    for (key, cell) in cells.journal_cells(journal_id) {
        acc.add_cell(key, cell, journal_id);
    }
    acc
}

/// Field-normalized citation success index with its per-topic breakdown.
pub fn fncsi(journal_id: &str, cells: &CellTable) -> Result<Fncsi, Unrankable> {
    accumulate(journal_id, cells).fncsi()
}

/// Field-normalized impact factor.
pub fn fnif(journal_id: &str, cells: &CellTable) -> Result<f64, Unrankable> {
    accumulate(journal_id, cells).fnif()
}

/// Expected JIF: the journal's citation potential given its topic mix.
pub fn expected_jif(journal_id: &str, cells: &CellTable) -> Result<f64, Unrankable> {
    accumulate(journal_id, cells).expected_jif(&cells.topic_means())
}

/// Citations per item over every publication of the journal.
pub fn jif(journal_id: &str, corpus: &Corpus) -> Result<f64, Unrankable> {
    let (n, sum) = corpus
        .journal_publications(journal_id)
        .fold((0u64, 0u64), |(n, s), p| (n + 1, s + p.citations));
    if n == 0 {
        Err(Unrankable::NoPublications)
    } else {
        Ok(sum as f64 / n as f64)
    }
}

/// Computes every indicator for every journal of the corpus, ordered by
/// journal id. Journals that cannot be scored on an indicator carry `None`.
pub fn compute_all(corpus: &Corpus) -> Vec<JournalIndicator> {
    let cells = build_cells(corpus);
    compute_with_cells(corpus, &cells)
}

pub fn compute_with_cells(corpus: &Corpus, cells: &CellTable) -> Vec<JournalIndicator> {
    let topic_means = cells.topic_means();
    let mut accs: BTreeMap<&str, JournalAcc> = BTreeMap::new();
    for (key, cell) in cells.iter() {
        for journal_id in cell.per_journal_counts().keys() {
            accs.entry(journal_id.as_str()).or_default().add_cell(key, cell, journal_id);
        }
    }

    let mut items: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for p in &corpus.publications {
        let e = items.entry(p.journal_id.as_str()).or_default();
        e.0 += 1;
        e.1 += p.citations;
    }

    let ids: BTreeSet<&str> =
        corpus.journals.keys().map(String::as_str).chain(items.keys().copied()).collect();
    let empty = JournalAcc::default();
    ids.into_iter()
        .map(|id| {
            let acc = accs.get(id).unwrap_or(&empty);
            let (n_items, cites) = items.get(id).copied().unwrap_or_default();
            let fncsi = acc.fncsi().ok();
            JournalIndicator {
                journal_id: id.to_string(),
                categories: corpus.journals.get(id).map(|j| j.categories.clone()).unwrap_or_default(),
                fnif: acc.fnif().ok(),
                expected_jif: acc.expected_jif(&topic_means).ok(),
                jif: (n_items > 0).then(|| cites as f64 / n_items as f64),
                n_pubs: acc.n_pubs(),
                n_items,
                n_compared: fncsi.as_ref().map_or(0, |f| f.n_compared),
                topic_breakdown: fncsi.as_ref().map(|f| f.topic_breakdown.clone()).unwrap_or_else(
                    || {
                        acc.topics
                            .iter()
                            .map(|(&t, a)| {
                                let s = TopicScore { fncsi: None, n_pubs: a.n_pubs, n_compared: 0 };
                                (t.to_string(), s)
                            })
                            .collect()
                    },
                ),
                fncsi: fncsi.map(|f| f.value),
            }
        })
        .collect()
}
