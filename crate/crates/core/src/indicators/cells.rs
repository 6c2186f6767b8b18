//! Per-(topic, document type) citation histograms.
//!
//! Each cell keeps its distinct citation values in ascending order with
//! multiplicities and a prefix count, so the tie-aware success probability of
//! one journal against the rest of the cell is a merge over that journal's own
//! histogram: `O(k log m)` for `k` distinct own values and `m` distinct cell
//! values, never all pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::IndicatorError;
use crate::corpus::{Corpus, DocumentType};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CellKey {
    pub topic_id: String,
    pub doc_type: DocumentType,
}

impl CellKey {
    pub fn new(topic_id: impl Into<String>, doc_type: DocumentType) -> Self {
        Self { topic_id: topic_id.into(), doc_type }
    }
}

/// Sparse citation histogram: `(value, multiplicity)` pairs, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Histogram {
    entries: Vec<(u64, u64)>,
    total: u64,
    citation_sum: u64,
}

impl Histogram {
    fn from_map(map: BTreeMap<u64, u64>) -> Self {
        let total = map.values().sum();
        let citation_sum = map.iter().map(|(v, c)| v * c).sum();
        Self { entries: map.into_iter().collect(), total, citation_sum }
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn citation_sum(&self) -> u64 {
        self.citation_sum
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellStats {
    values: Vec<u64>,
    counts: Vec<u64>,
    /// `below[i]` = number of papers cited fewer than `values[i]` times.
    below: Vec<u64>,
    per_journal: BTreeMap<String, Histogram>,
    total: u64,
    citation_sum: u64,
}

impl CellStats {
    pub fn from_papers<'a>(papers: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut per_journal: BTreeMap<String, BTreeMap<u64, u64>> = BTreeMap::new();
        for (journal, citations) in papers {
            *per_journal.entry(journal.to_string()).or_default().entry(citations).or_insert(0) += 1;
        }
        Self::from_journal_maps(per_journal)
    }

    fn from_journal_maps(per_journal: BTreeMap<String, BTreeMap<u64, u64>>) -> Self {
        let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
        for hist in per_journal.values() {
            for (&v, &c) in hist {
                *merged.entry(v).or_insert(0) += c;
            }
        }
        let (values, counts): (Vec<u64>, Vec<u64>) = merged.into_iter().unzip();
        let mut below = Vec::with_capacity(values.len());
        let mut acc = 0;
        for &c in &counts {
            below.push(acc);
            acc += c;
        }
        let citation_sum = values.iter().zip(&counts).map(|(v, c)| v * c).sum();
        Self {
            values,
            counts,
            below,
            per_journal: per_journal.into_iter().map(|(j, m)| (j, Histogram::from_map(m))).collect(),
            total: acc,
            citation_sum,
        }
    }

    /// Distinct citation values, ascending.
    pub fn citation_values(&self) -> &[u64] {
        &self.values
    }

    /// Multiplicity of each entry of [`citation_values`](Self::citation_values).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn per_journal_counts(&self) -> &BTreeMap<String, Histogram> {
        &self.per_journal
    }

    pub fn journal(&self, journal_id: &str) -> Option<&Histogram> {
        self.per_journal.get(journal_id)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn citation_sum(&self) -> u64 {
        self.citation_sum
    }

    /// Mean citation of the cell; `None` for an empty cell.
    pub fn mean(&self) -> Option<f64> {
        (self.total > 0).then(|| self.citation_sum as f64 / self.total as f64)
    }
}

/// Outcome of comparing one journal's papers against the rest of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCsi {
    /// Papers of the journal in the cell.
    pub n_journal: u64,
    /// Papers of other journals in the cell.
    pub n_comparison: u64,
    /// Twice the number of won pairs plus the number of tied pairs.
    pub doubled_score: u128,
}

impl CellCsi {
    /// Success probability, or `None` when the comparison set is empty.
    pub fn probability(&self) -> Option<f64> {
        (self.n_comparison > 0).then(|| {
            self.doubled_score as f64 / (2 * self.n_journal as u128 * self.n_comparison as u128) as f64
        })
    }

    /// `n_journal * probability`, computed with a single division.
    pub(crate) fn weighted(&self) -> Option<f64> {
        (self.n_comparison > 0)
            .then(|| self.doubled_score as f64 / (2 * self.n_comparison as u128) as f64)
    }

    pub fn is_empty_comparison(&self) -> bool {
        self.n_comparison == 0
    }
}

/// Probability that a paper of `journal_id` out-cites a paper of another
/// journal in the same cell, ties counting one half.
pub fn csi_cell(journal_id: &str, cell: &CellStats) -> Result<CellCsi, IndicatorError> {
    let own = cell
        .journal(journal_id)
        .ok_or_else(|| IndicatorError::JournalNotInCell(journal_id.to_string()))?;
    let mut doubled: u128 = 0;
    let mut own_below = 0u64;
    for &(value, count) in own.entries() {
        let i = cell
            .values
            .binary_search(&value)
            .expect("journal histogram values are a subset of the cell values");
        let others_below = cell.below[i] - own_below;
        let others_equal = cell.counts[i] - count;
        doubled += count as u128 * (2 * others_below as u128 + others_equal as u128);
        own_below += count;
    }
    Ok(CellCsi { n_journal: own.total, n_comparison: cell.total - own.total, doubled_score: doubled })
}

/// All cells of a corpus, ordered by topic then document type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellTable {
    cells: BTreeMap<CellKey, CellStats>,
}

impl CellTable {
    pub fn get(&self, key: &CellKey) -> Option<&CellStats> {
        self.cells.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellKey, &CellStats)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in which `journal_id` has at least one paper.
    pub fn journal_cells<'a>(
        &'a self,
        journal_id: &'a str,
    ) -> impl Iterator<Item = (&'a CellKey, &'a CellStats)> + 'a {
        self.cells.iter().filter(move |(_, c)| c.journal(journal_id).is_some())
    }

    /// Mean citation per topic, pooling both document types.
    pub fn topic_means(&self) -> BTreeMap<&str, f64> {
        let mut acc: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
        for (k, c) in &self.cells {
            let e = acc.entry(k.topic_id.as_str()).or_default();
            e.0 += c.citation_sum;
            e.1 += c.total;
        }
        acc.into_iter().map(|(t, (sum, n))| (t, sum as f64 / n as f64)).collect()
    }
}

impl FromIterator<(CellKey, CellStats)> for CellTable {
    fn from_iter<I: IntoIterator<Item = (CellKey, CellStats)>>(iter: I) -> Self {
        Self { cells: iter.into_iter().collect() }
    }
}

/// Groups the classified publications of a corpus into cells.
pub fn build_cells(corpus: &Corpus) -> CellTable {
    let mut grouped: BTreeMap<CellKey, BTreeMap<String, BTreeMap<u64, u64>>> = BTreeMap::new();
    for p in &corpus.publications {
        let Some(topic) = &p.topic_id else { continue };
        let cell = grouped.entry(CellKey::new(topic.as_str(), p.doc_type)).or_default();
        let hist = match cell.get_mut(&p.journal_id) {
            Some(h) => h,
            None => cell.entry(p.journal_id.clone()).or_default(),
        };
        *hist.entry(p.citations).or_insert(0) += 1;
    }
    grouped.into_iter().map(|(k, j)| (k, CellStats::from_journal_maps(j))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Publication;
    use proptest::prelude::*;

    /// All-pairs enumeration, kept independent of the prefix-count kernel.
    fn brute_force(own: &[u64], others: &[u64]) -> f64 {
        let mut score = 0.0;
        for &a in own {
            for &o in others {
                if a > o {
                    score += 1.0;
                } else if a == o {
                    score += 0.5;
                }
            }
        }
        score / (own.len() * others.len()) as f64
    }

    fn cell(own: &[u64], others: &[(&str, u64)]) -> CellStats {
        CellStats::from_papers(own.iter().map(|&c| ("A", c)).chain(others.iter().copied()))
    }

    #[test]
    fn groups_into_one_cell() {
        let corpus = Corpus::with_implicit_journals(vec![
            Publication::new("p1", "jA", 2017, DocumentType::Article, 3, Some("t1")),
            Publication::new("p2", "jB", 2017, DocumentType::Article, 1, Some("t1")),
        ]);
        let cells = build_cells(&corpus);
        assert_eq!(cells.len(), 1);
        let c = cells.get(&CellKey::new("t1", DocumentType::Article)).unwrap();
        assert_eq!(c.citation_values(), &[1, 3]);
        assert_eq!(c.total(), 2);
        assert_eq!(c.mean(), Some(2.0));
    }

    #[test]
    fn doc_types_split_cells() {
        let corpus = Corpus::with_implicit_journals(vec![
            Publication::new("p1", "jA", 2017, DocumentType::Article, 3, Some("t1")),
            Publication::new("p2", "jB", 2017, DocumentType::Review, 1, Some("t1")),
            Publication::new("p3", "jB", 2017, DocumentType::Review, 1, None),
        ]);
        let cells = build_cells(&corpus);
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|(_, c)| c.total() == 1));
    }

    #[test]
    fn worked_example_eleven_twelfths() {
        let c = cell(&[3, 2], &[("B", 1), ("B", 1), ("C", 2)]);
        let csi = csi_cell("A", &c).unwrap();
        assert_eq!(brute_force(&[3, 2], &[1, 1, 2]), 11.0 / 12.0);
        assert_eq!(csi.probability(), Some(11.0 / 12.0));
        assert_eq!(csi.doubled_score, 11);
        assert_eq!((csi.n_journal, csi.n_comparison), (2, 3));
    }

    #[test]
    fn pure_tie_is_one_half() {
        let c = cell(&[5], &[("B", 5)]);
        assert_eq!(csi_cell("A", &c).unwrap().probability(), Some(0.5));
    }

    #[test]
    fn sole_journal_has_empty_comparison() {
        let c = cell(&[5, 1, 0], &[]);
        let csi = csi_cell("A", &c).unwrap();
        assert!(csi.is_empty_comparison());
        assert_eq!(csi.probability(), None);
    }

    #[test]
    fn absent_journal_is_contract_violation() {
        let c = cell(&[1], &[("B", 2)]);
        assert!(matches!(csi_cell("Z", &c), Err(IndicatorError::JournalNotInCell(_))));
    }

    #[test]
    fn proportional_histograms_are_neutral() {
        // A holds {0,2,2,7}, the comparison set holds three copies of it
        let own = [0, 2, 2, 7];
        let others: Vec<(&str, u64)> =
            own.iter().flat_map(|&v| [("B", v), ("C", v), ("D", v)]).collect();
        let c = cell(&own, &others);
        assert_eq!(csi_cell("A", &c).unwrap().probability(), Some(0.5));
    }

    proptest! {
        #[test]
        fn kernel_matches_all_pairs(
            own in proptest::collection::vec(0u64..20, 1..30),
            others in proptest::collection::vec((0usize..3, 0u64..20), 0..40),
        ) {
            let names = ["B", "C", "D"];
            let others: Vec<(&str, u64)> = others.iter().map(|&(j, v)| (names[j], v)).collect();
            let c = cell(&own, &others);
            let csi = csi_cell("A", &c).unwrap();
            let other_vals: Vec<u64> = others.iter().map(|&(_, v)| v).collect();
            match csi.probability() {
                None => prop_assert!(other_vals.is_empty()),
                Some(p) => prop_assert!((p - brute_force(&own, &other_vals)).abs() <= 1e-12),
            }
        }

        #[test]
        fn two_journal_complement(
            a in proptest::collection::vec(0u64..50, 1..40),
            b in proptest::collection::vec(0u64..50, 1..40),
        ) {
            let c = CellStats::from_papers(
                a.iter().map(|&v| ("A", v)).chain(b.iter().map(|&v| ("B", v))),
            );
            let pa = csi_cell("A", &c).unwrap().probability().unwrap();
            let pb = csi_cell("B", &c).unwrap().probability().unwrap();
            prop_assert_eq!(pa + pb, 1.0);
        }

        #[test]
        fn cell_invariants(papers in proptest::collection::vec((0usize..4, 0u64..30), 1..60)) {
            let names = ["A", "B", "C", "D"];
            let c = CellStats::from_papers(papers.iter().map(|&(j, v)| (names[j], v)));
            prop_assert_eq!(c.counts().iter().sum::<u64>(), c.total());
            prop_assert!(c.citation_values().windows(2).all(|w| w[0] < w[1]));
            for h in c.per_journal_counts().values() {
                for &(v, n) in h.entries() {
                    let i = c.citation_values().binary_search(&v).unwrap();
                    prop_assert!(n <= c.counts()[i]);
                }
            }
            let sum: u64 = papers.iter().map(|&(_, v)| v).sum();
            prop_assert_eq!(c.mean().unwrap(), sum as f64 / papers.len() as f64);
        }
    }
}
