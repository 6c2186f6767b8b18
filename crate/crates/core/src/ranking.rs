//! Rankings and percentile ranks over journal indicators.
//!
//! Tables are sorted by descending value with ties going to the smaller
//! journal id, so every ranking is a strict order. The percentile of rank `r`
//! among `N` journals is `100 * (N - r + 1) / N`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::JournalIndicator;

pub const PERCENTILE_FORMULA: &str = "percentile = 100 * (N - rank + 1) / N";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankingError {
    #[error("unknown indicator `{0}` (expected one of fncsi, fnif, expected-jif, jif)")]
    UnknownIndicator(String),
    #[error("need at least 3 journals common to both tables, found {0}")]
    InsufficientData(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKey {
    Fncsi,
    Fnif,
    #[serde(alias = "expected-jif")]
    ExpectedJif,
    Jif,
}

impl IndicatorKey {
    pub const ALL: [IndicatorKey; 4] =
        [IndicatorKey::Fncsi, IndicatorKey::Fnif, IndicatorKey::ExpectedJif, IndicatorKey::Jif];

    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorKey::Fncsi => "fncsi",
            IndicatorKey::Fnif => "fnif",
            IndicatorKey::ExpectedJif => "expected_jif",
            IndicatorKey::Jif => "jif",
        }
    }

    pub fn value(self, indicator: &JournalIndicator) -> Option<f64> {
        match self {
            IndicatorKey::Fncsi => indicator.fncsi,
            IndicatorKey::Fnif => indicator.fnif,
            IndicatorKey::ExpectedJif => indicator.expected_jif,
            IndicatorKey::Jif => indicator.jif,
        }
    }
}

impl fmt::Display for IndicatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndicatorKey {
    type Err = RankingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "fncsi" => Ok(IndicatorKey::Fncsi),
            "fnif" => Ok(IndicatorKey::Fnif),
            "expected_jif" => Ok(IndicatorKey::ExpectedJif),
            "jif" => Ok(IndicatorKey::Jif),
            _ => Err(RankingError::UnknownIndicator(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Global,
    Category(String),
}

impl Scope {
    pub fn from_category(category: Option<&str>) -> Self {
        category.map_or(Scope::Global, |c| Scope::Category(c.to_string()))
    }

    fn admits(&self, indicator: &JournalIndicator) -> bool {
        match self {
            Scope::Global => true,
            Scope::Category(c) => indicator.categories.iter().any(|x| x == c),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => f.write_str("global"),
            Scope::Category(c) => write!(f, "category:{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow {
    pub journal_id: String,
    pub value: f64,
    pub rank: usize,
    pub percentile: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub indicator: IndicatorKey,
    pub scope: Scope,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    pub fn rank_of(&self, journal_id: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.journal_id == journal_id).map(|r| r.rank)
    }

    pub fn ranks(&self) -> BTreeMap<&str, usize> {
        self.rows.iter().map(|r| (r.journal_id.as_str(), r.rank)).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Orders `(journal_id, value)` pairs by descending value, then ascending id.
pub fn order_by_value(entries: &mut [(&str, f64)]) {
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
}

pub fn rank(indicators: &[JournalIndicator], key: IndicatorKey, scope: &Scope) -> RankingTable {
    let mut entries: Vec<(&str, f64)> = indicators
        .iter()
        .filter(|i| scope.admits(i))
        .filter_map(|i| key.value(i).map(|v| (i.journal_id.as_str(), v)))
        .collect();
    order_by_value(&mut entries);
    let n = entries.len();
    let rows = entries
        .into_iter()
        .enumerate()
        .map(|(i, (id, value))| RankingRow {
            journal_id: id.to_string(),
            value,
            rank: i + 1,
            percentile: 100.0 * (n - i) as f64 / n as f64,
        })
        .collect();
    RankingTable { indicator: key, scope: scope.clone(), rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub spearman: f64,
    pub n: usize,
}

/// Spearman rank correlation over the journals present in both tables.
///
/// The common journals are re-ranked 1..n in each table's order, which keeps
/// the ranks a permutation, so the closed form `1 - 6 Σd² / (n(n² - 1))` is
/// exact.
pub fn correlate(a: &RankingTable, b: &RankingTable) -> Result<Correlation, RankingError> {
    let b_ranks = b.ranks();
    let common: Vec<(&str, usize, usize)> = a
        .rows
        .iter()
        .filter_map(|r| b_ranks.get(r.journal_id.as_str()).map(|&rb| (r.journal_id.as_str(), r.rank, rb)))
        .collect();
    let n = common.len();
    if n < 3 {
        return Err(RankingError::InsufficientData(n));
    }
    let dense = |mut v: Vec<(&str, usize)>| -> BTreeMap<String, i64> {
        v.sort_by_key(|&(_, r)| r);
        v.into_iter().enumerate().map(|(i, (id, _))| (id.to_string(), i as i64 + 1)).collect()
    };
    let ra = dense(common.iter().map(|&(id, r, _)| (id, r)).collect());
    let rb = dense(common.iter().map(|&(id, _, r)| (id, r)).collect());
    let d2: i64 = ra.iter().map(|(id, x)| (x - rb[id]).pow(2)).sum();
    let n_f = n as f64;
    Ok(Correlation { spearman: 1.0 - 6.0 * d2 as f64 / (n_f * (n_f * n_f - 1.0)), n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ind(id: &str, fncsi: Option<f64>, cats: &[&str]) -> JournalIndicator {
        JournalIndicator {
            journal_id: id.to_string(),
            categories: cats.iter().map(|c| c.to_string()).collect(),
            fncsi,
            fnif: fncsi.map(|v| v * 2.0),
            expected_jif: None,
            jif: Some(1.0),
            n_pubs: 1,
            n_items: 1,
            n_compared: 1,
            topic_breakdown: BTreeMap::new(),
        }
    }

    #[test]
    fn descending_by_value() {
        let t = rank(&[ind("jB", Some(0.7), &[]), ind("jA", Some(0.9), &[])], IndicatorKey::Fncsi, &Scope::Global);
        assert_eq!(t.rank_of("jA"), Some(1));
        assert_eq!(t.rank_of("jB"), Some(2));
        assert_eq!(t.rows[0].percentile, 100.0);
        assert_eq!(t.rows[1].percentile, 50.0);
    }

    #[test]
    fn ties_go_to_smaller_id() {
        let t = rank(&[ind("jB", Some(0.5), &[]), ind("jA", Some(0.5), &[])], IndicatorKey::Fncsi, &Scope::Global);
        assert_eq!(t.rank_of("jA"), Some(1));
        assert_eq!(t.rank_of("jB"), Some(2));
    }

    #[test]
    fn unrankable_and_out_of_scope_excluded() {
        let inds = [
            ind("a", Some(0.1), &["STAT"]),
            ind("b", None, &["STAT"]),
            ind("c", Some(0.3), &["MATH", "STAT"]),
            ind("d", Some(0.9), &["MATH"]),
        ];
        let t = rank(&inds, IndicatorKey::Fncsi, &Scope::Category("STAT".into()));
        let ids: Vec<_> = t.rows.iter().map(|r| r.journal_id.as_str()).collect();
        assert_eq!(ids, ["c", "a"]);
        assert!(rank(&inds, IndicatorKey::Fncsi, &Scope::Category("BIO".into())).is_empty());
        assert!(rank(&inds, IndicatorKey::ExpectedJif, &Scope::Global).is_empty());
    }

    #[test]
    fn parse_keys() {
        assert_eq!("expected-jif".parse(), Ok(IndicatorKey::ExpectedJif));
        assert_eq!("FNCSI".parse(), Ok(IndicatorKey::Fncsi));
        assert!(matches!("snip".parse::<IndicatorKey>(), Err(RankingError::UnknownIndicator(_))));
    }

    fn table(ids: &[&str]) -> RankingTable {
        let inds: Vec<_> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| ind(id, Some((ids.len() - i) as f64), &[]))
            .collect();
        rank(&inds, IndicatorKey::Fncsi, &Scope::Global)
    }

    #[test]
    fn identical_and_reversed() {
        let a = table(&["a", "b", "c", "d"]);
        assert_eq!(correlate(&a, &a).unwrap().spearman, 1.0);
        let r = table(&["d", "c", "b", "a"]);
        assert_eq!(correlate(&a, &r).unwrap().spearman, -1.0);
    }

    #[test]
    fn too_few_common_journals() {
        let a = table(&["a", "b", "c"]);
        let b = table(&["a", "b", "x"]);
        assert_eq!(correlate(&a, &b), Err(RankingError::InsufficientData(2)));
    }

    /// Pearson correlation of the rank vectors, an independent route to Spearman.
    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        cov / (vx * vy).sqrt()
    }

    proptest! {
        #[test]
        fn spearman_matches_pearson_on_ranks(vals in proptest::collection::vec((0u32..50, 0u32..50), 3..30)) {
            let inds: Vec<_> = vals
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let mut x = ind(&format!("j{i:02}"), Some(a as f64), &[]);
                    x.fnif = Some(b as f64);
                    x
                })
                .collect();
            let ta = rank(&inds, IndicatorKey::Fncsi, &Scope::Global);
            let tb = rank(&inds, IndicatorKey::Fnif, &Scope::Global);
            let c = correlate(&ta, &tb).unwrap();
            let rb = tb.ranks();
            let x: Vec<f64> = ta.rows.iter().map(|r| r.rank as f64).collect();
            let y: Vec<f64> = ta.rows.iter().map(|r| rb[r.journal_id.as_str()] as f64).collect();
            prop_assert!((c.spearman - pearson(&x, &y)).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&c.spearman));
            prop_assert_eq!(correlate(&ta, &ta).unwrap().spearman, 1.0);
        }

        #[test]
        fn ranking_invariants(vals in proptest::collection::vec(-100i32..100, 1..40)) {
            let inds: Vec<_> = vals.iter().enumerate().map(|(i, &v)| ind(&format!("j{i}"), Some(v as f64), &[])).collect();
            let t = rank(&inds, IndicatorKey::Fncsi, &Scope::Global);
            let n = t.len();
            for (i, row) in t.rows.iter().enumerate() {
                prop_assert_eq!(row.rank, i + 1);
            }
            prop_assert!(t.rows.windows(2).all(|w| w[0].value >= w[1].value));
            prop_assert!(t.rows.windows(2).all(|w| w[0].percentile > w[1].percentile));
            prop_assert_eq!(t.rows[0].percentile, 100.0);
            prop_assert!((t.rows[n - 1].percentile - 100.0 / n as f64).abs() < 1e-12);

            // strictly increasing transform leaves the order unchanged
            let shifted: Vec<_> = inds
                .iter()
                .map(|x| { let mut y = x.clone(); y.fncsi = y.fncsi.map(|v| (v / 50.0).exp() * 3.0 + 1.0); y })
                .collect();
            let t2 = rank(&shifted, IndicatorKey::Fncsi, &Scope::Global);
            prop_assert_eq!(t.ranks(), t2.ranks());
        }
    }
}
