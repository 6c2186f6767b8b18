//! Ranking robustness: bootstrap rank distributions, the relative change of
//! ranking, and the document-type flip perturbation.
//!
//! Each simulation resamples every journal's publications with replacement to
//! their original count, rebuilds all cells from the resampled corpus and
//! ranks the journals again. Simulation `i` draws from a ChaCha8 stream `i`
//! keyed by the master seed, so results do not depend on thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Publication};
use crate::indicators::{compute_all, JournalIndicator};
use crate::ranking::{order_by_value, rank, IndicatorKey, Scope};

pub const DEFAULT_SIMULATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobustnessError {
    #[error("simulation count must be at least 1")]
    NoSimulations,
    #[error("no journal is rankable on {0}")]
    NoRankableJournals(IndicatorKey),
    #[error("no ranking samples supplied")]
    EmptyInput,
    #[error("journal {0} has an empty ranking sample")]
    EmptySamples(String),
}

/// Bootstrap ranks of one journal, one entry per simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankingSamples {
    pub journal_id: String,
    pub rankings: Vec<u32>,
}

impl RankingSamples {
    pub fn new(journal_id: impl Into<String>, rankings: Vec<u32>) -> Self {
        Self { journal_id: journal_id.into(), rankings }
    }

    pub fn spread(&self) -> u32 {
        let max = self.rankings.iter().max().copied().unwrap_or(0);
        let min = self.rankings.iter().min().copied().unwrap_or(0);
        max - min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSummary {
    pub min: u32,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub indicator: IndicatorKey,
    pub seed: u64,
    pub simulations: usize,
    pub delta: f64,
    /// Journals rankable on the original corpus; these are the ones tracked.
    pub journals: usize,
    /// Rank given to a tracked journal that is unrankable in a simulation.
    pub sentinel_rank: u32,
    pub sentinel_assignments: usize,
    pub per_journal: BTreeMap<String, RankSummary>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[u32], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] as f64 + frac * (sorted[hi] as f64 - sorted[lo] as f64)
}

pub fn summarize_ranks(rankings: &[u32]) -> Option<RankSummary> {
    if rankings.is_empty() {
        return None;
    }
    let mut sorted = rankings.to_vec();
    sorted.sort_unstable();
    Some(RankSummary {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Mean over journals of `(max - min) / mean` of their bootstrap ranks.
pub fn relative_change<'a>(
    samples: impl IntoIterator<Item = &'a RankingSamples>,
) -> Result<f64, RobustnessError> {
    let mut total = 0.0;
    let mut n = 0usize;
    for s in samples {
        if s.rankings.is_empty() {
            return Err(RobustnessError::EmptySamples(s.journal_id.clone()));
        }
        let avg = s.rankings.iter().map(|&r| r as f64).sum::<f64>() / s.rankings.len() as f64;
        total += s.spread() as f64 / avg;
        n += 1;
    }
    if n == 0 {
        return Err(RobustnessError::EmptyInput);
    }
    Ok(total / n as f64)
}

fn group_by_journal(corpus: &Corpus) -> Vec<Vec<&Publication>> {
    let mut groups: BTreeMap<&str, Vec<&Publication>> = BTreeMap::new();
    for p in &corpus.publications {
        groups.entry(&p.journal_id).or_default().push(p);
    }
    groups.into_values().collect()
}

fn resample(groups: &[Vec<&Publication>], rng: &mut ChaCha8Rng) -> Corpus {
    let mut pubs = Vec::with_capacity(groups.iter().map(Vec::len).sum());
    for g in groups {
        for _ in 0..g.len() {
            pubs.push(g[rng.random_range(0..g.len())].clone());
        }
    }
    Corpus { publications: pubs, ..Corpus::default() }
}

/// Ranks `tracked` journals by `key`; unrankable ones get `tracked.len() + 1`.
fn rank_tracked(indicators: &[JournalIndicator], key: IndicatorKey, tracked: &[String]) -> Vec<u32> {
    let by_id: BTreeMap<&str, &JournalIndicator> =
        indicators.iter().map(|i| (i.journal_id.as_str(), i)).collect();
    let mut entries: Vec<(&str, f64)> = tracked
        .iter()
        .filter_map(|id| by_id.get(id.as_str()).and_then(|i| key.value(i)).map(|v| (id.as_str(), v)))
        .collect();
    order_by_value(&mut entries);
    let positions: BTreeMap<&str, u32> =
        entries.iter().enumerate().map(|(i, &(id, _))| (id, i as u32 + 1)).collect();
    let sentinel = tracked.len() as u32 + 1;
    tracked.iter().map(|id| positions.get(id.as_str()).copied().unwrap_or(sentinel)).collect()
}

pub type BootstrapSamples = BTreeMap<String, RankingSamples>;

/// Bootstrap rankings for several indicators over the same resampled corpora.
pub fn bootstrap_many(
    corpus: &Corpus,
    keys: &[IndicatorKey],
    sims: usize,
    seed: u64,
) -> Result<BTreeMap<IndicatorKey, BootstrapSamples>, RobustnessError> {
    if sims == 0 {
        return Err(RobustnessError::NoSimulations);
    }
    let original = compute_all(corpus);
    let mut tracked: BTreeMap<IndicatorKey, Vec<String>> = BTreeMap::new();
    for &key in keys {
        let ids: Vec<String> = original
            .iter()
            .filter(|i| key.value(i).is_some())
            .map(|i| i.journal_id.clone())
            .collect();
        if ids.is_empty() {
            return Err(RobustnessError::NoRankableJournals(key));
        }
        tracked.insert(key, ids);
    }

    let groups = group_by_journal(corpus);
    let per_sim: Vec<BTreeMap<IndicatorKey, Vec<u32>>> = (0..sims)
        .into_par_iter()
        .map(|sim| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(sim as u64);
            let indicators = compute_all(&resample(&groups, &mut rng));
            tracked
                .iter()
                .map(|(&key, ids)| (key, rank_tracked(&indicators, key, ids)))
                .collect()
        })
        .collect();

    Ok(tracked
        .iter()
        .map(|(&key, ids)| {
            let samples = ids
                .iter()
                .enumerate()
                .map(|(j, id)| {
                    let ranks = per_sim.iter().map(|s| s[&key][j]).collect();
                    (id.clone(), RankingSamples::new(id.as_str(), ranks))
                })
                .collect();
            (key, samples)
        })
        .collect())
}

pub fn bootstrap_rankings(
    corpus: &Corpus,
    key: IndicatorKey,
    sims: usize,
    seed: u64,
) -> Result<BootstrapSamples, RobustnessError> {
    let mut all = bootstrap_many(corpus, &[key], sims, seed)?;
    Ok(all.remove(&key).expect("requested key present"))
}

pub fn summarize(
    key: IndicatorKey,
    samples: &BootstrapSamples,
    seed: u64,
) -> Result<RobustnessReport, RobustnessError> {
    let delta = relative_change(samples.values())?;
    let sentinel_rank = samples.len() as u32 + 1;
    let simulations = samples.values().next().map_or(0, |s| s.rankings.len());
    let sentinel_assignments = samples
        .values()
        .flat_map(|s| &s.rankings)
        .filter(|&&r| r == sentinel_rank)
        .count();
    let per_journal = samples
        .iter()
        .map(|(id, s)| (id.clone(), summarize_ranks(&s.rankings).expect("non-empty samples")))
        .collect();
    Ok(RobustnessReport {
        indicator: key,
        seed,
        simulations,
        delta,
        journals: samples.len(),
        sentinel_rank,
        sentinel_assignments,
        per_journal,
    })
}

/// Index of each journal's most cited publication, ties to the smaller pub_id.
pub fn flip_targets(corpus: &Corpus) -> BTreeMap<&str, usize> {
    let mut best: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, p) in corpus.publications.iter().enumerate() {
        best.entry(&p.journal_id)
            .and_modify(|b| {
                let cur = &corpus.publications[*b];
                if p.citations > cur.citations
                    || (p.citations == cur.citations && p.pub_id < cur.pub_id)
                {
                    *b = i;
                }
            })
            .or_insert(i);
    }
    best
}

/// Toggles Article/Review on every journal's most cited publication.
pub fn flip_doc_type(corpus: &Corpus) -> Corpus {
    let mut out = corpus.clone();
    for i in flip_targets(corpus).into_values() {
        let p = &mut out.publications[i];
        p.doc_type = p.doc_type.toggled();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankShift {
    pub journal_id: String,
    pub original: Option<usize>,
    pub perturbed: Option<usize>,
}

impl RankShift {
    pub fn displacement(&self) -> Option<usize> {
        Some(self.original?.abs_diff(self.perturbed?))
    }
}

/// Global ranks before and after [`flip_doc_type`], joined per journal.
pub fn perturbation_comparison(corpus: &Corpus, key: IndicatorKey) -> Vec<RankShift> {
    let before = rank(&compute_all(corpus), key, &Scope::Global);
    let after = rank(&compute_all(&flip_doc_type(corpus)), key, &Scope::Global);
    let (b, a) = (before.ranks(), after.ranks());
    let mut ids: Vec<&str> = b.keys().chain(a.keys()).copied().collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .map(|id| RankShift {
            journal_id: id.to_string(),
            original: b.get(id).copied(),
            perturbed: a.get(id).copied(),
        })
        .collect()
}
