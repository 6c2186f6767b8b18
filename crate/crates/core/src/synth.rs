//! Seeded synthetic corpora for desk-scale verification.
//!
//! Journals get a log-normal quality factor and topics a log-normal citation
//! scale; each paper's citation count is `floor(base * quality * scale *
//! boost * X)` where `X` follows the configured heavy-tailed family and
//! `boost` applies to reviews. Outlier journals replace that draw with one
//! paper at a fixed high count, a fixed fraction of uncited papers, and
//! at-least-once-cited ordinary papers for the rest.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Pareto};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, DocumentType, Journal, Publication};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid profile: {0}")]
pub struct ProfileError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CitationFamily {
    LogNormal { sigma: f64 },
    Pareto { shape: f64 },
}

impl fmt::Display for CitationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CitationFamily::LogNormal { sigma } => write!(f, "lognormal(sigma={sigma})"),
            CitationFamily::Pareto { shape } => write!(f, "pareto(shape={shape})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierSpec {
    /// Zero-based journal index.
    pub journal: usize,
    pub top_citations: u64,
    pub zero_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Profile {
    pub journals: usize,
    pub topics: usize,
    pub min_pubs: usize,
    pub max_pubs: usize,
    /// Topics a journal draws its papers from.
    pub topics_per_journal: usize,
    pub review_fraction: f64,
    pub review_boost: f64,
    pub base_citations: f64,
    pub citations: CitationFamily,
    /// Standard deviation of log journal quality.
    pub journal_spread: f64,
    /// Standard deviation of log topic citation scale.
    pub topic_spread: f64,
    pub unclassified_fraction: f64,
    pub categories: usize,
    pub census_year: i32,
    pub outliers: Vec<OutlierSpec>,
}

impl Default for Profile {
    fn default() -> Self {
        Self::realistic()
    }
}

impl Profile {
    /// Log-normal citations, no outliers.
    pub fn realistic() -> Self {
        Self {
            journals: 40,
            topics: 8,
            min_pubs: 60,
            max_pubs: 200,
            topics_per_journal: 2,
            review_fraction: 0.12,
            review_boost: 3.0,
            base_citations: 4.0,
            citations: CitationFamily::LogNormal { sigma: 1.0 },
            journal_spread: 0.6,
            topic_spread: 0.5,
            unclassified_fraction: 0.0,
            categories: 4,
            census_year: 2018,
            outliers: Vec::new(),
        }
    }

    /// The realistic profile plus journal 0 shaped like a journal with one
    /// paper above 2000 citations and about 70% uncited papers.
    pub fn skewed() -> Self {
        Self {
            outliers: vec![OutlierSpec { journal: 0, top_citations: 2000, zero_fraction: 0.7 }],
            ..Self::realistic()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "realistic" => Some(Self::realistic()),
            "skewed" => Some(Self::skewed()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let fail = |m: String| Err(ProfileError(m));
        if self.journals == 0 || self.topics == 0 {
            return fail("journals and topics must be at least 1".into());
        }
        if self.min_pubs == 0 || self.min_pubs > self.max_pubs {
            return fail(format!("need 1 <= min_pubs <= max_pubs, got {}..{}", self.min_pubs, self.max_pubs));
        }
        if self.topics_per_journal == 0 || self.topics_per_journal > self.topics {
            return fail("topics_per_journal must be in 1..=topics".into());
        }
        for (name, v) in [("review_fraction", self.review_fraction), ("unclassified_fraction", self.unclassified_fraction)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1]"));
            }
        }
        for (name, v) in [("review_boost", self.review_boost), ("base_citations", self.base_citations)] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive"));
            }
        }
        for (name, v) in [("journal_spread", self.journal_spread), ("topic_spread", self.topic_spread)] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be non-negative"));
            }
        }
        match self.citations {
            CitationFamily::LogNormal { sigma } if !(sigma.is_finite() && sigma > 0.0) => {
                return fail("lognormal sigma must be positive".into())
            }
            CitationFamily::Pareto { shape } if !(shape.is_finite() && shape > 0.0) => {
                return fail("pareto shape must be positive".into())
            }
            _ => {}
        }
        for o in &self.outliers {
            if o.journal >= self.journals {
                return fail(format!("outlier journal {} out of range", o.journal));
            }
            if !(0.0..1.0).contains(&o.zero_fraction) {
                return fail("outlier zero_fraction must lie in [0, 1)".into());
            }
            if self.min_pubs < 2 {
                return fail("outlier journals need min_pubs >= 2".into());
            }
        }
        Ok(())
    }
}

enum Draw {
    LogNormal(LogNormal<f64>),
    Pareto(Pareto<f64>),
}

impl Draw {
    fn new(family: CitationFamily) -> Self {
        match family {
            CitationFamily::LogNormal { sigma } => {
                Draw::LogNormal(LogNormal::new(0.0, sigma).expect("validated sigma"))
            }
            CitationFamily::Pareto { shape } => {
                Draw::Pareto(Pareto::new(1.0, shape).expect("validated shape"))
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Draw::LogNormal(d) => d.sample(rng),
            Draw::Pareto(d) => d.sample(rng) - 1.0,
        }
    }
}

pub fn journal_id(index: usize) -> String {
    format!("J{:03}", index + 1)
}

pub fn generate(profile: &Profile, seed: u64) -> Result<Corpus, ProfileError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = Draw::new(profile.citations);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let topics: Vec<String> = (1..=profile.topics).map(|t| format!("T{t:02}")).collect();
    let topic_scale: Vec<f64> =
        topics.iter().map(|_| (profile.topic_spread * unit.sample(&mut rng)).exp()).collect();
    let categories: Vec<String> = (1..=profile.categories.max(1)).map(|c| format!("CAT{c}")).collect();

    let mut journals = Vec::with_capacity(profile.journals);
    let mut publications = Vec::new();
    for j in 0..profile.journals {
        let id = journal_id(j);
        let quality = (profile.journal_spread * unit.sample(&mut rng)).exp();
        let own_topics: Vec<usize> = rand::seq::index::sample(&mut rng, profile.topics, profile.topics_per_journal).into_vec();
        let mut cats = vec![categories[j % categories.len()].clone()];
        if rng.random_bool(0.25) && categories.len() > 1 {
            cats.push(categories[(j + 1) % categories.len()].clone());
        }
        journals.push(Journal::new(id.as_str(), format!("Synthetic Journal {}", j + 1)).with_categories(cats));

        let n = rng.random_range(profile.min_pubs..=profile.max_pubs);
        let outlier = profile.outliers.iter().find(|o| o.journal == j);
        let zeros = outlier.map_or(0, |o| ((o.zero_fraction * n as f64).round() as usize).min(n - 1));
        for k in 0..n {
            let topic = *own_topics.choose(&mut rng).expect("non-empty topic list");
            let review = rng.random_bool(profile.review_fraction);
            let x = draw.sample(&mut rng);
            let mut expected = profile.base_citations * quality * topic_scale[topic];
            if review {
                expected *= profile.review_boost;
            }
            let ordinary = (expected * x).floor() as u64;
            let (doc_type, citations) = match outlier {
                None => (if review { DocumentType::Review } else { DocumentType::Article }, ordinary),
                Some(o) if k == 0 => (DocumentType::Article, o.top_citations),
                Some(_) if k <= zeros => (DocumentType::Article, 0),
                Some(_) => (DocumentType::Article, ordinary.max(1)),
            };
            let classified = !rng.random_bool(profile.unclassified_fraction);
            let year = profile.census_year - rng.random_range(1..=2);
            publications.push(Publication::new(
                format!("{id}-{:04}", k + 1),
                id.as_str(),
                year,
                doc_type,
                citations,
                classified.then_some(topics[topic].as_str()),
            ));
        }
    }
    let mut corpus = Corpus::new(publications, journals);
    corpus.topics = topics.into_iter().collect();
    corpus.census_label = format!(
        "citations in {} to articles and reviews published {}-{}",
        profile.census_year,
        profile.census_year - 2,
        profile.census_year - 1
    );
    Ok(corpus)
}
