//! Field-normalized journal impact indicators over topic-clustered publication
//! corpora.
//!
//! The crate computes four per-journal indicators:
//!
//! - **FNCSI**: probability that a paper of the journal out-cites a paper of
//!   another journal drawn from the same (topic, document type) cell, ties
//!   credited one half, aggregated with publication-count weights.
//! - **FNIF**: mean of per-paper citations divided by the cell's mean citation.
//! - **Expected JIF**: publication-weighted mean of topic citation means.
//! - **JIF**: plain citations per item over the census window.
//!
//! On top of those it builds deterministic rankings, bootstrap ranking
//! stability reports, and the document-type flip perturbation.

pub mod classifier;
pub mod commands;
pub mod corpus;
pub mod indicators;
pub mod ranking;
pub mod robustness;
pub mod synth;

pub use classifier::{assign_majority, AssignmentReport, RelatedRecords};
pub use corpus::{
    coverage_stats, validate_corpus, Corpus, CorpusError, CoverageReport, DocumentType, Journal,
    Publication, ValidationReport,
};
pub use indicators::cells::{build_cells, csi_cell, CellCsi, CellKey, CellStats, CellTable};
pub use indicators::{compute_all, JournalIndicator, Unrankable};
pub use ranking::{correlate, rank, IndicatorKey, RankingTable, Scope};
pub use robustness::{
    bootstrap_rankings, flip_doc_type, perturbation_comparison, relative_change, RankingSamples,
    RobustnessReport,
};
