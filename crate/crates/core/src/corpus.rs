//! Publication corpus: data model, delimited-text ingestion, and validation.
//!
//! Publications files carry the columns
//! `pub_id,journal_id,pub_year,doc_type,citations,topic_id` (comma or tab
//! separated, detected from the header line). Journals files carry
//! `journal_id,title,categories` with categories separated by `|`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PUBLICATION_COLUMNS: [&str; 6] =
    ["pub_id", "journal_id", "pub_year", "doc_type", "citations", "topic_id"];
pub const JOURNAL_COLUMNS: [&str; 3] = ["journal_id", "title", "categories"];

/// Optional trailing column marking topics filled in by the majority-rule
/// classifier rather than supplied with the data.
pub const TOPIC_ASSIGNED_COLUMN: &str = "topic_assigned";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column `{0}` in header")]
    MissingColumn(String),
    #[error("{} row(s) rejected; first: {}", .0.len(), .0[0])]
    Rows(Vec<RowError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DocumentType {
    Article,
    Review,
}

impl DocumentType {
    pub const ALL: [DocumentType; 2] = [DocumentType::Article, DocumentType::Review];

    pub fn as_str(self) -> &'static str {
        match self {
            DocumentType::Article => "Article",
            DocumentType::Review => "Review",
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            DocumentType::Article => DocumentType::Review,
            DocumentType::Review => DocumentType::Article,
        }
    }
}

impl fmt::Display for DocumentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown document type `{0}` (expected Article or Review)")]
pub struct UnknownDocumentType(pub String);

impl FromStr for DocumentType {
    type Err = UnknownDocumentType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("article") {
            Ok(DocumentType::Article)
        } else if t.eq_ignore_ascii_case("review") {
            Ok(DocumentType::Review)
        } else {
            Err(UnknownDocumentType(t.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub pub_id: String,
    pub journal_id: String,
    pub pub_year: i32,
    pub doc_type: DocumentType,
    pub citations: u64,
    pub topic_id: Option<String>,
    /// Set when `topic_id` came from majority-rule assignment.
    #[serde(default)]
    pub topic_assigned: bool,
}

impl Publication {
    pub fn new(
        pub_id: impl Into<String>,
        journal_id: impl Into<String>,
        pub_year: i32,
        doc_type: DocumentType,
        citations: u64,
        topic_id: Option<&str>,
    ) -> Self {
        Self {
            pub_id: pub_id.into(),
            journal_id: journal_id.into(),
            pub_year,
            doc_type,
            citations,
            topic_id: topic_id.map(str::to_string),
            topic_assigned: false,
        }
    }

    pub fn is_classified(&self) -> bool {
        self.topic_id.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journal {
    pub journal_id: String,
    pub title: String,
    pub categories: Vec<String>,
}

impl Journal {
    pub fn new(journal_id: impl Into<String>, title: impl Into<String>) -> Self {
        Self { journal_id: journal_id.into(), title: title.into(), categories: Vec::new() }
    }

    pub fn with_categories<I, S>(mut self, categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.categories = categories.into_iter().map(Into::into).collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub publications: Vec<Publication>,
    pub journals: BTreeMap<String, Journal>,
    pub topics: BTreeSet<String>,
    pub census_label: String,
}

impl Corpus {
    /// Builds a corpus whose topic set is the set of topics the publications
    /// carry.
    pub fn new(publications: Vec<Publication>, journals: impl IntoIterator<Item = Journal>) -> Self {
        let topics = publications.iter().filter_map(|p| p.topic_id.clone()).collect();
        let journals = journals.into_iter().map(|j| (j.journal_id.clone(), j)).collect();
        Self { publications, journals, topics, census_label: String::new() }
    }

    /// Like [`Corpus::new`], registering an untitled journal for every journal
    /// id the publications reference.
    pub fn with_implicit_journals(publications: Vec<Publication>) -> Self {
        let ids: BTreeSet<&str> = publications.iter().map(|p| p.journal_id.as_str()).collect();
        let journals: Vec<Journal> = ids.into_iter().map(|id| Journal::new(id, "")).collect();
        Self::new(publications, journals)
    }

    pub fn census_label(mut self, label: impl Into<String>) -> Self {
        self.census_label = label.into();
        self
    }

    /// Publication count per journal id (N_A over all items).
    pub fn publication_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for p in &self.publications {
            *counts.entry(p.journal_id.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn journal_publications<'a>(
        &'a self,
        journal_id: &'a str,
    ) -> impl Iterator<Item = &'a Publication> + 'a {
        self.publications.iter().filter(move |p| p.journal_id == journal_id)
    }

    pub fn load(pubs: &Path, journals: Option<&Path>) -> Result<Self, CorpusError> {
        let publications = load_publications(pubs)?.into_result()?;
        Ok(match journals {
            Some(path) => Corpus::new(publications, load_journals(path)?.into_result()?),
            None => Corpus::with_implicit_journals(publications),
        })
    }
}

/// A rejected input row. `line` is the 1-based physical line in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub kind: RowErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowErrorKind {
    FieldCount { expected: usize, found: usize },
    InvalidField { column: &'static str, value: String },
    NegativeCitations(String),
    UnknownDocumentType(String),
    DuplicateId(String),
    SelfReference(String),
    NoRelatedIds,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            RowErrorKind::FieldCount { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            RowErrorKind::InvalidField { column, value } => {
                write!(f, "invalid value `{value}` in column {column}")
            }
            RowErrorKind::NegativeCitations(v) => write!(f, "negative citation count `{v}`"),
            RowErrorKind::UnknownDocumentType(v) => {
                write!(f, "document type `{v}` is neither Article nor Review")
            }
            RowErrorKind::DuplicateId(id) => write!(f, "duplicate identifier `{id}`"),
            RowErrorKind::SelfReference(id) => write!(f, "`{id}` lists itself as related"),
            RowErrorKind::NoRelatedIds => f.write_str("empty related id list"),
        }
    }
}

/// Parsed records plus the rows that failed to parse.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub rejected: Vec<RowError>,
}

impl<T> Loaded<T> {
    pub fn into_result(self) -> Result<Vec<T>, CorpusError> {
        if self.rejected.is_empty() {
            Ok(self.records)
        } else {
            Err(CorpusError::Rows(self.rejected))
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

/// Opens a delimited-text reader, picking tab when the header line has one.
pub(crate) fn delimited_reader(text: &str) -> csv::Reader<&[u8]> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let header = text.lines().next().unwrap_or("");
    let delimiter = if header.contains('\t') { b'\t' } else { b',' };
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Resolves each required column to its index in the header.
pub(crate) fn column_indices<const N: usize>(
    headers: &csv::StringRecord,
    required: [&str; N],
) -> Result<[usize; N], CorpusError> {
    let mut out = [0; N];
    for (slot, name) in out.iter_mut().zip(required) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
    }
    Ok(out)
}

pub fn load_publications(path: &Path) -> Result<Loaded<Publication>, CorpusError> {
    read_publications(&read_file(path)?)
}

pub fn read_publications(text: &str) -> Result<Loaded<Publication>, CorpusError> {
    let mut reader = delimited_reader(text);
    let headers = reader.headers()?.clone();
    let cols = column_indices(&headers, PUBLICATION_COLUMNS)?;
    let assigned_col = headers.iter().position(|h| h.trim() == TOPIC_ASSIGNED_COLUMN);

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = BTreeSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        match parse_publication(&row, &cols, assigned_col) {
            Ok(p) => {
                if seen.insert(p.pub_id.clone()) {
                    records.push(p);
                } else {
                    rejected.push(RowError { line, kind: RowErrorKind::DuplicateId(p.pub_id) });
                }
            }
            Err(kind) => rejected.push(RowError { line, kind }),
        }
    }
    Ok(Loaded { records, rejected })
}

fn parse_publication(
    row: &csv::StringRecord,
    cols: &[usize; 6],
    assigned_col: Option<usize>,
) -> Result<Publication, RowErrorKind> {
    let needed = cols.iter().chain(assigned_col.iter()).max().map_or(0, |m| m + 1);
    if row.len() < needed {
        return Err(RowErrorKind::FieldCount { expected: needed, found: row.len() });
    }
    let field = |i: usize| row.get(cols[i]).unwrap_or("");

    let pub_id = field(0).trim();
    if pub_id.is_empty() {
        return Err(RowErrorKind::InvalidField { column: "pub_id", value: String::new() });
    }
    let journal_id = field(1).trim();
    if journal_id.is_empty() {
        return Err(RowErrorKind::InvalidField { column: "journal_id", value: String::new() });
    }
    let year_raw = field(2).trim();
    let pub_year = year_raw.parse().map_err(|_| RowErrorKind::InvalidField {
        column: "pub_year",
        value: year_raw.to_string(),
    })?;
    let doc_type = field(3)
        .parse()
        .map_err(|UnknownDocumentType(v)| RowErrorKind::UnknownDocumentType(v))?;
    let cites_raw = field(4).trim();
    let citations = match cites_raw.parse::<i64>() {
        Ok(v) if v < 0 => return Err(RowErrorKind::NegativeCitations(cites_raw.to_string())),
        Ok(v) => v as u64,
        Err(_) => {
            return Err(RowErrorKind::InvalidField {
                column: "citations",
                value: cites_raw.to_string(),
            })
        }
    };
    let topic = field(5).trim();
    let topic_assigned = match assigned_col.map(|i| row.get(i).unwrap_or("").trim()) {
        None | Some("") | Some("0") | Some("false") => false,
        Some("1") | Some("true") => true,
        Some(other) => {
            return Err(RowErrorKind::InvalidField {
                column: "topic_assigned",
                value: other.to_string(),
            })
        }
    };

    Ok(Publication {
        pub_id: pub_id.to_string(),
        journal_id: journal_id.to_string(),
        pub_year,
        doc_type,
        citations,
        topic_id: (!topic.is_empty()).then(|| topic.to_string()),
        topic_assigned,
    })
}

pub fn load_journals(path: &Path) -> Result<Loaded<Journal>, CorpusError> {
    read_journals(&read_file(path)?)
}

pub fn read_journals(text: &str) -> Result<Loaded<Journal>, CorpusError> {
    let mut reader = delimited_reader(text);
    let headers = reader.headers()?.clone();
    let cols = column_indices(&headers, JOURNAL_COLUMNS)?;
    let needed = cols.iter().max().map_or(0, |m| m + 1);

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = BTreeSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() < needed {
            rejected.push(RowError {
                line,
                kind: RowErrorKind::FieldCount { expected: needed, found: row.len() },
            });
            continue;
        }
        let journal_id = row[cols[0]].trim().to_string();
        if journal_id.is_empty() {
            rejected.push(RowError {
                line,
                kind: RowErrorKind::InvalidField { column: "journal_id", value: String::new() },
            });
            continue;
        }
        if !seen.insert(journal_id.clone()) {
            rejected.push(RowError { line, kind: RowErrorKind::DuplicateId(journal_id) });
            continue;
        }
        let categories = row[cols[2]]
            .split('|')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::to_string)
            .collect();
        records.push(Journal { journal_id, title: row[cols[1]].to_string(), categories });
    }
    Ok(Loaded { records, rejected })
}

/// Writes publications in the canonical comma-separated layout. The
/// `topic_assigned` column is emitted only when some publication needs it.
pub fn write_publications<W: Write>(out: W, publications: &[Publication]) -> csv::Result<()> {
    let with_flag = publications.iter().any(|p| p.topic_assigned);
    let mut w = csv::Writer::from_writer(out);
    if with_flag {
        let mut header = PUBLICATION_COLUMNS.to_vec();
        header.push(TOPIC_ASSIGNED_COLUMN);
        w.write_record(&header)?;
    } else {
        w.write_record(PUBLICATION_COLUMNS)?;
    }
    for p in publications {
        let year = p.pub_year.to_string();
        let cites = p.citations.to_string();
        let mut row = vec![
            p.pub_id.as_str(),
            p.journal_id.as_str(),
            year.as_str(),
            p.doc_type.as_str(),
            cites.as_str(),
            p.topic_id.as_deref().unwrap_or(""),
        ];
        if with_flag {
            row.push(if p.topic_assigned { "1" } else { "0" });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_journals<'a, W: Write>(
    out: W,
    journals: impl IntoIterator<Item = &'a Journal>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(JOURNAL_COLUMNS)?;
    for j in journals {
        let cats = j.categories.join("|");
        w.write_record([j.journal_id.as_str(), j.title.as_str(), cats.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DanglingJournal { pub_id: String, journal_id: String },
    UnknownTopic { pub_id: String, topic_id: String },
    DuplicatePublication { pub_id: String, occurrences: usize },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DanglingJournal { pub_id, journal_id } => {
                write!(f, "publication {pub_id} references unknown journal {journal_id}")
            }
            Finding::UnknownTopic { pub_id, topic_id } => {
                write!(f, "publication {pub_id} references unknown topic {topic_id}")
            }
            Finding::DuplicatePublication { pub_id, occurrences } => {
                write!(f, "publication id {pub_id} occurs {occurrences} times")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.findings.is_empty()
    }
}

pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut findings = Vec::new();
    let mut id_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &corpus.publications {
        *id_counts.entry(&p.pub_id).or_insert(0) += 1;
        if !corpus.journals.contains_key(&p.journal_id) {
            findings.push(Finding::DanglingJournal {
                pub_id: p.pub_id.clone(),
                journal_id: p.journal_id.clone(),
            });
        }
        if let Some(topic) = &p.topic_id {
            if !corpus.topics.contains(topic) {
                findings.push(Finding::UnknownTopic {
                    pub_id: p.pub_id.clone(),
                    topic_id: topic.clone(),
                });
            }
        }
    }
    findings.extend(id_counts.into_iter().filter(|&(_, n)| n > 1).map(|(id, n)| {
        Finding::DuplicatePublication { pub_id: id.to_string(), occurrences: n }
    }));
    findings.sort();
    ValidationReport { findings }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub publications: usize,
    pub classified: usize,
    /// Fraction of publications carrying a topic.
    pub publication_coverage: f64,
    /// Journals with at least one publication.
    pub journals: usize,
    pub journals_over_threshold: usize,
    /// Fraction of journals with more than 90% of their publications classified.
    pub journal_coverage: f64,
}

/// Topic-assignment coverage. Journals without publications are not counted;
/// an empty corpus reports full coverage.
pub fn coverage_stats(corpus: &Corpus) -> CoverageReport {
    let mut per_journal: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut classified = 0;
    for p in &corpus.publications {
        let e = per_journal.entry(&p.journal_id).or_default();
        e.0 += 1;
        if p.is_classified() {
            e.1 += 1;
            classified += 1;
        }
    }
    // strictly more than 90%, in integers
    let over = per_journal.values().filter(|&&(total, cls)| cls * 10 > total * 9).count();
    let fraction = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    CoverageReport {
        publications: corpus.publications.len(),
        classified,
        publication_coverage: fraction(classified, corpus.publications.len()),
        journals: per_journal.len(),
        journals_over_threshold: over,
        journal_coverage: fraction(over, per_journal.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "pub_id,journal_id,pub_year,doc_type,citations,topic_id\n";

    #[test]
    fn parses_direct_field_mapping() {
        let loaded = read_publications(&format!("{HEADER}p1,jA,2018,Article,3,t7\n")).unwrap();
        assert!(loaded.rejected.is_empty());
        assert_eq!(
            loaded.records,
            vec![Publication::new("p1", "jA", 2018, DocumentType::Article, 3, Some("t7"))]
        );
    }

    #[test]
    fn negative_citations_name_the_row() {
        let text = format!("{HEADER}p1,jA,2018,Article,3,t7\np2,jA,2018,Review,-1,t7\n");
        let loaded = read_publications(&text).unwrap();
        assert_eq!(loaded.records.len(), 1);
        assert_eq!(
            loaded.rejected,
            vec![RowError { line: 3, kind: RowErrorKind::NegativeCitations("-1".into()) }]
        );
        let err = loaded.into_result().unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn empty_file_with_header_is_empty() {
        let loaded = read_publications(HEADER).unwrap();
        assert!(loaded.records.is_empty());
        assert!(loaded.rejected.is_empty());
    }

    #[test]
    fn missing_column_is_schema_error() {
        let err = read_publications("pub_id,journal_id,pub_year,doc_type,topic_id\n").unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn(c) if c == "citations"));
    }

    #[test]
    fn duplicate_pub_id_rejected() {
        let text = format!("{HEADER}p1,jA,2018,Article,3,t7\np1,jB,2017,Article,0,\n");
        let loaded = read_publications(&text).unwrap();
        assert_eq!(loaded.records.len(), 1);
        assert_eq!(loaded.rejected[0].kind, RowErrorKind::DuplicateId("p1".into()));
    }

    #[test]
    fn other_document_types_rejected() {
        let text = format!("{HEADER}p1,jA,2018,Editorial,3,t7\n");
        let loaded = read_publications(&text).unwrap();
        assert_eq!(
            loaded.rejected[0].kind,
            RowErrorKind::UnknownDocumentType("Editorial".into())
        );
    }

    #[test]
    fn tab_delimited_with_crlf() {
        let text = "pub_id\tjournal_id\tpub_year\tdoc_type\tcitations\ttopic_id\r\n\
                    p1\tjA\t2017\treview\t12\t\r\n";
        let loaded = read_publications(text).unwrap();
        assert_eq!(
            loaded.records,
            vec![Publication::new("p1", "jA", 2017, DocumentType::Review, 12, None)]
        );
    }

    #[test]
    fn columns_may_be_reordered() {
        let text = "citations,topic_id,pub_id,doc_type,pub_year,journal_id\n5,t1,p9,Article,2016,jZ\n";
        let loaded = read_publications(text).unwrap();
        assert_eq!(
            loaded.records,
            vec![Publication::new("p9", "jZ", 2016, DocumentType::Article, 5, Some("t1"))]
        );
    }

    #[test]
    fn journals_split_categories() {
        let text = "journal_id,title,categories\njA,\"Cell, The\",ONCOLOGY|CELL BIOLOGY\njB,Solo,\n";
        let js = read_journals(text).unwrap().into_result().unwrap();
        assert_eq!(js[0].categories, vec!["ONCOLOGY", "CELL BIOLOGY"]);
        assert_eq!(js[0].title, "Cell, The");
        assert!(js[1].categories.is_empty());
    }

    fn three_pub_corpus() -> Corpus {
        Corpus::new(
            vec![
                Publication::new("p1", "jA", 2017, DocumentType::Article, 3, Some("t1")),
                Publication::new("p2", "jA", 2016, DocumentType::Review, 9, Some("t1")),
                Publication::new("p3", "jB", 2017, DocumentType::Article, 0, None),
            ],
            vec![Journal::new("jA", "A"), Journal::new("jB", "B")],
        )
    }

    #[test]
    fn well_formed_corpus_validates_clean() {
        let c = three_pub_corpus();
        let report = validate_corpus(&c);
        assert!(report.is_accepted(), "{:?}", report.findings);
        assert_eq!(validate_corpus(&c), report);
    }

    #[test]
    fn dangling_journal_reported_once() {
        let mut c = three_pub_corpus();
        c.journals.remove("jB");
        let report = validate_corpus(&c);
        assert_eq!(
            report.findings,
            vec![Finding::DanglingJournal { pub_id: "p3".into(), journal_id: "jB".into() }]
        );
    }

    #[test]
    fn unknown_topic_names_pub_and_topic() {
        let mut c = three_pub_corpus();
        c.publications[2].topic_id = Some("t9".into());
        let report = validate_corpus(&c);
        assert_eq!(
            report.findings,
            vec![Finding::UnknownTopic { pub_id: "p3".into(), topic_id: "t9".into() }]
        );
    }

    #[test]
    fn duplicate_ids_reported() {
        let mut c = three_pub_corpus();
        c.publications[1].pub_id = "p1".into();
        let report = validate_corpus(&c);
        assert_eq!(
            report.findings,
            vec![Finding::DuplicatePublication { pub_id: "p1".into(), occurrences: 2 }]
        );
    }

    #[test]
    fn coverage_all_assigned() {
        let pubs = (0..4)
            .map(|i| Publication::new(format!("p{i}"), "jA", 2017, DocumentType::Article, 1, Some("t")))
            .collect();
        let r = coverage_stats(&Corpus::with_implicit_journals(pubs));
        assert_eq!((r.publication_coverage, r.journal_coverage), (1.0, 1.0));
    }

    #[test]
    fn coverage_ninety_nine_of_hundred() {
        let pubs = (0..100)
            .map(|i| {
                let topic = (i != 0).then_some("t1");
                Publication::new(format!("p{i}"), "jA", 2017, DocumentType::Article, 1, topic)
            })
            .collect();
        let r = coverage_stats(&Corpus::with_implicit_journals(pubs));
        assert_eq!((r.publication_coverage, r.journal_coverage), (0.99, 1.0));
    }

    #[test]
    fn coverage_threshold_is_strict() {
        // exactly 90% classified does not count
        let pubs = (0..10)
            .map(|i| {
                let topic = (i != 0).then_some("t1");
                Publication::new(format!("p{i}"), "jA", 2017, DocumentType::Article, 1, topic)
            })
            .collect();
        let r = coverage_stats(&Corpus::with_implicit_journals(pubs));
        assert_eq!(r.journals_over_threshold, 0);
        assert_eq!(r.journal_coverage, 0.0);
    }

    fn ident() -> impl Strategy<Value = String> {
        "[A-Za-z0-9_.-]{1,8}"
    }

    fn publication() -> impl Strategy<Value = Publication> {
        (
            ident(),
            ident(),
            1990i32..2030,
            any::<bool>(),
            0u64..100_000,
            proptest::option::of(ident()),
            any::<bool>(),
        )
            .prop_map(|(id, j, year, review, cites, topic, assigned)| Publication {
                pub_id: id,
                journal_id: j,
                pub_year: year,
                doc_type: if review { DocumentType::Review } else { DocumentType::Article },
                citations: cites,
                topic_assigned: assigned && topic.is_some(),
                topic_id: topic,
            })
    }

    fn journal() -> impl Strategy<Value = Journal> {
        (ident(), "[ -~]{0,20}", proptest::collection::vec("[A-Z][A-Z ,&]{0,10}[A-Z]", 0..3))
            .prop_map(|(id, title, cats)| Journal { journal_id: id, title, categories: cats })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(
            pubs in proptest::collection::vec(publication(), 0..40),
            journals in proptest::collection::vec(journal(), 0..10),
        ) {
            let mut seen = BTreeSet::new();
            let pubs: Vec<_> = pubs.into_iter().filter(|p| seen.insert(p.pub_id.clone())).collect();
            let corpus = Corpus::new(pubs, journals);

            let mut pub_buf = Vec::new();
            write_publications(&mut pub_buf, &corpus.publications).unwrap();
            let mut j_buf = Vec::new();
            write_journals(&mut j_buf, corpus.journals.values()).unwrap();

            let pubs = read_publications(std::str::from_utf8(&pub_buf).unwrap())
                .unwrap().into_result().unwrap();
            let js = read_journals(std::str::from_utf8(&j_buf).unwrap())
                .unwrap().into_result().unwrap();
            prop_assert_eq!(Corpus::new(pubs, js), corpus);
        }

        #[test]
        fn coverage_matches_recount(pubs in proptest::collection::vec(publication(), 0..60)) {
            let corpus = Corpus::with_implicit_journals(pubs);
            let r = coverage_stats(&corpus);
            let classified = corpus.publications.iter().filter(|p| p.topic_id.is_some()).count();
            prop_assert_eq!(r.classified, classified);
            let mut over = 0;
            let mut journals = 0;
            for j in corpus.journals.keys() {
                let mine: Vec<_> = corpus.journal_publications(j).collect();
                if mine.is_empty() { continue; }
                journals += 1;
                let c = mine.iter().filter(|p| p.is_classified()).count() as f64;
                if c / mine.len() as f64 > 0.9 { over += 1; }
            }
            prop_assert_eq!(r.journals, journals);
            prop_assert_eq!(r.journals_over_threshold, over);
            prop_assert!((0.0..=1.0).contains(&r.publication_coverage));
            prop_assert!((0.0..=1.0).contains(&r.journal_coverage));
        }
    }
}
