//! Command implementations behind the `jrank` binary.
//!
//! Every command reads its inputs from a [`RunConfig`] and writes its results
//! under `RunConfig::out`. Delimited outputs open with `#` comment lines
//! recording the tool version, seed and a hash of the configuration; JSON
//! outputs carry the same data under a `meta` key. Outputs depend only on
//! the inputs, the seed and the configuration, so reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{assign_majority, load_related, AssignmentReport};
use crate::corpus::{
    coverage_stats, load_journals, load_publications, validate_corpus, write_journals,
    write_publications, Corpus, CoverageReport, Loaded,
};
use crate::indicators::{compute_all, JournalIndicator};
use crate::ranking::{correlate, rank, IndicatorKey, RankingTable, Scope, PERCENTILE_FORMULA};
use crate::robustness::{
    bootstrap_many, perturbation_comparison, summarize, BootstrapSamples, RankShift,
    RobustnessReport, DEFAULT_SIMULATIONS,
};
use crate::synth::{self, Profile};

pub const TOOL: &str = "jrank";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 42;
const UNRANKABLE: &str = "unrankable";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" | "delimited" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(anyhow!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pubs: Option<PathBuf>,
    pub journals: Option<PathBuf>,
    pub related: Option<PathBuf>,
    pub indicators: Vec<IndicatorKey>,
    pub category: Option<String>,
    pub sims: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// Preset name or path of a synthetic-corpus profile (`generate`).
    pub profile: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pubs: None,
            journals: None,
            related: None,
            indicators: Vec::new(),
            category: None,
            sims: DEFAULT_SIMULATIONS,
            seed: DEFAULT_SEED,
            out: PathBuf::from("out"),
            formats: Vec::new(),
            profile: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }

    pub fn check(&self) -> Result<()> {
        if self.sims == 0 {
            bail!("--sims must be at least 1");
        }
        for path in [&self.pubs, &self.journals, &self.related].into_iter().flatten() {
            if !path.is_file() {
                bail!("input file {} does not exist or is not readable", path.display());
            }
        }
        Ok(())
    }

    fn keys_or(&self, default: &[IndicatorKey]) -> Vec<IndicatorKey> {
        let mut keys =
            if self.indicators.is_empty() { default.to_vec() } else { self.indicators.clone() };
        keys.sort();
        keys.dedup();
        keys
    }

    fn formats(&self) -> Vec<Format> {
        let mut f = if self.formats.is_empty() { vec![Format::Csv] } else { self.formats.clone() };
        f.sort();
        f.dedup();
        f
    }

    fn scope(&self) -> Scope {
        Scope::from_category(self.category.as_deref())
    }

    /// Hash of the configuration without the output directory.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { out: PathBuf::new(), ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    indicator: Option<IndicatorKey>,
    seed: u64,
    config_hash: String,
    census: &'a str,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    meta: Meta<'a>,
    data: T,
}

struct Writer<'a> {
    cfg: &'a RunConfig,
    command: &'a str,
    census: String,
}

impl<'a> Writer<'a> {
    fn new(cfg: &'a RunConfig, command: &'a str, census: &str) -> Result<Self> {
        fs::create_dir_all(&cfg.out)
            .with_context(|| format!("creating output directory {}", cfg.out.display()))?;
        Ok(Self { cfg, command, census: census.to_string() })
    }

    fn meta(&self, indicator: Option<IndicatorKey>) -> Meta<'_> {
        Meta {
            tool: TOOL,
            version: VERSION,
            command: self.command,
            indicator,
            seed: self.cfg.seed,
            config_hash: self.cfg.hash(),
            census: &self.census,
        }
    }

    fn comment_header(&self, indicator: Option<IndicatorKey>, extra: &[&str]) -> String {
        let mut s = format!(
            "# {TOOL} {VERSION} command={} indicator={} seed={} config={}\n",
            self.command,
            indicator.map_or("all", IndicatorKey::as_str),
            self.cfg.seed,
            self.cfg.hash()
        );
        if !self.census.is_empty() {
            let _ = writeln!(s, "# census: {}", self.census);
        }
        for line in extra {
            let _ = writeln!(s, "# {line}");
        }
        s
    }

    fn write_csv(
        &self,
        name: &str,
        indicator: Option<IndicatorKey>,
        extra: &[&str],
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<PathBuf> {
        let mut buf = self.comment_header(indicator, extra).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        self.put(name, &buf)
    }

    fn write_json<T: Serialize>(&self, name: &str, indicator: Option<IndicatorKey>, data: T) -> Result<PathBuf> {
        let doc = Document { meta: self.meta(indicator), data };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    fn put(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.cfg.out.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNRANKABLE.to_string(), |x| x.to_string())
}

fn fmt_rank(v: Option<usize>) -> String {
    v.map_or_else(|| UNRANKABLE.to_string(), |x| x.to_string())
}

fn report_rows<T>(source: &Path, loaded: Loaded<T>) -> Result<Vec<T>> {
    if loaded.rejected.is_empty() {
        return Ok(loaded.records);
    }
    for e in &loaded.rejected {
        eprintln!("{}: {e}", source.display());
    }
    bail!("{} row(s) rejected in {}", loaded.rejected.len(), source.display())
}

/// Loads and validates the corpus named by the configuration, applying the
/// majority-rule classifier when related records are supplied.
pub fn load_corpus(cfg: &RunConfig) -> Result<(Corpus, Option<AssignmentReport>)> {
    let corpus = load_unclassified(cfg)?;
    match &cfg.related {
        None => Ok((corpus, None)),
        Some(path) => {
            let related = report_rows(path, load_related(path)?)?;
            let (classified, report) = assign_majority(&corpus, &related);
            Ok((classified, Some(report)))
        }
    }
}

fn load_unclassified(cfg: &RunConfig) -> Result<Corpus> {
    cfg.check()?;
    let pubs_path = cfg.pubs.as_deref().ok_or_else(|| anyhow!("--pubs is required"))?;
    let pubs = report_rows(pubs_path, load_publications(pubs_path)?)?;
    let corpus = match &cfg.journals {
        Some(path) => Corpus::new(pubs, report_rows(path, load_journals(path)?)?),
        None => Corpus::with_implicit_journals(pubs),
    };
    let report = validate_corpus(&corpus);
    if !report.is_accepted() {
        for f in &report.findings {
            eprintln!("validation: {f}");
        }
        bail!("corpus rejected with {} finding(s)", report.findings.len());
    }
    Ok(corpus)
}

#[derive(Debug, Serialize)]
pub struct ValidateSummary {
    pub publications: usize,
    pub journals: usize,
    pub topics: usize,
    pub coverage: CoverageReport,
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidateSummary> {
    let corpus = load_unclassified(cfg)?;
    let coverage = coverage_stats(&corpus);
    Ok(ValidateSummary {
        publications: corpus.publications.len(),
        journals: corpus.journals.len(),
        topics: corpus.topics.len(),
        coverage,
    })
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<AssignmentReport> {
    if cfg.related.is_none() {
        bail!("classify needs --related");
    }
    let (corpus, report) = load_corpus(cfg)?;
    let report = report.expect("related records supplied");
    let w = Writer::new(cfg, "classify", &corpus.census_label)?;
    let mut buf = Vec::new();
    write_publications(&mut buf, &corpus.publications)?;
    w.put("publications.classified.csv", &buf)?;
    #[derive(Serialize)]
    struct Classified<'a> {
        assignment: &'a AssignmentReport,
        coverage: CoverageReport,
    }
    w.write_json("assignment.json", None, Classified { assignment: &report, coverage: coverage_stats(&corpus) })?;
    Ok(report)
}

fn ranking_name(key: IndicatorKey, scope: &Scope) -> String {
    match scope {
        Scope::Global => format!("ranking_{key}"),
        Scope::Category(c) => {
            let slug: String = c
                .chars()
                .map(|ch| if ch.is_ascii_alphanumeric() { ch.to_ascii_lowercase() } else { '_' })
                .collect();
            format!("ranking_{key}_{slug}")
        }
    }
}

fn write_ranking(w: &Writer, table: &RankingTable, formats: &[Format]) -> Result<()> {
    let base = ranking_name(table.indicator, &table.scope);
    let scope_line = format!("scope: {}", table.scope);
    for f in formats {
        match f {
            Format::Csv => {
                w.write_csv(
                    &format!("{base}.csv"),
                    Some(table.indicator),
                    &[&scope_line, PERCENTILE_FORMULA],
                    &["rank", "journal_id", "value", "percentile"],
                    table.rows.iter().map(|r| {
                        vec![r.rank.to_string(), r.journal_id.clone(), r.value.to_string(), r.percentile.to_string()]
                    }),
                )?;
            }
            Format::Json => {
                #[derive(Serialize)]
                struct Ranked<'a> {
                    percentile_formula: &'static str,
                    table: &'a RankingTable,
                }
                w.write_json(
                    &format!("{base}.json"),
                    Some(table.indicator),
                    Ranked { percentile_formula: PERCENTILE_FORMULA, table },
                )?;
            }
        }
    }
    Ok(())
}

fn write_indicators(w: &Writer, indicators: &[JournalIndicator], formats: &[Format]) -> Result<()> {
    for f in formats {
        match f {
            Format::Csv => {
                w.write_csv(
                    "indicators.csv",
                    None,
                    &["unrankable marks a journal that cannot be scored on that indicator"],
                    &["journal_id", "n_items", "n_classified", "n_compared", "fncsi", "fnif", "expected_jif", "jif"],
                    indicators.iter().map(|i| {
                        vec![
                            i.journal_id.clone(),
                            i.n_items.to_string(),
                            i.n_pubs.to_string(),
                            i.n_compared.to_string(),
                            fmt_opt(i.fncsi),
                            fmt_opt(i.fnif),
                            fmt_opt(i.expected_jif),
                            fmt_opt(i.jif),
                        ]
                    }),
                )?;
            }
            Format::Json => {
                w.write_json("indicators.json", None, indicators)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct ComputeSummary {
    pub indicators: Vec<JournalIndicator>,
    pub tables: Vec<RankingTable>,
}

pub fn cmd_compute(cfg: &RunConfig) -> Result<ComputeSummary> {
    let (corpus, _) = load_corpus(cfg)?;
    let w = Writer::new(cfg, "compute", &corpus.census_label)?;
    let indicators = compute_all(&corpus);
    let formats = cfg.formats();
    write_indicators(&w, &indicators, &formats)?;
    let mut tables = Vec::new();
    for key in cfg.keys_or(&IndicatorKey::ALL) {
        let table = rank(&indicators, key, &cfg.scope());
        write_ranking(&w, &table, &formats)?;
        tables.push(table);
    }
    Ok(ComputeSummary { indicators, tables })
}

pub fn cmd_rank(cfg: &RunConfig) -> Result<Vec<RankingTable>> {
    let (corpus, _) = load_corpus(cfg)?;
    let w = Writer::new(cfg, "rank", &corpus.census_label)?;
    let indicators = compute_all(&corpus);
    let formats = cfg.formats();
    cfg.keys_or(&[IndicatorKey::Fncsi])
        .into_iter()
        .map(|key| {
            let table = rank(&indicators, key, &cfg.scope());
            write_ranking(&w, &table, &formats)?;
            Ok(table)
        })
        .collect()
}

const ROBUSTNESS_DEFAULT: [IndicatorKey; 2] = [IndicatorKey::Fncsi, IndicatorKey::Fnif];

#[derive(Serialize)]
struct RobustnessDocument<'a> {
    report: &'a RobustnessReport,
    samples: &'a BootstrapSamples,
}

fn run_bootstrap(cfg: &RunConfig, corpus: &Corpus, w: &Writer) -> Result<Vec<RobustnessReport>> {
    let keys = cfg.keys_or(&ROBUSTNESS_DEFAULT);
    let all = bootstrap_many(corpus, &keys, cfg.sims, cfg.seed)?;
    let mut reports = Vec::new();
    for (key, samples) in &all {
        let report = summarize(*key, samples, cfg.seed)?;
        w.write_json(
            &format!("robustness_{key}.json"),
            Some(*key),
            RobustnessDocument { report: &report, samples },
        )?;
        let sentinel = format!(
            "rank {} marks a journal unrankable in a simulation ({} occurrence(s))",
            report.sentinel_rank, report.sentinel_assignments
        );
        let delta = format!("delta = {} over {} simulations", report.delta, report.simulations);
        w.write_csv(
            &format!("quartiles_{key}.csv"),
            Some(*key),
            &[&delta, &sentinel],
            &["journal_id", "min", "q1", "median", "q3", "max"],
            report.per_journal.iter().map(|(id, s)| {
                vec![
                    id.clone(),
                    s.min.to_string(),
                    s.q1.to_string(),
                    s.median.to_string(),
                    s.q3.to_string(),
                    s.max.to_string(),
                ]
            }),
        )?;
        reports.push(report);
    }
    Ok(reports)
}

pub fn cmd_bootstrap(cfg: &RunConfig) -> Result<Vec<RobustnessReport>> {
    let (corpus, _) = load_corpus(cfg)?;
    let w = Writer::new(cfg, "bootstrap", &corpus.census_label)?;
    run_bootstrap(cfg, &corpus, &w)
}

pub fn median_displacement(shifts: &[RankShift]) -> Option<f64> {
    let mut d: Vec<usize> = shifts.iter().filter_map(RankShift::displacement).collect();
    if d.is_empty() {
        return None;
    }
    d.sort_unstable();
    let mid = d.len() / 2;
    Some(if d.len() % 2 == 1 { d[mid] as f64 } else { (d[mid - 1] + d[mid]) as f64 / 2.0 })
}

fn run_flip(cfg: &RunConfig, corpus: &Corpus, w: &Writer) -> Result<Vec<(IndicatorKey, Vec<RankShift>)>> {
    let mut out = Vec::new();
    for key in cfg.keys_or(&ROBUSTNESS_DEFAULT) {
        let shifts = perturbation_comparison(corpus, key);
        w.write_csv(
            &format!("flip_{key}.csv"),
            Some(key),
            &["each journal's most cited paper has its document type toggled"],
            &["journal_id", "original_rank", "perturbed_rank", "displacement"],
            shifts.iter().map(|s| {
                vec![
                    s.journal_id.clone(),
                    fmt_rank(s.original),
                    fmt_rank(s.perturbed),
                    fmt_rank(s.displacement()),
                ]
            }),
        )?;
        out.push((key, shifts));
    }
    Ok(out)
}

pub fn cmd_flip(cfg: &RunConfig) -> Result<Vec<(IndicatorKey, Vec<RankShift>)>> {
    let (corpus, _) = load_corpus(cfg)?;
    let w = Writer::new(cfg, "flip-test", &corpus.census_label)?;
    run_flip(cfg, &corpus, &w)
}

pub fn resolve_profile(name: Option<&str>) -> Result<Profile> {
    let name = name.unwrap_or("realistic");
    if let Some(p) = Profile::preset(name) {
        return Ok(p);
    }
    let path = Path::new(name);
    if !path.is_file() {
        bail!("profile `{name}` is neither a preset (realistic, skewed) nor a readable file");
    }
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).with_context(|| format!("parsing profile {name}"))
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<Corpus> {
    let profile = resolve_profile(cfg.profile.as_deref())?;
    let corpus = synth::generate(&profile, cfg.seed)?;
    let w = Writer::new(cfg, "generate", &corpus.census_label)?;
    let mut pubs = Vec::new();
    write_publications(&mut pubs, &corpus.publications)?;
    w.put("publications.csv", &pubs)?;
    let mut journals = Vec::new();
    write_journals(&mut journals, corpus.journals.values())?;
    w.put("journals.csv", &journals)?;
    Ok(corpus)
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub coverage: CoverageReport,
    pub assignment: Option<AssignmentReport>,
    pub journals: usize,
    pub spearman_fncsi_fnif: Option<f64>,
    pub delta: Vec<(IndicatorKey, f64)>,
    pub median_flip_displacement: Vec<(IndicatorKey, Option<f64>)>,
}

/// Full pipeline: indicators, rankings, bootstrap and flip test, plus a
/// `summary.json` tying them together.
pub fn cmd_report(cfg: &RunConfig) -> Result<RunSummary> {
    let (corpus, assignment) = load_corpus(cfg)?;
    let w = Writer::new(cfg, "report", &corpus.census_label)?;
    let indicators = compute_all(&corpus);
    let formats = cfg.formats();
    write_indicators(&w, &indicators, &formats)?;
    for key in IndicatorKey::ALL {
        write_ranking(&w, &rank(&indicators, key, &cfg.scope()), &formats)?;
    }
    let spearman = correlate(
        &rank(&indicators, IndicatorKey::Fncsi, &Scope::Global),
        &rank(&indicators, IndicatorKey::Fnif, &Scope::Global),
    )
    .ok()
    .map(|c| c.spearman);
    let reports = run_bootstrap(cfg, &corpus, &w)?;
    let flips = run_flip(cfg, &corpus, &w)?;
    let summary = RunSummary {
        coverage: coverage_stats(&corpus),
        assignment,
        journals: indicators.len(),
        spearman_fncsi_fnif: spearman,
        delta: reports.iter().map(|r| (r.indicator, r.delta)).collect(),
        median_flip_displacement: flips.iter().map(|(k, s)| (*k, median_displacement(s))).collect(),
    };
    w.write_json("summary.json", None, &summary)?;
    Ok(summary)
}
