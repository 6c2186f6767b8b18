use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use jrank::commands::{self, median_displacement, Format, RunConfig};
use jrank::IndicatorKey;

#[derive(Parser)]
#[command(
    name = "jrank",
    version,
    about = "Field-normalized journal indicators, rankings and ranking robustness",
    long_about = "jrank computes FNCSI, FNIF, expected JIF and JIF over a topic-clustered \
publication corpus, ranks journals, and measures ranking robustness by bootstrap \
resampling and by toggling the document type of each journal's most cited paper.

Quick start:
  jrank generate --profile skewed --seed 7 --out data
  jrank compute --pubs data/publications.csv --journals data/journals.csv --out out
  jrank bootstrap --pubs data/publications.csv --sims 100 --seed 42 --out out"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check input files and report topic coverage
    Validate(Flags),
    /// Assign topics to unclassified publications by majority rule
    Classify(Flags),
    /// Compute all indicators and per-indicator rankings
    Compute(Flags),
    /// Rank journals on the selected indicators
    Rank(Flags),
    /// Bootstrap ranking stability and the relative change of ranking
    Bootstrap(Flags),
    /// Compare rankings before and after toggling each journal's most cited paper
    FlipTest(Flags),
    /// Write a seeded synthetic corpus
    Generate(Flags),
    /// Run compute, bootstrap and flip-test and write a summary
    Report(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Config file (TOML) supplying any flag; flags given here win
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pubs: Option<PathBuf>,
    #[arg(long)]
    journals: Option<PathBuf>,
    #[arg(long)]
    related: Option<PathBuf>,
    /// fncsi, fnif, expected-jif or jif; repeatable or comma-separated
    #[arg(long = "indicator", value_delimiter = ',')]
    indicators: Vec<IndicatorKey>,
    /// Restrict rankings to journals listing this category
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    sims: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; repeatable or comma-separated
    #[arg(long = "format", value_delimiter = ',')]
    formats: Vec<Format>,
    /// Synthetic profile: `realistic`, `skewed`, or a TOML file
    #[arg(long)]
    profile: Option<String>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        if self.pubs.is_some() {
            cfg.pubs = self.pubs;
        }
        if self.journals.is_some() {
            cfg.journals = self.journals;
        }
        if self.related.is_some() {
            cfg.related = self.related;
        }
        if !self.indicators.is_empty() {
            cfg.indicators = self.indicators;
        }
        if self.category.is_some() {
            cfg.category = self.category;
        }
        if let Some(sims) = self.sims {
            cfg.sims = sims;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = self.out {
            cfg.out = out;
        }
        if !self.formats.is_empty() {
            cfg.formats = self.formats;
        }
        if self.profile.is_some() {
            cfg.profile = self.profile;
        }
        Ok(cfg)
    }
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "unrankable".into(), |x| format!("{x:.6}"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(f) => {
            let s = commands::cmd_validate(&f.into_config()?)?;
            println!(
                "ok: {} publications, {} journals, {} topics",
                s.publications, s.journals, s.topics
            );
            println!(
                "coverage: {:.4} of publications classified; {:.4} of journals above 90%",
                s.coverage.publication_coverage, s.coverage.journal_coverage
            );
        }
        Command::Classify(f) => {
            let cfg = f.into_config()?;
            let r = commands::cmd_classify(&cfg)?;
            println!(
                "assigned {} unassigned {} ignored-external {} unknown-subjects {} -> {}",
                r.assigned,
                r.unassigned,
                r.ignored_external,
                r.unknown_subjects,
                cfg.out.display()
            );
        }
        Command::Compute(f) => {
            let cfg = f.into_config()?;
            let s = commands::cmd_compute(&cfg)?;
            for t in &s.tables {
                println!("{}: {} ranked of {} journals", t.indicator, t.len(), s.indicators.len());
            }
        }
        Command::Rank(f) => {
            for t in commands::cmd_rank(&f.into_config()?)? {
                println!("# {} ({})", t.indicator, t.scope);
                for r in t.rows.iter().take(20) {
                    println!("{}\t{}\t{:.6}\t{:.2}", r.rank, r.journal_id, r.value, r.percentile);
                }
            }
        }
        Command::Bootstrap(f) => {
            let cfg = f.into_config()?;
            let reports = commands::cmd_bootstrap(&cfg)?;
            let deltas: Vec<String> =
                reports.iter().map(|r| format!("{}={:.6}", r.indicator, r.delta)).collect();
            println!("delta {} (sims={} seed={})", deltas.join(" "), cfg.sims, cfg.seed);
        }
        Command::FlipTest(f) => {
            let results = commands::cmd_flip(&f.into_config()?)?;
            let parts: Vec<String> = results
                .iter()
                .map(|(k, s)| format!("{k}={}", fmt_value(median_displacement(s))))
                .collect();
            println!("median rank displacement {}", parts.join(" "));
        }
        Command::Generate(f) => {
            let cfg = f.into_config()?;
            let c = commands::cmd_generate(&cfg)?;
            println!(
                "wrote {} publications in {} journals to {}",
                c.publications.len(),
                c.journals.len(),
                cfg.out.display()
            );
        }
        Command::Report(f) => {
            let s = commands::cmd_report(&f.into_config()?)?;
            println!("spearman(fncsi, fnif) = {}", fmt_value(s.spearman_fncsi_fnif));
            for (k, d) in &s.delta {
                println!("delta {k} = {d:.6}");
            }
            for (k, m) in &s.median_flip_displacement {
                println!("median flip displacement {k} = {}", fmt_value(*m));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
