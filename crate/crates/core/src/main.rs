use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info, warn};

use versetag::ingest::ProfileSet;
use versetag::metrics::{Pattern, RoleConfig};
use versetag::pipeline::{self, GlossMode, ProjectConfig, StatsConfig, ValidateConfig};
use versetag::synth::{self, SynthConfig, SynthLanguage, SynthOrder};
use versetag::{Error, Result};

/// Project English annotations onto parallel verse corpora and measure
/// word-order typology.
#[derive(Parser)]
#[command(name = "versetag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align and project every `<iso>.txt` in a corpus directory.
    Project(ProjectArgs),
    /// Compute word-order measures from `<iso>-conllu.txt` files.
    Stats(StatsArgs),
    /// Harmonize and merge typology databases.
    Typology {
        /// TOML file describing the typology sources.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Join metrics with typology classes and run one-way ANOVAs.
    Validate {
        #[arg(long)]
        metrics: PathBuf,
        /// Merged typology CSV with `iso` and `class` columns.
        #[arg(long)]
        typology: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write SVG box plots.
        #[arg(long)]
        plots: bool,
    },
    /// Generate a synthetic corpus with known word orders.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GlossArg {
    Lexicon,
    Aligned,
}

#[derive(clap::Args)]
struct ProjectArgs {
    #[arg(long)]
    corpus_dir: PathBuf,
    /// English CoNLL-U parse of the same verses.
    #[arg(long)]
    english: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Only these languages (repeatable).
    #[arg(long = "lang")]
    languages: Vec<String>,
    #[arg(long, default_value_t = versetag::align::DEFAULT_ITERATIONS)]
    iterations_m1: usize,
    /// 0 aligns with Model 1 only.
    #[arg(long, default_value_t = versetag::align::DEFAULT_ITERATIONS)]
    iterations_m2: usize,
    /// Links with a lower posterior become unaligned.
    #[arg(long, default_value_t = 0.0)]
    min_link_score: f64,
    #[arg(long, value_enum, default_value_t = GlossArg::Lexicon)]
    gloss: GlossArg,
    /// Leave unaligned tokens without a gloss.
    #[arg(long)]
    no_candidate_gloss: bool,
    /// Write `X` for unknown UPOS and `dep` for missing relations.
    #[arg(long)]
    strict_ud: bool,
    /// Also write `<iso>-t.tsv` and `<iso>-q.tsv`.
    #[arg(long)]
    dump_tables: bool,
    /// Per-language tokenizer profiles (TOML).
    #[arg(long)]
    tokenizer: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(clap::Args)]
struct StatsArgs {
    #[arg(long)]
    conllu_dir: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long = "lang")]
    languages: Vec<String>,
    /// Role definitions (TOML with `subject`, `object`, `verb` arrays).
    #[arg(long)]
    roles: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// VSO, SVO and SOV languages.
    Recovery,
    /// Ten languages per class (VI, VM, VF, free) with separated N1 ratios.
    Typology,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Suite::Recovery)]
    suite: Suite,
    /// Explicit languages as `iso:ORDER` or `iso:free`, replacing the suite.
    #[arg(long = "lang")]
    languages: Vec<String>,
    #[arg(long, default_value_t = 200)]
    verses: usize,
    /// Probability that a verse's word order is shuffled.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Share of intransitive verses; defaults to 0.5 for the typology suite.
    #[arg(long)]
    intransitive: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn languages(list: Vec<String>) -> Option<Vec<String>> {
    (!list.is_empty()).then_some(list)
}

fn project(args: ProjectArgs) -> Result<ExitCode> {
    let mut cfg = ProjectConfig::new(args.corpus_dir, args.english, args.out_dir);
    cfg.languages = languages(args.languages);
    cfg.iterations_m1 = args.iterations_m1;
    cfg.iterations_m2 = args.iterations_m2;
    cfg.min_link_score = args.min_link_score;
    cfg.gloss = match args.gloss {
        GlossArg::Lexicon => GlossMode::Lexicon,
        GlossArg::Aligned => GlossMode::Aligned,
    };
    cfg.nearest_candidate_gloss = !args.no_candidate_gloss;
    cfg.strict_ud = args.strict_ud;
    cfg.dump_tables = args.dump_tables;
    cfg.jobs = args.jobs;
    if let Some(path) = &args.tokenizer {
        cfg.profiles = ProfileSet::from_toml(&read(path)?)?;
    }
    let report = pipeline::cmd_project(&cfg)?;
    let failed = report.failures().count();
    info!("{} language(s), {failed} failed", report.languages.len());
    Ok(if failed > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn stats(args: StatsArgs) -> Result<ExitCode> {
    let roles = match &args.roles {
        Some(path) => pipeline::role_config_from_toml(&read(path)?)?,
        None => RoleConfig::default(),
    };
    let cfg = StatsConfig {
        conllu_dir: args.conllu_dir,
        out_dir: args.out_dir,
        languages: languages(args.languages),
        roles,
        jobs: args.jobs,
    };
    let report = pipeline::cmd_stats(&cfg)?;
    Ok(if report.is_partial() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn parse_language(spec: &str, noise: f64) -> Result<SynthLanguage> {
    let (iso, order) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("expected iso:ORDER, got {spec:?}")))?;
    let order = if order.eq_ignore_ascii_case("free") {
        SynthOrder::Free
    } else {
        SynthOrder::Fixed(order.parse::<Pattern>()?)
    };
    Ok(SynthLanguage {
        iso: iso.to_string(),
        order,
        noise,
        verb_initial_intransitive: 0.5,
    })
}

fn synth(args: SynthArgs) -> Result<ExitCode> {
    let langs = if args.languages.is_empty() {
        match args.suite {
            Suite::Recovery => synth::recovery_suite(args.noise),
            Suite::Typology => synth::typology_suite(10, args.noise, args.seed),
        }
    } else {
        args.languages
            .iter()
            .map(|s| parse_language(s, args.noise))
            .collect::<Result<_>>()?
    };
    let default_share = match args.suite {
        Suite::Typology if args.languages.is_empty() => 0.5,
        _ => 0.0,
    };
    let cfg = SynthConfig {
        verses: args.verses,
        intransitive_share: args.intransitive.unwrap_or(default_share),
        seed: args.seed,
    };
    let corpus = synth::generate(&cfg, &langs)?;
    pipeline::write_synth(&corpus, &args.out_dir)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Project(args) => project(args),
        Command::Stats(args) => stats(args),
        Command::Typology { config, out_dir } => {
            let outcome = pipeline::cmd_typology(&config, &out_dir)?;
            if !outcome.conflicts.is_empty() {
                warn!(
                    "{} language(s) with conflicting sources",
                    outcome.conflicts.len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            metrics,
            typology,
            out_dir,
            plots,
        } => {
            let report = pipeline::cmd_validate(&ValidateConfig {
                metrics_csv: metrics,
                typology_csv: typology,
                out_dir,
                plots,
            })?;
            for a in &report.anova {
                info!(
                    "{}: F = {}, p = {}",
                    a.measure, a.result.f_stat, a.result.p_value
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth(args) => synth(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
