//! Batch commands over directories of per-language files.
//!
//! Each command reads its inputs, writes deterministic outputs into an
//! output directory and returns a report the CLI turns into an exit code.
//! Languages are processed independently on a bounded thread pool; a
//! failure in one language is recorded and never stops the others.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Deserialize;

use crate::align::{self, AlignmentModel, DEFAULT_ITERATIONS};
use crate::annotation::AnnotatedDocument;
use crate::conllu::{emit_conllu_with, parse_conllu, EmitOptions};
use crate::error::{Error, Result};
use crate::ingest::{pair_verses, parse_verse_file, ProfileSet, SkipReport};
use crate::metrics::{
    collapse, compute_order_stats, dominant_class, CollapsedStats, OrderClass, Pattern, RoleConfig,
    WordOrderStats,
};
use crate::projection::{project_verse_with, GlossLexicon, GlossSource, ProjectionOptions};
use crate::stats::{group_summary, one_way_anova, AnovaResult, GroupSummary, GroupedSample};
use crate::synth::SynthCorpus;
use crate::typology::{
    conflicts_csv, finish_csv, merge_records, merged_csv, parse_merged_csv, Harmonized,
    MergeOutcome, TypologyConfig,
};

pub const CONLLU_SUFFIX: &str = "-conllu.txt";
pub const MANIFEST_FILE: &str = "project_manifest.csv";
pub const SKIPPED_FILE: &str = "skipped_verses.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const PROPORTIONS_FILE: &str = "order_proportions.csv";
pub const MERGED_FILE: &str = "typology_merged.csv";
pub const CONFLICTS_FILE: &str = "typology_conflicts.csv";
pub const ANALYSIS_FILE: &str = "analysis.csv";
pub const ANOVA_FILE: &str = "anova_report.csv";
pub const SUMMARIES_FILE: &str = "group_summaries.csv";

fn is_iso(s: &str) -> bool {
    s.len() == 3 && s.bytes().all(|b| b.is_ascii_lowercase())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Language codes of files named `<iso><suffix>` in `dir`, sorted.
pub fn discover_languages(dir: &Path, suffix: &str) -> Result<Vec<String>> {
    let mut out = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(iso) = name.strip_suffix(suffix).filter(|s| is_iso(s)) {
            out.insert(iso.to_string());
        }
    }
    Ok(out.into_iter().collect())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}

/// Runs `f`, turning a panic into an error so one language cannot take
/// down the batch.
fn isolated<T>(iso: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| payload.downcast_ref::<&str>().copied())
            .unwrap_or("unknown panic");
        Err(Error::Data(format!("{iso}: internal failure: {msg}")))
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GlossMode {
    /// Corpus-level best translation of each source form.
    #[default]
    Lexicon,
    /// English form of the aligned token.
    Aligned,
}

#[derive(Debug, Clone)]
pub struct ProjectConfig {
    pub corpus_dir: PathBuf,
    pub english_conllu: PathBuf,
    pub out_dir: PathBuf,
    /// Restrict to these languages; `None` processes every `<iso>.txt`.
    pub languages: Option<Vec<String>>,
    pub iterations_m1: usize,
    /// Zero skips Model 2 and aligns with Model 1 alone.
    pub iterations_m2: usize,
    /// Links with a lower posterior are sent to NULL.
    pub min_link_score: f64,
    pub gloss: GlossMode,
    pub nearest_candidate_gloss: bool,
    pub strict_ud: bool,
    pub dump_tables: bool,
    pub jobs: usize,
    pub profiles: ProfileSet,
}

impl ProjectConfig {
    pub fn new(
        corpus_dir: impl Into<PathBuf>,
        english_conllu: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        ProjectConfig {
            corpus_dir: corpus_dir.into(),
            english_conllu: english_conllu.into(),
            out_dir: out_dir.into(),
            languages: None,
            iterations_m1: DEFAULT_ITERATIONS,
            iterations_m2: DEFAULT_ITERATIONS,
            min_link_score: 0.0,
            gloss: GlossMode::default(),
            nearest_candidate_gloss: true,
            strict_ud: false,
            dump_tables: false,
            jobs: 1,
            profiles: ProfileSet::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectedLanguage {
    pub document: AnnotatedDocument,
    pub skipped: SkipReport,
    pub model: AlignmentModel,
}

/// Ingest, align and project one language's verse file.
pub fn project_language(
    iso: &str,
    verse_text: &str,
    english: &AnnotatedDocument,
    cfg: &ProjectConfig,
) -> Result<ProjectedLanguage> {
    let verses = parse_verse_file(verse_text)?;
    let profile = cfg.profiles.profile(iso)?;
    let (pairs, skipped) = pair_verses(&verses, english, &profile);
    if pairs.is_empty() {
        return Err(Error::Data(format!(
            "{iso}: no verses shared with the English side"
        )));
    }
    let model = if cfg.iterations_m2 == 0 {
        AlignmentModel {
            t: align::train_model1(&pairs, cfg.iterations_m1)?,
            q: Default::default(),
            iterations_m1: cfg.iterations_m1,
            iterations_m2: 0,
        }
    } else {
        align::train(&pairs, cfg.iterations_m1, cfg.iterations_m2)?
    };
    let lexicon = match cfg.gloss {
        GlossMode::Lexicon => Some(GlossLexicon::from_table(&model.t)),
        GlossMode::Aligned => None,
    };
    let opts = ProjectionOptions {
        gloss: lexicon
            .as_ref()
            .map_or(GlossSource::Aligned, GlossSource::Lexicon),
        nearest_candidate_gloss: cfg.nearest_candidate_gloss,
    };
    let mut sentences = pairs
        .iter()
        .map(|pair| {
            let links = align::viterbi_align_with(pair, &model, cfg.min_link_score);
            project_verse_with(pair, &links, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    sentences.sort_by_key(|s| s.id);
    let mut document = AnnotatedDocument::new(iso);
    document.sentences = sentences;
    Ok(ProjectedLanguage {
        document,
        skipped,
        model,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LanguageStatus {
    Done {
        sentences: usize,
        source_only: usize,
        english_only: usize,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageOutcome {
    pub iso: String,
    pub status: LanguageStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectReport {
    pub languages: Vec<LanguageOutcome>,
}

impl ProjectReport {
    pub fn failures(&self) -> impl Iterator<Item = &LanguageOutcome> {
        self.languages
            .iter()
            .filter(|l| matches!(l.status, LanguageStatus::Failed(_)))
    }

    pub fn has_failures(&self) -> bool {
        self.failures().next().is_some()
    }
}

fn run_project_language(
    iso: &str,
    english: &AnnotatedDocument,
    cfg: &ProjectConfig,
) -> Result<(usize, SkipReport)> {
    let text = read(&cfg.corpus_dir.join(format!("{iso}.txt")))?;
    let projected = project_language(iso, &text, english, cfg)?;
    let conllu = emit_conllu_with(
        &projected.document,
        EmitOptions {
            strict_ud: cfg.strict_ud,
        },
    )?;
    write(&cfg.out_dir.join(format!("{iso}{CONLLU_SUFFIX}")), &conllu)?;
    if cfg.dump_tables {
        write(
            &cfg.out_dir.join(format!("{iso}-t.tsv")),
            &projected.model.t.to_tsv(),
        )?;
        write(
            &cfg.out_dir.join(format!("{iso}-q.tsv")),
            &projected.model.q.to_tsv(),
        )?;
    }
    Ok((projected.document.sentences.len(), projected.skipped))
}

/// Projects every language in `corpus_dir` and writes `<iso>-conllu.txt`
/// files, a manifest and the list of verses present on one side only.
pub fn cmd_project(cfg: &ProjectConfig) -> Result<ProjectReport> {
    let english = parse_conllu(&read(&cfg.english_conllu)?)?;
    create_dir(&cfg.out_dir)?;
    let languages = match &cfg.languages {
        Some(list) => list.clone(),
        None => discover_languages(&cfg.corpus_dir, ".txt")?,
    };
    if languages.is_empty() {
        warn!("no <iso>.txt files in {}", cfg.corpus_dir.display());
    }
    let pool = thread_pool(cfg.jobs)?;
    let results: Vec<(String, Result<(usize, SkipReport)>)> = pool.install(|| {
        languages
            .par_iter()
            .map(|iso| {
                let r = isolated(iso, || {
                    if !is_iso(iso) {
                        return Err(Error::InvalidArgument(format!("bad language code {iso:?}")));
                    }
                    run_project_language(iso, &english, cfg)
                });
                (iso.clone(), r)
            })
            .collect()
    });

    let mut report = ProjectReport::default();
    let mut skipped = csv::Writer::from_writer(Vec::new());
    skipped.write_record(["iso", "verse", "side"])?;
    for (iso, result) in results {
        let status = match result {
            Ok((sentences, skips)) => {
                for id in &skips.source_only {
                    skipped.write_record([iso.as_str(), &id.to_string(), "source_only"])?;
                }
                for id in &skips.english_only {
                    skipped.write_record([iso.as_str(), &id.to_string(), "english_only"])?;
                }
                info!("{iso}: projected {sentences} verses");
                LanguageStatus::Done {
                    sentences,
                    source_only: skips.source_only.len(),
                    english_only: skips.english_only.len(),
                }
            }
            Err(e) => {
                warn!("{iso}: {e}");
                LanguageStatus::Failed(e.to_string())
            }
        };
        report.languages.push(LanguageOutcome { iso, status });
    }
    write(&cfg.out_dir.join(MANIFEST_FILE), &manifest_csv(&report)?)?;
    write(&cfg.out_dir.join(SKIPPED_FILE), &finish_csv(skipped)?)?;
    Ok(report)
}

fn manifest_csv(report: &ProjectReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "iso",
        "status",
        "sentences",
        "source_only",
        "english_only",
        "message",
    ])?;
    for l in &report.languages {
        match &l.status {
            LanguageStatus::Done {
                sentences,
                source_only,
                english_only,
            } => w.write_record([
                l.iso.as_str(),
                "ok",
                &sentences.to_string(),
                &source_only.to_string(),
                &english_only.to_string(),
                "",
            ])?,
            LanguageStatus::Failed(msg) => {
                w.write_record([l.iso.as_str(), "failed", "", "", "", msg.as_str()])?
            }
        }
    }
    finish_csv(w)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleFile {
    subject: Vec<String>,
    object: Vec<String>,
    verb: Vec<String>,
}

/// Role configuration from TOML with `subject`, `object` and `verb` arrays.
pub fn role_config_from_toml(text: &str) -> Result<RoleConfig> {
    let f: RoleFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    RoleConfig::new(f.subject, f.object, f.verb)
}

/// Order measures of one language.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageMetrics {
    pub stats: WordOrderStats,
    /// `None` when no verse has a full transitive clause.
    pub collapsed: Option<CollapsedStats>,
    pub dominant: Option<OrderClass>,
}

impl LanguageMetrics {
    pub fn from_document(iso: &str, doc: &AnnotatedDocument, roles: &RoleConfig) -> Self {
        let mut stats = compute_order_stats(doc, roles);
        stats.iso = iso.to_string();
        let collapsed = collapse(&stats).ok();
        let dominant = collapsed.as_ref().and_then(|c| dominant_class(c).ok());
        LanguageMetrics {
            stats,
            collapsed,
            dominant,
        }
    }
}

/// One row per language; empty cells where a measure is undefined.
pub fn metrics_csv(rows: &[LanguageMetrics]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["iso".to_string(), "total".to_string()];
    header.extend(Pattern::ALL.iter().map(|p| p.as_str().to_string()));
    header.extend(Pattern::ALL.iter().map(|p| format!("p_{}", p.as_str())));
    header.extend(
        [
            "vi", "vm", "vf", "n1_arg", "n1_pred", "n1_ratio", "dominant",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for m in rows {
        let s = &m.stats;
        let mut rec = vec![s.iso.clone(), s.total.to_string()];
        rec.extend(s.counts.iter().map(|c| c.to_string()));
        rec.extend(s.proportions.iter().map(|p| p.to_string()));
        let class = |c: OrderClass| m.collapsed.as_ref().map(|x| x.get(c));
        rec.push(fmt_opt(class(OrderClass::VerbInitial)));
        rec.push(fmt_opt(class(OrderClass::VerbMedial)));
        rec.push(fmt_opt(class(OrderClass::VerbFinal)));
        rec.push(s.n1.arg_first.to_string());
        rec.push(s.n1.pred_first.to_string());
        rec.push(fmt_opt(s.n1_ratio()));
        rec.push(
            m.dominant
                .map(|d| d.as_str().to_string())
                .unwrap_or_default(),
        );
        w.write_record(&rec)?;
    }
    finish_csv(w)
}

/// Long-format `iso,pattern,count,proportion` rows for six-bar order plots.
pub fn proportions_csv(rows: &[LanguageMetrics]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iso", "pattern", "count", "proportion"])?;
    for m in rows {
        for p in Pattern::ALL {
            w.write_record([
                m.stats.iso.as_str(),
                p.as_str(),
                &m.stats.count(p).to_string(),
                &m.stats.proportion(p).to_string(),
            ])?;
        }
    }
    finish_csv(w)
}

/// The measures of a metrics CSV row that the validation step uses.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub iso: String,
    pub vi: Option<f64>,
    pub vm: Option<f64>,
    pub vf: Option<f64>,
    pub n1_ratio: Option<f64>,
}

impl MetricsRow {
    pub fn measure(&self, name: &str) -> Option<f64> {
        match name {
            "vi" => self.vi,
            "vm" => self.vm,
            "vf" => self.vf,
            "n1_ratio" => self.n1_ratio,
            _ => None,
        }
    }
}

pub const MEASURES: [&str; 4] = ["vi", "vm", "vf", "n1_ratio"];

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format(1, format!("missing `{name}` column")))
    };
    let iso = column("iso")?;
    let cols = [
        column("vi")?,
        column("vm")?,
        column("vf")?,
        column("n1_ratio")?,
    ];
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let value = |c: usize| -> Result<Option<f64>> {
            match rec.get(c).unwrap_or("").trim() {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::format(line, format!("bad number {s:?}"))),
            }
        };
        out.push(MetricsRow {
            iso: rec.get(iso).unwrap_or("").to_string(),
            vi: value(cols[0])?,
            vm: value(cols[1])?,
            vf: value(cols[2])?,
            n1_ratio: value(cols[3])?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct StatsConfig {
    pub conllu_dir: PathBuf,
    pub out_dir: PathBuf,
    pub languages: Option<Vec<String>>,
    pub roles: RoleConfig,
    pub jobs: usize,
}

#[derive(Debug, Clone, Default)]
pub struct StatsReport {
    pub metrics: Vec<LanguageMetrics>,
    /// Requested languages without a CoNLL-U file.
    pub missing: Vec<String>,
    pub failed: Vec<(String, String)>,
}

impl StatsReport {
    pub fn is_partial(&self) -> bool {
        !self.missing.is_empty() || !self.failed.is_empty()
    }
}

/// Reads `<iso>-conllu.txt` files and writes the metrics and plot CSVs.
pub fn cmd_stats(cfg: &StatsConfig) -> Result<StatsReport> {
    create_dir(&cfg.out_dir)?;
    let available = discover_languages(&cfg.conllu_dir, CONLLU_SUFFIX)?;
    let (languages, missing) = match &cfg.languages {
        None => (available, Vec::new()),
        Some(wanted) => {
            let have: BTreeSet<&String> = available.iter().collect();
            let (found, missing): (Vec<String>, Vec<String>) =
                wanted.iter().cloned().partition(|iso| have.contains(iso));
            (found, missing)
        }
    };
    for iso in &missing {
        warn!(
            "{iso}: no {iso}{CONLLU_SUFFIX} in {}",
            cfg.conllu_dir.display()
        );
    }
    let pool = thread_pool(cfg.jobs)?;
    let results: Vec<(String, Result<LanguageMetrics>)> = pool.install(|| {
        languages
            .par_iter()
            .map(|iso| {
                let r = isolated(iso, || {
                    let text = read(&cfg.conllu_dir.join(format!("{iso}{CONLLU_SUFFIX}")))?;
                    let doc = parse_conllu(&text)?;
                    Ok(LanguageMetrics::from_document(iso, &doc, &cfg.roles))
                });
                (iso.clone(), r)
            })
            .collect()
    });
    let mut report = StatsReport {
        missing,
        ..Default::default()
    };
    for (iso, r) in results {
        match r {
            Ok(m) => {
                if m.stats.is_empty() {
                    warn!("{iso}: no verse with subject, object and verb");
                }
                report.metrics.push(m);
            }
            Err(e) => {
                warn!("{iso}: {e}");
                report.failed.push((iso, e.to_string()));
            }
        }
    }
    write(
        &cfg.out_dir.join(METRICS_FILE),
        &metrics_csv(&report.metrics)?,
    )?;
    write(
        &cfg.out_dir.join(PROPORTIONS_FILE),
        &proportions_csv(&report.metrics)?,
    )?;
    Ok(report)
}

/// Merges the configured typology sources and writes the merged table and,
/// if the policy asks for it, the conflicts.
pub fn cmd_typology(config_path: &Path, out_dir: &Path) -> Result<MergeOutcome> {
    let base = config_path.parent().unwrap_or(Path::new("."));
    let cfg = TypologyConfig::from_toml(&read(config_path)?, base)?;
    let policy = cfg.policy()?;
    let outcome = merge_records(&cfg.load_records()?, &policy);
    create_dir(out_dir)?;
    write(&out_dir.join(MERGED_FILE), &merged_csv(&outcome)?)?;
    if policy.conflict_report {
        write(&out_dir.join(CONFLICTS_FILE), &conflicts_csv(&outcome)?)?;
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinedRow {
    pub metrics: MetricsRow,
    pub class: Harmonized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaRow {
    /// Measure name, suffixed with `:fixed` for the run without free languages.
    pub measure: String,
    pub groups: usize,
    pub result: AnovaResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub measure: String,
    pub class: Harmonized,
    pub summary: GroupSummary,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidateReport {
    pub joined: Vec<JoinedRow>,
    pub anova: Vec<AnovaRow>,
    /// Runs that could not be tested, with the reason.
    pub skipped: Vec<(String, String)>,
    pub summaries: Vec<SummaryRow>,
}

impl ValidateReport {
    pub fn anova_for(&self, measure: &str) -> Option<&AnovaResult> {
        self.anova
            .iter()
            .find(|a| a.measure == measure)
            .map(|a| &a.result)
    }
}

/// Inner join of metrics and classified typology, then one-way ANOVA of each
/// measure by class, once over all classes and once over fixed orders only.
pub fn validate_tables(
    metrics: &[MetricsRow],
    typology: &BTreeMap<String, Harmonized>,
) -> Result<ValidateReport> {
    let mut joined: Vec<JoinedRow> = metrics
        .iter()
        .filter_map(|m| {
            let class = *typology.get(&m.iso)?;
            class.is_classified().then(|| JoinedRow {
                metrics: m.clone(),
                class,
            })
        })
        .collect();
    joined.sort_by(|a, b| a.metrics.iso.cmp(&b.metrics.iso));
    let classes: BTreeSet<&str> = joined.iter().map(|j| j.class.as_str()).collect();
    if classes.len() < 2 {
        return Err(Error::Validation(format!(
            "joined table has {} language(s) in {} class(es); at least 2 classes are needed",
            joined.len(),
            classes.len()
        )));
    }

    let mut report = ValidateReport::default();
    for measure in MEASURES {
        for fixed_only in [false, true] {
            let label = if fixed_only {
                format!("{measure}:fixed")
            } else {
                measure.to_string()
            };
            let mut sample = GroupedSample::new();
            for j in &joined {
                if fixed_only && j.class == Harmonized::Free {
                    continue;
                }
                if let Some(v) = j.metrics.measure(measure) {
                    sample.push(j.class.as_str(), v);
                }
            }
            sample.retain_min_size(2);
            if !fixed_only {
                for (class, values) in sample.groups() {
                    report.summaries.push(SummaryRow {
                        measure: measure.to_string(),
                        class: class.parse()?,
                        summary: group_summary(values)?,
                    });
                }
            }
            match one_way_anova(&sample) {
                Ok(result) => report.anova.push(AnovaRow {
                    measure: label,
                    groups: sample.groups().len(),
                    result,
                }),
                Err(e) => {
                    warn!("{label}: {e}");
                    report.skipped.push((label, e.to_string()));
                }
            }
        }
    }
    report.joined = joined;
    Ok(report)
}

pub fn analysis_csv(report: &ValidateReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iso", "class", "vi", "vm", "vf", "n1_ratio"])?;
    for j in &report.joined {
        let m = &j.metrics;
        w.write_record([
            m.iso.as_str(),
            j.class.as_str(),
            &fmt_opt(m.vi),
            &fmt_opt(m.vm),
            &fmt_opt(m.vf),
            &fmt_opt(m.n1_ratio),
        ])?;
    }
    finish_csv(w)
}

pub fn anova_csv(report: &ValidateReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["measure", "k", "N", "F", "df1", "df2", "p"])?;
    for a in &report.anova {
        let r = &a.result;
        w.write_record([
            a.measure.as_str(),
            &a.groups.to_string(),
            &r.n.to_string(),
            &r.f_stat.to_string(),
            &r.df_between.to_string(),
            &r.df_within.to_string(),
            &r.p_value.to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn summaries_csv(report: &ValidateReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "measure", "class", "n", "min", "q1", "median", "q3", "max", "mean",
    ])?;
    for s in &report.summaries {
        let g = &s.summary;
        w.write_record([
            s.measure.as_str(),
            s.class.as_str(),
            &g.n.to_string(),
            &g.min.to_string(),
            &g.q1.to_string(),
            &g.median.to_string(),
            &g.q3.to_string(),
            &g.max.to_string(),
            &g.mean.to_string(),
        ])?;
    }
    finish_csv(w)
}

/// Minimal SVG box plot, one box per class, whiskers at min and max.
pub fn box_plot_svg(measure: &str, groups: &[(&str, &GroupSummary)]) -> String {
    const W: f64 = 90.0;
    const H: f64 = 240.0;
    const PAD: f64 = 30.0;
    let lo = groups
        .iter()
        .map(|(_, g)| g.min)
        .fold(f64::INFINITY, f64::min);
    let hi = groups
        .iter()
        .map(|(_, g)| g.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let y = |v: f64| PAD + (hi - v) / span * H;
    let width = PAD * 2.0 + W * groups.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{}" font-family="sans-serif" font-size="11">"#,
        H + PAD * 3.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="16">{measure} by class ({lo:.3} to {hi:.3})</text>"#
    );
    for (k, (label, g)) in groups.iter().enumerate() {
        let x = PAD + W * k as f64;
        let mid = x + W / 2.0;
        let _ = writeln!(
            s,
            r#"<line x1="{mid}" y1="{:.2}" x2="{mid}" y2="{:.2}" stroke="black"/>"#,
            y(g.max),
            y(g.min)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="lightgray" stroke="black"/>"#,
            x + 15.0,
            y(g.q3),
            W - 30.0,
            y(g.q1) - y(g.q3)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            x + 15.0,
            y(g.median),
            x + W - 15.0,
            y(g.median)
        );
        let _ = writeln!(
            s,
            r#"<text x="{mid}" y="{:.2}" text-anchor="middle">{label} (n={})</text>"#,
            H + PAD * 2.5,
            g.n
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub metrics_csv: PathBuf,
    pub typology_csv: PathBuf,
    pub out_dir: PathBuf,
    pub plots: bool,
}

pub fn cmd_validate(cfg: &ValidateConfig) -> Result<ValidateReport> {
    let metrics = parse_metrics_csv(&read(&cfg.metrics_csv)?)?;
    let typology = parse_merged_csv(&read(&cfg.typology_csv)?)?;
    let report = validate_tables(&metrics, &typology)?;
    create_dir(&cfg.out_dir)?;
    write(&cfg.out_dir.join(ANALYSIS_FILE), &analysis_csv(&report)?)?;
    write(&cfg.out_dir.join(ANOVA_FILE), &anova_csv(&report)?)?;
    write(&cfg.out_dir.join(SUMMARIES_FILE), &summaries_csv(&report)?)?;
    if cfg.plots {
        for measure in MEASURES {
            let groups: Vec<(&str, &GroupSummary)> = report
                .summaries
                .iter()
                .filter(|s| s.measure == measure)
                .map(|s| (s.class.as_str(), &s.summary))
                .collect();
            if !groups.is_empty() {
                let path = cfg.out_dir.join(format!("boxplot_{measure}.svg"));
                write(&path, &box_plot_svg(measure, &groups))?;
            }
        }
    }
    Ok(report)
}

/// Writes a generated corpus: `corpus/<iso>.txt`, `eng.conllu`, `wals.csv`,
/// `typology.toml` and per-language ground truth in `truth.csv`.
pub fn write_synth(corpus: &SynthCorpus, out_dir: &Path) -> Result<()> {
    let corpus_dir = out_dir.join("corpus");
    create_dir(&corpus_dir)?;
    for lang in &corpus.languages {
        write(
            &corpus_dir.join(format!("{}.txt", lang.language.iso)),
            &lang.verse_file(),
        )?;
    }
    write(
        &out_dir.join("eng.conllu"),
        &crate::conllu::emit_conllu(&corpus.english)?,
    )?;
    write(&out_dir.join("wals.csv"), &corpus.wals_csv()?)?;
    write(&out_dir.join("typology.toml"), SynthCorpus::typology_toml())?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["iso", "order", "class"];
    header.extend(Pattern::ALL.iter().map(|p| p.as_str()));
    header.extend(["n1_arg", "n1_pred"]);
    w.write_record(&header)?;
    for lang in &corpus.languages {
        let (arg, pred) = lang.true_n1();
        let mut rec = vec![
            lang.language.iso.clone(),
            lang.language.order.wals_value().to_string(),
            lang.language.order.class_label().to_string(),
        ];
        rec.extend(lang.true_counts().iter().map(|c| c.to_string()));
        rec.extend([arg.to_string(), pred.to_string()]);
        w.write_record(&rec)?;
    }
    write(&out_dir.join("truth.csv"), &finish_csv(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(iso: &str, n1: f64) -> MetricsRow {
        MetricsRow {
            iso: iso.into(),
            vi: Some(0.5),
            vm: Some(0.25),
            vf: Some(0.25),
            n1_ratio: Some(n1),
        }
    }

    #[test]
    fn validate_requires_two_classes() {
        let metrics = vec![row("aaa", 1.0), row("bbb", 2.0)];
        let mut typ = BTreeMap::new();
        typ.insert("aaa".to_string(), Harmonized::VerbInitial);
        typ.insert("bbb".to_string(), Harmonized::VerbInitial);
        assert!(matches!(
            validate_tables(&metrics, &typ),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            validate_tables(&metrics, &BTreeMap::new()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn validate_runs_both_class_sets() {
        let metrics: Vec<MetricsRow> = [
            ("aaa", 1.0),
            ("aab", 2.0),
            ("baa", 5.0),
            ("bab", 6.0),
            ("caa", 3.0),
            ("cab", 3.5),
        ]
        .iter()
        .map(|&(iso, n)| row(iso, n))
        .collect();
        let typ: BTreeMap<String, Harmonized> = [
            ("aaa", Harmonized::VerbInitial),
            ("aab", Harmonized::VerbInitial),
            ("baa", Harmonized::VerbFinal),
            ("bab", Harmonized::VerbFinal),
            ("caa", Harmonized::Free),
            ("cab", Harmonized::Free),
        ]
        .iter()
        .map(|&(i, c)| (i.to_string(), c))
        .collect();
        let report = validate_tables(&metrics, &typ).unwrap();
        assert_eq!(report.anova_for("n1_ratio").unwrap().df_between, 2);
        assert_eq!(report.anova_for("n1_ratio:fixed").unwrap().df_between, 1);
        // Constant vi within and across groups cannot be tested.
        assert!(report.skipped.iter().any(|(m, _)| m == "vi"));
        let csv = anova_csv(&report).unwrap();
        assert!(csv.starts_with("measure,k,N,F,df1,df2,p\n"));
    }

    #[test]
    fn metrics_csv_round_trips_measures() {
        use crate::metrics::N1Counts;
        let stats = WordOrderStats::from_counts(
            "abc",
            [2, 0, 1, 0, 1, 0],
            N1Counts {
                arg_first: 3,
                pred_first: 1,
            },
        );
        let empty = WordOrderStats::from_counts("xyz", [0; 6], N1Counts::default());
        let rows: Vec<LanguageMetrics> = [stats, empty]
            .into_iter()
            .map(|s| {
                let collapsed = collapse(&s).ok();
                let dominant = collapsed.as_ref().and_then(|c| dominant_class(c).ok());
                LanguageMetrics {
                    stats: s,
                    collapsed,
                    dominant,
                }
            })
            .collect();
        let text = metrics_csv(&rows).unwrap();
        let parsed = parse_metrics_csv(&text).unwrap();
        assert_eq!(parsed[0].vi, Some(0.5));
        assert_eq!(parsed[0].n1_ratio, Some(3.0));
        assert_eq!(parsed[1].vi, None);
        assert!(text
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("xyz,0,0,0,0,0,0,0,0,0,0,0,0,0,,,,0,0,,"));
    }

    #[test]
    fn role_config_toml() {
        let cfg = role_config_from_toml(
            "subject = [\"nsubj\"]\nobject = [\"obj\"]\nverb = [\"VERB\", \"AUX\"]\n",
        )
        .unwrap();
        assert!(cfg.verb_upos().contains("AUX"));
        assert!(
            role_config_from_toml("subject = []\nobject = [\"obj\"]\nverb = [\"VERB\"]").is_err()
        );
    }

    #[test]
    fn svg_has_one_box_per_group() {
        let g = group_summary(&[1.0, 2.0, 3.0]).unwrap();
        let svg = box_plot_svg("n1_ratio", &[("VI", &g), ("VF", &g)]);
        assert_eq!(svg.matches("<rect").count(), 2);
    }
}
