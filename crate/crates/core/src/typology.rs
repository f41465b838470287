//! Expert word-order classifications harmonized to verb-initial,
//! verb-medial, verb-final or free, and merged across databases.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Harmonized {
    VerbInitial,
    VerbMedial,
    VerbFinal,
    Free,
    Unclassified,
}

impl Harmonized {
    pub fn as_str(self) -> &'static str {
        match self {
            Harmonized::VerbInitial => "VI",
            Harmonized::VerbMedial => "VM",
            Harmonized::VerbFinal => "VF",
            Harmonized::Free => "free",
            Harmonized::Unclassified => "unclassified",
        }
    }

    pub fn is_classified(self) -> bool {
        self != Harmonized::Unclassified
    }
}

impl fmt::Display for Harmonized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Harmonized {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "VI" => Ok(Harmonized::VerbInitial),
            "VM" => Ok(Harmonized::VerbMedial),
            "VF" => Ok(Harmonized::VerbFinal),
            "free" => Ok(Harmonized::Free),
            "unclassified" => Ok(Harmonized::Unclassified),
            _ => Err(Error::InvalidArgument(format!("unknown class {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Source {
    Wals,
    Grambank,
    Autotyp,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Wals => "WALS",
            Source::Grambank => "GRAMBANK",
            Source::Autotyp => "AUTOTYP",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypologyRecord {
    pub iso: String,
    pub source: Source,
    pub raw_value: String,
    pub harmonized: Harmonized,
}

fn exact_order(s: &str) -> Option<Harmonized> {
    match s {
        "VSO" | "VOS" => Some(Harmonized::VerbInitial),
        "SVO" | "OVS" => Some(Harmonized::VerbMedial),
        "SOV" | "OSV" => Some(Harmonized::VerbFinal),
        _ => None,
    }
}

pub fn harmonize_wals(raw: &str) -> Harmonized {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("No dominant order") {
        return Harmonized::Free;
    }
    exact_order(&raw.to_ascii_uppercase()).unwrap_or(Harmonized::Unclassified)
}

/// Autotyp uses `A` for the transitive agent and sometimes gives only the
/// verb position among three slots (`Vxx`, `xVx`, `xxV`).
pub fn harmonize_autotyp(raw: &str) -> Harmonized {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("free") {
        return Harmonized::Free;
    }
    let normalized: String = raw
        .chars()
        .map(|c| if c == 'A' { 'S' } else { c })
        .collect();
    if let Some(class) = exact_order(&normalized) {
        return class;
    }
    let chars: Vec<char> = normalized.chars().collect();
    if chars.len() != 3 || chars.iter().filter(|&&c| c == 'V').count() != 1 {
        return Harmonized::Unclassified;
    }
    match chars.iter().position(|&c| c == 'V') {
        Some(0) => Harmonized::VerbInitial,
        Some(1) => Harmonized::VerbMedial,
        _ => Harmonized::VerbFinal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

impl Ternary {
    /// Accepts `1/0`, `yes/no`, `true/false`, `y/n`; anything else is unknown.
    pub fn parse(s: &str) -> Ternary {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "yes" | "y" | "true" => Ternary::Yes,
            "0" | "no" | "n" | "false" => Ternary::No,
            _ => Ternary::Unknown,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Ternary::Yes => "1",
            Ternary::No => "0",
            Ternary::Unknown => "?",
        }
    }
}

pub fn harmonize_grambank(
    verb_initial: Ternary,
    verb_medial: Ternary,
    verb_final: Ternary,
    free_flag: Ternary,
) -> Harmonized {
    if free_flag == Ternary::Yes {
        return Harmonized::Free;
    }
    let attested: Vec<Harmonized> = [
        (verb_initial, Harmonized::VerbInitial),
        (verb_medial, Harmonized::VerbMedial),
        (verb_final, Harmonized::VerbFinal),
    ]
    .into_iter()
    .filter(|(t, _)| *t == Ternary::Yes)
    .map(|(_, c)| c)
    .collect();
    match attested.as_slice() {
        [only] => *only,
        _ => Harmonized::Unclassified,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergePolicy {
    priority: [Source; 3],
    pub conflict_report: bool,
}

impl MergePolicy {
    pub fn new(priority: [Source; 3], conflict_report: bool) -> Result<Self> {
        let distinct: BTreeSet<Source> = priority.iter().copied().collect();
        if distinct.len() != 3 {
            return Err(Error::InvalidArgument(
                "merge priority must list each source once".into(),
            ));
        }
        Ok(MergePolicy {
            priority,
            conflict_report,
        })
    }

    pub fn priority(&self) -> &[Source; 3] {
        &self.priority
    }
}

impl Default for MergePolicy {
    fn default() -> Self {
        MergePolicy {
            priority: [Source::Wals, Source::Autotyp, Source::Grambank],
            conflict_report: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedClass {
    pub class: Harmonized,
    /// Sources with a classified value, in priority order.
    pub sources: Vec<Source>,
    pub conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub iso: String,
    pub values: Vec<(Source, Harmonized)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeOutcome {
    pub classes: BTreeMap<String, MergedClass>,
    pub conflicts: Vec<Conflict>,
}

/// Per language, the first classified value in priority order wins. Within
/// one source, several disagreeing rows resolve to the smallest class so the
/// result does not depend on record order.
pub fn merge_records(records: &[TypologyRecord], policy: &MergePolicy) -> MergeOutcome {
    let mut by_iso: BTreeMap<&str, BTreeMap<Source, BTreeSet<Harmonized>>> = BTreeMap::new();
    for r in records {
        let per_source = by_iso.entry(r.iso.as_str()).or_default();
        let values = per_source.entry(r.source).or_default();
        if r.harmonized.is_classified() {
            values.insert(r.harmonized);
        }
    }

    let mut outcome = MergeOutcome::default();
    for (iso, per_source) in by_iso {
        let mut values: Vec<(Source, Harmonized)> = Vec::new();
        let mut internal_conflict = false;
        for source in policy.priority {
            if let Some(set) = per_source.get(&source) {
                if let Some(&first) = set.iter().next() {
                    values.push((source, first));
                    internal_conflict |= set.len() > 1;
                }
            }
        }
        let Some(&(_, class)) = values.first() else {
            continue;
        };
        let conflict = internal_conflict || values.iter().any(|(_, c)| *c != class);
        if conflict && policy.conflict_report {
            outcome.conflicts.push(Conflict {
                iso: iso.to_string(),
                values: values.clone(),
            });
        }
        outcome.classes.insert(
            iso.to_string(),
            MergedClass {
                class,
                sources: values.iter().map(|(s, _)| *s).collect(),
                conflict,
            },
        );
    }
    outcome
}

/// Columns of a single-value source (WALS, Autotyp).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueSourceConfig {
    pub path: PathBuf,
    pub iso_column: String,
    pub value_column: String,
    /// The language column holds glottocodes to map through `[glottocodes]`.
    #[serde(default)]
    pub uses_glottocodes: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrambankConfig {
    pub path: PathBuf,
    pub iso_column: String,
    pub verb_initial_column: String,
    pub verb_medial_column: String,
    pub verb_final_column: String,
    pub free_column: String,
    /// Set when the free column is a "fixed order" feature (yes = not free).
    #[serde(default)]
    pub free_inverted: bool,
    #[serde(default)]
    pub uses_glottocodes: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlottocodeMapConfig {
    pub path: PathBuf,
    pub glottocode_column: String,
    pub iso_column: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyConfig {
    priority: Option<[Source; 3]>,
    #[serde(default = "default_true")]
    conflict_report: bool,
}

fn default_true() -> bool {
    true
}

/// Typology inputs described in TOML. Relative paths resolve against the
/// config file's directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypologyConfig {
    pub wals: Option<ValueSourceConfig>,
    pub autotyp: Option<ValueSourceConfig>,
    pub grambank: Option<GrambankConfig>,
    pub glottocodes: Option<GlottocodeMapConfig>,
    policy: Option<PolicyConfig>,
}

impl TypologyConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: TypologyConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        if let Some(w) = cfg.wals.as_mut() {
            resolve(&mut w.path);
        }
        if let Some(a) = cfg.autotyp.as_mut() {
            resolve(&mut a.path);
        }
        if let Some(g) = cfg.grambank.as_mut() {
            resolve(&mut g.path);
        }
        if let Some(m) = cfg.glottocodes.as_mut() {
            resolve(&mut m.path);
        }
        Ok(cfg)
    }

    pub fn policy(&self) -> Result<MergePolicy> {
        match &self.policy {
            None => Ok(MergePolicy::default()),
            Some(p) => MergePolicy::new(
                p.priority.unwrap_or(*MergePolicy::default().priority()),
                p.conflict_report,
            ),
        }
    }

    /// Reads every configured source into harmonized records.
    pub fn load_records(&self) -> Result<Vec<TypologyRecord>> {
        let glotto = match &self.glottocodes {
            Some(m) => Some(read_glottocode_map(m)?),
            None => None,
        };
        let mut records = Vec::new();
        if let Some(w) = &self.wals {
            records.extend(read_value_source(
                w,
                Source::Wals,
                glotto.as_ref(),
                harmonize_wals,
            )?);
        }
        if let Some(a) = &self.autotyp {
            records.extend(read_value_source(
                a,
                Source::Autotyp,
                glotto.as_ref(),
                harmonize_autotyp,
            )?);
        }
        if let Some(g) = &self.grambank {
            records.extend(read_grambank(g, glotto.as_ref())?);
        }
        Ok(records)
    }
}

type Table = (Vec<String>, Vec<Vec<String>>);

fn read_csv(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok((headers, rows))
}

fn column(headers: &[String], name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{}: no column named {name:?}", path.display())))
}

fn cell(row: &[String], idx: usize) -> &str {
    row.get(idx).map_or("", |s| s.trim())
}

fn read_glottocode_map(cfg: &GlottocodeMapConfig) -> Result<HashMap<String, String>> {
    let (headers, rows) = read_csv(&cfg.path)?;
    let g = column(&headers, &cfg.glottocode_column, &cfg.path)?;
    let i = column(&headers, &cfg.iso_column, &cfg.path)?;
    Ok(rows
        .iter()
        .filter(|r| !cell(r, g).is_empty() && !cell(r, i).is_empty())
        .map(|r| (cell(r, g).to_string(), cell(r, i).to_string()))
        .collect())
}

fn language_code(
    raw: &str,
    uses_glottocodes: bool,
    glotto: Option<&HashMap<String, String>>,
) -> Result<Option<String>> {
    if raw.is_empty() {
        return Ok(None);
    }
    if !uses_glottocodes {
        return Ok(Some(raw.to_string()));
    }
    let map = glotto.ok_or_else(|| {
        Error::Config("source uses glottocodes but no [glottocodes] map is configured".into())
    })?;
    Ok(map.get(raw).cloned())
}

fn read_value_source(
    cfg: &ValueSourceConfig,
    source: Source,
    glotto: Option<&HashMap<String, String>>,
    harmonize: fn(&str) -> Harmonized,
) -> Result<Vec<TypologyRecord>> {
    let (headers, rows) = read_csv(&cfg.path)?;
    let iso_col = column(&headers, &cfg.iso_column, &cfg.path)?;
    let val_col = column(&headers, &cfg.value_column, &cfg.path)?;
    let mut out = Vec::new();
    for row in &rows {
        let Some(iso) = language_code(cell(row, iso_col), cfg.uses_glottocodes, glotto)? else {
            continue;
        };
        let raw = cell(row, val_col);
        out.push(TypologyRecord {
            iso,
            source,
            raw_value: raw.to_string(),
            harmonized: harmonize(raw),
        });
    }
    Ok(out)
}

fn read_grambank(
    cfg: &GrambankConfig,
    glotto: Option<&HashMap<String, String>>,
) -> Result<Vec<TypologyRecord>> {
    let (headers, rows) = read_csv(&cfg.path)?;
    let iso_col = column(&headers, &cfg.iso_column, &cfg.path)?;
    let cols = [
        column(&headers, &cfg.verb_initial_column, &cfg.path)?,
        column(&headers, &cfg.verb_medial_column, &cfg.path)?,
        column(&headers, &cfg.verb_final_column, &cfg.path)?,
        column(&headers, &cfg.free_column, &cfg.path)?,
    ];
    let mut out = Vec::new();
    for row in &rows {
        let Some(iso) = language_code(cell(row, iso_col), cfg.uses_glottocodes, glotto)? else {
            continue;
        };
        let [vi, vm, vf, free] = cols.map(|c| Ternary::parse(cell(row, c)));
        let free = match (cfg.free_inverted, free) {
            (true, Ternary::Yes) => Ternary::No,
            (true, Ternary::No) => Ternary::Yes,
            (_, t) => t,
        };
        out.push(TypologyRecord {
            iso,
            source: Source::Grambank,
            raw_value: format!(
                "VI={};VM={};VF={};free={}",
                vi.symbol(),
                vm.symbol(),
                vf.symbol(),
                free.symbol()
            ),
            harmonized: harmonize_grambank(vi, vm, vf, free),
        });
    }
    Ok(out)
}

/// `iso,class,sources,conflict` with `;`-joined sources.
pub fn merged_csv(outcome: &MergeOutcome) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iso", "class", "sources", "conflict"])?;
    for (iso, m) in &outcome.classes {
        let sources: Vec<&str> = m.sources.iter().map(|s| s.as_str()).collect();
        w.write_record([
            iso.as_str(),
            m.class.as_str(),
            &sources.join(";"),
            if m.conflict { "true" } else { "false" },
        ])?;
    }
    finish_csv(w)
}

/// `iso,source,class` rows, one per contributing value of a conflicted language.
pub fn conflicts_csv(outcome: &MergeOutcome) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iso", "source", "class"])?;
    for c in &outcome.conflicts {
        for (source, class) in &c.values {
            w.write_record([c.iso.as_str(), source.as_str(), class.as_str()])?;
        }
    }
    finish_csv(w)
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Data(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
}

/// Reads the `iso,class` columns of a merged typology CSV.
pub fn parse_merged_csv(text: &str) -> Result<BTreeMap<String, Harmonized>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let iso = headers
        .iter()
        .position(|h| h == "iso")
        .ok_or_else(|| Error::format(1, "missing `iso` column"))?;
    let class = headers
        .iter()
        .position(|h| h == "class")
        .ok_or_else(|| Error::format(1, "missing `class` column"))?;
    let mut out = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let c: Harmonized = rec
            .get(class)
            .unwrap_or("")
            .parse()
            .map_err(|e: Error| Error::format(i + 2, e.to_string()))?;
        out.insert(rec.get(iso).unwrap_or("").to_string(), c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Harmonized::*;
    use Ternary::{No, Unknown, Yes};

    #[test]
    fn wals_values() {
        assert_eq!(harmonize_wals("VSO"), VerbInitial);
        assert_eq!(harmonize_wals("VOS"), VerbInitial);
        assert_eq!(harmonize_wals("SVO"), VerbMedial);
        assert_eq!(harmonize_wals("OVS"), VerbMedial);
        assert_eq!(harmonize_wals("SOV"), VerbFinal);
        assert_eq!(harmonize_wals("OSV"), VerbFinal);
        assert_eq!(harmonize_wals("No dominant order"), Free);
        assert_eq!(harmonize_wals("xyz"), Unclassified);
    }

    #[test]
    fn grambank_values() {
        assert_eq!(harmonize_grambank(Yes, No, No, No), VerbInitial);
        assert_eq!(harmonize_grambank(No, No, Yes, Unknown), VerbFinal);
        assert_eq!(harmonize_grambank(Yes, Yes, No, No), Unclassified);
        assert_eq!(
            harmonize_grambank(Unknown, Unknown, Unknown, Unknown),
            Unclassified
        );
        for t in [Yes, No, Unknown] {
            assert_eq!(harmonize_grambank(t, t, t, Yes), Free);
        }
        assert_eq!(Ternary::parse(" 1 "), Yes);
        assert_eq!(Ternary::parse("?"), Unknown);
    }

    #[test]
    fn autotyp_values() {
        assert_eq!(harmonize_autotyp("Vxx"), VerbInitial);
        assert_eq!(harmonize_autotyp("xVx"), VerbMedial);
        assert_eq!(harmonize_autotyp("xxV"), VerbFinal);
        assert_eq!(harmonize_autotyp("AOV"), VerbFinal);
        assert_eq!(harmonize_autotyp("free"), Free);
        assert_eq!(harmonize_autotyp("VV"), Unclassified);
        assert_eq!(harmonize_autotyp("xVV"), Unclassified);
    }

    #[test]
    fn wals_and_autotyp_agree_on_exact_orders() {
        for order in ["VSO", "VOS", "SVO", "OVS", "SOV", "OSV"] {
            let agent = order.replace('S', "A");
            assert_eq!(harmonize_wals(order), harmonize_autotyp(&agent), "{order}");
            assert_eq!(harmonize_wals(order), harmonize_autotyp(order), "{order}");
        }
    }

    fn rec(iso: &str, source: Source, class: Harmonized) -> TypologyRecord {
        TypologyRecord {
            iso: iso.into(),
            source,
            raw_value: class.as_str().into(),
            harmonized: class,
        }
    }

    #[test]
    fn merge_examples() {
        let records = vec![
            rec("aaa", Source::Wals, VerbInitial),
            rec("aaa", Source::Grambank, Free),
            rec("bbb", Source::Autotyp, VerbFinal),
            rec("ccc", Source::Wals, Unclassified),
            rec("ccc", Source::Grambank, Unclassified),
        ];
        let out = merge_records(&records, &MergePolicy::default());
        assert_eq!(out.classes.len(), 2);
        let a = &out.classes["aaa"];
        assert_eq!(a.class, VerbInitial);
        assert!(a.conflict);
        assert_eq!(a.sources, vec![Source::Wals, Source::Grambank]);
        assert_eq!(out.classes["bbb"].class, VerbFinal);
        assert!(!out.classes.contains_key("ccc"));
        assert_eq!(out.conflicts.len(), 1);

        let grambank_first =
            MergePolicy::new([Source::Grambank, Source::Wals, Source::Autotyp], false).unwrap();
        let out = merge_records(&records, &grambank_first);
        assert_eq!(out.classes["aaa"].class, Free);
        assert!(out.conflicts.is_empty());
        assert!(MergePolicy::new([Source::Wals, Source::Wals, Source::Autotyp], true).is_err());
    }

    #[test]
    fn merge_ignores_record_order() {
        let mut records = vec![
            rec("aaa", Source::Wals, VerbFinal),
            rec("aaa", Source::Wals, VerbInitial),
            rec("aaa", Source::Autotyp, VerbMedial),
            rec("bbb", Source::Grambank, Free),
            rec("bbb", Source::Autotyp, Unclassified),
        ];
        let a = merge_records(&records, &MergePolicy::default());
        records.reverse();
        let b = merge_records(&records, &MergePolicy::default());
        assert_eq!(a, b);
        assert!(a.classes.len() <= 2);
    }

    #[test]
    fn loads_csv_sources() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        std::fs::write(p.join("wals.csv"), "iso,order\ngle,VSO\neng,SVO\nxxx,\n").unwrap();
        std::fs::write(
            p.join("autotyp.csv"),
            "glottocode,order\nhind1269,AOV\ntoho1245,Vxx\n",
        )
        .unwrap();
        std::fs::write(
            p.join("map.csv"),
            "glottocode,iso\nhind1269,hin\ntoho1245,ood\n",
        )
        .unwrap();
        std::fs::write(
            p.join("gb.csv"),
            "iso,GB131,GB132,GB133,GB136\ngle,1,0,0,1\nrus,?,?,?,0\n",
        )
        .unwrap();
        let cfg = TypologyConfig::from_toml(
            r#"
            [wals]
            path = "wals.csv"
            iso_column = "iso"
            value_column = "order"
            [autotyp]
            path = "autotyp.csv"
            iso_column = "glottocode"
            value_column = "order"
            uses_glottocodes = true
            [grambank]
            path = "gb.csv"
            iso_column = "iso"
            verb_initial_column = "GB131"
            verb_medial_column = "GB132"
            verb_final_column = "GB133"
            free_column = "GB136"
            free_inverted = true
            [glottocodes]
            path = "map.csv"
            glottocode_column = "glottocode"
            iso_column = "iso"
            "#,
            p,
        )
        .unwrap();
        let records = cfg.load_records().unwrap();
        let out = merge_records(&records, &cfg.policy().unwrap());
        let classes: Vec<(&str, Harmonized)> = out
            .classes
            .iter()
            .map(|(k, v)| (k.as_str(), v.class))
            .collect();
        assert_eq!(
            classes,
            vec![
                ("eng", VerbMedial),
                ("gle", VerbInitial),
                ("hin", VerbFinal),
                ("ood", VerbInitial),
                ("rus", Free),
            ]
        );
        let csv = merged_csv(&out).unwrap();
        assert!(csv.starts_with("iso,class,sources,conflict\neng,VM,WALS,false\n"));
        let parsed = parse_merged_csv(&csv).unwrap();
        assert_eq!(parsed["hin"], VerbFinal);
    }
}
