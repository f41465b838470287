//! Transitive word-order patterns and the N1 ratio per language.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::annotation::{AnnotatedDocument, AnnotatedSentence};
use crate::error::{Error, Result};

/// The six orders of subject, object and verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Vso,
    Vos,
    Svo,
    Ovs,
    Sov,
    Osv,
}

impl Pattern {
    pub const ALL: [Pattern; 6] = [
        Pattern::Vso,
        Pattern::Vos,
        Pattern::Svo,
        Pattern::Ovs,
        Pattern::Sov,
        Pattern::Osv,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Vso => "VSO",
            Pattern::Vos => "VOS",
            Pattern::Svo => "SVO",
            Pattern::Ovs => "OVS",
            Pattern::Sov => "SOV",
            Pattern::Osv => "OSV",
        }
    }

    /// Pattern from the linear positions of subject, object and verb.
    /// Positions must be pairwise distinct.
    pub fn from_positions(s: usize, o: usize, v: usize) -> Pattern {
        let mut roles = [(s, 'S'), (o, 'O'), (v, 'V')];
        roles.sort_unstable();
        match [roles[0].1, roles[1].1, roles[2].1] {
            ['V', 'S', 'O'] => Pattern::Vso,
            ['V', 'O', 'S'] => Pattern::Vos,
            ['S', 'V', 'O'] => Pattern::Svo,
            ['O', 'V', 'S'] => Pattern::Ovs,
            ['S', 'O', 'V'] => Pattern::Sov,
            _ => Pattern::Osv,
        }
    }

    /// Role letters in linear order, e.g. `['V', 'S', 'O']`.
    pub fn roles(self) -> [char; 3] {
        let b = self.as_str().as_bytes();
        [b[0] as char, b[1] as char, b[2] as char]
    }

    pub fn class(self) -> OrderClass {
        match self {
            Pattern::Vso | Pattern::Vos => OrderClass::VerbInitial,
            Pattern::Svo | Pattern::Ovs => OrderClass::VerbMedial,
            Pattern::Sov | Pattern::Osv => OrderClass::VerbFinal,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown word order {s:?}")))
    }
}

/// Collapsed verb-position classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderClass {
    VerbInitial,
    VerbMedial,
    VerbFinal,
}

impl OrderClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderClass::VerbInitial => "VI",
            OrderClass::VerbMedial => "VM",
            OrderClass::VerbFinal => "VF",
        }
    }
}

impl fmt::Display for OrderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which deprels and tags count as subject, object and verb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleConfig {
    subject_deprels: BTreeSet<String>,
    object_deprels: BTreeSet<String>,
    verb_upos: BTreeSet<String>,
}

impl RoleConfig {
    pub fn new<I, S>(subject: I, object: I, verb: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let collect = |it: I| it.into_iter().map(Into::into).collect::<BTreeSet<String>>();
        let cfg = RoleConfig {
            subject_deprels: collect(subject),
            object_deprels: collect(object),
            verb_upos: collect(verb),
        };
        let sets = [&cfg.subject_deprels, &cfg.object_deprels, &cfg.verb_upos];
        if sets.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidArgument("role sets must be non-empty".into()));
        }
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if let Some(x) = a.intersection(b).next() {
                    return Err(Error::InvalidArgument(format!(
                        "{x:?} appears in more than one role set"
                    )));
                }
            }
        }
        Ok(cfg)
    }

    pub fn subject_deprels(&self) -> &BTreeSet<String> {
        &self.subject_deprels
    }

    pub fn object_deprels(&self) -> &BTreeSet<String> {
        &self.object_deprels
    }

    pub fn verb_upos(&self) -> &BTreeSet<String> {
        &self.verb_upos
    }
}

impl Default for RoleConfig {
    fn default() -> Self {
        RoleConfig::new(
            vec!["nsubj", "nsubjpass"],
            vec!["obj", "dobj"],
            vec!["VERB"],
        )
        .expect("default role sets are valid")
    }
}

/// The pattern of the first subject, first object and first distinct verb,
/// or `None` when any of the three is missing.
pub fn extract_transitive_pattern(
    sentence: &AnnotatedSentence,
    cfg: &RoleConfig,
) -> Option<Pattern> {
    let first_with_deprel = |set: &BTreeSet<String>| {
        sentence
            .tokens
            .iter()
            .find(|t| t.deprel.as_ref().is_some_and(|d| set.contains(d)))
            .map(|t| t.position)
    };
    let s = first_with_deprel(&cfg.subject_deprels)?;
    let o = first_with_deprel(&cfg.object_deprels)?;
    let v = sentence
        .tokens
        .iter()
        .find(|t| cfg.verb_upos.contains(&t.upos) && t.position != s && t.position != o)?
        .position;
    Some(Pattern::from_positions(s, o, v))
}

const N1_ARGUMENT_UPOS: [&str; 2] = ["NOUN", "PROPN"];
const N1_PREDICATE_UPOS: &str = "VERB";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct N1Counts {
    pub arg_first: usize,
    pub pred_first: usize,
}

impl N1Counts {
    /// `arg_first / pred_first`, undefined without predicate-first verses.
    pub fn ratio(&self) -> Option<f64> {
        (self.pred_first > 0).then(|| self.arg_first as f64 / self.pred_first as f64)
    }
}

/// Whether a sentence starts with an argument (`Some(true)`), a predicate
/// (`Some(false)`), or lacks one of the two.
pub fn n1_orientation(sentence: &AnnotatedSentence) -> Option<bool> {
    let a = sentence
        .tokens
        .iter()
        .position(|t| N1_ARGUMENT_UPOS.contains(&t.upos.as_str()))?;
    let v = sentence
        .tokens
        .iter()
        .position(|t| t.upos == N1_PREDICATE_UPOS)?;
    Some(a < v)
}

pub fn compute_n1(doc: &AnnotatedDocument) -> N1Counts {
    let mut counts = N1Counts::default();
    for orientation in doc.sentences.iter().filter_map(n1_orientation) {
        if orientation {
            counts.arg_first += 1;
        } else {
            counts.pred_first += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordOrderStats {
    pub iso: String,
    /// Indexed by [`Pattern::index`].
    pub counts: [usize; 6],
    pub total: usize,
    /// All zero when `total == 0`.
    pub proportions: [f64; 6],
    pub n1: N1Counts,
}

impl WordOrderStats {
    pub fn from_counts(iso: impl Into<String>, counts: [usize; 6], n1: N1Counts) -> Self {
        let total: usize = counts.iter().sum();
        let proportions = if total == 0 {
            [0.0; 6]
        } else {
            counts.map(|c| c as f64 / total as f64)
        };
        WordOrderStats {
            iso: iso.into(),
            counts,
            total,
            proportions,
            n1,
        }
    }

    pub fn count(&self, p: Pattern) -> usize {
        self.counts[p.index()]
    }

    pub fn proportion(&self, p: Pattern) -> f64 {
        self.proportions[p.index()]
    }

    pub fn n1_ratio(&self) -> Option<f64> {
        self.n1.ratio()
    }

    /// No qualifying transitive verse.
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Most frequent pattern, earliest in [`Pattern::ALL`] on ties.
    pub fn modal_pattern(&self) -> Option<Pattern> {
        if self.is_empty() {
            return None;
        }
        let mut best = Pattern::ALL[0];
        for p in Pattern::ALL {
            if self.count(p) > self.count(best) {
                best = p;
            }
        }
        Some(best)
    }
}

pub fn compute_order_stats(doc: &AnnotatedDocument, cfg: &RoleConfig) -> WordOrderStats {
    let mut counts = [0usize; 6];
    for p in doc
        .sentences
        .iter()
        .filter_map(|s| extract_transitive_pattern(s, cfg))
    {
        counts[p.index()] += 1;
    }
    WordOrderStats::from_counts(doc.iso.clone(), counts, compute_n1(doc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapsedStats {
    pub vi: f64,
    pub vm: f64,
    pub vf: f64,
}

impl CollapsedStats {
    pub fn get(&self, class: OrderClass) -> f64 {
        match class {
            OrderClass::VerbInitial => self.vi,
            OrderClass::VerbMedial => self.vm,
            OrderClass::VerbFinal => self.vf,
        }
    }
}

pub fn collapse(stats: &WordOrderStats) -> Result<CollapsedStats> {
    if stats.is_empty() {
        return Err(Error::Undefined(format!(
            "{} has no transitive verses",
            stats.iso
        )));
    }
    let p = |x: Pattern| stats.proportion(x);
    Ok(CollapsedStats {
        vi: p(Pattern::Vso) + p(Pattern::Vos),
        vm: p(Pattern::Svo) + p(Pattern::Ovs),
        vf: p(Pattern::Sov) + p(Pattern::Osv),
    })
}

/// Largest collapsed proportion; ties resolve VI, then VM, then VF.
pub fn dominant_class(c: &CollapsedStats) -> Result<OrderClass> {
    let total = c.vi + c.vm + c.vf;
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Undefined(
            "all collapsed proportions are zero".into(),
        ));
    }
    let mut best = OrderClass::VerbInitial;
    for class in [OrderClass::VerbMedial, OrderClass::VerbFinal] {
        if c.get(class) > c.get(best) {
            best = class;
        }
    }
    Ok(best)
}
