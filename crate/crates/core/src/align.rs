//! IBM Model 1 / Model 2 word alignment trained by expectation maximization.
//!
//! Source tokens choose English positions: every source position `j` (1-based)
//! is generated by exactly one English position `i` in `0..=l`, where
//! position 0 is the NULL word. The translation table holds `t(f|e)` and the
//! distortion table `q(i|j,l,m)`.
//!
//! Tables are stored as one row per English word, each row sorted by source
//! word id, so every accumulation runs in a fixed order and two trainings
//! over the same corpus produce bit-identical tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ingest::ParallelVerse;

/// Name used for the NULL word in table dumps.
pub const NULL_WORD: &str = "NULL";

/// Default EM iterations for each model.
pub const DEFAULT_ITERATIONS: usize = 5;

#[derive(Debug, Default)]
struct Vocab {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }
}

/// English vocabulary with id 0 reserved for NULL. The NULL slot is not in
/// the index, so a literal English token "NULL" stays distinct.
fn english_vocab() -> Vocab {
    Vocab {
        words: vec![NULL_WORD.to_string()],
        index: HashMap::new(),
    }
}

#[derive(Debug, Clone, Default)]
struct Row {
    src: Vec<u32>,
    val: Vec<f64>,
}

/// Sparse `(e, f) -> value` store over co-occurring pairs.
#[derive(Debug, Clone)]
struct Lexical {
    eng: Arc<Vocab>,
    src: Arc<Vocab>,
    rows: Vec<Row>,
}

impl Lexical {
    fn zeros_like(&self) -> Self {
        Lexical {
            eng: Arc::clone(&self.eng),
            src: Arc::clone(&self.src),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    src: r.src.clone(),
                    val: vec![0.0; r.val.len()],
                })
                .collect(),
        }
    }

    fn slot(&self, e: u32, f: u32) -> Option<usize> {
        self.rows.get(e as usize)?.src.binary_search(&f).ok()
    }

    fn get_ids(&self, e: u32, f: u32) -> f64 {
        self.slot(e, f)
            .map_or(0.0, |s| self.rows[e as usize].val[s])
    }

    fn eng_id(&self, e: Option<&str>) -> Option<u32> {
        match e {
            None => Some(0),
            Some(w) => self.eng.id(w),
        }
    }

    fn get(&self, e: Option<&str>, f: &str) -> f64 {
        match (self.eng_id(e), self.src.id(f)) {
            (Some(e), Some(f)) => self.get_ids(e, f),
            _ => 0.0,
        }
    }

    fn entries(&self) -> impl Iterator<Item = (Option<&str>, &str, f64)> {
        self.rows.iter().enumerate().flat_map(move |(e, row)| {
            let e_word = (e != 0).then(|| self.eng.words[e].as_str());
            row.src
                .iter()
                .zip(&row.val)
                .map(move |(&f, &v)| (e_word, self.src.words[f as usize].as_str(), v))
        })
    }

    fn len(&self) -> usize {
        self.rows.iter().map(|r| r.src.len()).sum()
    }
}

/// Lexical translation probabilities `t(f|e)`, including `e = NULL`.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    lex: Lexical,
}

impl TranslationTable {
    /// `t(f|e)`; `e = None` is NULL. Unseen pairs have probability 0.
    pub fn prob(&self, e: Option<&str>, f: &str) -> f64 {
        self.lex.get(e, f)
    }

    /// Whether `f` occurred in the training corpus.
    pub fn knows_source(&self, f: &str) -> bool {
        self.lex.src.id(f).is_some()
    }

    /// All stored entries as `(e, f, t(f|e))`, NULL as `None`.
    pub fn entries(&self) -> impl Iterator<Item = (Option<&str>, &str, f64)> {
        self.lex.entries()
    }

    pub fn len(&self) -> usize {
        self.lex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest `|Σ_f t(f|e) - 1|` over English words with entries.
    pub fn max_row_deviation(&self) -> f64 {
        self.lex
            .rows
            .iter()
            .filter(|r| !r.val.is_empty())
            .map(|r| (r.val.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `e<TAB>f<TAB>prob` lines sorted by `(e, f)`.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(&str, &str, f64)> = self
            .entries()
            .map(|(e, f, p)| (e.unwrap_or(NULL_WORD), f, p))
            .collect();
        rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out = String::new();
        for (e, f, p) in rows {
            let _ = writeln!(out, "{e}\t{f}\t{p}");
        }
        out
    }
}

/// `(j, l, m)` with `j` 1-based.
pub type DistortionKey = (u32, u32, u32);

/// Position probabilities `q(i|j,l,m)`, one row of length `l + 1` per
/// observed `(j, l, m)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistortionTable {
    rows: BTreeMap<DistortionKey, Vec<f64>>,
}

impl DistortionTable {
    /// `q(i|j,l,m)`, or `None` for an unobserved `(j, l, m)`.
    pub fn prob(&self, i: usize, j: usize, l: usize, m: usize) -> Option<f64> {
        let row = self.rows.get(&(j as u32, l as u32, m as u32))?;
        Some(row.get(i).copied().unwrap_or(0.0))
    }

    pub fn rows(&self) -> impl Iterator<Item = (DistortionKey, &[f64])> {
        self.rows.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn max_row_deviation(&self) -> f64 {
        self.rows
            .values()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `i<TAB>j<TAB>l<TAB>m<TAB>prob` lines sorted by `(i, j, l, m)`.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(usize, u32, u32, u32, f64)> = self
            .rows
            .iter()
            .flat_map(|(&(j, l, m), row)| {
                row.iter().enumerate().map(move |(i, &p)| (i, j, l, m, p))
            })
            .collect();
        rows.sort_by_key(|r| (r.0, r.1, r.2, r.3));
        let mut out = String::new();
        for (i, j, l, m, p) in rows {
            let _ = writeln!(out, "{i}\t{j}\t{l}\t{m}\t{p}");
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct AlignmentModel {
    pub t: TranslationTable,
    pub q: DistortionTable,
    pub iterations_m1: usize,
    pub iterations_m2: usize,
}

/// Unnormalized expected counts from one E-step.
#[derive(Debug, Clone)]
pub struct ExpectedCounts {
    lex: Lexical,
    distortion: BTreeMap<DistortionKey, Vec<f64>>,
}

impl ExpectedCounts {
    /// Expected count of `f` generated by `e` (`None` = NULL).
    pub fn translation(&self, e: Option<&str>, f: &str) -> f64 {
        self.lex.get(e, f)
    }

    pub fn translation_entries(&self) -> impl Iterator<Item = (Option<&str>, &str, f64)> {
        self.lex.entries()
    }

    /// Expected count of position `i` given `(j, l, m)`; zero under Model 1.
    pub fn distortion(&self, i: usize, j: usize, l: usize, m: usize) -> f64 {
        self.distortion
            .get(&(j as u32, l as u32, m as u32))
            .and_then(|r| r.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn distortion_rows(&self) -> impl Iterator<Item = (DistortionKey, &[f64])> {
        self.distortion.iter().map(|(k, v)| (*k, v.as_slice()))
    }
}

#[derive(Debug)]
struct EncodedVerse {
    /// English ids with NULL (0) at index 0.
    eng: Vec<u32>,
    src: Vec<u32>,
    /// `slots[j * eng.len() + i]` = index of `src[j]` in the row of `eng[i]`.
    slots: Vec<u32>,
}

impl EncodedVerse {
    fn l(&self) -> usize {
        self.eng.len() - 1
    }

    fn m(&self) -> usize {
        self.src.len()
    }

    fn key(&self, j: usize) -> DistortionKey {
        ((j + 1) as u32, self.l() as u32, self.m() as u32)
    }
}

/// Interns the corpus and builds the co-occurrence skeleton (all values 0).
fn encode(pairs: &[ParallelVerse]) -> Result<(Lexical, Vec<EncodedVerse>)> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("empty alignment corpus".into()));
    }
    let mut eng = english_vocab();
    let mut src = Vocab::default();
    let mut raw = Vec::with_capacity(pairs.len());
    for pair in pairs {
        if pair.src_tokens.is_empty() || pair.eng.tokens.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "verse {} has an empty side",
                pair.id
            )));
        }
        let mut e_ids = vec![0];
        e_ids.extend(pair.eng.forms().map(|w| eng.intern(w)));
        let f_ids: Vec<u32> = pair.src_tokens.iter().map(|w| src.intern(w)).collect();
        raw.push((e_ids, f_ids));
    }

    let mut cooc: Vec<Vec<u32>> = vec![Vec::new(); eng.words.len()];
    for (e_ids, f_ids) in &raw {
        for &e in e_ids {
            cooc[e as usize].extend_from_slice(f_ids);
        }
    }
    let rows: Vec<Row> = cooc
        .into_iter()
        .map(|mut fs| {
            fs.sort_unstable();
            fs.dedup();
            let n = fs.len();
            Row {
                src: fs,
                val: vec![0.0; n],
            }
        })
        .collect();
    let lex = Lexical {
        eng: Arc::new(eng),
        src: Arc::new(src),
        rows,
    };

    let verses = raw
        .into_iter()
        .map(|(e_ids, f_ids)| {
            let mut slots = Vec::with_capacity(e_ids.len() * f_ids.len());
            for &f in &f_ids {
                for &e in &e_ids {
                    let s = lex.slot(e, f).expect("co-occurring pair has a slot");
                    slots.push(s as u32);
                }
            }
            EncodedVerse {
                eng: e_ids,
                src: f_ids,
                slots,
            }
        })
        .collect();
    Ok((lex, verses))
}

/// Row-wise renormalization; rows whose counts are all zero keep their
/// previous values.
fn normalize_rows(table: &mut Lexical, counts: &Lexical) {
    for (row, crow) in table.rows.iter_mut().zip(&counts.rows) {
        let total: f64 = crow.val.iter().sum();
        if total > 0.0 {
            for (v, c) in row.val.iter_mut().zip(&crow.val) {
                *v = c / total;
            }
        }
    }
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations < 1 {
        return Err(Error::InvalidArgument(
            "EM needs at least one iteration".into(),
        ));
    }
    Ok(())
}

/// Step-wise Model 1 EM over a fixed corpus.
#[derive(Debug)]
pub struct Model1Trainer {
    t: Lexical,
    verses: Vec<EncodedVerse>,
    iterations: usize,
}

impl Model1Trainer {
    /// Uniform initialization over co-occurring pairs:
    /// `t(f|e) = 1 / |{f : f co-occurs with e}|`.
    pub fn new(pairs: &[ParallelVerse]) -> Result<Self> {
        let (mut t, verses) = encode(pairs)?;
        for row in &mut t.rows {
            let u = 1.0 / row.val.len() as f64;
            row.val.iter_mut().for_each(|v| *v = u);
        }
        Ok(Model1Trainer {
            t,
            verses,
            iterations: 0,
        })
    }

    pub fn table(&self) -> TranslationTable {
        TranslationTable {
            lex: self.t.clone(),
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// E-step under the current table.
    pub fn expected_counts(&self) -> ExpectedCounts {
        let mut counts = self.t.zeros_like();
        let mut weights = Vec::new();
        for v in &self.verses {
            let width = v.eng.len();
            for j in 0..v.m() {
                let slots = &v.slots[j * width..(j + 1) * width];
                weights.clear();
                weights.extend(
                    v.eng
                        .iter()
                        .zip(slots)
                        .map(|(&e, &s)| self.t.rows[e as usize].val[s as usize]),
                );
                let z: f64 = weights.iter().sum();
                if z <= 0.0 {
                    continue;
                }
                for ((&e, &s), w) in v.eng.iter().zip(slots).zip(&weights) {
                    counts.rows[e as usize].val[s as usize] += w / z;
                }
            }
        }
        ExpectedCounts {
            lex: counts,
            distortion: BTreeMap::new(),
        }
    }

    /// One E-step plus M-step; returns the counts the M-step used.
    pub fn step(&mut self) -> ExpectedCounts {
        let counts = self.expected_counts();
        normalize_rows(&mut self.t, &counts.lex);
        self.iterations += 1;
        counts
    }

    /// Corpus log-likelihood `Σ_verses Σ_j ln(Σ_i t(f_j|e_i) / (l + 1))`.
    pub fn log_likelihood(&self) -> f64 {
        let mut ll = 0.0;
        for v in &self.verses {
            let width = v.eng.len();
            for j in 0..v.m() {
                let z: f64 = v
                    .eng
                    .iter()
                    .zip(&v.slots[j * width..(j + 1) * width])
                    .map(|(&e, &s)| self.t.rows[e as usize].val[s as usize])
                    .sum();
                ll += (z / width as f64).ln();
            }
        }
        ll
    }
}

pub fn train_model1(pairs: &[ParallelVerse], iterations: usize) -> Result<TranslationTable> {
    check_iterations(iterations)?;
    let mut trainer = Model1Trainer::new(pairs)?;
    for _ in 0..iterations {
        trainer.step();
    }
    Ok(trainer.table())
}

/// Step-wise Model 2 EM over a fixed corpus.
#[derive(Debug)]
pub struct Model2Trainer {
    t: Lexical,
    q: BTreeMap<DistortionKey, Vec<f64>>,
    verses: Vec<EncodedVerse>,
    iterations: usize,
}

impl Model2Trainer {
    /// Copies `t_init` onto the corpus skeleton (missing pairs start at 0)
    /// and sets `q(i|j,l,m) = 1 / (l + 1)` for every observed `(j, l, m)`.
    pub fn new(pairs: &[ParallelVerse], t_init: &TranslationTable) -> Result<Self> {
        let (mut t, verses) = encode(pairs)?;
        for e in 0..t.rows.len() {
            let e_word = (e != 0).then(|| t.eng.words[e].clone());
            let row = &mut t.rows[e];
            for (f, v) in row.src.iter().zip(row.val.iter_mut()) {
                *v = t_init.prob(e_word.as_deref(), &t.src.words[*f as usize]);
            }
        }
        let mut q = BTreeMap::new();
        for v in &verses {
            for j in 0..v.m() {
                q.entry(v.key(j))
                    .or_insert_with(|| vec![1.0 / (v.l() + 1) as f64; v.l() + 1]);
            }
        }
        Ok(Model2Trainer {
            t,
            q,
            verses,
            iterations: 0,
        })
    }

    pub fn tables(&self) -> (TranslationTable, DistortionTable) {
        (
            TranslationTable {
                lex: self.t.clone(),
            },
            DistortionTable {
                rows: self.q.clone(),
            },
        )
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn expected_counts(&self) -> ExpectedCounts {
        let mut counts = self.t.zeros_like();
        let mut dist: BTreeMap<DistortionKey, Vec<f64>> = self
            .q
            .iter()
            .map(|(k, v)| (*k, vec![0.0; v.len()]))
            .collect();
        let mut weights = Vec::new();
        for v in &self.verses {
            let width = v.eng.len();
            for j in 0..v.m() {
                let key = v.key(j);
                let q_row = &self.q[&key];
                let slots = &v.slots[j * width..(j + 1) * width];
                weights.clear();
                weights.extend(
                    v.eng
                        .iter()
                        .zip(slots)
                        .zip(q_row)
                        .map(|((&e, &s), &q)| q * self.t.rows[e as usize].val[s as usize]),
                );
                let z: f64 = weights.iter().sum();
                if z <= 0.0 {
                    continue;
                }
                let d_row = dist.get_mut(&key).expect("key observed at init");
                for (i, ((&e, &s), w)) in v.eng.iter().zip(slots).zip(&weights).enumerate() {
                    let delta = w / z;
                    counts.rows[e as usize].val[s as usize] += delta;
                    d_row[i] += delta;
                }
            }
        }
        ExpectedCounts {
            lex: counts,
            distortion: dist,
        }
    }

    pub fn step(&mut self) -> ExpectedCounts {
        let counts = self.expected_counts();
        normalize_rows(&mut self.t, &counts.lex);
        for (key, row) in self.q.iter_mut() {
            let c = &counts.distortion[key];
            let total: f64 = c.iter().sum();
            if total > 0.0 {
                for (q, c) in row.iter_mut().zip(c) {
                    *q = c / total;
                }
            }
        }
        self.iterations += 1;
        counts
    }

    /// `Σ_verses Σ_j ln Σ_i q(i|j,l,m) t(f_j|e_i)`.
    pub fn log_likelihood(&self) -> f64 {
        let mut ll = 0.0;
        for v in &self.verses {
            let width = v.eng.len();
            for j in 0..v.m() {
                let q_row = &self.q[&v.key(j)];
                let z: f64 = v
                    .eng
                    .iter()
                    .zip(&v.slots[j * width..(j + 1) * width])
                    .zip(q_row)
                    .map(|((&e, &s), &q)| q * self.t.rows[e as usize].val[s as usize])
                    .sum();
                ll += z.ln();
            }
        }
        ll
    }
}

pub fn train_model2(
    pairs: &[ParallelVerse],
    t_init: &TranslationTable,
    iterations: usize,
) -> Result<AlignmentModel> {
    check_iterations(iterations)?;
    let deviation = t_init.max_row_deviation();
    if deviation > 1e-9 {
        return Err(Error::Precondition(format!(
            "initial translation table rows deviate from 1 by {deviation:e}"
        )));
    }
    let mut trainer = Model2Trainer::new(pairs, t_init)?;
    for _ in 0..iterations {
        trainer.step();
    }
    let (t, q) = trainer.tables();
    Ok(AlignmentModel {
        t,
        q,
        iterations_m1: 0,
        iterations_m2: iterations,
    })
}

/// Model 1 followed by Model 2, the full training pipeline.
pub fn train(
    pairs: &[ParallelVerse],
    iterations_m1: usize,
    iterations_m2: usize,
) -> Result<AlignmentModel> {
    let t = train_model1(pairs, iterations_m1)?;
    let mut model = train_model2(pairs, &t, iterations_m2)?;
    model.iterations_m1 = iterations_m1;
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentLink {
    /// 1-based source position.
    pub src_pos: usize,
    /// 1-based English position, 0 for NULL.
    pub eng_pos: usize,
    /// Posterior of the chosen position among all candidates.
    pub score: f64,
    /// Best non-NULL English position, whether or not it was chosen.
    pub candidate: Option<usize>,
}

impl AlignmentLink {
    pub fn is_null(&self) -> bool {
        self.eng_pos == 0
    }
}

pub fn viterbi_align(pair: &ParallelVerse, model: &AlignmentModel) -> Vec<AlignmentLink> {
    viterbi_align_with(pair, model, 0.0)
}

/// Best English position per source token under `q · t`, ties toward the
/// lowest English position. Links whose posterior falls below `min_score`
/// are sent to NULL (their candidate is kept).
pub fn viterbi_align_with(
    pair: &ParallelVerse,
    model: &AlignmentModel,
    min_score: f64,
) -> Vec<AlignmentLink> {
    let l = pair.eng.tokens.len();
    let m = pair.src_tokens.len();
    let eng: Vec<Option<&str>> = std::iter::once(None)
        .chain(pair.eng.forms().map(Some))
        .collect();
    let uniform = 1.0 / (l + 1) as f64;
    let mut weights = vec![0.0; l + 1];

    pair.src_tokens
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            let j = idx + 1;
            let unknown = AlignmentLink {
                src_pos: j,
                eng_pos: 0,
                score: 0.0,
                candidate: None,
            };
            if !model.t.knows_source(f) {
                return unknown;
            }
            for (i, e) in eng.iter().enumerate() {
                let q = model.q.prob(i, j, l, m).unwrap_or(uniform);
                weights[i] = q * model.t.prob(*e, f);
            }
            let z: f64 = weights.iter().sum();
            if z <= 0.0 {
                return unknown;
            }
            let best = argmax(&weights, 0);
            let candidate = Some(argmax(&weights, 1)).filter(|&i| weights[i] > 0.0);
            let score = weights[best] / z;
            if best > 0 && score < min_score {
                AlignmentLink {
                    src_pos: j,
                    eng_pos: 0,
                    score: weights[0] / z,
                    candidate,
                }
            } else {
                AlignmentLink {
                    src_pos: j,
                    eng_pos: best,
                    score,
                    candidate,
                }
            }
        })
        .collect()
}

/// Index of the maximum over `weights[from..]`, first index on ties.
fn argmax(weights: &[f64], from: usize) -> usize {
    let mut best = from;
    for i in from + 1..weights.len() {
        if weights[i] > weights[best] {
            best = i;
        }
    }
    best
}
