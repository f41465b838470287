//! Synthetic parallel corpora with known word order, for end-to-end checks
//! when real parallel bibles cannot be bundled.
//!
//! All languages share one English side made of transitive verses
//! (`S V O .`) and intransitive verses (`S V .`). Each synthetic language
//! has a private lexicon, renders transitive verses in its own order and
//! intransitive verses as `V S` with a per-language probability. A noisy
//! verse has its content words shuffled.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotation::{AnnotatedDocument, AnnotatedSentence, AnnotatedToken};
use crate::error::{Error, Result};
use crate::ingest::RawVerse;
use crate::metrics::{OrderClass, Pattern};
use crate::typology::finish_csv;
use crate::verse::VerseId;

const ENGLISH_NOUNS: [&str; 24] = [
    "king", "servant", "city", "people", "prophet", "house", "bread", "water", "son", "daughter",
    "priest", "temple", "sheep", "shepherd", "field", "stone", "sword", "word", "brother",
    "mother", "boat", "fish", "mountain", "river",
];
const ENGLISH_VERBS: [&str; 12] = [
    "saw", "took", "found", "loved", "called", "sent", "heard", "built", "followed", "blessed",
    "struck", "carried",
];
const SYLLABLES: [&str; 20] = [
    "ka", "lu", "mo", "ri", "te", "sa", "no", "pe", "gi", "du", "ha", "we", "zo", "bi", "fa", "ye",
    "xu", "ro", "ni", "ta",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthOrder {
    Fixed(Pattern),
    /// Each transitive verse picks one of the six orders uniformly.
    Free,
}

impl SynthOrder {
    /// Raw value as a WALS-style export would list it.
    pub fn wals_value(self) -> &'static str {
        match self {
            SynthOrder::Fixed(p) => p.as_str(),
            SynthOrder::Free => "No dominant order",
        }
    }

    pub fn class_label(self) -> &'static str {
        match self {
            SynthOrder::Fixed(p) => p.class().as_str(),
            SynthOrder::Free => "free",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthLanguage {
    pub iso: String,
    pub order: SynthOrder,
    /// Probability that a verse's content words are shuffled.
    pub noise: f64,
    /// Probability that an intransitive verse is rendered verb-first.
    pub verb_initial_intransitive: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub verses: usize,
    /// Share of intransitive verses on the English side.
    pub intransitive_share: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            verses: 200,
            intransitive_share: 0.0,
            seed: 1,
        }
    }
}

/// Ground truth for one generated verse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerseTruth {
    pub id: VerseId,
    /// Order of S, O, V as rendered (after noise); `None` for intransitives.
    pub pattern: Option<Pattern>,
    /// Whether the first noun precedes the verb.
    pub argument_first: bool,
}

#[derive(Debug, Clone)]
pub struct SynthLanguageCorpus {
    pub language: SynthLanguage,
    pub verses: Vec<RawVerse>,
    pub truth: Vec<VerseTruth>,
}

impl SynthLanguageCorpus {
    /// Verse file content in `BBCCCVVV<TAB>text` form.
    pub fn verse_file(&self) -> String {
        let mut out = String::new();
        for v in &self.verses {
            let _ = writeln!(out, "{}\t{}", v.id, v.text);
        }
        out
    }

    pub fn true_counts(&self) -> [usize; 6] {
        let mut counts = [0; 6];
        for p in self.truth.iter().filter_map(|t| t.pattern) {
            counts[p.index()] += 1;
        }
        counts
    }

    /// `(argument-first, predicate-first)` verse counts.
    pub fn true_n1(&self) -> (usize, usize) {
        let arg = self.truth.iter().filter(|t| t.argument_first).count();
        (arg, self.truth.len() - arg)
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub english: AnnotatedDocument,
    pub languages: Vec<SynthLanguageCorpus>,
}

impl SynthCorpus {
    /// WALS-style `iso,order` CSV for the generated languages.
    pub fn wals_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iso", "order"])?;
        for l in &self.languages {
            w.write_record([l.language.iso.as_str(), l.language.order.wals_value()])?;
        }
        finish_csv(w)
    }

    /// Typology config reading [`SynthCorpus::wals_csv`] saved as `wals.csv`.
    pub fn typology_toml() -> &'static str {
        "[wals]\npath = \"wals.csv\"\niso_column = \"iso\"\nvalue_column = \"order\"\n"
    }
}

#[derive(Debug, Clone, Copy)]
struct EnglishVerse {
    subject: usize,
    verb: usize,
    object: Option<usize>,
}

fn english_token(pos: usize, form: &str, upos: &str, head: usize, deprel: &str) -> AnnotatedToken {
    let mut t = AnnotatedToken::unknown(pos, form);
    t.upos = upos.to_string();
    t.head = Some(head);
    t.deprel = Some(deprel.to_string());
    t
}

fn verse_id(k: usize) -> Result<VerseId> {
    VerseId::new(40, (1 + k / 50) as u16, (1 + k % 50) as u16)
}

/// Pseudo-words unique within one language.
fn lexicon(rng: &mut ChaCha8Rng, size: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(size);
    while words.len() < size {
        let n = rng.gen_range(2..=3);
        let w: String = (0..n)
            .map(|_| *SYLLABLES.choose(rng).expect("non-empty"))
            .collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

fn language_seed(base: u64, iso: &str) -> u64 {
    iso.bytes().fold(base ^ 0x9e37_79b9_7f4a_7c15, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn generate(config: &SynthConfig, languages: &[SynthLanguage]) -> Result<SynthCorpus> {
    if config.verses == 0 || config.verses > 50 * 999 {
        return Err(Error::InvalidArgument(format!(
            "verse count {} outside 1..=49950",
            config.verses
        )));
    }
    let probabilities = languages
        .iter()
        .flat_map(|l| [l.noise, l.verb_initial_intransitive])
        .chain([config.intransitive_share]);
    for p in probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "probability {p} outside [0, 1]"
            )));
        }
    }
    let mut seen = HashSet::new();
    for l in languages {
        if l.iso.len() != 3 || !l.iso.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(Error::InvalidArgument(format!(
                "bad language code {:?}",
                l.iso
            )));
        }
        if !seen.insert(l.iso.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate language {}",
                l.iso
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut plan = Vec::with_capacity(config.verses);
    let mut english = AnnotatedDocument::new("eng");
    for k in 0..config.verses {
        let id = verse_id(k)?;
        let subject = rng.gen_range(0..ENGLISH_NOUNS.len());
        let verb = rng.gen_range(0..ENGLISH_VERBS.len());
        let object = (!rng.gen_bool(config.intransitive_share)).then(|| loop {
            let o = rng.gen_range(0..ENGLISH_NOUNS.len());
            if o != subject {
                break o;
            }
        });
        let mut tokens = vec![
            english_token(1, ENGLISH_NOUNS[subject], "NOUN", 2, "nsubj"),
            english_token(2, ENGLISH_VERBS[verb], "VERB", 0, "root"),
        ];
        if let Some(o) = object {
            tokens.push(english_token(3, ENGLISH_NOUNS[o], "NOUN", 2, "obj"));
        }
        tokens.push(english_token(tokens.len() + 1, ".", "PUNCT", 2, "punct"));
        let text = tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        english.sentences.push(AnnotatedSentence {
            id,
            reference: id.reference(),
            tokens,
            eng_text: text.clone(),
            src_text: text,
        });
        plan.push(EnglishVerse {
            subject,
            verb,
            object,
        });
    }

    let corpora = languages
        .iter()
        .map(|lang| {
            let mut rng = ChaCha8Rng::seed_from_u64(language_seed(config.seed, &lang.iso));
            let words = lexicon(&mut rng, ENGLISH_NOUNS.len() + ENGLISH_VERBS.len());
            let (nouns, verbs) = words.split_at(ENGLISH_NOUNS.len());
            let mut verses = Vec::with_capacity(plan.len());
            let mut truth = Vec::with_capacity(plan.len());
            for (k, ev) in plan.iter().enumerate() {
                let id = verse_id(k)?;
                // Role letters in surface order.
                let mut roles: Vec<char> = match ev.object {
                    Some(_) => match lang.order {
                        SynthOrder::Fixed(p) => p.roles().to_vec(),
                        SynthOrder::Free => Pattern::ALL
                            .choose(&mut rng)
                            .expect("non-empty")
                            .roles()
                            .to_vec(),
                    },
                    None if rng.gen_bool(lang.verb_initial_intransitive) => vec!['V', 'S'],
                    None => vec!['S', 'V'],
                };
                if rng.gen_bool(lang.noise) {
                    roles.shuffle(&mut rng);
                }
                let form = |r: char| match r {
                    'S' => nouns[ev.subject].as_str(),
                    'O' => nouns[ev.object.expect("transitive")].as_str(),
                    _ => verbs[ev.verb].as_str(),
                };
                let mut text = roles.iter().map(|&r| form(r)).collect::<Vec<_>>().join(" ");
                text.push_str(" .");
                let at = |r: char| roles.iter().position(|&x| x == r);
                let pattern = ev.object.map(|_| {
                    Pattern::from_positions(
                        at('S').expect("subject"),
                        at('O').expect("object"),
                        at('V').expect("verb"),
                    )
                });
                truth.push(VerseTruth {
                    id,
                    pattern,
                    argument_first: roles[0] != 'V',
                });
                verses.push(RawVerse { id, text });
            }
            Ok(SynthLanguageCorpus {
                language: lang.clone(),
                verses,
                truth,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SynthCorpus {
        english,
        languages: corpora,
    })
}

/// Three fixed-order languages, one per verb position.
pub fn recovery_suite(noise: f64) -> Vec<SynthLanguage> {
    [
        ("qvs", Pattern::Vso),
        ("qsv", Pattern::Svo),
        ("qso", Pattern::Sov),
    ]
    .into_iter()
    .map(|(iso, p)| SynthLanguage {
        iso: iso.to_string(),
        order: SynthOrder::Fixed(p),
        noise,
        verb_initial_intransitive: 0.0,
    })
    .collect()
}

/// `per_class` languages for each of VI, VM, VF and free, with
/// verb-first intransitive rates drawn from class-specific ranges so the
/// N1 ratio separates the classes.
pub fn typology_suite(per_class: usize, noise: f64, seed: u64) -> Vec<SynthLanguage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes: [(char, SynthOrder, SynthOrder, (f64, f64)); 4] = [
        (
            'i',
            SynthOrder::Fixed(Pattern::Vso),
            SynthOrder::Fixed(Pattern::Vos),
            (0.55, 0.85),
        ),
        (
            'm',
            SynthOrder::Fixed(Pattern::Svo),
            SynthOrder::Fixed(Pattern::Ovs),
            (0.25, 0.45),
        ),
        (
            'f',
            SynthOrder::Fixed(Pattern::Sov),
            SynthOrder::Fixed(Pattern::Osv),
            (0.08, 0.2),
        ),
        ('r', SynthOrder::Free, SynthOrder::Free, (0.3, 0.6)),
    ];
    let mut out = Vec::new();
    for (tag, common, rare, (lo, hi)) in classes {
        for n in 0..per_class {
            out.push(SynthLanguage {
                // Private-use range qaa-qtz.
                iso: format!("q{}{}", tag, (b'a' + (n % 26) as u8) as char),
                // Every fifth language uses the rarer order of its class.
                order: if n % 5 == 4 { rare } else { common },
                noise,
                verb_initial_intransitive: rng.gen_range(lo..hi),
            });
        }
    }
    out
}

/// Expected class for a fixed order, `None` for free.
pub fn expected_class(order: SynthOrder) -> Option<OrderClass> {
    match order {
        SynthOrder::Fixed(p) => Some(p.class()),
        SynthOrder::Free => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{emit_conllu, parse_conllu};

    #[test]
    fn noiseless_truth_matches_order() {
        let corpus = generate(&SynthConfig::default(), &recovery_suite(0.0)).unwrap();
        assert_eq!(corpus.english.sentences.len(), 200);
        for lang in &corpus.languages {
            let SynthOrder::Fixed(p) = lang.language.order else {
                unreachable!()
            };
            assert_eq!(lang.true_counts()[p.index()], 200);
            assert!(lang.verses[0].text.ends_with(" ."));
        }
    }

    #[test]
    fn deterministic_and_serializable() {
        let langs = typology_suite(2, 0.1, 3);
        let cfg = SynthConfig {
            verses: 60,
            intransitive_share: 0.5,
            seed: 9,
        };
        let a = generate(&cfg, &langs).unwrap();
        let b = generate(&cfg, &langs).unwrap();
        assert_eq!(a.english, b.english);
        for (x, y) in a.languages.iter().zip(&b.languages) {
            assert_eq!(x.verses, y.verses);
        }
        let text = emit_conllu(&a.english).unwrap();
        assert_eq!(parse_conllu(&text).unwrap(), a.english);
        assert!(a.wals_csv().unwrap().contains("qra,No dominant order"));
    }

    #[test]
    fn suite_codes_are_unique() {
        let langs = typology_suite(10, 0.0, 1);
        let codes: HashSet<&str> = langs.iter().map(|l| l.iso.as_str()).collect();
        assert_eq!(codes.len(), 40);
    }

    #[test]
    fn rejects_bad_config() {
        let mut langs = recovery_suite(0.0);
        langs[0].noise = 1.5;
        assert!(generate(&SynthConfig::default(), &langs).is_err());
        let cfg = SynthConfig {
            verses: 0,
            ..Default::default()
        };
        assert!(generate(&cfg, &recovery_suite(0.0)).is_err());
    }
}
