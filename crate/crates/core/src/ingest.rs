//! Verse-file reading, tokenization and source/English verse pairing.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Deserialize;

use crate::annotation::{AnnotatedDocument, AnnotatedSentence};
use crate::error::{Error, Result};
use crate::verse::VerseId;

/// Punctuation split off by every profile.
pub const DEFAULT_SEPARATORS: [char; 9] = ['.', ',', ';', ':', '?', '!', '"', '(', ')'];

const APOSTROPHES: [char; 2] = ['\'', '\u{2019}'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVerse {
    pub id: VerseId,
    pub text: String,
}

/// Parses `BBCCCVVV<TAB>text` lines. Blank lines and `#` comment lines
/// (corpus headers) are skipped.
pub fn parse_verse_file(content: &str) -> Result<Vec<RawVerse>> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut seen = HashSet::new();
    let mut verses = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(line_no, "expected `<id>\\t<text>`"))?;
        let id: VerseId = id
            .parse()
            .map_err(|e: Error| Error::format(line_no, e.to_string()))?;
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::format(line_no, format!("verse {id} has no text")));
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateVerse {
                line: line_no,
                id: id.to_string(),
            });
        }
        verses.push(RawVerse {
            id,
            text: text.to_string(),
        });
    }
    Ok(verses)
}

/// Per-language tokenization settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerProfile {
    iso: String,
    pub extra_separators: BTreeSet<char>,
    /// When false, apostrophes are split off like other separators.
    pub keep_apostrophes: bool,
}

impl TokenizerProfile {
    pub fn new(iso: impl Into<String>) -> Result<Self> {
        let iso = iso.into();
        if iso.len() != 3 || !iso.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(Error::InvalidArgument(format!(
                "language code must match [a-z]{{3}}, got {iso:?}"
            )));
        }
        Ok(TokenizerProfile {
            iso,
            extra_separators: BTreeSet::new(),
            keep_apostrophes: true,
        })
    }

    pub fn iso(&self) -> &str {
        &self.iso
    }

    fn is_separator(&self, c: char) -> bool {
        DEFAULT_SEPARATORS.contains(&c)
            || self.extra_separators.contains(&c)
            || (!self.keep_apostrophes && APOSTROPHES.contains(&c))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    #[serde(default)]
    extra_separators: Vec<String>,
    #[serde(default = "default_true")]
    keep_apostrophes: bool,
}

fn default_true() -> bool {
    true
}

/// Tokenizer profiles keyed by language code, loaded from TOML tables:
///
/// ```toml
/// [fra]
/// extra_separators = ["-"]
/// keep_apostrophes = false
/// ```
#[derive(Debug, Clone, Default)]
pub struct ProfileSet {
    profiles: HashMap<String, TokenizerProfile>,
}

impl ProfileSet {
    pub fn from_toml(text: &str) -> Result<Self> {
        let entries: HashMap<String, ProfileEntry> =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut profiles = HashMap::new();
        for (iso, entry) in entries {
            let mut profile = TokenizerProfile::new(iso.clone())?;
            profile.keep_apostrophes = entry.keep_apostrophes;
            for sep in entry.extra_separators {
                let mut chars = sep.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if !c.is_whitespace() => {
                        profile.extra_separators.insert(c);
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "{iso}: separator {sep:?} must be a single non-space character"
                        )))
                    }
                }
            }
            profiles.insert(iso, profile);
        }
        Ok(ProfileSet { profiles })
    }

    /// Profile for `iso`, or the default profile when none is configured.
    pub fn profile(&self, iso: &str) -> Result<TokenizerProfile> {
        match self.profiles.get(iso) {
            Some(p) => Ok(p.clone()),
            None => TokenizerProfile::new(iso),
        }
    }
}

/// Splits on whitespace, then splits each separator character off into its
/// own token.
pub fn tokenize(text: &str, profile: &TokenizerProfile) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut start = 0;
        for (i, c) in chunk.char_indices() {
            if profile.is_separator(c) {
                if start < i {
                    tokens.push(chunk[start..i].to_string());
                }
                let end = i + c.len_utf8();
                tokens.push(chunk[i..end].to_string());
                start = end;
            }
        }
        if start < chunk.len() {
            tokens.push(chunk[start..].to_string());
        }
    }
    tokens
}

/// A source verse paired with its annotated English counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelVerse {
    pub id: VerseId,
    pub src_text: String,
    pub src_tokens: Vec<String>,
    pub eng: AnnotatedSentence,
}

impl ParallelVerse {
    pub fn new(
        id: VerseId,
        src_text: impl Into<String>,
        src_tokens: Vec<String>,
        eng: AnnotatedSentence,
    ) -> Result<Self> {
        if src_tokens.is_empty() || eng.tokens.is_empty() {
            return Err(Error::Data(format!("verse {id} has an empty side")));
        }
        if eng.id != id {
            return Err(Error::Data(format!(
                "verse {id} paired with English sentence {}",
                eng.id
            )));
        }
        Ok(ParallelVerse {
            id,
            src_text: src_text.into(),
            src_tokens,
            eng,
        })
    }
}

/// Verse ids that were present on only one side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipReport {
    pub source_only: Vec<VerseId>,
    pub english_only: Vec<VerseId>,
}

impl SkipReport {
    pub fn total(&self) -> usize {
        self.source_only.len() + self.english_only.len()
    }
}

/// Pairs source verses with English sentences by id, keeping source order.
pub fn pair_verses(
    src: &[RawVerse],
    eng_doc: &AnnotatedDocument,
    profile: &TokenizerProfile,
) -> (Vec<ParallelVerse>, SkipReport) {
    let eng_by_id: HashMap<VerseId, &AnnotatedSentence> =
        eng_doc.sentences.iter().map(|s| (s.id, s)).collect();
    let mut report = SkipReport::default();
    let mut matched = HashSet::new();
    let mut pairs = Vec::new();
    for verse in src {
        let Some(eng) = eng_by_id.get(&verse.id) else {
            report.source_only.push(verse.id);
            continue;
        };
        let tokens = tokenize(&verse.text, profile);
        match ParallelVerse::new(verse.id, verse.text.clone(), tokens, (*eng).clone()) {
            Ok(pair) => {
                matched.insert(verse.id);
                pairs.push(pair);
            }
            Err(_) => report.source_only.push(verse.id),
        }
    }
    let src_ids: HashSet<VerseId> = src.iter().map(|v| v.id).collect();
    report.english_only = eng_doc
        .sentences
        .iter()
        .map(|s| s.id)
        .filter(|id| !matched.contains(id) && !src_ids.contains(id))
        .collect();
    (pairs, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::AnnotatedToken;
    use proptest::prelude::*;

    fn gle() -> TokenizerProfile {
        TokenizerProfile::new("gle").unwrap()
    }

    fn eng_sentence(id: VerseId) -> AnnotatedSentence {
        AnnotatedSentence {
            id,
            reference: id.reference(),
            tokens: vec![AnnotatedToken::unknown(1, "word")],
            eng_text: "word".into(),
            src_text: "word".into(),
        }
    }

    fn eng_doc(ids: &[VerseId]) -> AnnotatedDocument {
        AnnotatedDocument {
            iso: "eng".into(),
            sentences: ids.iter().map(|&id| eng_sentence(id)).collect(),
        }
    }

    fn raw(ids: &[VerseId]) -> Vec<RawVerse> {
        ids.iter()
            .map(|&id| RawVerse {
                id,
                text: "focal".into(),
            })
            .collect()
    }

    fn vid(n: u16) -> VerseId {
        VerseId::new(40, 8, n).unwrap()
    }

    #[test]
    fn irish_verse_line() {
        let verses =
            parse_verse_file("40008001\tTháinig sé anuas ón sliabh agus lean sluaite móra é .")
                .unwrap();
        assert_eq!(verses.len(), 1);
        assert_eq!(verses[0].id.to_string(), "40008001");
    }

    #[test]
    fn empty_file() {
        assert!(parse_verse_file("").unwrap().is_empty());
    }

    #[test]
    fn seven_digit_id() {
        assert!(matches!(
            parse_verse_file("4000801\tx"),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_id() {
        let text = "# header\n40008001\ta\n\n40008001\tb\n";
        assert!(matches!(
            parse_verse_file(text),
            Err(Error::DuplicateVerse { line: 4, .. })
        ));
    }

    #[test]
    fn empty_text_rejected() {
        assert!(parse_verse_file("40008001\t   ").is_err());
        assert!(parse_verse_file("40008001 no tab").is_err());
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("lean sluaite móra é .", &gle()),
            ["lean", "sluaite", "móra", "é", "."]
        );
        assert_eq!(tokenize("abc", &gle()), ["abc"]);
        let mut p = gle();
        p.extra_separators.insert(',');
        assert_eq!(tokenize("a,b", &p), ["a", ",", "b"]);
        assert!(tokenize("   ", &gle()).is_empty());
    }

    #[test]
    fn tokenize_apostrophes() {
        assert_eq!(tokenize("l'homme (x)", &gle()), ["l'homme", "(", "x", ")"]);
        let mut p = gle();
        p.keep_apostrophes = false;
        assert_eq!(tokenize("l'homme", &p), ["l", "'", "homme"]);
    }

    #[test]
    fn profiles_from_toml() {
        let set =
            ProfileSet::from_toml("[fra]\nextra_separators = [\"-\"]\nkeep_apostrophes = false\n")
                .unwrap();
        let fra = set.profile("fra").unwrap();
        assert_eq!(tokenize("va-t'en", &fra), ["va", "-", "t", "'", "en"]);
        assert!(set.profile("deu").unwrap().keep_apostrophes);
        assert!(ProfileSet::from_toml("[fra]\nextra_separators = [\"ab\"]\n").is_err());
        assert!(TokenizerProfile::new("FR").is_err());
    }

    #[test]
    fn pairing_intersection() {
        let (pairs, report) = pair_verses(&raw(&[vid(1), vid(2)]), &eng_doc(&[vid(1)]), &gle());
        assert_eq!(pairs.len(), 1);
        assert_eq!(report.source_only, vec![vid(2)]);

        let (pairs, report) = pair_verses(&raw(&[vid(1)]), &eng_doc(&[vid(2)]), &gle());
        assert!(pairs.is_empty());
        assert_eq!(report.total(), 2);

        let ids = [vid(3), vid(1), vid(2)];
        let mut sorted = ids;
        sorted.sort();
        let (pairs, report) = pair_verses(&raw(&ids), &eng_doc(&sorted), &gle());
        assert_eq!(pairs.iter().map(|p| p.id).collect::<Vec<_>>(), ids);
        assert_eq!(report.total(), 0);
    }

    proptest! {
        #[test]
        fn tokens_are_substrings_and_stable(text in "[a-zé.,;:?!\"() ]{0,40}") {
            let p = gle();
            let tokens = tokenize(&text, &p);
            for t in &tokens {
                prop_assert!(!t.is_empty());
                prop_assert!(text.contains(t.as_str()));
            }
            let again = tokenize(&tokens.join(" "), &p);
            prop_assert_eq!(again, tokens);
        }

        #[test]
        fn pairing_is_set_intersection(
            src in proptest::collection::btree_set(1u16..60, 0..30),
            eng in proptest::collection::btree_set(1u16..60, 0..30),
        ) {
            let src_ids: Vec<VerseId> = src.iter().map(|&n| vid(n)).collect();
            let eng_ids: Vec<VerseId> = eng.iter().map(|&n| vid(n)).collect();
            let (pairs, report) = pair_verses(&raw(&src_ids), &eng_doc(&eng_ids), &gle());
            let got: Vec<u16> = pairs.iter().map(|p| p.id.verse()).collect();
            let want: Vec<u16> = src.intersection(&eng).copied().collect();
            prop_assert_eq!(got, want);
            prop_assert_eq!(report.total(), src.symmetric_difference(&eng).count());
        }
    }
}
