//! Annotated sentences and documents shared by projection and CoNLL-U I/O.

use crate::error::{Error, Result};
use crate::verse::VerseId;

/// UPOS value used for tokens that received no annotation.
pub const UNK: &str = "unk";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub key: String,
    pub value: String,
}

impl Feature {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Self {
        Feature {
            key: key.into(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    /// 1-based position in the sentence.
    pub position: usize,
    pub form: String,
    /// Universal POS tag, or [`UNK`].
    pub upos: String,
    /// `None` when the head is unknown, `Some(0)` for the root.
    pub head: Option<usize>,
    /// `None` is written as `_`.
    pub deprel: Option<String>,
    pub feats: Vec<Feature>,
    pub gloss: Option<String>,
    /// MISC entries other than `gloss=`, kept verbatim.
    pub misc: Vec<String>,
}

impl AnnotatedToken {
    /// A token with no annotation at all.
    pub fn unknown(position: usize, form: impl Into<String>) -> Self {
        AnnotatedToken {
            position,
            form: form.into(),
            upos: UNK.to_string(),
            head: None,
            deprel: None,
            feats: Vec::new(),
            gloss: None,
            misc: Vec::new(),
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.upos == UNK
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub id: VerseId,
    /// Human-readable reference, e.g. `Matthew 8:1`.
    pub reference: String,
    pub tokens: Vec<AnnotatedToken>,
    pub eng_text: String,
    pub src_text: String,
}

impl AnnotatedSentence {
    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.form.as_str())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at a 1-based position.
    pub fn token(&self, position: usize) -> Option<&AnnotatedToken> {
        position.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Checks the structural invariants every serializable sentence obeys.
    pub fn validate(&self) -> Result<()> {
        let id = self.id;
        if self.tokens.is_empty() {
            return Err(Error::Data(format!("sentence {id} has no tokens")));
        }
        for text in [&self.reference, &self.eng_text, &self.src_text] {
            if text.contains(['\n', '\r']) {
                return Err(Error::Data(format!(
                    "sentence {id}: metadata contains a line break"
                )));
            }
        }
        let n = self.tokens.len();
        for (i, tok) in self.tokens.iter().enumerate() {
            let pos = tok.position;
            if pos != i + 1 {
                return Err(Error::Data(format!(
                    "sentence {id}: token {} has position {pos}",
                    i + 1
                )));
            }
            check_field(id, pos, "FORM", &tok.form)?;
            check_field(id, pos, "UPOS", &tok.upos)?;
            if let Some(head) = tok.head {
                if head > n || head == pos {
                    return Err(Error::Data(format!(
                        "sentence {id}: token {pos} has invalid head {head}"
                    )));
                }
            }
            if let Some(deprel) = &tok.deprel {
                check_field(id, pos, "DEPREL", deprel)?;
            }
            if tok.is_unknown() && tok.deprel.is_some() {
                return Err(Error::Data(format!(
                    "sentence {id}: token {pos} is `unk` but carries a deprel"
                )));
            }
            for feat in &tok.feats {
                if feat.key.is_empty()
                    || feat.value.is_empty()
                    || feat.key.contains(['=', '|'])
                    || feat.value.contains('|')
                {
                    return Err(Error::Data(format!(
                        "sentence {id}: token {pos} has malformed feature {}={}",
                        feat.key, feat.value
                    )));
                }
                check_field(id, pos, "FEATS", &feat.key)?;
                check_field(id, pos, "FEATS", &feat.value)?;
            }
            if let Some(gloss) = &tok.gloss {
                check_field(id, pos, "gloss", gloss)?;
                if gloss.contains('|') {
                    return Err(Error::Data(format!(
                        "sentence {id}: token {pos} gloss contains `|`"
                    )));
                }
            }
            for entry in &tok.misc {
                check_field(id, pos, "MISC", entry)?;
                if entry.contains('|') || entry.starts_with("gloss=") {
                    return Err(Error::Data(format!(
                        "sentence {id}: token {pos} has malformed MISC entry {entry:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Column values must be non-empty, tab/newline free, and not the bare
/// underscore placeholder.
fn check_field(id: VerseId, pos: usize, column: &str, value: &str) -> Result<()> {
    if value.is_empty() || value == "_" || value.contains(['\t', '\n', '\r']) {
        return Err(Error::Data(format!(
            "sentence {id}: token {pos} has unserializable {column} {value:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedDocument {
    /// Language code of the source side.
    pub iso: String,
    pub sentences: Vec<AnnotatedSentence>,
}

impl AnnotatedDocument {
    pub fn new(iso: impl Into<String>) -> Self {
        AnnotatedDocument {
            iso: iso.into(),
            sentences: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iso.is_empty() || !self.iso.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return Err(Error::Data(format!("invalid language code {:?}", self.iso)));
        }
        for pair in self.sentences.windows(2) {
            if pair[0].id >= pair[1].id {
                return Err(Error::Data(format!(
                    "sentence ids not strictly increasing: {} then {}",
                    pair[0].id, pair[1].id
                )));
            }
        }
        self.sentences
            .iter()
            .try_for_each(AnnotatedSentence::validate)
    }

    /// Binary search by verse id; relies on the increasing-id invariant.
    pub fn get(&self, id: VerseId) -> Option<&AnnotatedSentence> {
        self.sentences
            .binary_search_by_key(&id, |s| s.id)
            .ok()
            .map(|i| &self.sentences[i])
    }
}
