//! Copies English annotations onto aligned source tokens.

use std::collections::HashMap;

use crate::align::{AlignmentLink, TranslationTable};
use crate::annotation::{AnnotatedSentence, AnnotatedToken};
use crate::error::{Error, Result};
use crate::ingest::ParallelVerse;

/// Corpus-level source-word glosses: for each source word, the English word
/// with the highest `t(f|e)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GlossLexicon {
    glosses: HashMap<String, String>,
}

impl GlossLexicon {
    pub fn from_table(t: &TranslationTable) -> Self {
        let mut best: HashMap<&str, (&str, f64)> = HashMap::new();
        for (e, f, p) in t.entries() {
            let Some(e) = e else { continue };
            if !has_word_char(f) || p <= 0.0 {
                continue;
            }
            best.entry(f)
                .and_modify(|cur| {
                    if p > cur.1 || (p == cur.1 && e < cur.0) {
                        *cur = (e, p);
                    }
                })
                .or_insert((e, p));
        }
        GlossLexicon {
            glosses: best
                .into_iter()
                .map(|(f, (e, _))| (f.to_string(), e.to_string()))
                .collect(),
        }
    }

    pub fn get(&self, form: &str) -> Option<&str> {
        self.glosses.get(form).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.glosses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glosses.is_empty()
    }
}

impl<S: Into<String>, T: Into<String>> FromIterator<(S, T)> for GlossLexicon {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        GlossLexicon {
            glosses: iter
                .into_iter()
                .map(|(f, e)| (f.into(), e.into()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum GlossSource<'a> {
    /// Gloss with the English form the token aligned to.
    Aligned,
    /// Gloss from a corpus-level lexicon, falling back to the aligned form.
    Lexicon(&'a GlossLexicon),
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectionOptions<'a> {
    pub gloss: GlossSource<'a>,
    /// Gloss NULL-aligned tokens with their best non-NULL candidate.
    pub nearest_candidate_gloss: bool,
}

impl Default for ProjectionOptions<'_> {
    fn default() -> Self {
        ProjectionOptions {
            gloss: GlossSource::Aligned,
            nearest_candidate_gloss: true,
        }
    }
}

/// Tokens made only of punctuation or symbols never receive a gloss.
fn has_word_char(form: &str) -> bool {
    form.chars().any(char::is_alphanumeric)
}

/// Links indexed by source position; checks full, in-range coverage.
fn index_links(links: &[AlignmentLink], m: usize, l: usize) -> Result<Vec<&AlignmentLink>> {
    let mut by_pos: Vec<Option<&AlignmentLink>> = vec![None; m];
    for link in links {
        if link.src_pos == 0 || link.src_pos > m {
            return Err(Error::Precondition(format!(
                "link source position {} outside 1..={m}",
                link.src_pos
            )));
        }
        if link.eng_pos > l || link.candidate.is_some_and(|c| c == 0 || c > l) {
            return Err(Error::Precondition(format!(
                "link English position {} outside 0..={l}",
                link.eng_pos
            )));
        }
        if by_pos[link.src_pos - 1].replace(link).is_some() {
            return Err(Error::Precondition(format!(
                "source position {} linked twice",
                link.src_pos
            )));
        }
    }
    by_pos
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| Error::Precondition(format!("source position {} unlinked", i + 1)))
        })
        .collect()
}

pub fn project_verse(pair: &ParallelVerse, links: &[AlignmentLink]) -> Result<AnnotatedSentence> {
    project_verse_with(pair, links, ProjectionOptions::default())
}

pub fn project_verse_with(
    pair: &ParallelVerse,
    links: &[AlignmentLink],
    opts: ProjectionOptions<'_>,
) -> Result<AnnotatedSentence> {
    let eng = &pair.eng;
    let by_pos = index_links(links, pair.src_tokens.len(), eng.tokens.len())?;

    let mut tokens = Vec::with_capacity(pair.src_tokens.len());
    for (idx, form) in pair.src_tokens.iter().enumerate() {
        let position = idx + 1;
        let link = by_pos[idx];
        let mut tok = AnnotatedToken::unknown(position, form.clone());

        let source_eng = if link.is_null() {
            None
        } else {
            eng.token(link.eng_pos)
        };
        if let Some(src) = source_eng {
            tok.upos = src.upos.clone();
            tok.feats = src.feats.clone();
            if !tok.is_unknown() {
                tok.deprel = src.deprel.clone();
                tok.head = Some(project_head(position, links, eng)?);
            }
        }

        if has_word_char(form) {
            let aligned_gloss = if link.is_null() {
                link.candidate
                    .filter(|_| opts.nearest_candidate_gloss)
                    .and_then(|c| eng.token(c))
            } else {
                source_eng
            }
            .map(|t| t.form.as_str());
            tok.gloss = match opts.gloss {
                GlossSource::Lexicon(lex) => lex.get(form).or(aligned_gloss),
                GlossSource::Aligned => aligned_gloss,
            }
            .map(str::to_string);
        }
        tokens.push(tok);
    }

    Ok(AnnotatedSentence {
        id: pair.id,
        reference: eng.reference.clone(),
        tokens,
        eng_text: eng.eng_text.clone(),
        src_text: pair.src_text.clone(),
    })
}

/// Head of source token `j`: the source token aligned to the nearest
/// English ancestor of `j`'s English token that has any aligned source token
/// (the lowest such source position), or 0 when the chain reaches the root.
pub fn project_head(j: usize, links: &[AlignmentLink], eng: &AnnotatedSentence) -> Result<usize> {
    let n = eng.tokens.len();
    let link = links
        .iter()
        .find(|l| l.src_pos == j)
        .filter(|l| !l.is_null())
        .ok_or_else(|| Error::Precondition(format!("source token {j} is not aligned")))?;
    let eng_head = |pos: usize| -> Result<Option<usize>> {
        let tok = eng
            .token(pos)
            .ok_or_else(|| Error::Precondition(format!("English position {pos} out of range")))?;
        match tok.head {
            Some(h) if h > n => Err(Error::Data(format!(
                "English token {pos} of {} has head {h} beyond sentence length",
                eng.id
            ))),
            h => Ok(h),
        }
    };

    // Walk to the root first so cycles are reported even when an aligned
    // ancestor would short-circuit the search.
    let mut chain = Vec::new();
    let mut cur = eng_head(link.eng_pos)?;
    while let Some(a) = cur.filter(|&a| a != 0) {
        if chain.len() > n {
            return Err(Error::Data(format!(
                "cyclic head chain in English sentence {}",
                eng.id
            )));
        }
        chain.push(a);
        cur = eng_head(a)?;
    }

    let mut aligned_to: Vec<Option<usize>> = vec![None; n + 1];
    for l in links.iter().filter(|l| !l.is_null()) {
        let slot = &mut aligned_to[l.eng_pos];
        if slot.is_none_or(|s| l.src_pos < s) {
            *slot = Some(l.src_pos);
        }
    }
    Ok(chain.into_iter().find_map(|a| aligned_to[a]).unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::{Feature, UNK};
    use crate::verse::VerseId;
    use proptest::prelude::*;

    fn tok(pos: usize, form: &str, upos: &str, head: usize, deprel: &str) -> AnnotatedToken {
        AnnotatedToken {
            position: pos,
            form: form.into(),
            upos: upos.into(),
            head: Some(head),
            deprel: Some(deprel.into()),
            feats: Vec::new(),
            gloss: None,
            misc: Vec::new(),
        }
    }

    /// "great multitudes followed him ."
    fn english() -> AnnotatedSentence {
        let id = VerseId::new(40, 8, 1).unwrap();
        let mut multitudes = tok(2, "multitudes", "NOUN", 3, "nsubj");
        multitudes.feats = vec![Feature::new("Number", "Plur")];
        AnnotatedSentence {
            id,
            reference: id.reference(),
            tokens: vec![
                tok(1, "great", "ADJ", 2, "amod"),
                multitudes,
                tok(3, "followed", "VERB", 0, "root"),
                tok(4, "him", "PRON", 3, "dobj"),
                tok(5, ".", "PUNCT", 3, "punct"),
            ],
            eng_text: "great multitudes followed him .".into(),
            src_text: "great multitudes followed him .".into(),
        }
    }

    fn verse(src: &str, eng: AnnotatedSentence) -> ParallelVerse {
        ParallelVerse::new(
            eng.id,
            src,
            src.split_whitespace().map(String::from).collect(),
            eng,
        )
        .unwrap()
    }

    fn links(targets: &[usize]) -> Vec<AlignmentLink> {
        targets
            .iter()
            .enumerate()
            .map(|(i, &e)| AlignmentLink {
                src_pos: i + 1,
                eng_pos: e,
                score: if e == 0 { 0.0 } else { 1.0 },
                candidate: (e > 0).then_some(e),
            })
            .collect()
    }

    #[test]
    fn irish_clause() {
        // lean sluaite móra é .
        let pair = verse("lean sluaite móra é .", english());
        let s = project_verse(&pair, &links(&[3, 2, 1, 0, 5])).unwrap();
        let rows: Vec<(&str, &str, Option<usize>, Option<&str>)> = s
            .tokens
            .iter()
            .map(|t| {
                (
                    t.form.as_str(),
                    t.upos.as_str(),
                    t.head,
                    t.deprel.as_deref(),
                )
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                ("lean", "VERB", Some(0), Some("root")),
                ("sluaite", "NOUN", Some(1), Some("nsubj")),
                ("móra", "ADJ", Some(2), Some("amod")),
                ("é", UNK, None, None),
                (".", "PUNCT", Some(1), Some("punct")),
            ]
        );
        assert_eq!(s.tokens[1].feats, vec![Feature::new("Number", "Plur")]);
        assert_eq!(s.tokens[1].gloss.as_deref(), Some("multitudes"));
        assert_eq!(s.tokens[4].gloss, None);
        s.validate().unwrap();
    }

    #[test]
    fn identity_projection() {
        let eng = english();
        let src: Vec<&str> = eng.forms().collect();
        let pair = verse(&src.join(" "), eng.clone());
        let s = project_verse(&pair, &links(&[1, 2, 3, 4, 5])).unwrap();
        for (a, b) in s.tokens.iter().zip(&eng.tokens) {
            assert_eq!(
                (&a.upos, a.head, &a.deprel, &a.feats),
                (&b.upos, b.head, &b.deprel, &b.feats)
            );
        }
    }

    #[test]
    fn all_null() {
        let pair = verse("a b c", english());
        let s = project_verse(&pair, &links(&[0, 0, 0])).unwrap();
        assert!(s.tokens.iter().all(|t| t.is_unknown()
            && t.deprel.is_none()
            && t.head.is_none()
            && t.gloss.is_none()));
    }

    #[test]
    fn nearest_candidate_gloss() {
        let pair = verse("sé", english());
        let mut l = links(&[0]);
        l[0].candidate = Some(4);
        let s = project_verse(&pair, &l).unwrap();
        assert!(s.tokens[0].is_unknown());
        assert_eq!(s.tokens[0].gloss.as_deref(), Some("him"));
        let opts = ProjectionOptions {
            nearest_candidate_gloss: false,
            ..Default::default()
        };
        assert_eq!(
            project_verse_with(&pair, &l, opts).unwrap().tokens[0].gloss,
            None
        );
    }

    #[test]
    fn lexicon_gloss_wins() {
        let pair = verse("sluaite", english());
        let lex: GlossLexicon = [("sluaite", "crowds")].into_iter().collect();
        let opts = ProjectionOptions {
            gloss: GlossSource::Lexicon(&lex),
            nearest_candidate_gloss: true,
        };
        let s = project_verse_with(&pair, &links(&[2]), opts).unwrap();
        assert_eq!(s.tokens[0].gloss.as_deref(), Some("crowds"));
    }

    #[test]
    fn head_rules() {
        let eng = english();
        // móra -> great, whose head multitudes and its head followed are unaligned.
        assert_eq!(project_head(1, &links(&[1]), &eng).unwrap(), 0);
        // lean -> followed (root).
        assert_eq!(project_head(1, &links(&[3]), &eng).unwrap(), 0);
        // Two tokens on the ancestor: the lower position wins.
        assert_eq!(project_head(3, &links(&[3, 3, 2]), &eng).unwrap(), 1);
        assert!(project_head(1, &links(&[0]), &eng).is_err());
    }

    #[test]
    fn cyclic_chain_is_data_error() {
        let mut eng = english();
        eng.tokens[2].head = Some(2);
        assert!(matches!(
            project_head(1, &links(&[1, 3]), &eng),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn out_of_range_link() {
        let pair = verse("a", english());
        assert!(matches!(
            project_verse(&pair, &links(&[9])),
            Err(Error::Precondition(_))
        ));
        assert!(project_verse(&pair, &[]).is_err());
    }

    /// Random English tree (each token's head is an earlier position or 0)
    /// and random links.
    fn tree_and_links() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (1usize..8).prop_flat_map(|n| {
            let heads = (1..=n).map(|p| 0..p).collect::<Vec<_>>();
            (heads, proptest::collection::vec(0..=n, 1..8))
        })
    }

    fn random_sentence(heads: &[usize]) -> AnnotatedSentence {
        let id = VerseId::new(1, 1, 1).unwrap();
        let tokens: Vec<AnnotatedToken> = heads
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                tok(
                    i + 1,
                    &format!("w{i}"),
                    "NOUN",
                    h,
                    if h == 0 { "root" } else { "dep" },
                )
            })
            .collect();
        AnnotatedSentence {
            id,
            reference: id.reference(),
            tokens,
            eng_text: String::new(),
            src_text: String::new(),
        }
    }

    proptest! {
        #[test]
        fn projected_heads_are_acyclic((heads, targets) in tree_and_links()) {
            let eng = random_sentence(&heads);
            let src: Vec<String> = (0..targets.len()).map(|i| format!("s{i}")).collect();
            let pair = verse(&src.join(" "), eng);
            let s = project_verse(&pair, &links(&targets)).unwrap();
            s.validate().unwrap();
            for start in &s.tokens {
                let mut steps = 0;
                let mut cur = start.head;
                while let Some(h) = cur.filter(|&h| h != 0) {
                    prop_assert_ne!(h, start.position);
                    steps += 1;
                    prop_assert!(steps <= s.tokens.len());
                    cur = s.tokens[h - 1].head;
                }
            }
        }

        #[test]
        fn changing_one_link_is_local(
            (heads, targets) in tree_and_links(),
            which in 0usize..8,
            new_target in 0usize..8,
        ) {
            let eng = random_sentence(&heads);
            let n = heads.len();
            let src: Vec<String> = (0..targets.len()).map(|i| format!("s{i}")).collect();
            let pair = verse(&src.join(" "), eng);
            let which = which % targets.len();
            let mut changed = targets.clone();
            changed[which] = new_target % (n + 1);
            let a = project_verse(&pair, &links(&targets)).unwrap();
            let b = project_verse(&pair, &links(&changed)).unwrap();
            for (k, (x, y)) in a.tokens.iter().zip(&b.tokens).enumerate() {
                if k == which {
                    continue;
                }
                prop_assert_eq!((&x.upos, &x.deprel, &x.feats, &x.gloss), (&y.upos, &y.deprel, &y.feats, &y.gloss));
                // Heads may only change when they routed through the changed token.
                if x.head != y.head {
                    prop_assert!(x.head == Some(which + 1) || y.head == Some(which + 1));
                }
            }
        }
    }
}
