//! CoNLL-U reading and writing.
//!
//! Each sentence carries four metadata comments, in this order:
//!
//! ```text
//! # sent_id = 40008001
//! # ref_id = Matthew 8:1
//! # eng_text = When he came down from the mountain , great multitudes followed him .
//! # gle_text = Tháinig sé anuas ón sliabh agus lean sluaite móra é .
//! ```
//!
//! followed by ten tab-separated columns per token. LEMMA, XPOS and DEPS are
//! always `_`; untagged tokens keep the literal `unk` UPOS; the English gloss
//! is stored in MISC as `gloss=<form>`.

use std::fmt::Write as _;

use crate::annotation::{AnnotatedDocument, AnnotatedSentence, AnnotatedToken, Feature, UNK};
use crate::error::{Error, Result};
use crate::verse::VerseId;

/// Language code assumed when a file has no `# <iso>_text` comment.
pub const UNDETERMINED_ISO: &str = "und";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Rewrite `unk` to `X` and empty deprels to `dep` for UD validators.
    pub strict_ud: bool,
}

pub fn emit_conllu(doc: &AnnotatedDocument) -> Result<String> {
    emit_conllu_with(doc, EmitOptions::default())
}

pub fn emit_conllu_with(doc: &AnnotatedDocument, opts: EmitOptions) -> Result<String> {
    doc.validate()?;
    let mut out = String::new();
    for sentence in &doc.sentences {
        write_sentence(&mut out, &doc.iso, sentence, opts);
    }
    Ok(out)
}

fn write_sentence(out: &mut String, iso: &str, s: &AnnotatedSentence, opts: EmitOptions) {
    // Writing to a String cannot fail.
    let _ = writeln!(out, "# sent_id = {}", s.id);
    let _ = writeln!(out, "# ref_id = {}", s.reference);
    let _ = writeln!(out, "# eng_text = {}", s.eng_text);
    let _ = writeln!(out, "# {}_text = {}", iso, s.src_text);
    for tok in &s.tokens {
        let upos = if opts.strict_ud && tok.is_unknown() {
            "X"
        } else {
            tok.upos.as_str()
        };
        let feats = if tok.feats.is_empty() {
            "_".to_string()
        } else {
            tok.feats
                .iter()
                .map(|f| format!("{}={}", f.key, f.value))
                .collect::<Vec<_>>()
                .join("|")
        };
        let head = tok.head.map_or_else(|| "_".to_string(), |h| h.to_string());
        let deprel = match (&tok.deprel, opts.strict_ud) {
            (Some(d), _) => d.as_str(),
            (None, true) => "dep",
            (None, false) => "_",
        };
        let mut misc: Vec<String> = Vec::with_capacity(tok.misc.len() + 1);
        if let Some(g) = &tok.gloss {
            misc.push(format!("gloss={g}"));
        }
        misc.extend(tok.misc.iter().cloned());
        let misc = if misc.is_empty() {
            "_".to_string()
        } else {
            misc.join("|")
        };
        let _ = writeln!(
            out,
            "{}\t{}\t_\t{}\t_\t{}\t{}\t{}\t_\t{}",
            tok.position, tok.form, upos, feats, head, deprel, misc
        );
    }
    out.push('\n');
}

#[derive(Default)]
struct PendingSentence {
    start_line: usize,
    id: Option<VerseId>,
    reference: Option<String>,
    eng_text: Option<String>,
    plain_text: Option<String>,
    src_text: Option<String>,
    tokens: Vec<AnnotatedToken>,
}

impl PendingSentence {
    fn is_started(&self) -> bool {
        self.start_line != 0
    }
}

/// Parses a CoNLL-U document.
///
/// Unknown comment lines are ignored. The document language is taken from
/// the first `# <iso>_text` comment that is not `eng_text` (a second
/// `eng_text` in one sentence marks an English source side).
pub fn parse_conllu(text: &str) -> Result<AnnotatedDocument> {
    let mut iso: Option<String> = None;
    let mut sentences = Vec::new();
    let mut pending = PendingSentence::default();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if pending.is_started() {
                sentences.push(finish(std::mem::take(&mut pending))?);
            }
            continue;
        }
        if !pending.is_started() {
            pending.start_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            parse_comment(comment, line_no, &mut pending, &mut iso)?;
            continue;
        }
        let expected = pending.tokens.len() + 1;
        pending.tokens.push(parse_token(line, line_no, expected)?);
    }
    if pending.is_started() {
        sentences.push(finish(pending)?);
    }

    let doc = AnnotatedDocument {
        iso: iso.unwrap_or_else(|| UNDETERMINED_ISO.to_string()),
        sentences,
    };
    doc.validate()?;
    Ok(doc)
}

fn parse_comment(
    comment: &str,
    line_no: usize,
    pending: &mut PendingSentence,
    iso: &mut Option<String>,
) -> Result<()> {
    let comment = comment.strip_prefix(' ').unwrap_or(comment);
    let Some((key, value)) = comment
        .split_once(" = ")
        .or_else(|| comment.strip_suffix(" =").map(|k| (k, "")))
    else {
        return Ok(());
    };
    match key {
        "sent_id" => {
            let id = value
                .trim()
                .parse::<VerseId>()
                .map_err(|e| Error::format(line_no, e.to_string()))?;
            pending.id = Some(id);
        }
        "ref_id" => pending.reference = Some(value.to_string()),
        "text" => pending.plain_text = Some(value.to_string()),
        "eng_text" if pending.eng_text.is_none() => pending.eng_text = Some(value.to_string()),
        _ => {
            if let Some(code) = key.strip_suffix("_text") {
                if code.is_empty() || !code.bytes().all(|b| b.is_ascii_alphanumeric()) {
                    return Ok(());
                }
                match iso {
                    None => *iso = Some(code.to_string()),
                    Some(known) if known != code => {
                        return Err(Error::format(
                            line_no,
                            format!("source language {code} differs from {known}"),
                        ))
                    }
                    Some(_) => {}
                }
                pending.src_text = Some(value.to_string());
            }
        }
    }
    Ok(())
}

fn finish(p: PendingSentence) -> Result<AnnotatedSentence> {
    let id =
        p.id.ok_or_else(|| Error::format(p.start_line, "sentence without `# sent_id`"))?;
    if p.tokens.is_empty() {
        return Err(Error::format(
            p.start_line,
            format!("sentence {id} has no token lines"),
        ));
    }
    let eng_text = p.eng_text.or(p.plain_text).unwrap_or_default();
    Ok(AnnotatedSentence {
        id,
        reference: p.reference.unwrap_or_else(|| id.reference()),
        src_text: p.src_text.unwrap_or_else(|| eng_text.clone()),
        eng_text,
        tokens: p.tokens,
    })
}

fn parse_token(line: &str, line_no: usize, expected: usize) -> Result<AnnotatedToken> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(Error::format(
            line_no,
            format!("expected 10 columns, found {}", cols.len()),
        ));
    }
    let position: usize = cols[0].parse().map_err(|_| {
        Error::format(
            line_no,
            format!(
                "unsupported token id {:?} (multiword and empty nodes are not handled)",
                cols[0]
            ),
        )
    })?;
    if position != expected {
        return Err(Error::format(
            line_no,
            format!("token id {position}, expected {expected}"),
        ));
    }
    let feats = if cols[5] == "_" {
        Vec::new()
    } else {
        cols[5]
            .split('|')
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| Feature::new(k, v))
                    .ok_or_else(|| Error::format(line_no, format!("malformed feature {kv:?}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let head = match cols[6] {
        "_" => None,
        h => Some(
            h.parse::<usize>()
                .map_err(|_| Error::format(line_no, format!("non-integer HEAD {h:?}")))?,
        ),
    };
    let deprel = match cols[7] {
        "_" => None,
        d => Some(d.to_string()),
    };
    let mut gloss = None;
    let mut misc = Vec::new();
    if cols[9] != "_" {
        for entry in cols[9].split('|') {
            match entry.strip_prefix("gloss=") {
                Some(g) if gloss.is_none() => gloss = Some(g.to_string()),
                _ => misc.push(entry.to_string()),
            }
        }
    }
    Ok(AnnotatedToken {
        position,
        form: cols[1].to_string(),
        upos: match cols[3] {
            "_" => UNK.to_string(),
            u => u.to_string(),
        },
        head,
        deprel,
        feats,
        gloss,
        misc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AnnotatedDocument {
        let id: VerseId = "40008001".parse().unwrap();
        let mut lean = AnnotatedToken::unknown(1, "lean");
        lean.upos = "VERB".into();
        lean.head = Some(0);
        lean.deprel = Some("root".into());
        lean.gloss = Some("followed".into());
        let mut sluaite = AnnotatedToken::unknown(2, "sluaite");
        sluaite.upos = "NOUN".into();
        sluaite.head = Some(1);
        sluaite.deprel = Some("nsubj".into());
        sluaite.feats = vec![Feature::new("Number", "Plur")];
        let e = AnnotatedToken::unknown(3, "é");
        AnnotatedDocument {
            iso: "gle".into(),
            sentences: vec![AnnotatedSentence {
                id,
                reference: "Matthew 8:1".into(),
                tokens: vec![lean, sluaite, e],
                eng_text: "great multitudes followed him".into(),
                src_text: "lean sluaite é".into(),
            }],
        }
    }

    #[test]
    fn emits_expected_lines() {
        let text = emit_conllu(&sample()).unwrap();
        let expected = "# sent_id = 40008001\n\
                        # ref_id = Matthew 8:1\n\
                        # eng_text = great multitudes followed him\n\
                        # gle_text = lean sluaite é\n\
                        1\tlean\t_\tVERB\t_\t_\t0\troot\t_\tgloss=followed\n\
                        2\tsluaite\t_\tNOUN\t_\tNumber=Plur\t1\tnsubj\t_\t_\n\
                        3\té\t_\tunk\t_\t_\t_\t_\t_\t_\n\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn strict_ud_rewrites_unk() {
        let text = emit_conllu_with(&sample(), EmitOptions { strict_ud: true }).unwrap();
        assert!(text.contains("3\té\t_\tX\t_\t_\t_\tdep\t_\t_\n"));
    }

    #[test]
    fn empty_document() {
        assert_eq!(emit_conllu(&AnnotatedDocument::new("gle")).unwrap(), "");
    }

    #[test]
    fn round_trip() {
        let doc = sample();
        let parsed = parse_conllu(&emit_conllu(&doc).unwrap()).unwrap();
        assert_eq!(parsed, doc);
    }

    #[test]
    fn english_source_side() {
        let mut doc = sample();
        doc.iso = "eng".into();
        let parsed = parse_conllu(&emit_conllu(&doc).unwrap()).unwrap();
        assert_eq!(parsed, doc);
    }

    #[test]
    fn bad_head_is_format_error() {
        let text = "# sent_id = 40008001\n1\tx\t_\tNOUN\t_\t_\tx\tnsubj\t_\t_\n";
        match parse_conllu(text) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count() {
        let text = "# sent_id = 40008001\n1\tx\t_\tNOUN\t_\t_\t0\n";
        assert!(matches!(
            parse_conllu(text),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn comment_only_sentence_is_rejected() {
        let text = "# sent_id = 40008001\n# ref_id = Matthew 8:1\n";
        assert!(matches!(
            parse_conllu(text),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn tolerates_extra_comments_and_misc() {
        let text = "# newdoc\n# sent_id = 40008001\n# text = He came .\n\
                    1\tHe\the\tPRON\tPRP\tCase=Nom|Number=Sing\t2\tnsubj\t_\tSpaceAfter=No\n\
                    2\tcame\tcome\tVERB\tVBD\t_\t0\troot\t_\t_\n\
                    3\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_\n";
        let doc = parse_conllu(text).unwrap();
        assert_eq!(doc.iso, UNDETERMINED_ISO);
        let s = &doc.sentences[0];
        assert_eq!(s.eng_text, "He came .");
        assert_eq!(s.reference, "Matthew 8:1");
        assert_eq!(s.tokens[0].misc, vec!["SpaceAfter=No".to_string()]);
        assert_eq!(s.tokens[0].feats.len(), 2);
    }

    #[test]
    fn unsorted_ids_rejected() {
        let text = "# sent_id = 40008002\n1\tx\t_\tNOUN\t_\t_\t_\t_\t_\t_\n\n\
                    # sent_id = 40008001\n1\tx\t_\tNOUN\t_\t_\t_\t_\t_\t_\n";
        assert!(matches!(parse_conllu(text), Err(Error::Data(_))));
    }
}
