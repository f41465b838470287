//! Verse identifiers in the `BBCCCVVV` form used by parallel bible corpora.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Book names for the 66-book protestant canon, indexed by book number - 1.
const BOOK_NAMES: [&str; 66] = [
    "Genesis",
    "Exodus",
    "Leviticus",
    "Numbers",
    "Deuteronomy",
    "Joshua",
    "Judges",
    "Ruth",
    "1 Samuel",
    "2 Samuel",
    "1 Kings",
    "2 Kings",
    "1 Chronicles",
    "2 Chronicles",
    "Ezra",
    "Nehemiah",
    "Esther",
    "Job",
    "Psalms",
    "Proverbs",
    "Ecclesiastes",
    "Song of Solomon",
    "Isaiah",
    "Jeremiah",
    "Lamentations",
    "Ezekiel",
    "Daniel",
    "Hosea",
    "Joel",
    "Amos",
    "Obadiah",
    "Jonah",
    "Micah",
    "Nahum",
    "Habakkuk",
    "Zephaniah",
    "Haggai",
    "Zechariah",
    "Malachi",
    "Matthew",
    "Mark",
    "Luke",
    "John",
    "Acts",
    "Romans",
    "1 Corinthians",
    "2 Corinthians",
    "Galatians",
    "Ephesians",
    "Philippians",
    "Colossians",
    "1 Thessalonians",
    "2 Thessalonians",
    "1 Timothy",
    "2 Timothy",
    "Titus",
    "Philemon",
    "Hebrews",
    "James",
    "1 Peter",
    "2 Peter",
    "1 John",
    "2 John",
    "3 John",
    "Jude",
    "Revelation",
];

/// A verse reference: book (1..=99), chapter (0..=999), verse (0..=999).
///
/// Ordering follows canonical order, which is also the numeric order of the
/// 8-digit rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VerseId {
    book: u8,
    chapter: u16,
    verse: u16,
}

impl VerseId {
    pub fn new(book: u8, chapter: u16, verse: u16) -> Result<Self> {
        if !(1..=99).contains(&book) {
            return Err(Error::InvalidArgument(format!(
                "book {book} outside 1..=99"
            )));
        }
        if chapter > 999 || verse > 999 {
            return Err(Error::InvalidArgument(format!(
                "chapter/verse {chapter}:{verse} outside 0..=999"
            )));
        }
        Ok(VerseId {
            book,
            chapter,
            verse,
        })
    }

    pub fn book(&self) -> u8 {
        self.book
    }

    pub fn chapter(&self) -> u16 {
        self.chapter
    }

    pub fn verse(&self) -> u16 {
        self.verse
    }

    /// Human-readable reference such as `Matthew 8:1`. Books outside the
    /// 66-book canon are rendered as `Book 67 1:1`.
    pub fn reference(&self) -> String {
        match BOOK_NAMES.get(usize::from(self.book) - 1) {
            Some(name) => format!("{} {}:{}", name, self.chapter, self.verse),
            None => format!("Book {} {}:{}", self.book, self.chapter, self.verse),
        }
    }
}

impl fmt::Display for VerseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}{:03}{:03}", self.book, self.chapter, self.verse)
    }
}

impl FromStr for VerseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidArgument(format!(
                "verse id must be exactly 8 digits, got {s:?}"
            )));
        }
        // All-ASCII digits, so byte slicing is safe.
        let book: u8 = s[0..2].parse().expect("two digits");
        let chapter: u16 = s[2..5].parse().expect("three digits");
        let verse: u16 = s[5..8].parse().expect("three digits");
        VerseId::new(book, chapter, verse)
    }
}
