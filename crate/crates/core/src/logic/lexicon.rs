//! Word-to-type tables and discourse typing.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use super::formula::{parse_formula, Formula, ParseError};
use super::proof::Sequent;

/// Default storage bound: one pronoun per referent.
pub const DEFAULT_K0: usize = 2;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: bad type for '{word}': {source}")]
    BadType {
        line: usize,
        word: String,
        source: ParseError,
    },
    #[error("unknown word '{0}'")]
    UnknownWord(String),
    #[error("empty discourse")]
    EmptyDiscourse,
    #[error("k0 must be positive")]
    ZeroBound,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, Formula>,
    copulas: BTreeSet<String>,
    k0: usize,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::new(DEFAULT_K0).expect("default bound is positive")
    }
}

impl Lexicon {
    pub fn new(k0: usize) -> Result<Self, LexiconError> {
        if k0 == 0 {
            return Err(LexiconError::ZeroBound);
        }
        Ok(Self {
            entries: BTreeMap::new(),
            copulas: BTreeSet::new(),
            k0,
        })
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    /// Words are matched case-insensitively.
    pub fn insert(&mut self, word: &str, formula: Formula) {
        self.entries.insert(word.to_lowercase(), formula);
    }

    pub fn insert_copula(&mut self, word: &str, formula: Formula) {
        self.insert(word, formula);
        self.copulas.insert(word.to_lowercase());
    }

    pub fn with(mut self, word: &str, formula: Formula) -> Self {
        self.insert(word, formula);
        self
    }

    pub fn get(&self, word: &str) -> Option<&Formula> {
        self.entries.get(&word.to_lowercase())
    }

    pub fn is_copula(&self, word: &str) -> bool {
        self.copulas.contains(&word.to_lowercase())
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(w, f)| (w.as_str(), f))
    }

    /// Parses `word<TAB>type[<TAB>copula]` lines; `#` starts a comment.
    pub fn parse(text: &str, k0: usize) -> Result<Self, LexiconError> {
        let mut lex = Self::new(k0)?;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() < 2 || fields.len() > 3 || fields[0].is_empty() {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    message: "expected 'word<TAB>type'".into(),
                });
            }
            let formula = parse_formula(fields[1]).map_err(|source| LexiconError::BadType {
                line: line_no,
                word: fields[0].to_string(),
                source,
            })?;
            match fields.get(2) {
                None => lex.insert(fields[0], formula),
                Some(&"copula") => lex.insert_copula(fields[0], formula),
                Some(other) => {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        message: format!("unknown flag '{other}'"),
                    })
                }
            }
        }
        Ok(lex)
    }

    pub fn load(path: &Path, k0: usize) -> Result<Self, LexiconError> {
        Self::parse(&std::fs::read_to_string(path)?, k0)
    }

    /// The example lexicon covering the worked discourses.
    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/examples.lex"), DEFAULT_K0)
            .expect("bundled lexicon parses")
    }

    /// Splits free text into lexicon tokens by greedy longest match, so
    /// multi-word entries such as "the dog" are recognized. Sentence
    /// punctuation becomes a separate `.` token.
    pub fn tokenize(&self, text: &str) -> Result<Vec<String>, LexiconError> {
        let spaced = text.replace(['.', '!', '?'], " . ");
        let words: Vec<String> = spaced.split_whitespace().map(str::to_lowercase).collect();
        let longest = self
            .entries
            .keys()
            .map(|k| k.split_whitespace().count())
            .max()
            .unwrap_or(1);
        let mut out = Vec::new();
        let mut i = 0;
        while i < words.len() {
            if words[i] == "." {
                out.push(".".to_string());
                i += 1;
                continue;
            }
            let mut matched = None;
            for width in (1..=longest.min(words.len() - i)).rev() {
                let candidate = words[i..i + width].join(" ");
                if self.entries.contains_key(&candidate) {
                    matched = Some((candidate, width));
                    break;
                }
            }
            let (token, width) =
                matched.ok_or_else(|| LexiconError::UnknownWord(words[i].clone()))?;
            out.push(token);
            i += width;
        }
        Ok(out)
    }
}

/// Builds the sequent whose antecedent lists the lexicon types of `words`
/// in order.
pub fn type_discourse<S: AsRef<str>>(
    words: &[S],
    lexicon: &Lexicon,
    goal: Formula,
) -> Result<Sequent, LexiconError> {
    if words.is_empty() {
        return Err(LexiconError::EmptyDiscourse);
    }
    let antecedent = words
        .iter()
        .map(|w| {
            lexicon
                .get(w.as_ref())
                .cloned()
                .ok_or_else(|| LexiconError::UnknownWord(w.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sequent::new(antecedent, goal))
}

/// Goal for a discourse of `sentences` sentences: `s`, `s.s`, `(s.s).s`, ...
pub fn discourse_goal(sentences: usize) -> Formula {
    let mut goal = Formula::s();
    for _ in 1..sentences {
        goal = Formula::product(goal, Formula::s());
    }
    goal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn types_john_sleeps() {
        let lex = Lexicon::builtin();
        let s = type_discourse(&["John", "sleeps"], &lex, Formula::s()).unwrap();
        assert_eq!(s.to_string(), "!@n, n\\s --> s");
    }

    #[test]
    fn empty_discourse_is_an_error() {
        let lex = Lexicon::builtin();
        let words: [&str; 0] = [];
        assert!(matches!(
            type_discourse(&words, &lex, Formula::s()),
            Err(LexiconError::EmptyDiscourse)
        ));
    }

    #[test]
    fn unknown_word_is_an_error() {
        let lex = Lexicon::builtin();
        let err = type_discourse(&["John", "flies"], &lex, Formula::s()).unwrap_err();
        assert!(matches!(err, LexiconError::UnknownWord(w) if w == "flies"));
    }

    #[test]
    fn types_dog_vase_discourse() {
        let lex = Lexicon::builtin();
        let words = ["the dog", "broke", "the vase", "It", "was", "clumsy"];
        let s = type_discourse(&words, &lex, discourse_goal(2)).unwrap();
        assert_eq!(
            s.to_string(),
            "!@n, (n\\s)/n, n, @n\\n, (n\\s)/(n/n), n/n --> s.s"
        );
        assert!(lex.is_copula("was"));
    }

    #[test]
    fn tokenizer_prefers_multiword_entries() {
        let lex = Lexicon::builtin();
        let toks = lex.tokenize("The dog broke the vase. It was clumsy.").unwrap();
        assert_eq!(toks, ["the dog", "broke", "the vase", ".", "it", "was", "clumsy", "."]);
        assert!(lex.tokenize("the dog flew").is_err());
    }

    #[test]
    fn parses_lexicon_file_format() {
        let text = "# comment\nJohn\t!@n\nsleeps\tn\\s   # trailing\n\nis\t(n\\s)/(n/n)\tcopula\n";
        let lex = Lexicon::parse(text, 2).unwrap();
        assert_eq!(lex.get("john").unwrap().to_string(), "!@n");
        assert!(lex.is_copula("is"));
        assert!(!lex.is_copula("sleeps"));
        assert!(matches!(
            Lexicon::parse("John !@n\n", 2),
            Err(LexiconError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::parse("a\tb\tc\n", 2),
            Err(LexiconError::BadType { line: 1, .. })
        ));
        assert!(Lexicon::parse("", 0).is_err());
    }
}
