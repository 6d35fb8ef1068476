//! Template-generated pronoun resolution data.
//!
//! Each entry is a pair "The S V the O. They C A." whose label says whether
//! the pronoun refers to the subject (0) or the object (1); the adjective
//! alone decides which.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PRONOUN: &str = "they";
pub const DATASET_SIZE: usize = 144;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("vocabulary: {0}")]
    Vocabulary(String),
    #[error("expected {expected} entries, got {found}")]
    Size { expected: usize, found: usize },
    #[error("classes are unbalanced: {zeros} vs {ones}")]
    Unbalanced { zeros: usize, ones: usize },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compatibility {
    SubjectCompatible,
    ObjectCompatible,
}

impl Compatibility {
    pub fn label(self) -> u8 {
        match self {
            Compatibility::SubjectCompatible => 0,
            Compatibility::ObjectCompatible => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub subjects: Vec<String>,
    pub objects: Vec<String>,
    pub transitive_verbs: Vec<String>,
    pub copulas: Vec<String>,
    pub adjectives: Vec<(String, Compatibility)>,
}

fn owned(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for Vocabulary {
    fn default() -> Self {
        use Compatibility::*;
        Self {
            subjects: owned(&["girls", "men", "children"]),
            objects: owned(&["cookies", "pancakes"]),
            transitive_verbs: owned(&["ate", "enjoyed", "loved"]),
            copulas: owned(&["were", "looked"]),
            adjectives: vec![
                ("hungry".into(), SubjectCompatible),
                ("starving".into(), SubjectCompatible),
                ("tasty".into(), ObjectCompatible),
                ("delicious".into(), ObjectCompatible),
            ],
        }
    }
}

impl Vocabulary {
    /// Distinct surface words of the generated sentences, including the
    /// article and the pronoun.
    pub fn words(&self) -> BTreeSet<String> {
        let mut all: BTreeSet<String> = self
            .subjects
            .iter()
            .chain(&self.objects)
            .chain(&self.transitive_verbs)
            .chain(&self.copulas)
            .chain(self.adjectives.iter().map(|(a, _)| a))
            .cloned()
            .collect();
        all.insert("the".into());
        all.insert(PRONOUN.into());
        all
    }

    pub fn combinations(&self) -> usize {
        self.subjects.len()
            * self.objects.len()
            * self.transitive_verbs.len()
            * self.copulas.len()
            * self.adjectives.len()
    }

    fn check(&self) -> Result<(), DatasetError> {
        let lists: [(&str, usize); 5] = [
            ("subjects", self.subjects.len()),
            ("objects", self.objects.len()),
            ("transitive_verbs", self.transitive_verbs.len()),
            ("copulas", self.copulas.len()),
            ("adjectives", self.adjectives.len()),
        ];
        for (name, len) in lists {
            if len == 0 {
                return Err(DatasetError::Vocabulary(format!("no {name}")));
            }
        }
        let mut seen = BTreeSet::new();
        for w in self.words() {
            if w.is_empty() || w.contains(char::is_whitespace) || w.contains(['.', ',', '"']) {
                return Err(DatasetError::Vocabulary(format!("bad word '{w}'")));
            }
            seen.insert(w);
        }
        let slots = self.subjects.len()
            + self.objects.len()
            + self.transitive_verbs.len()
            + self.copulas.len()
            + self.adjectives.len()
            + 2;
        if seen.len() != slots {
            return Err(DatasetError::Vocabulary("a word appears in two classes".into()));
        }
        Ok(())
    }

    /// Parses a sectioned word list:
    ///
    /// ```text
    /// [subjects]
    /// girls
    /// [adjectives]
    /// hungry = subject
    /// tasty = object
    /// ```
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut v = Vocabulary {
            subjects: vec![],
            objects: vec![],
            transitive_verbs: vec![],
            copulas: vec![],
            adjectives: vec![],
        };
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| DatasetError::Vocabulary(format!("line {}: {m}", i + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(name.trim().to_string());
                continue;
            }
            let word = line.to_lowercase();
            match section.as_deref() {
                Some("subjects") => v.subjects.push(word),
                Some("objects") => v.objects.push(word),
                Some("transitive_verbs") | Some("verbs") => v.transitive_verbs.push(word),
                Some("copulas") => v.copulas.push(word),
                Some("adjectives") => {
                    let (w, class) = word
                        .split_once('=')
                        .ok_or_else(|| bad("expected 'adjective = subject|object'".into()))?;
                    let class = match class.trim() {
                        "subject" => Compatibility::SubjectCompatible,
                        "object" => Compatibility::ObjectCompatible,
                        other => return Err(bad(format!("unknown class '{other}'"))),
                    };
                    v.adjectives.push((w.trim().to_string(), class));
                }
                Some(other) => return Err(bad(format!("unknown section '{other}'"))),
                None => return Err(bad("word outside a section".into())),
            }
        }
        v.check()?;
        Ok(v)
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatasetEntry {
    /// Subject, verb, object.
    pub s1_tokens: [String; 3],
    /// Pronoun, copula, adjective.
    pub s2_tokens: [String; 3],
    pub referent: String,
    pub pronoun: String,
    pub label: u8,
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl DatasetEntry {
    pub fn new(s1: [&str; 3], s2: [&str; 3], label: u8) -> Self {
        let referent = if label == 0 { s1[0] } else { s1[2] };
        Self {
            s1_tokens: s1.map(str::to_string),
            s2_tokens: s2.map(str::to_string),
            referent: referent.to_string(),
            pronoun: s2[0].to_string(),
            label,
        }
    }

    pub fn subject(&self) -> &str {
        &self.s1_tokens[0]
    }

    pub fn object(&self) -> &str {
        &self.s1_tokens[2]
    }

    pub fn sentence(&self) -> String {
        let [s, v, o] = &self.s1_tokens;
        let [p, c, a] = &self.s2_tokens;
        format!("The {s} {v} the {o}. {} {c} {a}.", capitalize(p))
    }

    /// Surface words of each sentence, lowercased, with articles.
    pub fn surface_words(&self) -> [Vec<String>; 2] {
        let [s, v, o] = self.s1_tokens.clone();
        [
            vec!["the".into(), s, v, "the".into(), o],
            self.s2_tokens.to_vec(),
        ]
    }

    /// Inverse of [`DatasetEntry::sentence`].
    pub fn parse(sentence: &str, referent: &str, pronoun: &str, label: u8) -> Result<Self, String> {
        let words: Vec<String> = sentence
            .replace('.', " . ")
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        let w: Vec<&str> = words.iter().map(String::as_str).collect();
        let ["the", s, v, "the", o, ".", p, c, a, "."] = w.as_slice() else {
            return Err(format!("'{sentence}' does not match 'The S V the O. P C A.'"));
        };
        if label > 1 {
            return Err(format!("unknown label {label}"));
        }
        let entry = Self::new([s, v, o], [p, c, a], label);
        if entry.referent != referent.to_lowercase() {
            return Err(format!(
                "referent '{referent}' disagrees with label {label} for '{sentence}'"
            ));
        }
        if entry.pronoun != pronoun.to_lowercase() {
            return Err(format!("pronoun '{pronoun}' is not the second sentence's first word"));
        }
        Ok(entry)
    }
}

impl fmt::Display for DatasetEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.sentence(), self.label)
    }
}

/// Every subject/verb/object/copula/adjective combination in a fixed
/// order, failing unless the size is exactly [`DATASET_SIZE`].
pub fn generate(vocab: &Vocabulary) -> Result<Vec<DatasetEntry>, DatasetError> {
    let entries = generate_any(vocab)?;
    if entries.len() != DATASET_SIZE {
        return Err(DatasetError::Size {
            expected: DATASET_SIZE,
            found: entries.len(),
        });
    }
    Ok(entries)
}

/// As [`generate`] but accepts any vocabulary size.
pub fn generate_any(vocab: &Vocabulary) -> Result<Vec<DatasetEntry>, DatasetError> {
    vocab.check()?;
    let mut out = Vec::with_capacity(vocab.combinations());
    for s in &vocab.subjects {
        for v in &vocab.transitive_verbs {
            for o in &vocab.objects {
                for c in &vocab.copulas {
                    for (a, class) in &vocab.adjectives {
                        out.push(DatasetEntry::new([s, v, o], [PRONOUN, c, a], class.label()));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn class_counts(entries: &[DatasetEntry]) -> (usize, usize) {
    let ones = entries.iter().filter(|e| e.label == 1).count();
    (entries.len() - ones, ones)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splits {
    pub train: Vec<DatasetEntry>,
    pub test: Vec<DatasetEntry>,
    pub val: Vec<DatasetEntry>,
}

impl Splits {
    pub fn all(&self) -> impl Iterator<Item = &DatasetEntry> {
        self.train.iter().chain(&self.test).chain(&self.val)
    }
}

/// Seeded 72/36/36 split, balanced within each part.
pub fn split(entries: &[DatasetEntry], seed: u64) -> Result<Splits, DatasetError> {
    if entries.len() != DATASET_SIZE {
        return Err(DatasetError::Size {
            expected: DATASET_SIZE,
            found: entries.len(),
        });
    }
    split_any(entries, seed)
}

/// Halves each class for training and quarters it for test and
/// validation; needs a balanced input.
pub fn split_any(entries: &[DatasetEntry], seed: u64) -> Result<Splits, DatasetError> {
    let (zeros, ones) = class_counts(entries);
    if zeros != ones {
        return Err(DatasetError::Unbalanced { zeros, ones });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<usize>; 3] = Default::default();
    for label in [0u8, 1] {
        let mut idx: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].label == label).collect();
        idx.shuffle(&mut rng);
        let n = idx.len();
        let (train, test) = (n / 2, n / 4);
        parts[0].extend_from_slice(&idx[..train]);
        parts[1].extend_from_slice(&idx[train..train + test]);
        parts[2].extend_from_slice(&idx[train + test..]);
    }
    let [train, test, val] = parts.map(|mut p| {
        p.sort_unstable();
        p.into_iter().map(|i| entries[i].clone()).collect::<Vec<_>>()
    });
    Ok(Splits { train, test, val })
}

#[derive(Serialize, Deserialize)]
struct Row {
    sentence: String,
    referent: String,
    pronoun: String,
    label: String,
}

pub fn write_csv<W: std::io::Write>(entries: &[DatasetEntry], w: W) -> Result<(), DatasetError> {
    let mut wr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::NonNumeric)
        .from_writer(w);
    for e in entries {
        wr.serialize(Row {
            sentence: e.sentence(),
            referent: e.referent.clone(),
            pronoun: e.pronoun.clone(),
            label: e.label.to_string(),
        })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<DatasetEntry>, DatasetError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, row) in rd.deserialize::<Row>().enumerate() {
        let row_no = i + 2;
        let row = row?;
        let malformed = |message: String| DatasetError::Malformed {
            row: row_no,
            message,
        };
        let label = match row.label.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(malformed(format!("unknown label '{other}'"))),
        };
        out.push(
            DatasetEntry::parse(&row.sentence, row.referent.trim(), row.pronoun.trim(), label)
                .map_err(malformed)?,
        );
    }
    Ok(out)
}

pub fn save(entries: &[DatasetEntry], path: &Path) -> Result<(), DatasetError> {
    write_csv(entries, std::fs::File::create(path)?)
}

pub fn load(path: &Path) -> Result<Vec<DatasetEntry>, DatasetError> {
    read_csv(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_vocabulary_size() {
        assert_eq!(Vocabulary::default().words().len(), 16);
        assert_eq!(Vocabulary::default().combinations(), DATASET_SIZE);
    }

    #[test]
    fn generation_is_balanced_and_labelled_by_adjective() {
        let v = Vocabulary::default();
        let data = generate(&v).unwrap();
        assert_eq!(class_counts(&data), (72, 72));
        for e in &data {
            let class = v.adjectives.iter().find(|(a, _)| *a == e.s2_tokens[2]).unwrap().1;
            assert_eq!(class.label(), e.label);
            assert_eq!(e.referent, if e.label == 0 { e.subject() } else { e.object() });
        }
        let unique: BTreeSet<_> = data.iter().map(|e| e.sentence()).collect();
        assert_eq!(unique.len(), DATASET_SIZE);
    }

    #[test]
    fn empty_adjectives_rejected() {
        let mut v = Vocabulary::default();
        v.adjectives.clear();
        assert!(generate(&v).is_err());
        let mut v = Vocabulary::default();
        v.objects.push("apples".into());
        assert!(matches!(generate(&v), Err(DatasetError::Size { found: 216, .. })));
        assert_eq!(generate_any(&v).unwrap().len(), 216);
    }

    #[test]
    fn splits_are_seeded_balanced_and_disjoint() {
        let data = generate(&Vocabulary::default()).unwrap();
        let s = split(&data, 7).unwrap();
        assert_eq!((s.train.len(), s.test.len(), s.val.len()), (72, 36, 36));
        assert_eq!(class_counts(&s.train), (36, 36));
        assert_eq!(class_counts(&s.test), (18, 18));
        assert_eq!(class_counts(&s.val), (18, 18));
        let all: BTreeSet<_> = s.all().map(|e| e.sentence()).collect();
        assert_eq!(all.len(), 144);
        assert_eq!(split(&data, 7).unwrap(), s);
        assert_ne!(split(&data, 8).unwrap(), s);
        assert!(split(&data[1..], 7).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = generate(&Vocabulary::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("\"sentence\",\"referent\",\"pronoun\",\"label\""));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let bad_label = "sentence,referent,pronoun,label\n\"The men ate the cookies. They were tasty.\",cookies,they,2\n";
        assert!(matches!(read_csv(bad_label.as_bytes()), Err(DatasetError::Malformed { row: 2, .. })));
        let wrong_ref = "sentence,referent,pronoun,label\n\"The men ate the cookies. They were tasty.\",men,they,1\n";
        assert!(read_csv(wrong_ref.as_bytes()).is_err());
        let bad_shape = "sentence,referent,pronoun,label\n\"Men ate cookies.\",men,they,0\n";
        assert!(read_csv(bad_shape.as_bytes()).is_err());
    }

    #[test]
    fn vocabulary_config_parses() {
        let text = "[subjects]\ngirls\n[objects]\ncookies\n[transitive_verbs]\nate\n[copulas]\nwere\n\
                    [adjectives]\nhungry = subject\ntasty = object\n";
        let v = Vocabulary::parse(text).unwrap();
        assert_eq!(v.adjectives[1], ("tasty".into(), Compatibility::ObjectCompatible));
        assert_eq!(generate_any(&v).unwrap().len(), 2);
        assert!(Vocabulary::parse("girls\n").is_err());
        assert!(Vocabulary::parse("[adjectives]\nhungry = maybe\n").is_err());
    }
}
