//! The four experiment models as diagram builders.
//!
//! 1. bag of words: one sentence wire per word, merged by spiders;
//! 2. bag of words with the referent shared between both sentences;
//! 3. one grammatical diagram per sentence, pronoun left unresolved;
//! 4. one discourse proof with stored referent, resolved pronoun.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    combine_sentences, fock_shorthand, merge_sentences, normalize, proof_to_diagram,
    rewrite_copula, rewrite_coreference, Base, BoxKind, Builder, Diagram, DiagramError, Handle,
    WireType, WordKind,
};
use crate::dataset::DatasetEntry;
use crate::logic::{discourse_goal, parse_formula, prove, type_discourse, Formula, Lexicon, Sequent};

/// Height limit for model proofs.
pub const PROOF_DEPTH: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    M1,
    M2,
    M3,
    M4,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::M1, Model::M2, Model::M3, Model::M4];

    pub fn number(self) -> u8 {
        match self {
            Model::M1 => 1,
            Model::M2 => 2,
            Model::M3 => 3,
            Model::M4 => 4,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().trim_start_matches(['m', 'M']) {
            "1" => Ok(Model::M1),
            "2" => Ok(Model::M2),
            "3" => Ok(Model::M3),
            "4" => Ok(Model::M4),
            _ => Err(format!("unknown model '{s}' (expected 1-4)")),
        }
    }
}

/// How the two sentence wires are merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combination {
    /// Spider, compiled as a CNOT.
    Frobenius,
    /// Learned controlled rotation.
    Rz,
}

impl Combination {
    pub const ALL: [Combination; 2] = [Combination::Frobenius, Combination::Rz];

    /// Variant letter used in model names such as `4a`.
    pub fn letter(self) -> char {
        match self {
            Combination::Frobenius => 'a',
            Combination::Rz => 'b',
        }
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combination::Frobenius => "frobenius",
            Combination::Rz => "rz",
        })
    }
}

impl FromStr for Combination {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "frobenius" | "spider" | "a" => Ok(Combination::Frobenius),
            "rz" | "crz" | "b" => Ok(Combination::Rz),
            _ => Err(format!("unknown combination '{s}' (expected frobenius or rz)")),
        }
    }
}

fn f(s: &str) -> Formula {
    parse_formula(s).expect("builtin type parses")
}

/// Types for the words of `entry` under a grammatical model. In model 4 the
/// referent is stored and the pronoun takes a permutable argument; in model
/// 3 both are plain nouns.
pub fn model_lexicon(entry: &DatasetEntry, model: Model, k0: usize) -> Result<Lexicon, DiagramError> {
    let mut lex = Lexicon::new(k0).map_err(|e| DiagramError::Unsupported(e.to_string()))?;
    let [subj, verb, obj] = &entry.s1_tokens;
    let [pron, cop, adj] = &entry.s2_tokens;
    lex.insert(subj, f("n"));
    lex.insert(obj, f("n"));
    lex.insert(verb, f("(n\\s)/n"));
    lex.insert_copula(cop, f("(n\\s)/(n/n)"));
    lex.insert(adj, f("n/n"));
    match model {
        Model::M4 => {
            lex.insert(&entry.referent, f("!@n"));
            lex.insert(pron, f("@n\\n"));
        }
        _ => lex.insert(pron, f("n")),
    }
    Ok(lex)
}

fn proved(words: &[String], lex: &Lexicon, goal: Formula) -> Result<Diagram, DiagramError> {
    let seq: Sequent = type_discourse(words, lex, goal)
        .map_err(|e| DiagramError::ProofMismatch(e.to_string()))?;
    let tree = prove(&seq, lex.k0(), PROOF_DEPTH)
        .ok_or_else(|| DiagramError::ProofNotFound(seq.to_string()))?;
    proof_to_diagram(&tree, words, lex)
}

/// Builds the closed single-output diagram of `entry` under `model`.
pub fn build_model_diagram(
    entry: &DatasetEntry,
    model: Model,
    op: Combination,
    k0: usize,
) -> Result<Diagram, DiagramError> {
    match model {
        Model::M1 | Model::M2 => bag_of_words(entry, model == Model::M2, op),
        Model::M3 => {
            let lex = model_lexicon(entry, model, k0)?;
            let s1 = proved(&entry.s1_tokens, &lex, Formula::s())?;
            let s2 = proved(&entry.s2_tokens, &lex, Formula::s())?;
            let s2 = normalize(&rewrite_copula(&s2)?);
            combine_sentences(&normalize(&s1), &s2, op)
        }
        Model::M4 => {
            let lex = model_lexicon(entry, model, k0)?;
            let words: Vec<String> = entry.s1_tokens.iter().chain(&entry.s2_tokens).cloned().collect();
            let d = proved(&words, &lex, discourse_goal(2))?;
            let d = rewrite_coreference(&d)?;
            let d = rewrite_copula(&d)?;
            let d = fock_shorthand(&d)?;
            merge_sentences(&normalize(&d), op)
        }
    }
}

fn word_state(b: &mut Builder, word: &str) -> Handle {
    b.add(BoxKind::WordState {
        word: word.to_string(),
        outputs: vec![WireType::S],
        kind: WordKind::Content,
    })
    .1[0]
}

fn spider_chain(b: &mut Builder, wires: &[Handle]) -> Result<Handle, DiagramError> {
    let mut acc = wires[0];
    for &w in &wires[1..] {
        acc = b.apply(
            BoxKind::Spider {
                base: Base::S,
                inputs: 2,
                outputs: 1,
            },
            &[acc, w],
        )?[0];
    }
    Ok(acc)
}

fn bag_of_words(entry: &DatasetEntry, link: bool, op: Combination) -> Result<Diagram, DiagramError> {
    let [w1, w2] = entry.surface_words();
    let mut b = Builder::default();
    // position of the referent among sentence-one words
    let referent_at = if entry.label == 0 { 1 } else { 4 };
    let mut shared = None;
    let mut first = Vec::new();
    for (i, w) in w1.iter().enumerate() {
        if link && i == referent_at {
            let outs = b
                .add(BoxKind::OrderNState {
                    word: w.clone(),
                    base: Base::S,
                    n: 2,
                })
                .1;
            first.push(outs[0]);
            shared = Some(outs[1]);
        } else {
            first.push(word_state(&mut b, w));
        }
    }
    let mut second = Vec::new();
    for (i, w) in w2.iter().enumerate() {
        match shared {
            Some(r) if i == 0 => {
                let cap = b.add(BoxKind::Cap(Base::S)).1;
                b.cup(r, cap[0])?;
                second.push(cap[1]);
            }
            _ => second.push(word_state(&mut b, w)),
        }
    }
    let s1 = spider_chain(&mut b, &first)?;
    let s2 = spider_chain(&mut b, &second)?;
    let d = b.finish(&[s1, s2]);
    merge_sentences(&normalize(&d), op)
}
