//! Lambek calculus with soft subexponentials: formulas, sequents, proofs,
//! rule checking, and bounded backward search.

mod formula;
mod lexicon;
mod proof;
mod search;

pub use formula::{parse_formula, Atom, Formula, ParseError};
pub use lexicon::{discourse_goal, type_discourse, Lexicon, LexiconError, DEFAULT_K0};
pub use proof::{check_proof, ProofError, ProofTree, RuleTag, Sequent};
pub use search::prove;
