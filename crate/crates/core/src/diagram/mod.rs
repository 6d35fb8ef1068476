//! String-diagram IR.
//!
//! A [`Diagram`] is a port graph oriented top to bottom: states sit at the
//! top, boundary outputs at the bottom. Every wire runs from a *source* (a
//! boundary input or a box output port) to a *target* (a box input port or a
//! boundary output), so cups are boxes with two inputs and caps are boxes
//! with two outputs. Crossings are explicit [`BoxKind::Swap`] boxes until
//! [`normalize`] stretches them away.

mod from_proof;
mod models;
mod rewrite;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::Atom;

pub use from_proof::{formula_wires, proof_to_diagram};
pub use models::{build_model_diagram, model_lexicon, Combination, Model};
pub use rewrite::{
    combine_sentences, fock_shorthand, merge_sentences, normalize, rewrite_copula,
    rewrite_coreference,
};

/// Slot name of the learned sentence-combination rotation.
pub const COMBINE_SLOT: &str = "combine_rz";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    N,
    S,
}

impl From<Atom> for Base {
    fn from(a: Atom) -> Self {
        match a {
            Atom::N => Base::N,
            Atom::S => Base::S,
        }
    }
}

/// A plain wire carries `V`; a Fock wire carries the truncated Fock space
/// over `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WireType {
    pub base: Base,
    pub fock: bool,
}

impl WireType {
    pub const N: WireType = WireType::plain(Base::N);
    pub const S: WireType = WireType::plain(Base::S);

    pub const fn plain(base: Base) -> Self {
        Self { base, fock: false }
    }

    pub const fn fock(base: Base) -> Self {
        Self { base, fock: true }
    }
}

impl fmt::Display for WireType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.base {
            Base::N => "N",
            Base::S => "S",
        };
        if self.fock {
            write!(f, "T({b})")
        } else {
            f.write_str(b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordKind {
    Content,
    /// Typed `@n\n`; resolved by [`rewrite_coreference`].
    Pronoun,
    /// Flagged copula; removed by [`rewrite_copula`].
    Copula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxKind {
    WordState {
        word: String,
        outputs: Vec<WireType>,
        kind: WordKind,
    },
    Cup(Base),
    Cap(Base),
    /// Crossing: inputs `(a, b)`, outputs `(b, a)`.
    Swap(WireType, WireType),
    /// Projection of a Fock wire onto its `n`-th tensor layer.
    Projection { base: Base, n: usize },
    FockElement { word: String, base: Base },
    Spider {
        base: Base,
        inputs: usize,
        outputs: usize,
    },
    /// Two sentence wires merged by a learned controlled rotation.
    CombineRz { slot: String },
    /// Shorthand for a Fock element followed by its `n`-th projection.
    OrderNState { word: String, base: Base, n: usize },
    /// Identity between equal-dimension spaces of different base type.
    Retype { from: Base, to: Base },
}

impl BoxKind {
    pub fn inputs(&self) -> Vec<WireType> {
        match self {
            BoxKind::WordState { .. }
            | BoxKind::Cap(_)
            | BoxKind::FockElement { .. }
            | BoxKind::OrderNState { .. } => Vec::new(),
            BoxKind::Cup(b) => vec![WireType::plain(*b); 2],
            BoxKind::Swap(a, b) => vec![*a, *b],
            BoxKind::Projection { base, .. } => vec![WireType::fock(*base)],
            BoxKind::Spider { base, inputs, .. } => vec![WireType::plain(*base); *inputs],
            BoxKind::CombineRz { .. } => vec![WireType::S; 2],
            BoxKind::Retype { from, .. } => vec![WireType::plain(*from)],
        }
    }

    pub fn outputs(&self) -> Vec<WireType> {
        match self {
            BoxKind::WordState { outputs, .. } => outputs.clone(),
            BoxKind::Cup(_) => Vec::new(),
            BoxKind::Cap(b) => vec![WireType::plain(*b); 2],
            BoxKind::Swap(a, b) => vec![*b, *a],
            BoxKind::Projection { base, n } | BoxKind::OrderNState { base, n, .. } => {
                vec![WireType::plain(*base); *n]
            }
            BoxKind::FockElement { base, .. } => vec![WireType::fock(*base)],
            BoxKind::Spider { base, outputs, .. } => vec![WireType::plain(*base); *outputs],
            BoxKind::CombineRz { .. } => vec![WireType::S],
            BoxKind::Retype { to, .. } => vec![WireType::plain(*to)],
        }
    }

    pub fn word(&self) -> Option<&str> {
        match self {
            BoxKind::WordState { word, .. }
            | BoxKind::FockElement { word, .. }
            | BoxKind::OrderNState { word, .. } => Some(word),
            _ => None,
        }
    }

    pub fn is_state(&self) -> bool {
        self.inputs().is_empty() && !self.outputs().is_empty()
    }

    /// Parameter identifiers carried by the box itself; word-state slots are
    /// assigned by the circuit ansatz.
    pub fn slots(&self) -> Vec<&str> {
        match self {
            BoxKind::CombineRz { slot } => vec![slot.as_str()],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Input(usize),
    Port { node: usize, port: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Output(usize),
    Port { node: usize, port: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub source: Source,
    pub target: Target,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub inputs: Vec<WireType>,
    pub outputs: Vec<WireType>,
    pub boxes: Vec<BoxKind>,
    pub wires: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("proof does not match the lexicon: {0}")]
    ProofMismatch(String),
    #[error("unsupported construction: {0}")]
    Unsupported(String),
    #[error("no pronoun box to resolve")]
    NoPronoun,
    #[error("Fock element '{0}' is not followed by exactly one projection")]
    MissingProjection(String),
    #[error("expected {expected} sentence output(s), found {found}")]
    BoundaryArity { expected: usize, found: usize },
    #[error("no proof of '{0}'")]
    ProofNotFound(String),
    #[error("malformed diagram: {0}")]
    Invalid(String),
}

impl Diagram {
    pub fn source_type(&self, s: Source) -> Option<WireType> {
        match s {
            Source::Input(i) => self.inputs.get(i).copied(),
            Source::Port { node, port } => self.boxes.get(node)?.outputs().get(port).copied(),
        }
    }

    pub fn target_type(&self, t: Target) -> Option<WireType> {
        match t {
            Target::Output(i) => self.outputs.get(i).copied(),
            Target::Port { node, port } => self.boxes.get(node)?.inputs().get(port).copied(),
        }
    }

    pub fn wire_from(&self, s: Source) -> Option<&Wire> {
        self.wires.iter().find(|w| w.source == s)
    }

    pub fn wire_to(&self, t: Target) -> Option<&Wire> {
        self.wires.iter().find(|w| w.target == t)
    }

    pub fn count_boxes(&self, pred: impl Fn(&BoxKind) -> bool) -> usize {
        self.boxes.iter().filter(|b| pred(b)).count()
    }

    pub fn fock_wire_count(&self) -> usize {
        self.wires
            .iter()
            .filter(|w| self.source_type(w.source).is_some_and(|t| t.fock))
            .count()
    }

    /// Side-by-side composition; `other`'s boundary wires follow `self`'s.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let box_offset = self.boxes.len();
        let (in_offset, out_offset) = (self.inputs.len(), self.outputs.len());
        let mut out = self.clone();
        out.inputs.extend_from_slice(&other.inputs);
        out.outputs.extend_from_slice(&other.outputs);
        out.boxes.extend(other.boxes.iter().cloned());
        out.wires.extend(other.wires.iter().map(|w| Wire {
            source: match w.source {
                Source::Input(i) => Source::Input(i + in_offset),
                Source::Port { node, port } => Source::Port {
                    node: node + box_offset,
                    port,
                },
            },
            target: match w.target {
                Target::Output(i) => Target::Output(i + out_offset),
                Target::Port { node, port } => Target::Port {
                    node: node + box_offset,
                    port,
                },
            },
        }));
        out
    }

    /// Box indices in dependency order (producers before consumers), lowest
    /// index first among ready boxes.
    pub fn topological_order(&self) -> Result<Vec<usize>, DiagramError> {
        let n = self.boxes.len();
        let mut indegree = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for w in &self.wires {
            if let (Source::Port { node: a, .. }, Target::Port { node: b, .. }) = (w.source, w.target)
            {
                indegree[b] += 1;
                succ[a].push(b);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        if order.len() != n {
            return Err(DiagramError::Invalid("cycle".into()));
        }
        Ok(order)
    }

    /// Checks port coverage, type consistency, and acyclicity.
    pub fn validate(&self) -> Result<(), DiagramError> {
        use std::collections::HashSet;
        let invalid = |m: String| Err(DiagramError::Invalid(m));
        let mut sources = HashSet::new();
        let mut targets = HashSet::new();
        for w in &self.wires {
            let (Some(st), Some(tt)) = (self.source_type(w.source), self.target_type(w.target))
            else {
                return invalid(format!("dangling wire {w:?}"));
            };
            if st != tt {
                return invalid(format!("type mismatch {st} -> {tt} on {w:?}"));
            }
            if !sources.insert(w.source) {
                return invalid(format!("source {:?} used twice", w.source));
            }
            if !targets.insert(w.target) {
                return invalid(format!("target {:?} used twice", w.target));
            }
        }
        let expected_sources = self.inputs.len()
            + self.boxes.iter().map(|b| b.outputs().len()).sum::<usize>();
        let expected_targets = self.outputs.len()
            + self.boxes.iter().map(|b| b.inputs().len()).sum::<usize>();
        if sources.len() != expected_sources || targets.len() != expected_targets {
            return invalid("unconnected port".into());
        }
        for b in &self.boxes {
            match b {
                BoxKind::Projection { n, .. } | BoxKind::OrderNState { n, .. } if *n == 0 => {
                    return invalid("zero-layer projection".into())
                }
                BoxKind::Spider { inputs, outputs, .. } if *inputs == 0 || *outputs == 0 => {
                    return invalid("spider without legs on one side".into())
                }
                _ => {}
            }
        }
        self.topological_order().map(|_| ())
    }
}

/// Incremental construction with open wire handles.
#[derive(Debug, Default)]
pub(crate) struct Builder {
    pub boxes: Vec<BoxKind>,
    pub wires: Vec<Wire>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Handle {
    pub source: Source,
    pub ty: WireType,
}

impl Builder {
    pub fn add(&mut self, kind: BoxKind) -> (usize, Vec<Handle>) {
        let node = self.boxes.len();
        let outs = kind
            .outputs()
            .into_iter()
            .enumerate()
            .map(|(port, ty)| Handle {
                source: Source::Port { node, port },
                ty,
            })
            .collect();
        self.boxes.push(kind);
        (node, outs)
    }

    /// Adds a box and feeds `inputs` into its input ports in order.
    pub fn apply(&mut self, kind: BoxKind, inputs: &[Handle]) -> Result<Vec<Handle>, DiagramError> {
        let expected = kind.inputs();
        if expected.len() != inputs.len() {
            return Err(DiagramError::Invalid(format!(
                "{kind:?} expects {} inputs, got {}",
                expected.len(),
                inputs.len()
            )));
        }
        for (h, ty) in inputs.iter().zip(&expected) {
            if h.ty != *ty {
                return Err(DiagramError::Unsupported(format!(
                    "cannot feed a {} wire into a {} port of {kind:?}",
                    h.ty, ty
                )));
            }
        }
        let (node, outs) = self.add(kind);
        for (port, h) in inputs.iter().enumerate() {
            self.wires.push(Wire {
                source: h.source,
                target: Target::Port { node, port },
            });
        }
        Ok(outs)
    }

    pub fn cup(&mut self, a: Handle, b: Handle) -> Result<(), DiagramError> {
        if a.ty != b.ty || a.ty.fock {
            return Err(DiagramError::Unsupported(format!("cup between {} and {}", a.ty, b.ty)));
        }
        self.apply(BoxKind::Cup(a.ty.base), &[a, b]).map(|_| ())
    }

    pub fn finish(mut self, outputs: &[Handle]) -> Diagram {
        for (i, h) in outputs.iter().enumerate() {
            self.wires.push(Wire {
                source: h.source,
                target: Target::Output(i),
            });
        }
        Diagram {
            inputs: Vec::new(),
            outputs: outputs.iter().map(|h| h.ty).collect(),
            boxes: self.boxes,
            wires: self.wires,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(w: &str, outs: Vec<WireType>) -> BoxKind {
        BoxKind::WordState {
            word: w.into(),
            outputs: outs,
            kind: WordKind::Content,
        }
    }

    #[test]
    fn builder_produces_valid_diagram() {
        let mut b = Builder::default();
        let (_, john) = b.add(word("john", vec![WireType::N]));
        let (_, sleeps) = b.add(word("sleeps", vec![WireType::N, WireType::S]));
        b.cup(john[0], sleeps[0]).unwrap();
        let d = b.finish(&[sleeps[1]]);
        d.validate().unwrap();
        assert_eq!(d.outputs, vec![WireType::S]);
        assert_eq!(d.topological_order().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn validation_catches_dangling_ports() {
        let mut b = Builder::default();
        b.add(word("john", vec![WireType::N]));
        let d = b.finish(&[]);
        assert!(d.validate().is_err());
    }

    #[test]
    fn builder_rejects_type_mismatch() {
        let mut b = Builder::default();
        let (_, n) = b.add(word("a", vec![WireType::N]));
        let (_, s) = b.add(word("b", vec![WireType::S]));
        assert!(b.cup(n[0], s[0]).is_err());
    }

    #[test]
    fn tensor_offsets_indices() {
        let mut b = Builder::default();
        let (_, s) = b.add(word("a", vec![WireType::S]));
        let d = b.finish(&[s[0]]);
        let t = d.tensor(&d);
        t.validate().unwrap();
        assert_eq!(t.outputs.len(), 2);
        assert_eq!(t.wires[1].target, Target::Output(1));
    }
}
