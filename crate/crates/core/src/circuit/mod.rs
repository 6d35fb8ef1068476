//! Diagram-to-circuit compilation.
//!
//! Each plain wire becomes `qubits_per_n` or `qubits_per_s` qubits. Word
//! states are prepared by an Euler rotation triple (one qubit) or an IQP
//! layer stack (several qubits), caps by Bell preparation, cups by Bell
//! post-selection, spiders by a CNOT with one leg post-selected.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Base, BoxKind, Diagram, Source, Target, WireType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub qubits_per_n: usize,
    pub qubits_per_s: usize,
    pub iqp_layers: usize,
    pub single_qubit_rotations: usize,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self {
            qubits_per_n: 1,
            qubits_per_s: 1,
            iqp_layers: 1,
            single_qubit_rotations: 3,
        }
    }
}

impl AnsatzConfig {
    pub fn qubits(&self, base: Base) -> usize {
        match base {
            Base::N => self.qubits_per_n,
            Base::S => self.qubits_per_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("ansatz sizes must be positive")]
    BadConfig,
    #[error("diagram is not normalized: {0}")]
    NotNormalized(String),
    #[error("Fock wire present")]
    FockWire,
    #[error("diagram has boundary inputs")]
    OpenInputs,
    #[error("unsupported box {0}")]
    Unsupported(String),
    #[error("no angle for slot '{0}'")]
    MissingSlot(String),
    #[error("qubit {qubit} out of range for {count} qubits")]
    QubitRange { qubit: usize, count: usize },
    #[error("malformed diagram: {0}")]
    Invalid(String),
}

/// Angle of a rotation: a circuit-local slot index or a literal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Slot(usize),
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate<A = Param> {
    H(usize),
    Cnot(usize, usize),
    Rx(usize, A),
    Ry(usize, A),
    Rz(usize, A),
    /// Control, target, angle.
    Crz(usize, usize, A),
    PrepZero(usize),
    PostSelectZero(usize),
}

impl<A: Copy> Gate<A> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::Rx(q, _)
            | Gate::Ry(q, _)
            | Gate::Rz(q, _)
            | Gate::PrepZero(q)
            | Gate::PostSelectZero(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Crz(a, b, _) => vec![a, b],
        }
    }

    fn map_angle<B, E>(&self, mut f: impl FnMut(A) -> Result<B, E>) -> Result<Gate<B>, E> {
        Ok(match *self {
            Gate::H(q) => Gate::H(q),
            Gate::Cnot(a, b) => Gate::Cnot(a, b),
            Gate::Rx(q, a) => Gate::Rx(q, f(a)?),
            Gate::Ry(q, a) => Gate::Ry(q, f(a)?),
            Gate::Rz(q, a) => Gate::Rz(q, f(a)?),
            Gate::Crz(c, t, a) => Gate::Crz(c, t, f(a)?),
            Gate::PrepZero(q) => Gate::PrepZero(q),
            Gate::PostSelectZero(q) => Gate::PostSelectZero(q),
        })
    }
}

/// A gate list over `qubit_count` qubits; `A` is [`Param`] before binding
/// and `f64` after.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit<A = Param> {
    pub qubit_count: usize,
    pub gates: Vec<Gate<A>>,
    /// Slot names; `Param::Slot(i)` refers to `slots[i]`.
    pub slots: Vec<String>,
    pub open_outputs: Vec<usize>,
}

pub type ParameterizedCircuit = Circuit<Param>;
pub type BoundCircuit = Circuit<f64>;

impl<A: Copy> Circuit<A> {
    pub fn post_selected(&self) -> BTreeSet<usize> {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::PostSelectZero(q) => Some(*q),
                _ => None,
            })
            .collect()
    }

    pub fn check_qubits(&self) -> Result<(), CircuitError> {
        for g in &self.gates {
            for q in g.qubits() {
                if q >= self.qubit_count {
                    return Err(CircuitError::QubitRange {
                        qubit: q,
                        count: self.qubit_count,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Slot name to angle.
pub type ParameterSet = BTreeMap<String, f64>;

impl ParameterizedCircuit {
    /// Substitutes every slot by its angle in `theta`.
    pub fn bind(&self, theta: &ParameterSet) -> Result<BoundCircuit, CircuitError> {
        let values = self
            .slots
            .iter()
            .map(|s| theta.get(s).copied().ok_or_else(|| CircuitError::MissingSlot(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        self.bind_local(&values)
    }

    /// Binds with angles listed in `slots` order.
    pub fn bind_local(&self, values: &[f64]) -> Result<BoundCircuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                g.map_angle(|p| match p {
                    Param::Value(v) => Ok(v),
                    Param::Slot(i) => values
                        .get(i)
                        .copied()
                        .ok_or_else(|| CircuitError::MissingSlot(format!("#{i}"))),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Circuit {
            qubit_count: self.qubit_count,
            gates,
            slots: Vec::new(),
            open_outputs: self.open_outputs.clone(),
        })
    }
}

pub fn bind(c: &ParameterizedCircuit, theta: &ParameterSet) -> Result<BoundCircuit, CircuitError> {
    c.bind(theta)
}

/// Global slot order shared by a family of circuits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTable {
    pub names: Vec<String>,
}

impl SlotTable {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self) -> HashMap<&str, usize> {
        self.names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
    }

    /// For each local slot of `c`, its global index.
    pub fn locate(&self, c: &ParameterizedCircuit) -> Result<Vec<usize>, CircuitError> {
        let idx = self.index();
        c.slots
            .iter()
            .map(|s| idx.get(s.as_str()).copied().ok_or_else(|| CircuitError::MissingSlot(s.clone())))
            .collect()
    }

    pub fn parameter_set(&self, values: &[f64]) -> ParameterSet {
        self.names.iter().cloned().zip(values.iter().copied()).collect()
    }
}

/// Sorted union of the slots of `circuits`. Slot names are word-scoped, so
/// the same word in the same role maps to the same entry.
pub fn slot_table<'a>(circuits: impl IntoIterator<Item = &'a ParameterizedCircuit>) -> SlotTable {
    let names: BTreeSet<&str> = circuits
        .into_iter()
        .flat_map(|c| c.slots.iter().map(String::as_str))
        .collect();
    SlotTable {
        names: names.into_iter().map(str::to_string).collect(),
    }
}

/// Wire signature used to scope word slots, such as `NSN`.
pub fn signature(wires: &[WireType]) -> String {
    wires
        .iter()
        .map(|w| match w.base {
            Base::N => 'N',
            Base::S => 'S',
        })
        .collect()
}

struct Compiler {
    cfg: AnsatzConfig,
    qubits: usize,
    gates: Vec<Gate>,
    slots: Vec<String>,
    slot_ids: HashMap<String, usize>,
}

impl Compiler {
    fn fresh(&mut self, n: usize) -> Vec<usize> {
        let out: Vec<usize> = (self.qubits..self.qubits + n).collect();
        self.qubits += n;
        for &q in &out {
            self.gates.push(Gate::PrepZero(q));
        }
        out
    }

    fn slot(&mut self, name: String) -> Param {
        let next = self.slots.len();
        let id = *self.slot_ids.entry(name.clone()).or_insert_with(|| {
            self.slots.push(name);
            next
        });
        Param::Slot(id)
    }

    fn word_state(&mut self, word: &str, wires: &[WireType]) -> Vec<Vec<usize>> {
        let widths: Vec<usize> = wires.iter().map(|w| self.cfg.qubits(w.base)).collect();
        let qs = self.fresh(widths.iter().sum());
        let prefix = format!("{}_{}", word.to_lowercase().replace(' ', "_"), signature(wires));
        if qs.len() == 1 {
            for k in 0..self.cfg.single_qubit_rotations {
                let p = self.slot(format!("{prefix}_{k}"));
                self.gates.push(if k % 2 == 0 {
                    Gate::Rx(qs[0], p)
                } else {
                    Gate::Rz(qs[0], p)
                });
            }
        } else {
            for &q in &qs {
                self.gates.push(Gate::H(q));
            }
            let mut k = 0;
            for _ in 0..self.cfg.iqp_layers {
                for pair in qs.windows(2) {
                    let p = self.slot(format!("{prefix}_{k}"));
                    self.gates.push(Gate::Crz(pair[0], pair[1], p));
                    k += 1;
                }
            }
        }
        let mut out = Vec::new();
        let mut at = 0;
        for w in widths {
            out.push(qs[at..at + w].to_vec());
            at += w;
        }
        out
    }
}

/// Compiles a closed, Fock-free diagram.
pub fn compile(d: &Diagram, cfg: &AnsatzConfig) -> Result<ParameterizedCircuit, CircuitError> {
    if cfg.qubits_per_n == 0 || cfg.qubits_per_s == 0 || cfg.iqp_layers == 0 {
        return Err(CircuitError::BadConfig);
    }
    if !d.inputs.is_empty() {
        return Err(CircuitError::OpenInputs);
    }
    if d.fock_wire_count() > 0 || d.outputs.iter().any(|w| w.fock) {
        return Err(CircuitError::FockWire);
    }
    let order = d
        .topological_order()
        .map_err(|e| CircuitError::Invalid(e.to_string()))?;
    let mut c = Compiler {
        cfg: *cfg,
        qubits: 0,
        gates: Vec::new(),
        slots: Vec::new(),
        slot_ids: HashMap::new(),
    };
    // qubits carried by each box output port
    let mut carried: HashMap<Source, Vec<usize>> = HashMap::new();
    let input_of = |node: usize, port: usize| -> Result<Source, CircuitError> {
        d.wire_to(Target::Port { node, port })
            .map(|w| w.source)
            .ok_or_else(|| CircuitError::Invalid(format!("box {node} port {port} unconnected")))
    };
    for node in order {
        let kind = &d.boxes[node];
        let mut ins = Vec::new();
        for port in 0..kind.inputs().len() {
            let src = input_of(node, port)?;
            ins.push(
                carried
                    .remove(&src)
                    .ok_or_else(|| CircuitError::Invalid(format!("unknown source {src:?}")))?,
            );
        }
        let outs: Vec<Vec<usize>> = match kind {
            BoxKind::WordState { word, outputs, .. } => c.word_state(word, outputs),
            BoxKind::OrderNState { word, base, n } => {
                c.word_state(word, &vec![WireType::plain(*base); *n])
            }
            BoxKind::Cap(base) => {
                let w = cfg.qubits(*base);
                let qs = c.fresh(2 * w);
                let (a, b) = qs.split_at(w);
                for i in 0..w {
                    c.gates.push(Gate::H(a[i]));
                    c.gates.push(Gate::Cnot(a[i], b[i]));
                }
                vec![a.to_vec(), b.to_vec()]
            }
            BoxKind::Cup(_) => {
                for (&a, &b) in ins[0].iter().zip(&ins[1]) {
                    c.gates.push(Gate::Cnot(a, b));
                    c.gates.push(Gate::H(a));
                    c.gates.push(Gate::PostSelectZero(a));
                    c.gates.push(Gate::PostSelectZero(b));
                }
                vec![]
            }
            BoxKind::Swap(..) => vec![ins[1].clone(), ins[0].clone()],
            BoxKind::Retype { .. } => {
                if ins[0].len() != cfg.qubits(kind.outputs()[0].base) {
                    return Err(CircuitError::Unsupported(
                        "retyping between wires of different width".into(),
                    ));
                }
                vec![ins[0].clone()]
            }
            BoxKind::Spider { outputs: 1, .. } => {
                let keep = ins[0].clone();
                for other in &ins[1..] {
                    for (&a, &b) in keep.iter().zip(other) {
                        c.gates.push(Gate::Cnot(a, b));
                        c.gates.push(Gate::PostSelectZero(b));
                    }
                }
                vec![keep]
            }
            BoxKind::CombineRz { slot } => {
                let p = c.slot(slot.clone());
                // the first sentence controls the rotation and is then
                // measured out in the X basis
                for (&a, &b) in ins[0].iter().zip(&ins[1]) {
                    c.gates.push(Gate::Crz(a, b, p));
                    c.gates.push(Gate::H(a));
                    c.gates.push(Gate::PostSelectZero(a));
                }
                vec![ins[1].clone()]
            }
            BoxKind::FockElement { .. } | BoxKind::Projection { .. } => {
                return Err(CircuitError::NotNormalized(format!("{kind:?} left in diagram")))
            }
            BoxKind::Spider { .. } => return Err(CircuitError::Unsupported(format!("{kind:?}"))),
        };
        for (port, qs) in outs.into_iter().enumerate() {
            carried.insert(Source::Port { node, port }, qs);
        }
    }
    let mut open_outputs = Vec::new();
    for i in 0..d.outputs.len() {
        let w = d
            .wire_to(Target::Output(i))
            .ok_or_else(|| CircuitError::Invalid(format!("output {i} unconnected")))?;
        open_outputs.extend(
            carried
                .remove(&w.source)
                .ok_or_else(|| CircuitError::Invalid(format!("unknown source {:?}", w.source)))?,
        );
    }
    if !carried.is_empty() {
        return Err(CircuitError::Invalid("dangling box output".into()));
    }
    Ok(Circuit {
        qubit_count: c.qubits,
        gates: c.gates,
        slots: c.slots,
        open_outputs,
    })
}

impl<A: fmt::Display + Copy> fmt::Display for Gate<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H q{q}"),
            Gate::Cnot(a, b) => write!(f, "CNOT q{a} q{b}"),
            Gate::Rx(q, a) => write!(f, "Rx({a}) q{q}"),
            Gate::Ry(q, a) => write!(f, "Ry({a}) q{q}"),
            Gate::Rz(q, a) => write!(f, "Rz({a}) q{q}"),
            Gate::Crz(c, t, a) => write!(f, "CRz({a}) q{c} q{t}"),
            Gate::PrepZero(q) => write!(f, "|0> q{q}"),
            Gate::PostSelectZero(q) => write!(f, "<0| q{q}"),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Slot(i) => write!(f, "#{i}"),
            Param::Value(v) => write!(f, "{v}"),
        }
    }
}
