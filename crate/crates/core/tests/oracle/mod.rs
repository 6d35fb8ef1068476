//! Independent reference evaluators shared by the integration tests: a dense
//! Kronecker-product circuit simulator and a tensor-contraction evaluator for
//! diagrams, including Fock-space wires.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::BTreeMap;

use fockflow::circuit::{compile, AnsatzConfig, BoundCircuit, Gate, ParameterSet, ParameterizedCircuit};
use fockflow::diagram::{BoxKind, Diagram, Source, Target, Wire, WireType, WordKind};
use fockflow::qsim::simulate;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<C>>;

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { re(1.0) } else { re(0.0) }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![re(0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn apply(m: &Matrix, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `ops[q]` on each qubit, identity elsewhere; qubit 0 is the leftmost factor.
fn lift(n: usize, ops: &[(usize, Matrix)]) -> Matrix {
    let mut out = vec![vec![re(1.0)]];
    for q in 0..n {
        let f = ops
            .iter()
            .find(|(p, _)| *p == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| identity(2));
        out = kron(&out, &f);
    }
    out
}

fn m2(a: [[f64; 2]; 2]) -> Matrix {
    a.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect()
}

fn rot(axis: char, t: f64) -> Matrix {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    match axis {
        'x' => vec![vec![re(c), C::new(0.0, -s)], vec![C::new(0.0, -s), re(c)]],
        'y' => m2([[c, -s], [s, c]]),
        _ => vec![vec![C::new(c, -s), re(0.0)], vec![re(0.0), C::new(c, s)]],
    }
}

fn p0() -> Matrix {
    m2([[1.0, 0.0], [0.0, 0.0]])
}

fn p1() -> Matrix {
    m2([[0.0, 0.0], [0.0, 1.0]])
}

fn controlled(n: usize, c: usize, t: usize, u: Matrix) -> Matrix {
    add(&lift(n, &[(c, p0())]), &lift(n, &[(c, p1()), (t, u)]))
}

/// Full-matrix evolution of `|0...0>` through `circuit`.
pub fn dense_simulate(circuit: &BoundCircuit) -> Vec<C> {
    let n = circuit.qubit_count;
    let mut v = vec![re(0.0); 1 << n];
    v[0] = re(1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for g in &circuit.gates {
        let m = match *g {
            Gate::H(q) => lift(n, &[(q, m2([[h, h], [h, -h]]))]),
            Gate::Cnot(a, b) => controlled(n, a, b, m2([[0.0, 1.0], [1.0, 0.0]])),
            Gate::Rx(q, t) => lift(n, &[(q, rot('x', t))]),
            Gate::Ry(q, t) => lift(n, &[(q, rot('y', t))]),
            Gate::Rz(q, t) => lift(n, &[(q, rot('z', t))]),
            Gate::Crz(a, b, t) => controlled(n, a, b, rot('z', t)),
            Gate::PrepZero(_) => identity(1 << n),
            Gate::PostSelectZero(q) => lift(n, &[(q, p0())]),
        };
        v = apply(&m, &v);
    }
    v
}

/// Random bound circuit on at most `max_qubits` qubits with at most
/// `max_gates` gates, fresh-qubit preparations and post-selections.
pub fn random_circuit(rng: &mut ChaCha8Rng, max_qubits: usize, max_gates: usize) -> BoundCircuit {
    let n = rng.gen_range(1..=max_qubits);
    let count = rng.gen_range(1..=max_gates);
    let mut touched = vec![false; n];
    let mut gates = Vec::with_capacity(count);
    while gates.len() < count {
        let q = rng.gen_range(0..n);
        let t = rng.gen_range(-7.0..7.0);
        let other = (q + rng.gen_range(1..n.max(2))) % n;
        let g = match rng.gen_range(0..8) {
            0 => Gate::H(q),
            1 if n > 1 => Gate::Cnot(q, other),
            2 => Gate::Rx(q, t),
            3 => Gate::Ry(q, t),
            4 => Gate::Rz(q, t),
            5 if n > 1 => Gate::Crz(q, other, t),
            6 if !touched[q] => Gate::PrepZero(q),
            7 => Gate::PostSelectZero(q),
            _ => continue,
        };
        for p in g.qubits() {
            touched[p] = true;
        }
        gates.push(g);
    }
    BoundCircuit {
        qubit_count: n,
        gates,
        slots: vec![],
        open_outputs: (0..n).collect(),
    }
}

/// Angles drawn on first use, so every evaluator sees the same value for
/// a slot name.
pub struct Angles {
    values: RefCell<BTreeMap<String, f64>>,
    rng: RefCell<ChaCha8Rng>,
}

impl Angles {
    pub fn new(seed: u64) -> Self {
        Self {
            values: RefCell::new(BTreeMap::new()),
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        *self
            .values
            .borrow_mut()
            .entry(name.to_string())
            .or_insert_with(|| self.rng.borrow_mut().gen_range(0.0..std::f64::consts::TAU))
    }

    pub fn bind(&self, c: &ParameterizedCircuit) -> BoundCircuit {
        let set: ParameterSet = c.slots.iter().map(|s| (s.clone(), self.get(s))).collect();
        c.bind(&set).unwrap()
    }
}

/// Amplitudes of the open outputs, in output order, with every other qubit
/// post-selected to zero.
pub fn circuit_state(c: &ParameterizedCircuit, angles: &Angles) -> Vec<C> {
    let bound = angles.bind(c);
    let sv = simulate(&bound).unwrap();
    let n = bound.qubit_count;
    let k = bound.open_outputs.len();
    (0..1usize << k)
        .map(|idx| {
            let mut full = 0;
            for (pos, &q) in bound.open_outputs.iter().enumerate() {
                if idx >> (k - 1 - pos) & 1 == 1 {
                    full |= 1 << (n - 1 - q);
                }
            }
            sv.amplitudes[full]
        })
        .collect()
}

pub fn compiled_state(d: &Diagram, angles: &Angles) -> Vec<C> {
    circuit_state(&compile(d, &AnsatzConfig::default()).unwrap(), angles)
}

/// Dimension of a wire with storage bound `k0`: qubit wires are 2, Fock
/// wires sum the tensor powers up to order `k0`.
pub fn dim(w: WireType, k0: usize) -> usize {
    if w.fock {
        (0..=k0).map(|j| 1 << j).sum()
    } else {
        2
    }
}

/// State of a lone parameterized word as the ansatz prepares it.
fn word_vector(kind: BoxKind, angles: &Angles) -> Vec<C> {
    let outputs = kind.outputs();
    let d = Diagram {
        inputs: vec![],
        wires: (0..outputs.len())
            .map(|p| Wire {
                source: Source::Port { node: 0, port: p },
                target: Target::Output(p),
            })
            .collect(),
        outputs,
        boxes: vec![kind],
    };
    compiled_state(&d, angles)
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

fn index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// Box as a dense `out x in` matrix over its mixed-radix port indices.
fn box_matrix(kind: &BoxKind, k0: usize, angles: &Angles) -> Matrix {
    let ins: Vec<usize> = kind.inputs().iter().map(|w| dim(*w, k0)).collect();
    let outs: Vec<usize> = kind.outputs().iter().map(|w| dim(*w, k0)).collect();
    let (ni, no) = (ins.iter().product::<usize>(), outs.iter().product::<usize>());
    let mut m = vec![vec![re(0.0); ni]; no];
    let column = |v: Vec<C>| v.into_iter().map(|x| vec![x]).collect::<Matrix>();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        BoxKind::WordState { kind: WordKind::Pronoun, .. } | BoxKind::Cap(_) => {
            for x in 0..2 {
                m[x * 2 + x][0] = re(1.0);
            }
        }
        BoxKind::WordState { kind: WordKind::Copula, .. } => {
            // subject-dual = adjective argument, adjective result = sentence
            for o in 0..no {
                let w = digits(o, &outs);
                if w[0] == w[2] && w[3] == w[1] {
                    m[o][0] = re(1.0);
                }
            }
        }
        BoxKind::WordState { .. } | BoxKind::OrderNState { .. } => {
            return column(word_vector(kind.clone(), angles));
        }
        BoxKind::FockElement { word, base } => {
            let mut v = vec![re(1.0)];
            for n in 1..=k0 {
                v.extend(word_vector(
                    BoxKind::OrderNState {
                        word: word.clone(),
                        base: *base,
                        n,
                    },
                    angles,
                ));
            }
            return column(v);
        }
        BoxKind::Projection { n, .. } => {
            let offset = (1 << n) - 1;
            for x in 0..no {
                m[x][offset + x] = re(1.0);
            }
        }
        BoxKind::Cup(_) => {
            for x in 0..2 {
                m[0][x * 2 + x] = re(1.0);
            }
        }
        BoxKind::Swap(..) => {
            for i in 0..ni {
                let d = digits(i, &ins);
                m[index(&[d[1], d[0]], &outs)][i] = re(1.0);
            }
        }
        BoxKind::Spider { .. } => {
            for x in 0..2 {
                m[index(&vec![x; outs.len()], &outs)][index(&vec![x; ins.len()], &ins)] = re(1.0);
            }
        }
        BoxKind::Retype { .. } => return identity(2),
        BoxKind::CombineRz { slot } => {
            let t = angles.get(slot);
            let phase = [C::from_polar(1.0, -t / 2.0), C::from_polar(1.0, t / 2.0)];
            for b in 0..2 {
                m[b][b] = re(h);
                m[b][2 + b] = phase[b] * h;
            }
        }
    }
    m
}

/// Tensor over the currently open wires, identified by their sources.
struct Frontier {
    wires: Vec<Source>,
    dims: Vec<usize>,
    data: Vec<C>,
}

/// Contracts `d` box by box and returns its state over the outputs.
pub fn dense_state(d: &Diagram, k0: usize, angles: &Angles) -> Vec<C> {
    assert!(d.inputs.is_empty(), "closed diagrams only");
    let mut f = Frontier {
        wires: vec![],
        dims: vec![],
        data: vec![re(1.0)],
    };
    for node in d.topological_order().unwrap() {
        let kind = &d.boxes[node];
        let m = box_matrix(kind, k0, angles);
        let consumed: Vec<usize> = (0..kind.inputs().len())
            .map(|port| {
                let src = d.wire_to(Target::Port { node, port }).unwrap().source;
                f.wires.iter().position(|w| *w == src).unwrap()
            })
            .collect();
        let in_dims: Vec<usize> = consumed.iter().map(|&i| f.dims[i]).collect();
        let out_dims: Vec<usize> = kind.outputs().iter().map(|w| dim(*w, k0)).collect();
        let rest: Vec<usize> = (0..f.wires.len()).filter(|i| !consumed.contains(i)).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&i| f.dims[i]).collect();
        let no: usize = out_dims.iter().product();
        let mut data = vec![re(0.0); rest_dims.iter().product::<usize>() * no];
        for (idx, amp) in f.data.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let dg = digits(idx, &f.dims);
            let r = index(&rest.iter().map(|&i| dg[i]).collect::<Vec<_>>(), &rest_dims);
            let i = index(&consumed.iter().map(|&i| dg[i]).collect::<Vec<_>>(), &in_dims);
            for (o, row) in m.iter().enumerate() {
                data[r * no + o] += row[i] * amp;
            }
        }
        let mut wires: Vec<Source> = rest.iter().map(|&i| f.wires[i]).collect();
        wires.extend((0..out_dims.len()).map(|port| Source::Port { node, port }));
        let mut dims = rest_dims;
        dims.extend(out_dims);
        f = Frontier { wires, dims, data };
    }
    let order: Vec<usize> = (0..d.outputs.len())
        .map(|i| {
            let src = d.wire_to(Target::Output(i)).unwrap().source;
            f.wires.iter().position(|w| *w == src).unwrap()
        })
        .collect();
    let out_dims: Vec<usize> = order.iter().map(|&i| f.dims[i]).collect();
    let mut out = vec![re(0.0); f.data.len()];
    for (idx, amp) in f.data.iter().enumerate() {
        let dg = digits(idx, &f.dims);
        out[index(&order.iter().map(|&i| dg[i]).collect::<Vec<_>>(), &out_dims)] = *amp;
    }
    out
}

/// Largest elementwise gap between `a` and `b` after normalizing both and
/// removing the relative global phase; `None` if either vanishes.
pub fn phase_distance(a: &[C], b: &[C]) -> Option<f64> {
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if a.len() != b.len() || na < 1e-12 || nb < 1e-12 {
        return None;
    }
    let overlap: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { re(1.0) };
    Some(
        a.iter()
            .zip(b)
            .map(|(x, y)| (x / na * phase - y / nb).norm())
            .fold(0.0, f64::max),
    )
}
