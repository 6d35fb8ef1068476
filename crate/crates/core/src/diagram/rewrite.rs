//! Diagram rewrites: pronoun and copula caps, the order-n shorthand for
//! projected Fock elements, yanking, and sentence combination.

use std::collections::HashSet;

use super::{
    Base, BoxKind, Combination, Diagram, DiagramError, Source, Target, Wire, WireType, WordKind,
    COMBINE_SLOT,
};

/// Mutable view with tombstoned boxes; [`Graph::finish`] compacts indices.
struct Graph {
    inputs: Vec<WireType>,
    outputs: Vec<WireType>,
    boxes: Vec<Option<BoxKind>>,
    wires: Vec<Wire>,
}

impl Graph {
    fn new(d: &Diagram) -> Self {
        Self {
            inputs: d.inputs.clone(),
            outputs: d.outputs.clone(),
            boxes: d.boxes.iter().cloned().map(Some).collect(),
            wires: d.wires.clone(),
        }
    }

    fn push(&mut self, kind: BoxKind) -> usize {
        self.boxes.push(Some(kind));
        self.boxes.len() - 1
    }

    fn out_wire(&self, node: usize, port: usize) -> Option<usize> {
        let s = Source::Port { node, port };
        self.wires.iter().position(|w| w.source == s)
    }

    fn in_wire(&self, node: usize, port: usize) -> Option<usize> {
        let t = Target::Port { node, port };
        self.wires.iter().position(|w| w.target == t)
    }

    /// Drops box `node` and every wire touching it, returning the outer
    /// endpoints: sources feeding its inputs and targets fed by its outputs.
    fn detach(&mut self, node: usize) -> (Vec<Source>, Vec<Target>) {
        let (ins, outs) = self.remove(node);
        (
            ins.into_iter().map(|s| s.expect("connected input")).collect(),
            outs.into_iter().map(|t| t.expect("connected output")).collect(),
        )
    }

    /// Like [`Graph::detach`] but tolerates ports already disconnected.
    fn remove(&mut self, node: usize) -> (Vec<Option<Source>>, Vec<Option<Target>>) {
        let kind = self.boxes[node].take().expect("live box");
        let mut ins = vec![None; kind.inputs().len()];
        let mut outs = vec![None; kind.outputs().len()];
        self.wires.retain(|w| {
            let mut keep = true;
            if let Target::Port { node: n, port } = w.target {
                if n == node {
                    ins[port] = Some(w.source);
                    keep = false;
                }
            }
            if let Source::Port { node: n, port } = w.source {
                if n == node {
                    outs[port] = Some(w.target);
                    keep = false;
                }
            }
            keep
        });
        (ins, outs)
    }

    fn connect(&mut self, source: Source, target: Target) {
        self.wires.push(Wire { source, target });
    }

    /// Whether box `to` is reachable from box `from` along wires.
    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if !seen.insert(n) {
                continue;
            }
            for w in &self.wires {
                if let (Source::Port { node: a, .. }, Target::Port { node: b, .. }) = (w.source, w.target)
                {
                    if a == n {
                        stack.push(b);
                    }
                }
            }
        }
        false
    }

    fn finish(self) -> Diagram {
        let mut remap = vec![usize::MAX; self.boxes.len()];
        let mut boxes = Vec::new();
        for (i, b) in self.boxes.into_iter().enumerate() {
            if let Some(b) = b {
                remap[i] = boxes.len();
                boxes.push(b);
            }
        }
        let mut wires: Vec<Wire> = self
            .wires
            .into_iter()
            .map(|w| Wire {
                source: match w.source {
                    Source::Port { node, port } => Source::Port {
                        node: remap[node],
                        port,
                    },
                    s => s,
                },
                target: match w.target {
                    Target::Port { node, port } => Target::Port {
                        node: remap[node],
                        port,
                    },
                    t => t,
                },
            })
            .collect();
        wires.sort_by_key(wire_key);
        Diagram {
            inputs: self.inputs,
            outputs: self.outputs,
            boxes,
            wires,
        }
    }
}

/// Canonical wire order: by target, boundary outputs last.
fn wire_key(w: &Wire) -> (usize, usize, usize) {
    match w.target {
        Target::Port { node, port } => (0, node, port),
        Target::Output(i) => (1, i, 0),
    }
}

/// Replaces every pronoun state by a cap, so the referent copy cupped with
/// the pronoun's argument flows straight to the pronoun's consumer.
pub fn rewrite_coreference(d: &Diagram) -> Result<Diagram, DiagramError> {
    let mut out = d.clone();
    let mut found = false;
    for b in &mut out.boxes {
        if let BoxKind::WordState {
            kind: WordKind::Pronoun,
            outputs,
            ..
        } = b
        {
            let base = outputs[0].base;
            if outputs.len() != 2 || outputs.iter().any(|t| *t != WireType::plain(base)) {
                return Err(DiagramError::Unsupported(format!(
                    "pronoun with wires {outputs:?}"
                )));
            }
            *b = BoxKind::Cap(base);
            found = true;
        }
    }
    if !found {
        return Err(DiagramError::NoPronoun);
    }
    Ok(out)
}

/// Removes copula states typed `(n\s)/(n/n)`. The subject is bridged to the
/// adjective's argument by one cap, and the adjective's result is carried
/// to the sentence wire by a second cap and a retyping identity.
pub fn rewrite_copula(d: &Diagram) -> Result<Diagram, DiagramError> {
    let copulas: Vec<usize> = d
        .boxes
        .iter()
        .enumerate()
        .filter(|(_, b)| matches!(b, BoxKind::WordState { kind: WordKind::Copula, .. }))
        .map(|(i, _)| i)
        .collect();
    if copulas.is_empty() {
        return Ok(d.clone());
    }
    let mut g = Graph::new(d);
    for c in copulas {
        let Some(BoxKind::WordState { outputs, word, .. }) = &g.boxes[c] else {
            unreachable!()
        };
        let expected = [WireType::N, WireType::S, WireType::N, WireType::N];
        if outputs.as_slice() != expected {
            return Err(DiagramError::Unsupported(format!(
                "copula '{word}' with wires {outputs:?}"
            )));
        }
        let (_, targets) = g.detach(c);
        g.boxes[c] = Some(BoxKind::Cap(Base::N));
        g.connect(Source::Port { node: c, port: 0 }, targets[0]);
        g.connect(Source::Port { node: c, port: 1 }, targets[2]);
        let cap = g.push(BoxKind::Cap(Base::N));
        let retype = g.push(BoxKind::Retype {
            from: Base::N,
            to: Base::S,
        });
        g.connect(Source::Port { node: cap, port: 0 }, targets[3]);
        g.connect(
            Source::Port { node: cap, port: 1 },
            Target::Port {
                node: retype,
                port: 0,
            },
        );
        g.connect(
            Source::Port {
                node: retype,
                port: 0,
            },
            targets[1],
        );
    }
    Ok(g.finish())
}

/// Collapses each Fock element and its projection onto layer `n` into an
/// order-`n` state.
pub fn fock_shorthand(d: &Diagram) -> Result<Diagram, DiagramError> {
    let mut g = Graph::new(d);
    for i in 0..g.boxes.len() {
        let Some(BoxKind::FockElement { word, base }) = g.boxes[i].clone() else {
            continue;
        };
        let projection = g.out_wire(i, 0).and_then(|w| match g.wires[w].target {
            Target::Port { node, .. } => match &g.boxes[node] {
                Some(BoxKind::Projection { n, .. }) => Some((node, *n)),
                _ => None,
            },
            Target::Output(_) => None,
        });
        let Some((p, n)) = projection else {
            return Err(DiagramError::MissingProjection(word));
        };
        g.remove(i);
        let (_, targets) = g.remove(p);
        g.boxes[i] = Some(BoxKind::OrderNState { word, base, n });
        for (port, t) in targets.into_iter().enumerate() {
            g.connect(Source::Port { node: i, port }, t.expect("projection output connected"));
        }
    }
    let out = g.finish();
    debug_assert_eq!(out.fock_wire_count(), 0);
    Ok(out)
}

/// Yanks every cap leg that runs straight into a cup, removes swaps,
/// one-legged spiders and trivial retypings, and repeats until nothing
/// changes. A yank that would close a directed cycle is skipped.
pub fn normalize(d: &Diagram) -> Diagram {
    let mut g = Graph::new(d);
    loop {
        let mut changed = false;
        for i in 0..g.boxes.len() {
            let kind = match &g.boxes[i] {
                Some(k) => k.clone(),
                None => continue,
            };
            match kind {
                BoxKind::Swap(..) => {
                    let (ins, outs) = g.detach(i);
                    g.connect(ins[1], outs[0]);
                    g.connect(ins[0], outs[1]);
                    changed = true;
                }
                BoxKind::Spider {
                    inputs: 1,
                    outputs: 1,
                    ..
                } => {
                    let (ins, outs) = g.detach(i);
                    g.connect(ins[0], outs[0]);
                    changed = true;
                }
                BoxKind::Retype { from, to } if from == to => {
                    let (ins, outs) = g.detach(i);
                    g.connect(ins[0], outs[0]);
                    changed = true;
                }
                BoxKind::Cap(_) => {
                    if yank(&mut g, i) {
                        changed = true;
                    }
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    g.finish()
}

fn yank(g: &mut Graph, cap: usize) -> bool {
    for leg in 0..2 {
        let Some(w) = g.out_wire(cap, leg) else {
            continue;
        };
        let Target::Port { node: cup, port } = g.wires[w].target else {
            continue;
        };
        if !matches!(g.boxes[cup], Some(BoxKind::Cup(_))) {
            continue;
        }
        let other_in = g.in_wire(cup, 1 - port).map(|w| g.wires[w].source);
        let other_out = g.out_wire(cap, 1 - leg).map(|w| g.wires[w].target);
        let (Some(src), Some(dst)) = (other_in, other_out) else {
            continue;
        };
        if src == (Source::Port { node: cap, port: 1 - leg }) {
            // closed loop: a scalar
            g.remove(cap);
            g.remove(cup);
            return true;
        }
        if let (Source::Port { node: a, .. }, Target::Port { node: b, .. }) = (src, dst) {
            if g.reaches(b, a) {
                continue;
            }
        }
        g.remove(cap);
        g.remove(cup);
        g.connect(src, dst);
        return true;
    }
    false
}

/// Merges the two sentence outputs of `d` into one.
pub fn merge_sentences(d: &Diagram, op: Combination) -> Result<Diagram, DiagramError> {
    if d.outputs != [WireType::S, WireType::S] {
        return Err(DiagramError::BoundaryArity {
            expected: 2,
            found: d.outputs.len(),
        });
    }
    let mut g = Graph::new(d);
    let mut srcs = [None, None];
    g.wires.retain(|w| match w.target {
        Target::Output(i) => {
            srcs[i] = Some(w.source);
            false
        }
        _ => true,
    });
    let kind = match op {
        Combination::Frobenius => BoxKind::Spider {
            base: Base::S,
            inputs: 2,
            outputs: 1,
        },
        Combination::Rz => BoxKind::CombineRz {
            slot: COMBINE_SLOT.to_string(),
        },
    };
    let node = g.push(kind);
    for (port, s) in srcs.into_iter().enumerate() {
        g.connect(s.expect("output connected"), Target::Port { node, port });
    }
    g.connect(Source::Port { node, port: 0 }, Target::Output(0));
    g.outputs = vec![WireType::S];
    Ok(g.finish())
}

/// Places two single-sentence diagrams side by side and merges their
/// sentence wires.
pub fn combine_sentences(
    d1: &Diagram,
    d2: &Diagram,
    op: Combination,
) -> Result<Diagram, DiagramError> {
    for d in [d1, d2] {
        if d.outputs != [WireType::S] {
            return Err(DiagramError::BoundaryArity {
                expected: 1,
                found: d.outputs.len(),
            });
        }
    }
    merge_sentences(&d1.tensor(d2), op)
}
