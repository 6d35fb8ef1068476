//! Interpretation of proofs as diagrams.
//!
//! Formulas become wire lists: `A.B` places `A`'s wires before `B`'s, the
//! divisor of `A\B` and `B/A` contributes its wires in reverse order (the
//! dual space) so that evaluation is a nest of cups, `@A` is transparent,
//! and `!A` is a single Fock wire. Proof rules then act on open wires:
//! division-left rules evaluate with cups, division-right rules curry with
//! caps, storage-left projects, permutations cross wires with swaps.

use super::{BoxKind, Builder, Diagram, DiagramError, Handle, WireType, WordKind};
use crate::logic::{Formula, Lexicon, ProofTree, RuleTag};

/// Wires carried by `f`, left to right.
pub fn formula_wires(f: &Formula) -> Result<Vec<WireType>, DiagramError> {
    Ok(match f {
        Formula::Atom(a) => vec![WireType::plain((*a).into())],
        Formula::Product(a, b) => {
            let mut w = formula_wires(a)?;
            w.extend(formula_wires(b)?);
            w
        }
        Formula::LeftDiv(d, r) => {
            let mut w: Vec<_> = formula_wires(d)?.into_iter().rev().collect();
            w.extend(formula_wires(r)?);
            w
        }
        Formula::RightDiv(r, d) => {
            let mut w = formula_wires(r)?;
            w.extend(formula_wires(d)?.into_iter().rev());
            w
        }
        Formula::Nabla(a) => formula_wires(a)?,
        Formula::Bang(a) => vec![WireType::fock(stored_base(a)?)],
    })
}

/// Storage is only supported over (permutable) atoms.
fn stored_base(inner: &Formula) -> Result<super::Base, DiagramError> {
    match inner {
        Formula::Atom(a) => Ok((*a).into()),
        Formula::Nabla(a) => stored_base(a),
        other => Err(DiagramError::Unsupported(format!(
            "storage over non-atomic formula {other}"
        ))),
    }
}

fn is_pronoun_type(f: &Formula) -> bool {
    matches!(f, Formula::LeftDiv(d, r) if matches!(&**d, Formula::Nabla(inner) if **inner == **r))
}

fn width(f: &Formula) -> Result<usize, DiagramError> {
    Ok(formula_wires(f)?.len())
}

/// Builds the diagram of `tree` with one state per word plugged into its
/// antecedent. `words[i]` owns antecedent formula `i`; the lexicon must
/// assign it exactly that formula.
pub fn proof_to_diagram<S: AsRef<str>>(
    tree: &ProofTree,
    words: &[S],
    lexicon: &Lexicon,
) -> Result<Diagram, DiagramError> {
    let ant = &tree.conclusion.antecedent;
    if words.len() != ant.len() {
        return Err(DiagramError::ProofMismatch(format!(
            "{} words for {} antecedent formulas",
            words.len(),
            ant.len()
        )));
    }
    let mut b = Builder::default();
    let mut inputs = Vec::new();
    for (w, f) in words.iter().zip(ant) {
        let w = w.as_ref();
        match lexicon.get(w) {
            Some(typed) if typed == f => {}
            Some(typed) => {
                return Err(DiagramError::ProofMismatch(format!(
                    "'{w}' is typed {typed} but the proof uses {f}"
                )))
            }
            None => return Err(DiagramError::ProofMismatch(format!("'{w}' not in lexicon"))),
        }
        let word = w.to_lowercase();
        let kind = match f {
            Formula::Bang(inner) => BoxKind::FockElement {
                word,
                base: stored_base(inner)?,
            },
            _ => BoxKind::WordState {
                word,
                outputs: formula_wires(f)?,
                kind: if lexicon.is_copula(w) {
                    WordKind::Copula
                } else if is_pronoun_type(f) {
                    WordKind::Pronoun
                } else {
                    WordKind::Content
                },
            },
        };
        inputs.extend(b.add(kind).1);
    }
    let outputs = interpret(&mut b, tree, inputs)?;
    let d = b.finish(&outputs);
    d.validate()?;
    Ok(d)
}

/// Splits `handles` according to the wire widths of `formulas`.
fn split_by(handles: &[Handle], formulas: &[Formula]) -> Result<Vec<Vec<Handle>>, DiagramError> {
    let mut out = Vec::with_capacity(formulas.len());
    let mut at = 0;
    for f in formulas {
        let w = width(f)?;
        let part = handles.get(at..at + w).ok_or_else(|| {
            DiagramError::ProofMismatch("antecedent wider than available wires".into())
        })?;
        out.push(part.to_vec());
        at += w;
    }
    if at != handles.len() {
        return Err(DiagramError::ProofMismatch("wire count mismatch".into()));
    }
    Ok(out)
}

fn concat(parts: &[Vec<Handle>]) -> Vec<Handle> {
    parts.iter().flatten().copied().collect()
}

fn swap_adjacent(b: &mut Builder, seq: &mut [Handle], at: usize) -> Result<(), DiagramError> {
    let (l, r) = (seq[at], seq[at + 1]);
    let outs = b.apply(BoxKind::Swap(l.ty, r.ty), &[l, r])?;
    seq[at] = outs[0];
    seq[at + 1] = outs[1];
    Ok(())
}

/// `inputs` carries the wires of `tree`'s antecedent; returns the wires of
/// its succedent.
fn interpret(b: &mut Builder, tree: &ProofTree, inputs: Vec<Handle>) -> Result<Vec<Handle>, DiagramError> {
    let ant = &tree.conclusion.antecedent;
    let parts = split_by(&inputs, ant)?;
    let principal = || {
        tree.principal
            .filter(|&j| j < ant.len())
            .ok_or_else(|| DiagramError::ProofMismatch(format!("{} without principal", tree.rule)))
    };
    match tree.rule {
        RuleTag::Axiom | RuleTag::NablaL | RuleTag::NablaR | RuleTag::ProdL => {
            match tree.premises.first() {
                Some(p) => interpret(b, p, inputs),
                None => Ok(inputs),
            }
        }
        RuleTag::LDivL | RuleTag::RDivL => {
            let j = principal()?;
            let (arg, rest) = (&tree.premises[0], &tree.premises[1]);
            let g = arg.conclusion.antecedent.len();
            let left_div = tree.rule == RuleTag::LDivL;
            let arg_range = if left_div { j - g..j } else { j + 1..j + 1 + g };
            let arg_out = interpret(b, arg, concat(&parts[arg_range.clone()]))?;
            let k = arg_out.len();
            let div = &parts[j];
            let (dual, result) = if left_div {
                (&div[..k], &div[k..])
            } else {
                (&div[div.len() - k..], &div[..div.len() - k])
            };
            for (i, h) in arg_out.iter().enumerate() {
                b.cup(*h, dual[k - 1 - i])?;
            }
            let (lo, hi) = if left_div { (j - g, j + 1) } else { (j, j + 1 + g) };
            let mut next = concat(&parts[..lo]);
            next.extend_from_slice(result);
            next.extend(concat(&parts[hi..]));
            interpret(b, rest, next)
        }
        RuleTag::LDivR | RuleTag::RDivR => {
            let p = &tree.premises[0];
            let (a, left_div) = match &tree.conclusion.succedent {
                Formula::LeftDiv(a, _) => (a, true),
                Formula::RightDiv(_, a) => (a, false),
                _ => return Err(DiagramError::ProofMismatch("right rule on non-division".into())),
            };
            let mut duals = Vec::new();
            let mut fresh = Vec::new();
            for ty in formula_wires(a)? {
                if ty.fock {
                    return Err(DiagramError::Unsupported("currying over a Fock wire".into()));
                }
                let outs = b.add(BoxKind::Cap(ty.base)).1;
                duals.push(outs[0]);
                fresh.push(outs[1]);
            }
            duals.reverse();
            if left_div {
                let mut premise_in = fresh;
                premise_in.extend(inputs);
                let mut out = duals;
                out.extend(interpret(b, p, premise_in)?);
                Ok(out)
            } else {
                let mut premise_in = inputs;
                premise_in.extend(fresh);
                let mut out = interpret(b, p, premise_in)?;
                out.extend(duals);
                Ok(out)
            }
        }
        RuleTag::ProdR => {
            let split = tree.premises[0].conclusion.antecedent.len();
            let mut out = interpret(b, &tree.premises[0], concat(&parts[..split]))?;
            out.extend(interpret(b, &tree.premises[1], concat(&parts[split..]))?);
            Ok(out)
        }
        RuleTag::BangL(n) => {
            let j = principal()?;
            let fock = parts[j][0];
            let copies = b.apply(BoxKind::Projection { base: fock.ty.base, n }, &[fock])?;
            let mut next = concat(&parts[..j]);
            next.extend(copies);
            next.extend(concat(&parts[j + 1..]));
            interpret(b, &tree.premises[0], next)
        }
        RuleTag::BangR => {
            // Only the lift of an identity is representable without a
            // dedicated functor box.
            let identity_only = tree.premises[0]
                .nodes()
                .iter()
                .all(|n| matches!(n.rule, RuleTag::Axiom | RuleTag::NablaL | RuleTag::NablaR));
            if !identity_only {
                return Err(DiagramError::Unsupported("storage-right over a non-identity".into()));
            }
            Ok(inputs)
        }
        RuleTag::Perm | RuleTag::PermPrime => {
            let j = principal()?;
            let t = tree
                .target
                .ok_or_else(|| DiagramError::ProofMismatch("permutation without target".into()))?;
            let moved = parts[j].len();
            let (lo, hi) = if tree.rule == RuleTag::Perm { (j, t + 1) } else { (t, j + 1) };
            let mut seq = concat(&parts[lo..hi]);
            let block = seq.len() - moved;
            if tree.rule == RuleTag::Perm {
                // moved block first: bubble each of its wires to the right
                for w in (0..moved).rev() {
                    for at in w..w + block {
                        swap_adjacent(b, &mut seq, at)?;
                    }
                }
            } else {
                for w in 0..moved {
                    for at in (w..w + block).rev() {
                        swap_adjacent(b, &mut seq, at)?;
                    }
                }
            }
            let mut next = concat(&parts[..lo]);
            next.extend(seq);
            next.extend(concat(&parts[hi..]));
            interpret(b, &tree.premises[0], next)
        }
    }
}
