//! Bounded backward proof search.
//!
//! Rules are tried in a fixed order (Axiom, ProdR, LDivL, RDivL, ProdL,
//! NablaL, BangL, Perm, Perm', then the right rules), so the first proof
//! found is deterministic. Permutations only move a `@A` formula until it
//! sits directly against a division that takes `@A` as its argument, which
//! keeps the branching finite. Bang-free subgoals are pruned by the atom
//! count invariant, and failed subgoals are memoized with the depth budget
//! they failed under.

use std::collections::HashMap;

use super::formula::Formula;
use super::proof::{ProofTree, RuleTag, Sequent};

/// Searches for a proof of `sequent` of height at most `depth_limit`.
pub fn prove(sequent: &Sequent, k0: usize, depth_limit: usize) -> Option<ProofTree> {
    let mut prover = Prover {
        k0,
        failed: HashMap::new(),
    };
    prover.search(sequent, depth_limit)
}

struct Prover {
    k0: usize,
    /// Largest budget under which each sequent is known to fail.
    failed: HashMap<Sequent, usize>,
}

fn with_replacement(ant: &[Formula], from: usize, to: usize, insert: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::with_capacity(ant.len() + insert.len());
    out.extend_from_slice(&ant[..from]);
    out.extend_from_slice(insert);
    out.extend_from_slice(&ant[to..]);
    out
}

impl Prover {
    fn search(&mut self, seq: &Sequent, budget: usize) -> Option<ProofTree> {
        if budget == 0 || seq.antecedent.is_empty() {
            return None;
        }
        if let Some(&failed_at) = self.failed.get(seq) {
            if budget <= failed_at {
                return None;
            }
        }
        if !seq.contains_bang() && !seq.is_balanced() {
            self.failed.insert(seq.clone(), usize::MAX);
            return None;
        }
        let found = self.expand(seq, budget);
        if found.is_none() {
            let entry = self.failed.entry(seq.clone()).or_insert(0);
            *entry = (*entry).max(budget);
        }
        found
    }

    fn unary(
        &mut self,
        seq: &Sequent,
        rule: RuleTag,
        principal: Option<usize>,
        target: Option<usize>,
        premise: Sequent,
        budget: usize,
    ) -> Option<ProofTree> {
        let p = self.search(&premise, budget - 1)?;
        Some(ProofTree {
            conclusion: seq.clone(),
            rule,
            principal,
            target,
            premises: vec![p],
        })
    }

    fn binary(
        &mut self,
        seq: &Sequent,
        rule: RuleTag,
        principal: Option<usize>,
        left: Sequent,
        right: Sequent,
        budget: usize,
    ) -> Option<ProofTree> {
        let l = self.search(&left, budget - 1)?;
        let r = self.search(&right, budget - 1)?;
        Some(ProofTree {
            conclusion: seq.clone(),
            rule,
            principal,
            target: None,
            premises: vec![l, r],
        })
    }

    fn expand(&mut self, seq: &Sequent, budget: usize) -> Option<ProofTree> {
        let ant = &seq.antecedent;
        let succ = &seq.succedent;
        let len = ant.len();

        if len == 1 && ant[0] == *succ {
            return Some(ProofTree::axiom(succ.clone()));
        }

        if let Formula::Product(a, b) = succ {
            for split in 1..len {
                let left = Sequent::new(ant[..split].to_vec(), (**a).clone());
                let right = Sequent::new(ant[split..].to_vec(), (**b).clone());
                if let Some(t) = self.binary(seq, RuleTag::ProdR, None, left, right, budget) {
                    return Some(t);
                }
            }
        }

        for j in 0..len {
            if let Formula::LeftDiv(a, b) = &ant[j] {
                for start in (0..j).rev() {
                    let arg = Sequent::new(ant[start..j].to_vec(), (**a).clone());
                    let rest = Sequent::new(
                        with_replacement(ant, start, j + 1, std::slice::from_ref(b)),
                        succ.clone(),
                    );
                    if let Some(t) = self.binary(seq, RuleTag::LDivL, Some(j), arg, rest, budget) {
                        return Some(t);
                    }
                }
            }
        }

        for j in 0..len {
            if let Formula::RightDiv(b, a) = &ant[j] {
                for end in j + 2..=len {
                    let arg = Sequent::new(ant[j + 1..end].to_vec(), (**a).clone());
                    let rest = Sequent::new(
                        with_replacement(ant, j, end, std::slice::from_ref(b)),
                        succ.clone(),
                    );
                    if let Some(t) = self.binary(seq, RuleTag::RDivL, Some(j), arg, rest, budget) {
                        return Some(t);
                    }
                }
            }
        }

        for j in 0..len {
            if let Formula::Product(a, b) = &ant[j] {
                let premise = Sequent::new(
                    with_replacement(ant, j, j + 1, &[(**a).clone(), (**b).clone()]),
                    succ.clone(),
                );
                if let Some(t) = self.unary(seq, RuleTag::ProdL, Some(j), None, premise, budget) {
                    return Some(t);
                }
            }
        }

        for j in 0..len {
            if let Formula::Nabla(a) = &ant[j] {
                let premise =
                    Sequent::new(with_replacement(ant, j, j + 1, std::slice::from_ref(a)), succ.clone());
                if let Some(t) = self.unary(seq, RuleTag::NablaL, Some(j), None, premise, budget) {
                    return Some(t);
                }
            }
        }

        for j in 0..len {
            if let Formula::Bang(a) = &ant[j] {
                for n in 1..=self.k0 {
                    let copies = vec![(**a).clone(); n];
                    let premise = Sequent::new(with_replacement(ant, j, j + 1, &copies), succ.clone());
                    if let Some(t) =
                        self.unary(seq, RuleTag::BangL(n), Some(j), None, premise, budget)
                    {
                        return Some(t);
                    }
                }
            }
        }

        for (rule, rightwards) in [(RuleTag::Perm, true), (RuleTag::PermPrime, false)] {
            for j in 0..len {
                if !ant[j].is_nabla() {
                    continue;
                }
                for t in perm_targets(ant, j, rightwards) {
                    let mut moved = ant.clone();
                    let f = moved.remove(j);
                    moved.insert(t, f);
                    let premise = Sequent::new(moved, succ.clone());
                    if let Some(tree) = self.unary(seq, rule, Some(j), Some(t), premise, budget) {
                        return Some(tree);
                    }
                }
            }
        }

        match succ {
            Formula::LeftDiv(a, b) => {
                let mut extended = vec![(**a).clone()];
                extended.extend_from_slice(ant);
                let premise = Sequent::new(extended, (**b).clone());
                if let Some(t) = self.unary(seq, RuleTag::LDivR, None, None, premise, budget) {
                    return Some(t);
                }
            }
            Formula::RightDiv(b, a) => {
                let mut extended = ant.clone();
                extended.push((**a).clone());
                let premise = Sequent::new(extended, (**b).clone());
                if let Some(t) = self.unary(seq, RuleTag::RDivR, None, None, premise, budget) {
                    return Some(t);
                }
            }
            Formula::Nabla(b) if len == 1 => {
                if let Formula::Nabla(a) = &ant[0] {
                    let premise = Sequent::new(vec![(**a).clone()], (**b).clone());
                    if let Some(t) = self.unary(seq, RuleTag::NablaR, None, None, premise, budget) {
                        return Some(t);
                    }
                }
            }
            Formula::Bang(b) if len == 1 => {
                if let Formula::Bang(a) = &ant[0] {
                    let premise = Sequent::new(vec![(**a).clone()], (**b).clone());
                    if let Some(t) = self.unary(seq, RuleTag::BangR, None, None, premise, budget) {
                        return Some(t);
                    }
                }
            }
            _ => {}
        }
        None
    }
}

/// Premise positions for moving `ant[j]` so that it lands directly against
/// a division whose divisor is that very formula.
fn perm_targets(ant: &[Formula], j: usize, rightwards: bool) -> Vec<usize> {
    let moved = &ant[j];
    let mut rest: Vec<&Formula> = ant.iter().collect();
    rest.remove(j);
    let consumes = |f: &Formula, from_left: bool| match f {
        Formula::LeftDiv(d, _) if from_left => **d == *moved,
        Formula::RightDiv(_, d) if !from_left => **d == *moved,
        _ => false,
    };
    // `t` is the index of the moved formula in the premise.
    let candidates: Vec<usize> = if rightwards {
        (j + 1..ant.len()).collect()
    } else {
        (0..j).rev().collect()
    };
    candidates
        .into_iter()
        .filter(|&t| {
            let right_neighbour = rest.get(t).is_some_and(|f| consumes(f, true));
            let left_neighbour = t > 0 && consumes(rest[t - 1], false);
            right_neighbour || left_neighbour
        })
        .collect()
}
