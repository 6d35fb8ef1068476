//! Sequents, proof trees, and the rule checker.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Formula) -> Self {
        Self {
            antecedent,
            succedent,
        }
    }

    pub fn contains_bang(&self) -> bool {
        self.succedent.contains_bang() || self.antecedent.iter().any(Formula::contains_bang)
    }

    /// Atom-count invariant of the bang-free fragment: every provable
    /// sequent without `!` has zero net occurrences of each atom.
    pub(crate) fn is_balanced(&self) -> bool {
        let mut total = self.succedent.atom_balance(false);
        for f in &self.antecedent {
            let b = f.atom_balance(true);
            total[0] += b[0];
            total[1] += b[1];
        }
        total == [0, 0]
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " --> {}", self.succedent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTag {
    Axiom,
    LDivL,
    LDivR,
    RDivL,
    RDivR,
    ProdL,
    ProdR,
    /// Number of copies projected out of the storage.
    BangL(usize),
    BangR,
    NablaL,
    NablaR,
    Perm,
    PermPrime,
}

impl RuleTag {
    pub fn arity(self) -> usize {
        match self {
            RuleTag::Axiom => 0,
            RuleTag::LDivL | RuleTag::RDivL | RuleTag::ProdR => 2,
            _ => 1,
        }
    }

    /// Left rules act on an antecedent position.
    pub fn has_principal(self) -> bool {
        matches!(
            self,
            RuleTag::LDivL
                | RuleTag::RDivL
                | RuleTag::ProdL
                | RuleTag::BangL(_)
                | RuleTag::NablaL
                | RuleTag::Perm
                | RuleTag::PermPrime
        )
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::BangL(n) => write!(f, "BangL({n})"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// A derivation. `principal` is the antecedent index of the formula a left
/// rule acts on (in the conclusion); `target` is where a permuted formula
/// lands in the premise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: RuleTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn axiom(formula: Formula) -> Self {
        Self {
            conclusion: Sequent::new(vec![formula.clone()], formula),
            rule: RuleTag::Axiom,
            principal: None,
            target: None,
            premises: Vec::new(),
        }
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    /// Pre-order iterator over all nodes.
    pub fn nodes(&self) -> Vec<&ProofTree> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node = out[i];
            out.extend(node.premises.iter());
            i += 1;
        }
        out
    }

    pub fn count_rule(&self, pred: impl Fn(RuleTag) -> bool + Copy) -> usize {
        self.nodes().iter().filter(|n| pred(n.rule)).count()
    }

    /// Indented, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let _ = writeln!(out, "{}{}  [{}]", "  ".repeat(depth), self.conclusion, self.rule);
        for p in &self.premises {
            p.render_into(out, depth + 1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {rule} at node {path:?} (principal {principal:?}): {message}")]
pub struct ProofError {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: RuleTag,
    pub principal: Option<usize>,
    pub message: String,
}

/// Checks every node of `tree` against its rule. Nodes are visited
/// root-first; the first violation is reported.
pub fn check_proof(tree: &ProofTree, k0: usize) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check_node(tree, k0, &mut path)
}

fn check_node(node: &ProofTree, k0: usize, path: &mut Vec<usize>) -> Result<(), ProofError> {
    if let Err(message) = check_rule(node, k0) {
        return Err(ProofError {
            path: path.clone(),
            rule: node.rule,
            principal: node.principal,
            message,
        });
    }
    for (i, p) in node.premises.iter().enumerate() {
        path.push(i);
        check_node(p, k0, path)?;
        path.pop();
    }
    Ok(())
}

fn check_rule(node: &ProofTree, k0: usize) -> Result<(), String> {
    let rule = node.rule;
    if node.premises.len() != rule.arity() {
        return Err(format!(
            "expected {} premises, found {}",
            rule.arity(),
            node.premises.len()
        ));
    }
    let concl = &node.conclusion;
    let ant = &concl.antecedent;
    let succ = &concl.succedent;
    let principal = || -> Result<usize, String> {
        let j = node.principal.ok_or("missing principal position")?;
        if j >= ant.len() {
            return Err(format!("principal {j} out of range"));
        }
        Ok(j)
    };
    let prem = |i: usize| &node.premises[i].conclusion;
    let ensure = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(msg.to_string()) };

    match rule {
        RuleTag::Axiom => ensure(ant.len() == 1 && ant[0] == *succ, "not of the form A --> A"),
        RuleTag::LDivL => {
            let j = principal()?;
            let Formula::LeftDiv(a, b) = &ant[j] else {
                return Err("principal is not a left division".into());
            };
            let (arg, rest) = (prem(0), prem(1));
            let g = arg.antecedent.len();
            ensure(g >= 1 && g <= j, "argument context does not fit left of principal")?;
            ensure(arg.antecedent[..] == ant[j - g..j], "argument context mismatch")?;
            ensure(arg.succedent == **a, "argument premise does not prove the divisor")?;
            let mut expected = ant[..j - g].to_vec();
            expected.push((**b).clone());
            expected.extend_from_slice(&ant[j + 1..]);
            ensure(rest.antecedent == expected, "major premise antecedent mismatch")?;
            ensure(rest.succedent == *succ, "major premise succedent mismatch")
        }
        RuleTag::RDivL => {
            let j = principal()?;
            let Formula::RightDiv(b, a) = &ant[j] else {
                return Err("principal is not a right division".into());
            };
            let (arg, rest) = (prem(0), prem(1));
            let g = arg.antecedent.len();
            ensure(g >= 1 && j + g < ant.len(), "argument context does not fit right of principal")?;
            ensure(arg.antecedent[..] == ant[j + 1..=j + g], "argument context mismatch")?;
            ensure(arg.succedent == **a, "argument premise does not prove the divisor")?;
            let mut expected = ant[..j].to_vec();
            expected.push((**b).clone());
            expected.extend_from_slice(&ant[j + g + 1..]);
            ensure(rest.antecedent == expected, "major premise antecedent mismatch")?;
            ensure(rest.succedent == *succ, "major premise succedent mismatch")
        }
        RuleTag::LDivR => {
            let Formula::LeftDiv(a, b) = succ else {
                return Err("succedent is not a left division".into());
            };
            let p = prem(0);
            let mut expected = vec![(**a).clone()];
            expected.extend_from_slice(ant);
            ensure(!ant.is_empty(), "empty antecedent")?;
            ensure(p.antecedent == expected && p.succedent == **b, "premise mismatch")
        }
        RuleTag::RDivR => {
            let Formula::RightDiv(b, a) = succ else {
                return Err("succedent is not a right division".into());
            };
            let p = prem(0);
            let mut expected = ant.clone();
            expected.push((**a).clone());
            ensure(!ant.is_empty(), "empty antecedent")?;
            ensure(p.antecedent == expected && p.succedent == **b, "premise mismatch")
        }
        RuleTag::ProdL => {
            let j = principal()?;
            let Formula::Product(a, b) = &ant[j] else {
                return Err("principal is not a product".into());
            };
            let mut expected = ant[..j].to_vec();
            expected.push((**a).clone());
            expected.push((**b).clone());
            expected.extend_from_slice(&ant[j + 1..]);
            let p = prem(0);
            ensure(p.antecedent == expected && p.succedent == *succ, "premise mismatch")
        }
        RuleTag::ProdR => {
            let Formula::Product(a, b) = succ else {
                return Err("succedent is not a product".into());
            };
            let (l, r) = (prem(0), prem(1));
            ensure(l.succedent == **a && r.succedent == **b, "premise succedents mismatch")?;
            let joined: Vec<_> = l.antecedent.iter().chain(&r.antecedent).cloned().collect();
            ensure(joined == *ant, "premise antecedents do not concatenate to the conclusion")
        }
        RuleTag::BangL(n) => {
            let j = principal()?;
            if n < 1 || n > k0 {
                return Err(format!("copy count {n} outside 1..={k0}"));
            }
            let Formula::Bang(a) = &ant[j] else {
                return Err("principal is not a storage formula".into());
            };
            let mut expected = ant[..j].to_vec();
            expected.extend(std::iter::repeat_n((**a).clone(), n));
            expected.extend_from_slice(&ant[j + 1..]);
            let p = prem(0);
            ensure(p.antecedent == expected && p.succedent == *succ, "premise mismatch")
        }
        RuleTag::NablaL => {
            let j = principal()?;
            let Formula::Nabla(a) = &ant[j] else {
                return Err("principal is not a permutable formula".into());
            };
            let mut expected = ant.clone();
            expected[j] = (**a).clone();
            let p = prem(0);
            ensure(p.antecedent == expected && p.succedent == *succ, "premise mismatch")
        }
        RuleTag::BangR | RuleTag::NablaR => {
            let (Some(first), true) = (ant.first(), ant.len() == 1) else {
                return Err("antecedent must be a single formula".into());
            };
            let (a, b) = match (rule, first, succ) {
                (RuleTag::BangR, Formula::Bang(a), Formula::Bang(b)) => (a, b),
                (RuleTag::NablaR, Formula::Nabla(a), Formula::Nabla(b)) => (a, b),
                _ => return Err("both sides must carry the modality".into()),
            };
            let p = prem(0);
            ensure(p.antecedent == [(**a).clone()] && p.succedent == **b, "premise mismatch")
        }
        RuleTag::Perm | RuleTag::PermPrime => {
            let j = principal()?;
            ensure(ant[j].is_nabla(), "moved formula is not permutable")?;
            let t = node.target.ok_or("missing target position")?;
            let p = prem(0);
            ensure(p.succedent == *succ, "premise succedent mismatch")?;
            ensure(p.antecedent.len() == ant.len(), "premise length mismatch")?;
            // Perm reads bottom-up as moving the formula rightwards, Perm' leftwards.
            let direction_ok = match rule {
                RuleTag::Perm => t >= j,
                _ => t <= j,
            };
            ensure(direction_ok && t < ant.len(), "target on the wrong side")?;
            let mut expected = ant.clone();
            let moved = expected.remove(j);
            expected.insert(t, moved);
            ensure(p.antecedent == expected, "premise is not the stated permutation")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn seq(ant: &[&str], succ: &str) -> Sequent {
        Sequent::new(ant.iter().map(|s| f(s)).collect(), f(succ))
    }

    fn node(
        ant: &[&str],
        succ: &str,
        rule: RuleTag,
        principal: Option<usize>,
        premises: Vec<ProofTree>,
    ) -> ProofTree {
        ProofTree {
            conclusion: seq(ant, succ),
            rule,
            principal,
            target: None,
            premises,
        }
    }

    #[test]
    fn john_sleeps_accepted() {
        let tree = node(
            &["n", "n\\s"],
            "s",
            RuleTag::LDivL,
            Some(1),
            vec![ProofTree::axiom(f("n")), ProofTree::axiom(f("s"))],
        );
        check_proof(&tree, 2).unwrap();
    }

    #[test]
    fn axiom_on_any_formula_accepted() {
        for s in ["n", "!@n", "(n\\s)/(n/n)", "s.s"] {
            check_proof(&ProofTree::axiom(f(s)), 2).unwrap();
        }
    }

    #[test]
    fn bang_copy_bound_enforced() {
        let inner = ProofTree::axiom(f("n"));
        let tree = node(
            &["!n", "n\\(n\\(n\\s))"],
            "s",
            RuleTag::BangL(3),
            Some(0),
            vec![ProofTree {
                conclusion: seq(&["n", "n", "n", "n\\(n\\(n\\s))"], "s"),
                ..inner
            }],
        );
        let err = check_proof(&tree, 2).unwrap_err();
        assert_eq!(err.rule, RuleTag::BangL(3));
        assert!(err.path.is_empty());
        assert!(err.message.contains("outside"));
    }

    #[test]
    fn wrong_arity_rejected() {
        let tree = node(&["n", "n\\s"], "s", RuleTag::LDivL, Some(1), vec![ProofTree::axiom(f("n"))]);
        assert!(check_proof(&tree, 2).is_err());
    }

    #[test]
    fn violation_reported_with_path() {
        let bogus = node(&["s"], "s", RuleTag::NablaL, Some(0), vec![ProofTree::axiom(f("s"))]);
        let tree = node(
            &["n", "n\\s"],
            "s",
            RuleTag::LDivL,
            Some(1),
            vec![ProofTree::axiom(f("n")), bogus],
        );
        let err = check_proof(&tree, 2).unwrap_err();
        assert_eq!(err.path, vec![1]);
        assert_eq!(err.rule, RuleTag::NablaL);
        assert_eq!(err.principal, Some(0));
    }

    #[test]
    fn perm_must_move_a_permutable_formula() {
        let premise = ProofTree {
            conclusion: seq(&["n\\s", "n"], "s"),
            rule: RuleTag::Axiom,
            principal: None,
            target: None,
            premises: vec![],
        };
        let tree = ProofTree {
            conclusion: seq(&["n", "n\\s"], "s"),
            rule: RuleTag::Perm,
            principal: Some(0),
            target: Some(1),
            premises: vec![premise],
        };
        let err = check_proof(&tree, 2).unwrap_err();
        assert!(err.message.contains("not permutable"));
    }
}
