//! Resolution proofs as sequences of justified clauses.
//!
//! Line numbers are 1-based throughout, both in the API and in the trace
//! format. A resolvent line `res v w X` requires `X` in line `v` and `~X` in
//! line `w`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{restrict_clause, restrict_cnf_indexed, Assignment, Clause, Cnf, Lit, Restricted, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Justification {
    /// Weakening of premise clause `C_j` (1-based).
    Axiom { premise: usize },
    /// Weakening of `res(line positive, line negative, pivot)`.
    Resolvent { positive: usize, negative: usize, pivot: Var },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub clause: Clause,
    pub justification: Justification,
}

impl ProofLine {
    pub fn axiom(clause: Clause, premise: usize) -> Self {
        ProofLine { clause, justification: Justification::Axiom { premise } }
    }

    pub fn resolvent(clause: Clause, positive: usize, negative: usize, pivot: Var) -> Self {
        ProofLine { clause, justification: Justification::Resolvent { positive, negative, pivot } }
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self.justification, Justification::Axiom { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn new(lines: Vec<ProofLine>) -> Self {
        Proof { lines }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Line `u`, 1-based.
    pub fn line(&self, u: usize) -> Option<&ProofLine> {
        u.checked_sub(1).and_then(|k| self.lines.get(k))
    }

    pub fn push(&mut self, line: ProofLine) -> usize {
        self.lines.push(line);
        self.lines.len()
    }

    pub fn resolvent_count(&self) -> usize {
        self.lines.iter().filter(|l| !l.is_axiom()).count()
    }

    pub fn ends_with_empty_clause(&self) -> bool {
        self.lines.last().is_some_and(|l| l.clause.is_empty())
    }

    /// Re-points every axiom line at the identical clause of `to`.
    ///
    /// Returns the 1-based line whose premise clause has no counterpart.
    pub fn retarget(&self, from: &Cnf, to: &Cnf) -> Result<Proof, usize> {
        let index: std::collections::HashMap<&Clause, usize> =
            to.clauses().iter().enumerate().rev().map(|(k, c)| (c, k + 1)).collect();
        let mut lines = Vec::with_capacity(self.lines.len());
        for (k, line) in self.lines.iter().enumerate() {
            let justification = match line.justification {
                Justification::Axiom { premise } => {
                    let c = from.clause(premise).ok_or(k + 1)?;
                    Justification::Axiom { premise: *index.get(c).ok_or(k + 1)? }
                }
                j => j,
            };
            lines.push(ProofLine { clause: line.clause.clone(), justification });
        }
        Ok(Proof { lines })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    BadWeakening,
    BadPivot,
    ForwardReference,
    TautologicalLine,
    NonEmptyFinal,
    BadPremiseIndex,
    EmptyProof,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::BadWeakening => "bad-weakening",
            RejectReason::BadPivot => "bad-pivot",
            RejectReason::ForwardReference => "forward-reference",
            RejectReason::TautologicalLine => "tautological-line",
            RejectReason::NonEmptyFinal => "non-empty-final",
            RejectReason::BadPremiseIndex => "bad-premise-index",
            RejectReason::EmptyProof => "empty-proof",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { line: usize, reason: RejectReason },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

fn check_line(premises: &Cnf, proof: &Proof, u: usize) -> Result<(), RejectReason> {
    let line = &proof.lines[u - 1];
    if line.clause.is_tautological() {
        return Err(RejectReason::TautologicalLine);
    }
    match line.justification {
        Justification::Axiom { premise } => {
            let c = premises.clause(premise).ok_or(RejectReason::BadPremiseIndex)?;
            if !c.is_subset_of(&line.clause) {
                return Err(RejectReason::BadWeakening);
            }
        }
        Justification::Resolvent { positive, negative, pivot } => {
            if positive == 0 || negative == 0 || positive >= u || negative >= u {
                return Err(RejectReason::ForwardReference);
            }
            let pos = &proof.lines[positive - 1].clause;
            let neg = &proof.lines[negative - 1].clause;
            if !pos.contains(pivot.pos()) || !neg.contains(pivot.neg()) {
                return Err(RejectReason::BadPivot);
            }
            let covered = |c: &Clause, skip: Lit| c.iter().all(|&l| l == skip || line.clause.contains(l));
            if !covered(pos, pivot.pos()) || !covered(neg, pivot.neg()) {
                return Err(RejectReason::BadWeakening);
            }
        }
    }
    Ok(())
}

/// Checks every line in order and reports the first offending one.
pub fn check_proof(premises: &Cnf, proof: &Proof, require_refutation: bool) -> Verdict {
    if proof.is_empty() {
        return Verdict::Rejected { line: 0, reason: RejectReason::EmptyProof };
    }
    for u in 1..=proof.len() {
        if let Err(reason) = check_line(premises, proof, u) {
            return Verdict::Rejected { line: u, reason };
        }
    }
    if require_refutation && !proof.ends_with_empty_clause() {
        return Verdict::Rejected { line: proof.len(), reason: RejectReason::NonEmptyFinal };
    }
    Verdict::Accepted
}

/// `Π↾α` against `F↾α`.
///
/// Lines satisfied by `α` are dropped and falsified lines become the empty
/// clause. A surviving resolvent whose pivot is bound by `α` is a weakening of
/// the restricted parent that lost the falsified pivot literal, so it takes
/// over that parent's (already repaired) justification. Axiom lines are
/// re-pointed into `F↾α`.
///
/// The input must be accepted by [`check_proof`]; the output then is too.
pub fn restrict_proof(premises: &Cnf, proof: &Proof, alpha: &Assignment) -> (Cnf, Proof) {
    let (restricted, index) = restrict_cnf_indexed(premises, alpha);
    let mut new_index: Vec<Option<usize>> = Vec::with_capacity(proof.len());
    let mut out = Proof::default();
    for line in &proof.lines {
        let clause = match restrict_clause(&line.clause, alpha) {
            Restricted::Satisfied => {
                new_index.push(None);
                continue;
            }
            Restricted::Falsified => Clause::empty(),
            Restricted::Clause(c) => c,
        };
        let justification = match line.justification {
            Justification::Axiom { premise } => Justification::Axiom {
                premise: index[premise - 1].expect("premise satisfied while its weakening is not"),
            },
            Justification::Resolvent { positive, negative, pivot } => match alpha.get(pivot) {
                None => Justification::Resolvent {
                    positive: new_index[positive - 1].expect("parent with unbound pivot satisfied"),
                    negative: new_index[negative - 1].expect("parent with unbound pivot satisfied"),
                    pivot,
                },
                Some(value) => {
                    // The parent holding the falsified pivot literal survives.
                    let parent = if value { negative } else { positive };
                    let k = new_index[parent - 1].expect("parent survives restriction");
                    out.lines[k - 1].justification
                }
            },
        };
        out.lines.push(ProofLine { clause, justification });
        new_index.push(Some(out.lines.len()));
    }
    (restricted, out)
}

/// Maximum clause size over the lines.
pub fn proof_width(proof: &Proof) -> usize {
    proof.lines.iter().map(|l| l.clause.len()).max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

/// Writes the line-oriented trace format
/// `<u> | <lits> | ax <j>` / `<u> | <lits> | res <v> <w> <pivot>`.
pub fn write_trace(proof: &Proof) -> String {
    let mut out = String::new();
    for (k, line) in proof.lines.iter().enumerate() {
        out.push_str(&(k + 1).to_string());
        out.push_str(" | ");
        for l in &line.clause {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        match line.justification {
            Justification::Axiom { premise } => out.push_str(&format!("| ax {premise}\n")),
            Justification::Resolvent { positive, negative, pivot } => {
                out.push_str(&format!("| res {positive} {negative} {}\n", pivot.index()))
            }
        }
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Proof, TraceError> {
    let mut proof = Proof::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let err = |message: &str| TraceError { line, message: message.to_string() };
        let parts: Vec<&str> = t.split('|').collect();
        if parts.len() != 3 {
            return Err(err("expected three `|`-separated fields"));
        }
        let u: usize = parts[0].trim().parse().map_err(|_| err("bad line number"))?;
        if u != proof.len() + 1 {
            return Err(err("line numbers must be consecutive from 1"));
        }
        let lits = parts[1]
            .split_whitespace()
            .map(|tok| tok.parse::<i32>().ok().filter(|&v| v != 0).map(Lit::from_dimacs))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| err("bad literal"))?;
        let just: Vec<&str> = parts[2].split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err("bad number"));
        let justification = match just.as_slice() {
            ["ax", j] => Justification::Axiom { premise: num(j)? },
            ["res", v, w, x] => {
                let x = num(x)?;
                if x == 0 {
                    return Err(err("pivot variable must be positive"));
                }
                Justification::Resolvent { positive: num(v)?, negative: num(w)?, pivot: Var::new(x as u32) }
            }
            _ => return Err(err("justification must be `ax <j>` or `res <v> <w> <var>`")),
        };
        proof.lines.push(ProofLine { clause: Clause::new(lits), justification });
    }
    Ok(proof)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(lits: &[i32]) -> Clause {
        Clause::from_dimacs(lits)
    }

    fn contradiction() -> (Cnf, Proof) {
        let f = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let p = Proof::new(vec![
            ProofLine::axiom(cl(&[1]), 1),
            ProofLine::axiom(cl(&[-1]), 2),
            ProofLine::resolvent(cl(&[]), 1, 2, Var::new(1)),
        ]);
        (f, p)
    }

    #[test]
    fn accepts_the_three_line_refutation() {
        let (f, p) = contradiction();
        assert_eq!(check_proof(&f, &p, true), Verdict::Accepted);
        assert_eq!(proof_width(&p), 1);
    }

    #[test]
    fn rejects_bad_pivot() {
        let (f, mut p) = contradiction();
        p.lines[2] = ProofLine::resolvent(cl(&[]), 1, 1, Var::new(1));
        assert_eq!(check_proof(&f, &p, true), Verdict::Rejected { line: 3, reason: RejectReason::BadPivot });
    }

    #[test]
    fn rejects_tautological_line() {
        let f = Cnf::from_dimacs_clauses(1, &[&[1]]);
        let p = Proof::new(vec![ProofLine::axiom(cl(&[1, -1]), 1)]);
        assert_eq!(check_proof(&f, &p, false), Verdict::Rejected { line: 1, reason: RejectReason::TautologicalLine });
    }

    #[test]
    fn rejects_forward_reference_and_bad_weakening() {
        let (f, mut p) = contradiction();
        p.lines[2] = ProofLine::resolvent(cl(&[]), 1, 3, Var::new(1));
        assert_eq!(check_proof(&f, &p, true), Verdict::Rejected { line: 3, reason: RejectReason::ForwardReference });

        let (f, mut p) = contradiction();
        p.lines[1] = ProofLine::axiom(cl(&[-1]), 1);
        assert_eq!(check_proof(&f, &p, true), Verdict::Rejected { line: 2, reason: RejectReason::BadWeakening });

        let (f, mut p) = contradiction();
        p.lines[1] = ProofLine::axiom(cl(&[-1]), 7);
        assert_eq!(check_proof(&f, &p, true), Verdict::Rejected { line: 2, reason: RejectReason::BadPremiseIndex });
    }

    #[test]
    fn non_empty_final_only_for_refutations() {
        let (f, mut p) = contradiction();
        p.lines.truncate(2);
        assert!(check_proof(&f, &p, false).is_accepted());
        assert_eq!(check_proof(&f, &p, true), Verdict::Rejected { line: 2, reason: RejectReason::NonEmptyFinal });
        assert_eq!(
            check_proof(&f, &Proof::default(), false),
            Verdict::Rejected { line: 0, reason: RejectReason::EmptyProof }
        );
    }

    #[test]
    fn width_of_single_empty_line() {
        let f = Cnf::from_dimacs_clauses(1, &[&[]]);
        let p = Proof::new(vec![ProofLine::axiom(Clause::empty(), 1)]);
        assert!(check_proof(&f, &p, true).is_accepted());
        assert_eq!(proof_width(&p), 0);
    }

    #[test]
    fn restriction_of_a_refutation() {
        // {X1, ~X1 v X2, ~X2}
        let f = Cnf::from_dimacs_clauses(2, &[&[1], &[-1, 2], &[-2]]);
        let p = Proof::new(vec![
            ProofLine::axiom(cl(&[1]), 1),
            ProofLine::axiom(cl(&[-1, 2]), 2),
            ProofLine::resolvent(cl(&[2]), 1, 2, Var::new(1)),
            ProofLine::axiom(cl(&[-2]), 3),
            ProofLine::resolvent(cl(&[]), 3, 4, Var::new(2)),
        ]);
        assert!(check_proof(&f, &p, true).is_accepted());

        let mut alpha = Assignment::new();
        alpha.set(Var::new(2), true);
        let (g, q) = restrict_proof(&f, &p, &alpha);
        assert_eq!(g, Cnf::from_dimacs_clauses(2, &[&[1], &[]]));
        assert!(check_proof(&g, &q, true).is_accepted());
        assert!(q.len() <= p.len());

        let (g, q) = restrict_proof(&f, &p, &Assignment::new());
        assert_eq!(g, f);
        assert_eq!(q, p);
    }

    #[test]
    fn trace_round_trip() {
        let (_, p) = contradiction();
        let text = write_trace(&p);
        assert_eq!(text, "1 | 1 | ax 1\n2 | -1 | ax 2\n3 | | res 1 2 1\n");
        assert_eq!(parse_trace(&text).unwrap(), p);
        assert_eq!(parse_trace("1 |  | ax 1\n").unwrap().lines[0].clause, Clause::empty());
        assert!(parse_trace("2 | 1 | ax 1\n").is_err());
        assert!(parse_trace("1 | 1 | foo\n").is_err());
    }

    #[test]
    fn retarget_follows_clause_identity() {
        let (f, p) = contradiction();
        let g = Cnf::from_dimacs_clauses(1, &[&[-1], &[1]]);
        let q = p.retarget(&f, &g).unwrap();
        assert!(check_proof(&g, &q, true).is_accepted());
        let h = Cnf::from_dimacs_clauses(1, &[&[1]]);
        assert_eq!(p.retarget(&f, &h), Err(2));
    }
}
