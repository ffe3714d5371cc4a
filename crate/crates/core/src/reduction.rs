//! The gap instances `G(F) = RREF(F,13n²)` and `G(F,t) = RREF′(F,13n^{t+1})`,
//! and the decision procedure built on a refutation searcher.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{cnf_size, Cnf};
use crate::encode::{encode_rref, EncodeError, IndexedCnf, Variant};
use crate::proof::{check_proof, Proof, RejectReason, Verdict};
use crate::solver::{solve, Limits, SolveResult};
use crate::witness::build_witness_for;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("clause C{clause} has {len} literals; a 3-CNF is required")]
    NotThreeCnf { clause: usize, len: usize },
    #[error("F has {m} clauses, more than 8n³ = {bound}")]
    TooManyClauses { m: usize, bound: usize },
    #[error("13·n^{exponent} overflows for n={n}")]
    Overflow { n: usize, exponent: u32 },
    #[error("the padding exponent must be at least 1")]
    ZeroPadding,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GapOptions {
    /// Accept clauses of any length (outside the 3-CNF regime).
    pub allow_general: bool,
    /// Replace the length `s` by this value. For experiments at sizes where
    /// `13n²` is impractical; the resulting instance is not a gap instance.
    pub length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapParams {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub variant: Variant,
    pub pad: Option<u32>,
    pub general: bool,
    pub length_override: bool,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct GapInstance {
    pub source: Cnf,
    pub encoded: IndexedCnf,
    pub params: GapParams,
}

fn check_source(f: &Cnf, opts: &GapOptions) -> Result<(), ReductionError> {
    if f.num_vars() == 0 {
        return Err(EncodeError::NoVariables.into());
    }
    if let Some(j) = f.first_tautology() {
        return Err(EncodeError::TautologicalClause(j).into());
    }
    if opts.allow_general {
        return Ok(());
    }
    if let Some((k, c)) = f.clauses().iter().enumerate().find(|(_, c)| c.len() > 3) {
        return Err(ReductionError::NotThreeCnf { clause: k + 1, len: c.len() });
    }
    let n = f.num_vars() as usize;
    let bound = 8 * n * n * n;
    if f.num_clauses() > bound {
        return Err(ReductionError::TooManyClauses { m: f.num_clauses(), bound });
    }
    Ok(())
}

fn thirteen_n_pow(n: usize, exponent: u32) -> Result<usize, ReductionError> {
    n.checked_pow(exponent).and_then(|p| p.checked_mul(13)).ok_or(ReductionError::Overflow { n, exponent })
}

fn build(f: &Cnf, s: usize, variant: Variant, pad: Option<u32>, opts: &GapOptions) -> Result<GapInstance, ReductionError> {
    let s = opts.length.unwrap_or(s);
    let encoded = encode_rref(f, s, variant == Variant::Rref)?;
    let params = GapParams {
        n: f.num_vars() as usize,
        m: f.num_clauses(),
        s,
        variant,
        pad,
        general: opts.allow_general,
        length_override: opts.length.is_some(),
        num_vars: encoded.cnf.num_vars() as usize,
        num_clauses: encoded.len(),
        size: cnf_size(&encoded.cnf),
    };
    Ok(GapInstance { source: f.clone(), encoded, params })
}

/// `RREF(F, 13n²)`.
pub fn gap_instance(f: &Cnf) -> Result<GapInstance, ReductionError> {
    gap_instance_with(f, &GapOptions::default())
}

pub fn gap_instance_with(f: &Cnf, opts: &GapOptions) -> Result<GapInstance, ReductionError> {
    check_source(f, opts)?;
    let s = thirteen_n_pow(f.num_vars() as usize, 2)?;
    build(f, s, Variant::Rref, None, opts)
}

/// `RREF′(F, 13n^{t+1})`.
pub fn padded_gap_instance(f: &Cnf, t: u32) -> Result<GapInstance, ReductionError> {
    padded_gap_instance_with(f, t, &GapOptions::default())
}

pub fn padded_gap_instance_with(f: &Cnf, t: u32, opts: &GapOptions) -> Result<GapInstance, ReductionError> {
    if t == 0 {
        return Err(ReductionError::ZeroPadding);
    }
    check_source(f, opts)?;
    let exponent = t.checked_add(1).ok_or(ReductionError::Overflow { n: f.num_vars() as usize, exponent: t })?;
    let s = thirteen_n_pow(f.num_vars() as usize, exponent)?;
    build(f, s, Variant::RrefPrime, Some(t), opts)
}

/// What a refutation searcher returns.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Refutation(Proof),
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Satisfiable,
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the searcher returned an invalid refutation (line {line}: {reason:?})")]
pub struct CallbackFault {
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecideReport {
    pub decision: Decision,
    pub budget: u64,
    pub params: GapParams,
    /// Length of the accepted refutation, if any.
    pub proof_length: Option<usize>,
}

/// Answers `Satisfiable` exactly when `search` produces a refutation of the
/// gap instance that the checker accepts.
pub fn decide_via_automatizer<S>(instance: &GapInstance, budget: u64, mut search: S) -> Result<DecideReport, CallbackFault>
where
    S: FnMut(&GapInstance, u64) -> SearchOutcome,
{
    let (decision, proof_length) = match search(instance, budget) {
        SearchOutcome::Timeout => (Decision::Unsatisfiable, None),
        SearchOutcome::Refutation(proof) => match check_proof(&instance.encoded.cnf, &proof, true) {
            Verdict::Accepted => (Decision::Satisfiable, Some(proof.len())),
            Verdict::Rejected { line, reason } => return Err(CallbackFault { line, reason }),
        },
    };
    Ok(DecideReport { decision, budget, params: instance.params.clone(), proof_length })
}

/// Looks for a model of F with the DPLL solver (budget = decisions) and turns
/// it into the witness refutation; times out when F has no model.
pub fn witness_searcher(instance: &GapInstance, budget: u64) -> SearchOutcome {
    match solve(&instance.source, Limits::decisions(budget)) {
        Ok(SolveResult::Sat { model, .. }) => match build_witness_for(&instance.source, &model, &instance.encoded) {
            Ok(w) => SearchOutcome::Refutation(w.proof),
            Err(_) => SearchOutcome::Timeout,
        },
        Ok(SolveResult::Unsat { .. }) | Err(_) => SearchOutcome::Timeout,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Family;

    #[test]
    fn lengths() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2]]);
        assert_eq!(gap_instance(&f).unwrap().params.s, 52);
        let g = Cnf::from_dimacs_clauses(3, &[&[1, 2, 3]]);
        let p = padded_gap_instance(&g, 2).unwrap();
        assert_eq!(p.params.s, 351);
        assert_eq!(p.encoded.count(Family::A7) + p.encoded.count(Family::A8), 0);
        assert_eq!(padded_gap_instance(&g, 0).unwrap_err(), ReductionError::ZeroPadding);
        assert!(matches!(padded_gap_instance(&g, u32::MAX), Err(ReductionError::Overflow { .. })));
    }

    #[test]
    fn rejects_non_3cnf() {
        let f = Cnf::from_dimacs_clauses(4, &[&[1, 2, 3, 4]]);
        assert_eq!(gap_instance(&f).unwrap_err(), ReductionError::NotThreeCnf { clause: 1, len: 4 });
        let opts = GapOptions { allow_general: true, length: Some(3) };
        assert!(gap_instance_with(&f, &opts).unwrap().params.general);
        let t = Cnf::from_dimacs_clauses(1, &[&[1, -1]]);
        assert!(matches!(gap_instance(&t), Err(ReductionError::Encode(EncodeError::TautologicalClause(1)))));
        let dup: Vec<&[i32]> = vec![&[1]; 9];
        assert!(matches!(gap_instance(&Cnf::from_dimacs_clauses(1, &dup)), Err(ReductionError::TooManyClauses { .. })));
    }

    #[test]
    fn decisions() {
        let sat = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2]]);
        let g = gap_instance(&sat).unwrap();
        let r = decide_via_automatizer(&g, 100, witness_searcher).unwrap();
        assert_eq!(r.decision, Decision::Satisfiable);
        let r = decide_via_automatizer(&g, 100, |_, _| SearchOutcome::Timeout).unwrap();
        assert_eq!(r.decision, Decision::Unsatisfiable);
        let bogus = |_: &GapInstance, _| SearchOutcome::Refutation(Proof::default());
        assert!(decide_via_automatizer(&g, 100, bogus).is_err());
        let unsat = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let g = gap_instance(&unsat).unwrap();
        assert_eq!(decide_via_automatizer(&g, 100, witness_searcher).unwrap().decision, Decision::Unsatisfiable);
    }
}
