//! Random restrictions of RREF(F,t) that collapse it onto REF(F,A).
//!
//! Sampling draws one coin per variable from `ChaCha8Rng::seed_from_u64(seed)`,
//! each coin being the lowest bit of `next_u32()`, in this order:
//!
//! 1. `P[u]` for `u = 1..t`; the active set `A` is `{u : P[u] = 1}`;
//! 2. (no coins) `L[u,v] = R[u,v] = 0` for `u ∈ A`, `v ∉ A`;
//! 3. for `u ∉ A` ascending, every other variable mentioning `u`: `D[u,i,b]`
//!    (by `i`, then `b`), `V[u,0..n]`, `I[u,0..m]`, `L[u,0..t]`, `R[u,0..t]`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{restrict_clause, Assignment, Clause, Cnf, Restricted};
use crate::encode::{encode_ref, encode_ref_over, index_width, Family, IndexedCnf, RefDims, RefVar, Reindex};
use crate::proof::{proof_width, restrict_proof, Justification, Proof, ProofLine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomRestriction {
    pub t: usize,
    pub seed: Option<u64>,
    /// Numbering of RREF(F,t).
    pub dims: RefDims,
    pub rho: Assignment,
    /// Active indices, ascending.
    pub active: Vec<usize>,
}

impl RandomRestriction {
    pub fn last_active(&self) -> bool {
        self.rho.get(self.dims.var(RefVar::P { u: self.t })) == Some(true)
    }

    fn is_active(&self, u: usize) -> bool {
        self.active.binary_search(&u).is_ok()
    }
}

/// Variables other than `P[u]` mentioning `u`, in sampling order.
fn vars_mentioning(dims: &RefDims, u: usize) -> impl Iterator<Item = RefVar> + '_ {
    let d = (1..=dims.n).flat_map(move |i| [false, true].map(|b| RefVar::D { u, i, b }));
    let v = (0..=dims.n).map(move |i| RefVar::V { u, i });
    let j = (0..=dims.m).map(move |j| RefVar::I { u, j });
    let l = (0..=dims.s).map(move |v| RefVar::L { u, v });
    let r = (0..=dims.s).map(move |v| RefVar::R { u, v });
    d.chain(v).chain(j).chain(l).chain(r)
}

fn build(dims: RefDims, seed: Option<u64>, mut coin: impl FnMut(RefVar) -> bool) -> RandomRestriction {
    let t = dims.s;
    let mut rho = Assignment::with_capacity(dims.num_vars() as u32);
    let mut active = Vec::new();
    for u in 1..=t {
        let p = RefVar::P { u };
        let value = coin(p);
        rho.set(dims.var(p), value);
        if value {
            active.push(u);
        }
    }
    let mut inactive = vec![true; t + 1];
    for &u in &active {
        inactive[u] = false;
    }
    for &u in &active {
        for v in (1..=t).filter(|&v| inactive[v]) {
            for var in [RefVar::L { u, v }, RefVar::R { u, v }] {
                let prev = rho.set(dims.var(var), false);
                debug_assert!(prev.is_none());
            }
        }
    }
    for u in (1..=t).filter(|&u| inactive[u]) {
        for var in vars_mentioning(&dims, u) {
            let prev = rho.set(dims.var(var), coin(var));
            debug_assert!(prev.is_none(), "steps assign disjoint variables");
        }
    }
    RandomRestriction { t, seed, dims, rho, active }
}

/// The random restriction for RREF(F,t) with `n` variables and `m` clauses.
pub fn sample_restriction(n: usize, m: usize, t: usize, seed: u64) -> RandomRestriction {
    assert!(t >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(RefDims::new(n, m, t, true), Some(seed), |_| rng.next_u32() & 1 == 1)
}

/// Every coin lands 1: `A = [t]` and only the P variables are set.
pub fn all_active(n: usize, m: usize, t: usize) -> RandomRestriction {
    build(RefDims::new(n, m, t, true), None, |_| true)
}

/// Every coin lands 0: `A = ∅` and every variable is set to 0.
pub fn all_inactive(n: usize, m: usize, t: usize) -> RandomRestriction {
    build(RefDims::new(n, m, t, true), None, |_| false)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupportViolation {
    #[error("P[{0}] is unassigned")]
    UnsetP(usize),
    #[error("the active set does not match the P values")]
    ActiveSet,
    #[error("{0} should be 0")]
    NotForcedZero(RefVar),
    #[error("{0} should be assigned")]
    Unassigned(RefVar),
    #[error("{0} should be unassigned")]
    Extra(RefVar),
}

/// Checks that `r` lies in the support of the sampling experiment.
pub fn check_support(r: &RandomRestriction) -> Result<(), SupportViolation> {
    let dims = &r.dims;
    let mut active = Vec::new();
    for u in 1..=r.t {
        match r.rho.get(dims.var(RefVar::P { u })) {
            None => return Err(SupportViolation::UnsetP(u)),
            Some(true) => active.push(u),
            Some(false) => {}
        }
    }
    if active != r.active {
        return Err(SupportViolation::ActiveSet);
    }
    for u in 1..=r.t {
        for var in vars_mentioning(dims, u) {
            let value = r.rho.get(dims.var(var));
            if !r.is_active(u) {
                if value.is_none() {
                    return Err(SupportViolation::Unassigned(var));
                }
                continue;
            }
            let forced = match var {
                RefVar::L { v, .. } | RefVar::R { v, .. } => v != 0 && !r.is_active(v),
                _ => false,
            };
            match (forced, value) {
                (true, Some(false)) | (false, None) => {}
                (true, _) => return Err(SupportViolation::NotForcedZero(var)),
                (false, Some(_)) => return Err(SupportViolation::Extra(var)),
            }
        }
    }
    Ok(())
}

/// `<var-name> <0|1>` lines in variable order, preceded by an `A:` line.
pub fn write_restriction(r: &RandomRestriction) -> String {
    let a: Vec<String> = r.active.iter().map(|u| u.to_string()).collect();
    let mut out = format!("A: {}\n", a.join(" "));
    for (var, value) in r.rho.iter() {
        let name = r.dims.decode(var).expect("variable of RREF(F,t)");
        out.push_str(&format!("{name} {}\n", u8::from(value)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub satisfied: usize,
    pub mapped: usize,
    /// Falsified clauses with their family; only (A24) when `P[t] = 0`.
    pub falsified: Vec<(usize, Family)>,
    /// Mapped clauses equal REF(F,A) as multisets.
    pub matches_ref_over: bool,
    /// Mapped clauses, reindexed along `A → [|A|]`, equal REF(F,|A|).
    pub matches_ref_reindexed: bool,
}

fn sorted(mut v: Vec<Clause>) -> Vec<Clause> {
    v.sort();
    v
}

/// Splits the clauses of RREF(F,t) into those satisfied by `ρ` and those
/// mapped onto clauses of REF(F,A).
pub fn classify_restricted_formula(f: &Cnf, rref: &IndexedCnf, r: &RandomRestriction) -> Classification {
    let mut mapped = Vec::new();
    let mut satisfied = 0;
    let mut falsified = Vec::new();
    for (k, (c, tag)) in rref.cnf.clauses().iter().zip(&rref.tags).enumerate() {
        match restrict_clause(c, &r.rho) {
            Restricted::Satisfied => satisfied += 1,
            Restricted::Falsified => falsified.push((k + 1, *tag)),
            Restricted::Clause(c) => mapped.push(c),
        }
    }
    let count = mapped.len();
    let (mut over, mut reindexed) = (false, false);
    if let Ok(target) = encode_ref_over(f, &r.active, r.t) {
        let mapped = sorted(mapped);
        over = mapped == sorted(target.cnf.clauses().to_vec());
        let map = Reindex::new(target.dims, &r.active);
        let small = encode_ref(f, r.active.len()).expect("non-empty index set");
        reindexed = mapped.iter().map(|c| map.map_clause(c)).collect::<Option<Vec<_>>>().map(sorted)
            == Some(sorted(small.cnf.clauses().to_vec()));
    }
    Classification { satisfied, mapped: count, falsified, matches_ref_over: over, matches_ref_reindexed: reindexed }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("P[t] is mapped to 0, so the restriction falsifies (A24)")]
    InactiveLast,
    #[error("line {line} maps to a clause outside REF(F,|A|)")]
    Unmapped { line: usize },
}

#[derive(Debug, Clone)]
pub struct ReindexedProof {
    pub proof: Proof,
    /// REF(F,|A|), the premises of `proof`.
    pub target: IndexedCnf,
    pub max_index_width: usize,
}

/// `Π↾ρ` transported along `A → [|A|]` onto REF(F,|A|).
pub fn restrict_and_reindex_proof(
    f: &Cnf,
    rref: &IndexedCnf,
    proof: &Proof,
    r: &RandomRestriction,
) -> Result<ReindexedProof, RestrictError> {
    if !r.last_active() {
        return Err(RestrictError::InactiveLast);
    }
    let (premises, restricted) = restrict_proof(&rref.cnf, proof, &r.rho);
    let from = RefDims::new(r.dims.n, r.dims.m, r.t, false);
    let map = Reindex::new(from, &r.active);
    let target = encode_ref(f, r.active.len()).expect("non-empty index set");
    let lookup = target.lookup(&Family::ALL);
    let mut lines = Vec::with_capacity(restricted.len());
    for (k, line) in restricted.lines.iter().enumerate() {
        let unmapped = RestrictError::Unmapped { line: k + 1 };
        let clause = map.map_clause(&line.clause).ok_or(unmapped.clone())?;
        let justification = match line.justification {
            Justification::Axiom { premise } => {
                let c = premises.clause(premise).and_then(|c| map.map_clause(c)).ok_or(unmapped.clone())?;
                Justification::Axiom { premise: *lookup.get(&c).ok_or(unmapped)? }
            }
            Justification::Resolvent { positive, negative, pivot } => {
                let pivot = map.map_var(pivot).ok_or(unmapped)?;
                Justification::Resolvent { positive, negative, pivot }
            }
        };
        lines.push(ProofLine { clause, justification });
    }
    let proof = Proof::new(lines);
    let max_index_width = proof.lines.iter().map(|l| index_width(&l.clause, &target.dims)).max().unwrap_or(0);
    Ok(ReindexedProof { proof, target, max_index_width })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    /// `Π↾ρ` has index-width below `w`.
    pub index_width_ok: bool,
    /// `|A| ≥ 6nw`.
    pub a_size_ok: bool,
    /// `ρ(P[t]) = 1`.
    pub pt_ok: bool,
    pub max_index_width: usize,
    pub a_size: usize,
    pub length: usize,
    pub restricted_length: usize,
    pub restricted_width: usize,
}

pub fn restriction_report(rref: &IndexedCnf, proof: &Proof, r: &RandomRestriction, w: usize) -> RestrictionReport {
    let (_, restricted) = restrict_proof(&rref.cnf, proof, &r.rho);
    let dims = RefDims::new(r.dims.n, r.dims.m, r.t, true);
    let max_index_width = restricted.lines.iter().map(|l| index_width(&l.clause, &dims)).max().unwrap_or(0);
    RestrictionReport {
        index_width_ok: max_index_width < w,
        a_size_ok: r.active.len() >= 6 * r.dims.n * w,
        pt_ok: r.last_active(),
        max_index_width,
        a_size: r.active.len(),
        length: proof.len(),
        restricted_length: restricted.len(),
        restricted_width: proof_width(&restricted),
    }
}
