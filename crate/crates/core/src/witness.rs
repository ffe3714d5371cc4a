//! Explicit short refutations of RREF(F,s) for satisfiable F.
//!
//! With `α ⊨ F`, the proof derives
//! `True(u) = P̄[u] ∨ D[u,1,α(X1)] ∨ … ∨ D[u,n,α(Xn)]` for `u = 1..s` in
//! order and closes with `n` cuts against (A21) and one against (A24).

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, Cnf, Lit, Var};
use crate::encode::{encode_rref, EncodeError, Family, IndexedCnf, RefDims, RefVar, Variant};
use crate::proof::{Proof, ProofLine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("the assignment leaves X{0} unassigned")]
    Partial(u32),
    #[error("the assignment falsifies clause C{0}")]
    Unsatisfied(usize),
    #[error("premises must be RREF or RREF′, got {0:?}")]
    NotRelativized(Variant),
    #[error("premises were generated for a different formula")]
    DimensionMismatch,
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("premise clause {0} is missing from the formula")]
    MissingPremise(Clause),
}

/// `True(u)` over the numbering of `dims` (which must include the P block).
pub fn true_clause(dims: &RefDims, u: usize, alpha: &Assignment) -> Clause {
    let mut lits = vec![dims.lit(RefVar::P { u }, false)];
    for i in 1..=dims.n {
        let b = alpha.get(Var::new(i as u32)).expect("total assignment");
        lits.push(dims.lit(RefVar::D { u, i, b }, true));
    }
    Clause::new(lits)
}

/// Number of resolution steps in the witness:
/// `(s+2+m) + (n+1) + Σ_{u=2..s} (n(n+2)(u-1) + ns + n+m+4)`.
pub fn cut_count(s: usize, n: usize, m: usize) -> u64 {
    let (s, n, m) = (s as u64, n as u64, m as u64);
    let tail: u64 = (2..=s).map(|u| n * (n + 2) * (u - 1) + n * s + n + m + 4).sum();
    (s + 2 + m) + (n + 1) + tail
}

/// For each clause `C_j`, the smallest `i` whose literal `X_i^(α(X_i))` is in `C_j`.
pub fn choose_literals(f: &Cnf, alpha: &Assignment) -> Result<Vec<usize>, WitnessError> {
    for i in 1..=f.num_vars() {
        if alpha.get(Var::new(i)).is_none() {
            return Err(WitnessError::Partial(i));
        }
    }
    f.clauses()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            c.iter()
                .find(|l| alpha.lit_value(**l) == Some(true))
                .map(|l| l.var().index() as usize)
                .ok_or(WitnessError::Unsatisfied(k + 1))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub proof: Proof,
    /// `i_j` per clause of F.
    pub choice: Vec<usize>,
    /// Line of `True(u)`, indexed by `u - 1`.
    pub true_lines: Vec<usize>,
    /// Number of lines weakening an (A19) clause to some `A0(j,u)`.
    pub a0_lines: usize,
}

/// Builds the refutation of `encode_rref(f, s, variant == Rref)`.
pub fn build_witness(f: &Cnf, alpha: &Assignment, s: usize, variant: Variant) -> Result<Witness, WitnessError> {
    if !variant.relativized() {
        return Err(WitnessError::NotRelativized(variant));
    }
    let premises = encode_rref(f, s, variant == Variant::Rref)?;
    build_witness_for(f, alpha, &premises)
}

/// Builds the refutation against an already generated RREF/RREF′ formula.
pub fn build_witness_for(f: &Cnf, alpha: &Assignment, premises: &IndexedCnf) -> Result<Witness, WitnessError> {
    if !premises.variant.relativized() {
        return Err(WitnessError::NotRelativized(premises.variant));
    }
    let dims = premises.dims;
    if dims.n != f.num_vars() as usize || dims.m != f.num_clauses() || premises.indices.len() != dims.s {
        return Err(WitnessError::DimensionMismatch);
    }
    let choice = choose_literals(f, alpha)?;
    let used: Vec<Family> = Family::ALL
        .iter()
        .copied()
        .filter(|f| !matches!(f, Family::A5 | Family::A6 | Family::A7 | Family::A8 | Family::A10))
        .collect();
    let b = Builder { dims, lookup: premises.lookup(&used), cached: HashMap::new(), proof: Proof::default() };
    b.run(alpha, &choice)
}

struct Builder {
    dims: RefDims,
    lookup: HashMap<Clause, usize>,
    cached: HashMap<usize, usize>,
    proof: Proof,
}

impl Builder {
    fn lit(&self, var: RefVar, sign: bool) -> Lit {
        self.dims.lit(var, sign)
    }

    fn pos(&self, var: RefVar) -> Lit {
        self.lit(var, true)
    }

    fn neg(&self, var: RefVar) -> Lit {
        self.lit(var, false)
    }

    fn var(&self, var: RefVar) -> Var {
        self.dims.var(var)
    }

    fn premise(&self, lits: Vec<Lit>) -> Result<(Clause, usize), WitnessError> {
        let c = Clause::new(lits);
        match self.lookup.get(&c) {
            Some(&j) => Ok((c, j)),
            None => Err(WitnessError::MissingPremise(c)),
        }
    }

    /// A line holding the premise clause itself, shared between uses.
    fn axiom(&mut self, lits: Vec<Lit>) -> Result<usize, WitnessError> {
        let (c, j) = self.premise(lits)?;
        if let Some(&line) = self.cached.get(&j) {
            return Ok(line);
        }
        let line = self.proof.push(ProofLine::axiom(c, j));
        self.cached.insert(j, line);
        Ok(line)
    }

    /// Resolves lines `a` and `b` on `pivot`, whichever holds it positively.
    fn cut(&mut self, a: usize, b: usize, pivot: Var, weaken_to: Option<Clause>) -> usize {
        let clause_of = |u: usize| &self.proof.lines[u - 1].clause;
        let (p, q) = if clause_of(a).contains(pivot.pos()) { (a, b) } else { (b, a) };
        let res = clause_of(p).resolve(clause_of(q), pivot).expect("complementary pivot");
        let clause = match weaken_to {
            Some(w) => {
                debug_assert!(res.is_subset_of(&w));
                w
            }
            None => res,
        };
        self.proof.push(ProofLine::resolvent(clause, p, q, pivot))
    }

    fn clause_with_true(&self, extra: &[Lit], u: usize, alpha: &Assignment) -> Clause {
        let t = true_clause(&self.dims, u, alpha);
        Clause::new(t.iter().copied().chain(extra.iter().copied()))
    }

    fn run(mut self, alpha: &Assignment, choice: &[usize]) -> Result<Witness, WitnessError> {
        let (n, m, s) = (self.dims.n, self.dims.m, self.dims.s);
        let val = |i: usize| alpha.get(Var::new(i as u32)).expect("total assignment");
        use RefVar::{D, I, L, P, R, V};

        // A0(j,u) as weakenings of (A19).
        let mut a0 = vec![vec![0; m + 1]; s + 1];
        for u in 1..=s {
            for j in 1..=m {
                let i = choice[j - 1];
                let b = val(i);
                let (_, k) = self.premise(vec![self.neg(P { u }), self.neg(I { u, j }), self.pos(D { u, i, b })])?;
                let c = self.clause_with_true(&[self.neg(I { u, j })], u, alpha);
                a0[u][j] = self.proof.push(ProofLine::axiom(c, k));
            }
        }
        let a0_lines = s * m;

        let mut true_lines = vec![0; s + 1];
        // True(1): (A4) against (A14) for every v, then (A12), (A2) and the A0(j,1).
        {
            let u = 1;
            let mut l = self.axiom(
                std::iter::once(self.neg(P { u })).chain((0..=s).map(|v| self.pos(R { u, v }))).collect(),
            )?;
            for v in 1..=s {
                let a14 = self.axiom(vec![self.neg(P { u }), self.neg(R { u, v })])?;
                l = self.cut(l, a14, self.var(R { u, v }), None);
            }
            let a12 = self.axiom(vec![self.neg(P { u }), self.neg(I { u, j: 0 }), self.neg(R { u, v: 0 })])?;
            l = self.cut(l, a12, self.var(R { u, v: 0 }), None);
            true_lines[u] = self.finish_with_a2(l, u, &a0[u])?;
        }

        for u in 2..=s {
            let mut a1 = vec![0; n + 1];
            for i in 1..=n {
                let b = val(i);
                // b = 1 uses L with (A15)/(A17)/(A22)/(A3)/(A13); b = 0 uses R with
                // (A16)/(A18)/(A23)/(A4)/(A14).
                let parent = |u: usize, v: usize| if b { L { u, v } } else { R { u, v } };
                let mut per_v = vec![0; u];
                for v in 1..u {
                    let a15 = self.axiom(vec![
                        self.neg(P { u }),
                        self.neg(P { u: v }),
                        self.neg(parent(u, v)),
                        self.neg(V { u, i }),
                        self.pos(D { u: v, i, b: !b }),
                    ])?;
                    let a20 = self.axiom(vec![
                        self.neg(P { u: v }),
                        self.neg(D { u: v, i, b: false }),
                        self.neg(D { u: v, i, b: true }),
                    ])?;
                    let mut l = self.cut(a15, a20, self.var(D { u: v, i, b: !b }), None);
                    l = self.cut(l, true_lines[v], self.var(D { u: v, i, b }), None);
                    for i2 in (1..=n).filter(|&i2| i2 != i) {
                        let b2 = val(i2);
                        let a17 = self.axiom(vec![
                            self.neg(P { u }),
                            self.neg(P { u: v }),
                            self.neg(parent(u, v)),
                            self.neg(V { u, i }),
                            self.neg(D { u: v, i: i2, b: b2 }),
                            self.pos(D { u, i: i2, b: b2 }),
                        ])?;
                        l = self.cut(l, a17, self.var(D { u: v, i: i2, b: b2 }), None);
                    }
                    let a22 = self.axiom(vec![self.neg(P { u }), self.neg(parent(u, v)), self.pos(P { u: v })])?;
                    per_v[v] = self.cut(l, a22, self.var(P { u: v }), None);
                }
                let mut l = self.axiom(
                    std::iter::once(self.neg(P { u })).chain((0..=s).map(|v| self.pos(parent(u, v)))).collect(),
                )?;
                for v in 1..=s {
                    let other = if v < u { per_v[v] } else { self.axiom(vec![self.neg(P { u }), self.neg(parent(u, v))])? };
                    let weaken = (v == s).then(|| {
                        self.clause_with_true(&[self.neg(V { u, i }), self.pos(parent(u, 0))], u, alpha)
                    });
                    l = self.cut(l, other, self.var(parent(u, v)), weaken);
                }
                a1[i] = l;
            }
            let mut l =
                self.axiom(std::iter::once(self.neg(P { u })).chain((0..=n).map(|i| self.pos(V { u, i }))).collect())?;
            for i in 1..=n {
                let weaken = (i == n).then(|| {
                    self.clause_with_true(
                        &[self.pos(V { u, i: 0 }), self.pos(L { u, v: 0 }), self.pos(R { u, v: 0 })],
                        u,
                        alpha,
                    )
                });
                l = self.cut(l, a1[i], self.var(V { u, i }), weaken);
            }
            let i0 = self.neg(I { u, j: 0 });
            let a9 = self.axiom(vec![self.neg(P { u }), i0, self.neg(V { u, i: 0 })])?;
            l = self.cut(l, a9, self.var(V { u, i: 0 }), None);
            let a11 = self.axiom(vec![self.neg(P { u }), i0, self.neg(L { u, v: 0 })])?;
            l = self.cut(l, a11, self.var(L { u, v: 0 }), None);
            let a12 = self.axiom(vec![self.neg(P { u }), i0, self.neg(R { u, v: 0 })])?;
            l = self.cut(l, a12, self.var(R { u, v: 0 }), None);
            true_lines[u] = self.finish_with_a2(l, u, &a0[u])?;
        }

        // n cuts with (A21) and one with (A24).
        let mut l = true_lines[s];
        for i in 1..=n {
            let b = val(i);
            let a21 = self.axiom(vec![self.neg(P { u: s }), self.neg(D { u: s, i, b })])?;
            l = self.cut(l, a21, self.var(D { u: s, i, b }), None);
        }
        let a24 = self.axiom(vec![self.pos(P { u: s })])?;
        self.cut(l, a24, self.var(P { u: s }), None);

        true_lines.remove(0);
        Ok(Witness { proof: self.proof, choice: choice.to_vec(), true_lines, a0_lines })
    }

    /// From `P̄[u] ∨ Ī[u,0] ∨ …`, cut (A2) on `I[u,0]` and then every
    /// `A0(j,u)` on `I[u,j]`.
    fn finish_with_a2(&mut self, line: usize, u: usize, a0: &[usize]) -> Result<usize, WitnessError> {
        let m = self.dims.m;
        let a2 = self.axiom(
            std::iter::once(self.neg(RefVar::P { u })).chain((0..=m).map(|j| self.pos(RefVar::I { u, j }))).collect(),
        )?;
        let mut l = self.cut(line, a2, self.var(RefVar::I { u, j: 0 }), None);
        for j in 1..=m {
            l = self.cut(l, a0[j], self.var(RefVar::I { u, j }), None);
        }
        Ok(l)
    }
}
