//! Conditions: pairs of partial injections from the line indices of REF(F,s)
//! into those of the full-tree refutation of F, and the partial assignments
//! they induce.
//!
//! Everything is relative to a [`BlockContext`]: an unsatisfiable `F` on `n`
//! variables, a width `w` and a length `s`, with `s* = 2^(n+1) - 1` and `k`
//! the integer with `2^k < 3w ≤ 2^(k+1)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Cnf};
use crate::encode::{encode_ref, index_width, ref_clauses_within, Family, RefDims, RefVar};
use crate::proof::{check_proof, Justification, Proof, Verdict};
use crate::structure::{full_tree, FullTree, RefStructure, TreeNumbering};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("F has no variables")]
    NoVariables,
    #[error("n = {0} is too large for an explicit full tree")]
    TooLarge(usize),
    #[error("w must be at least 1")]
    ZeroWidth,
    #[error("F is satisfiable, so it has no full-tree refutation")]
    Satisfiable,
    #[error("parameters n={n}, s={s}, w={w} violate 2^n ≥ s ≥ 6nw with 1 ≤ k < n")]
    Regime { n: usize, s: usize, w: usize },
    #[error("parameters n={n}, s={s}, w={w} leave some block empty")]
    Degenerate { n: usize, s: usize, w: usize },
}

/// The integer `k` with `2^k < 3w ≤ 2^(k+1)`.
pub fn block_exponent(w: usize) -> usize {
    assert!(w >= 1);
    let mut k = 0;
    while (1usize << (k + 1)) < 3 * w {
        k += 1;
    }
    k
}

/// Whether `2^n ≥ s ≥ 6nw` and `1 ≤ k < n`.
pub fn regime_holds(n: usize, s: usize, w: usize) -> bool {
    if w == 0 || n == 0 {
        return false;
    }
    let k = block_exponent(w);
    let pow_ok = n >= usize::BITS as usize - 1 || (1usize << n) >= s;
    pow_ok && s >= 6 * n * w && k >= 1 && k < n
}

/// Blocks `B_0..B_{n-k}` of `[s]` and `B*_0..B*_{n-k}` of `[s*]`, the
/// bijection `t : B_0 → B*_0` and the full-tree refutation of F.
#[derive(Debug, Clone)]
pub struct BlockContext {
    pub n: usize,
    pub w: usize,
    pub s: usize,
    pub s_star: usize,
    pub k: usize,
    pub f: Cnf,
    tree: RefStructure,
    numbering: TreeNumbering,
}

impl BlockContext {
    /// Requires the parameter regime.
    pub fn new(f: &Cnf, s: usize, w: usize) -> Result<Self, ContextError> {
        Self::build(f, s, w, true)
    }

    /// Only requires the blocks to be well defined: `1 ≤ k < n` and
    /// `s ≥ 2^(k+1) (n-k)`. Used to exercise the machinery on small inputs.
    pub fn relaxed(f: &Cnf, s: usize, w: usize) -> Result<Self, ContextError> {
        Self::build(f, s, w, false)
    }

    fn build(f: &Cnf, s: usize, w: usize, strict: bool) -> Result<Self, ContextError> {
        let n = f.num_vars() as usize;
        if n == 0 {
            return Err(ContextError::NoVariables);
        }
        if n > 16 {
            return Err(ContextError::TooLarge(n));
        }
        if w == 0 {
            return Err(ContextError::ZeroWidth);
        }
        if strict && !regime_holds(n, s, w) {
            return Err(ContextError::Regime { n, s, w });
        }
        let k = block_exponent(w);
        if k < 1 || k >= n || s < (1 << (k + 1)) * (n - k) {
            return Err(ContextError::Degenerate { n, s, w });
        }
        let tree = match full_tree(f) {
            FullTree::Refutation(st) => st,
            FullTree::CounterModel(_) => return Err(ContextError::Satisfiable),
        };
        let numbering = TreeNumbering { n };
        Ok(BlockContext { n, w, s, s_star: numbering.len(), k, f: f.clone(), tree, numbering })
    }

    pub fn tree(&self) -> &RefStructure {
        &self.tree
    }

    /// Numbering of REF(F,s).
    pub fn dims(&self) -> RefDims {
        RefDims::new(self.n, self.f.num_clauses(), self.s, false)
    }

    fn width(&self) -> usize {
        1 << (self.k + 1)
    }

    pub fn num_blocks(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn block_range(&self, i: usize) -> RangeInclusive<usize> {
        let (s, c, last) = (self.s, self.width(), self.n - self.k);
        match i {
            0 => s + 2 - c..=s,
            _ if i < last => s + 2 - c * (i + 1)..=s + 1 - c * i,
            _ if i == last => 1..=s + 1 - c * last,
            _ => panic!("block {i} out of range"),
        }
    }

    pub fn star_block_range(&self, i: usize) -> RangeInclusive<usize> {
        match i {
            0 => self.s_star + 2 - self.width()..=self.s_star,
            _ => {
                let level = self.k + i;
                assert!(level <= self.n, "block {i} out of range");
                self.numbering.node(level, 0)..=self.numbering.node(level, (1 << level) - 1)
            }
        }
    }

    /// The `i` with `u ∈ B_i`, for `u ∈ [s]`.
    pub fn block(&self, u: usize) -> usize {
        debug_assert!((1..=self.s).contains(&u));
        ((self.s + 1 - u) / self.width()).min(self.n - self.k)
    }

    /// The `i` with `x ∈ B*_i`, for `x ∈ [s*]`.
    pub fn star_block(&self, x: usize) -> usize {
        let (level, _) = self.numbering.locate(x);
        level.saturating_sub(self.k)
    }

    pub fn t(&self, u: usize) -> usize {
        u + self.s_star - self.s
    }

    pub fn t_inv(&self, x: usize) -> usize {
        x + self.s - self.s_star
    }

    /// `L*(x)`: the child `n_{a0}` of an inner node, 0 at a leaf.
    pub fn left(&self, x: usize) -> usize {
        self.tree.l_of(x)
    }

    /// `R*(x)`: the child `n_{a1}` of an inner node, 0 at a leaf.
    pub fn right(&self, x: usize) -> usize {
        self.tree.r_of(x)
    }

    /// `∂I = {L*(x), R*(x) : x ∈ I \ {0}}`.
    pub fn boundary<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> BTreeSet<usize> {
        set.into_iter().filter(|&&x| x != 0).flat_map(|&x| [self.left(x), self.right(x)]).collect()
    }
}

pub type PartialMap = BTreeMap<usize, usize>;

/// Image of a partial map.
pub fn image(h: &PartialMap) -> BTreeSet<usize> {
    h.values().copied().collect()
}

/// Preimage of `x` under an injective partial map.
pub fn preimage(h: &PartialMap, x: usize) -> Option<usize> {
    h.iter().find(|(_, &y)| y == x).map(|(&u, _)| u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HRule {
    /// A key or value outside `[s] ∪ {0}` / `[s*] ∪ {0}`.
    Range,
    H1,
    H2,
    H3,
    H4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[error("{rule:?} violated at u={u} (image {image})")]
pub struct HViolation {
    pub rule: HRule,
    pub u: usize,
    pub image: usize,
}

/// Checks membership in the family 𝓗: (H1)–(H4) in this order.
pub fn check_script_h(h: &PartialMap, ctx: &BlockContext) -> Result<(), HViolation> {
    let bad = |rule, u, image| Err(HViolation { rule, u, image });
    for (&u, &x) in h {
        if u > ctx.s || x > ctx.s_star {
            return bad(HRule::Range, u, x);
        }
    }
    let mut seen = BTreeMap::new();
    for (&u, &x) in h {
        if seen.insert(x, u).is_some() {
            return bad(HRule::H1, u, x);
        }
    }
    match h.get(&0) {
        Some(0) => {}
        Some(&x) => return bad(HRule::H2, 0, x),
        None => return bad(HRule::H2, 0, 0),
    }
    for (&u, &x) in h.range(1..) {
        if ctx.block(u) == 0 && x != ctx.t(u) {
            return bad(HRule::H3, u, x);
        }
    }
    for (&u, &x) in h.range(1..) {
        let i = ctx.block(u);
        if i != 0 && (x == 0 || ctx.star_block(x) != i) {
            return bad(HRule::H4, u, x);
        }
    }
    Ok(())
}

/// A pair `(g, h)` of maps in 𝓗 with `g ⊆ h` and `Img(h) = Img(g) ∪ ∂Img(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub g: PartialMap,
    pub h: PartialMap,
}

impl Condition {
    /// `p0 = ({(0,0)}, {(0,0)})`.
    pub fn initial() -> Self {
        let m = PartialMap::from([(0, 0)]);
        Condition { g: m.clone(), h: m }
    }

    /// `Dom(g) \ {0}`, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.g.keys().copied().filter(|&u| u != 0).collect()
    }

    /// Whether `p` extends `other`, i.e. `h ⊇ other.h`.
    pub fn extends(&self, other: &Condition) -> bool {
        other.h.iter().all(|(u, x)| self.h.get(u) == Some(x))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: &PartialMap| m.iter().map(|(u, x)| format!("{u}->{x}")).collect::<Vec<_>>().join(",");
        write!(f, "g={{{}}} h={{{}}}", show(&self.g), show(&self.h))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
pub enum ConditionViolation {
    #[error("g: {0}")]
    G(HViolation),
    #[error("h: {0}")]
    H(HViolation),
    #[error("(C1) g({u}) is not h({u})")]
    C1 { u: usize },
    #[error("(C2) {x} is in exactly one of Img(h) and Img(g) ∪ ∂Img(g)")]
    C2 { x: usize },
}

pub fn is_condition(p: &Condition, ctx: &BlockContext) -> Result<(), ConditionViolation> {
    check_script_h(&p.g, ctx).map_err(ConditionViolation::G)?;
    check_script_h(&p.h, ctx).map_err(ConditionViolation::H)?;
    for (&u, &x) in &p.g {
        if p.h.get(&u) != Some(&x) {
            return Err(ConditionViolation::C1 { u });
        }
    }
    let img_g = image(&p.g);
    let mut wanted = ctx.boundary(&img_g);
    wanted.extend(img_g);
    let img_h = image(&p.h);
    if let Some(&x) = wanted.symmetric_difference(&img_h).next() {
        return Err(ConditionViolation::C2 { x });
    }
    Ok(())
}

/// How the child `L*(h(v))` (or `R*(h(v))`) relates to the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChildCase {
    /// `v ∈ B_{n-k}`: `h(v)` is a leaf, the child is 0.
    Leaf,
    /// `v ∈ B_i`, `1 ≤ i < n-k`: the child lies in `B*_{i+1}`.
    NextBlock(usize),
    /// `v ∈ B_0` and the child stays in `B*_0`.
    WithinTop,
    /// `v ∈ B_0` and the child lies in `B*_1`.
    TopToFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationWitness {
    pub v: usize,
    pub left: ChildCase,
    pub right: ChildCase,
    /// `h^{-1}(L*(h(v)))` and `h^{-1}(R*(h(v)))` where defined.
    pub left_preimage: Option<usize>,
    pub right_preimage: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
pub enum PreservationError {
    #[error("{0} is not in Dom(h) \\ {{0}}")]
    Precondition(usize),
    #[error("item {item} fails for u={u}, v={v}")]
    Item { item: u8, u: usize, v: usize },
}

/// Items 1–3 for `h ∈ 𝓗` and `u, v ∈ Dom(h) \ {0}`: `h(u), h(v) ≠ 0`, and
/// the preimages of `L*(h(v))`, `R*(h(v))` (when in `Img(h)`) are below `v`.
pub fn claim_preservation(
    h: &PartialMap,
    u: usize,
    v: usize,
    ctx: &BlockContext,
) -> Result<PreservationWitness, PreservationError> {
    for x in [u, v] {
        if x == 0 || !h.contains_key(&x) {
            return Err(PreservationError::Precondition(x));
        }
    }
    if h[&u] == 0 || h[&v] == 0 {
        return Err(PreservationError::Item { item: 1, u, v });
    }
    let hv = h[&v];
    let case = |child: usize| match ctx.block(v) {
        0 if child != 0 && ctx.star_block(child) == 0 => ChildCase::WithinTop,
        0 => ChildCase::TopToFirst,
        i if i == ctx.n - ctx.k => ChildCase::Leaf,
        i => ChildCase::NextBlock(i),
    };
    let mut pre = [None, None];
    for (k, child) in [ctx.left(hv), ctx.right(hv)].into_iter().enumerate() {
        if let Some(w) = preimage(h, child) {
            if w >= v {
                return Err(PreservationError::Item { item: 2 + k as u8, u, v });
            }
            pre[k] = Some(w);
        }
    }
    Ok(PreservationWitness {
        v,
        left: case(ctx.left(hv)),
        right: case(ctx.right(hv)),
        left_preimage: pre[0],
        right_preimage: pre[1],
    })
}

/// `α(p)`: defined exactly on the variables of REF(F,s) mentioning some
/// `u ∈ Dom(g) \ {0}`, copying the full-tree values at `g(u)`; `L[u,v]` is
/// true iff `v = h^{-1}(L*(g(u)))`, and `R[u,v]` iff `v = h^{-1}(R*(g(u)))`.
///
/// # Panics
/// If `p` is not a condition and a needed preimage is missing.
pub fn condition_assignment(p: &Condition, ctx: &BlockContext) -> Assignment {
    let dims = ctx.dims();
    let tree = &ctx.tree;
    let mut a = Assignment::with_capacity(dims.num_vars() as u32);
    for (&u, &x) in p.g.range(1..) {
        for i in 1..=ctx.n {
            for b in [false, true] {
                a.set(dims.var(RefVar::D { u, i, b }), tree.has(x, i, b));
            }
        }
        for i in 0..=ctx.n {
            a.set(dims.var(RefVar::V { u, i }), tree.v_of(x) == i);
        }
        for j in 0..=dims.m {
            a.set(dims.var(RefVar::I { u, j }), tree.i_of(x) == j);
        }
        let lv = preimage(&p.h, ctx.left(x)).expect("L*(g(u)) has a preimage under h");
        let rv = preimage(&p.h, ctx.right(x)).expect("R*(g(u)) has a preimage under h");
        for v in 0..=ctx.s {
            a.set(dims.var(RefVar::L { u, v }), v == lv);
            a.set(dims.var(RefVar::R { u, v }), v == rv);
        }
    }
    a
}

/// `p↾I`: `g` restricted to `I ∪ {0}`, `h` restricted to the preimage of
/// `Img(g') ∪ ∂Img(g')`.
pub fn restrict_condition(p: &Condition, indices: &[usize], ctx: &BlockContext) -> Condition {
    let keep: BTreeSet<usize> = indices.iter().copied().chain([0]).collect();
    let g: PartialMap = p.g.iter().filter(|(u, _)| keep.contains(u)).map(|(&u, &x)| (u, x)).collect();
    let mut wanted = image(&g);
    wanted.extend(ctx.boundary(&image(&g)));
    let h = p.h.iter().filter(|(_, x)| wanted.contains(x)).map(|(&u, &x)| (u, x)).collect();
    Condition { g, h }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
pub enum ExtendError {
    #[error("{0} is not a line index")]
    OutOfRange(usize),
    #[error("no free image left in B*_{0}")]
    NoFreeImage(usize),
    #[error("no free preimage left in B_{0}")]
    NoFreePreimage(usize),
}

/// A condition extending `p` with `u` added to `Dom(g)`.
///
/// The image of `u` is `h(u)` if already defined, `t(u)` on `B_0`, and
/// otherwise the smallest free element of the matching `B*_i`. Children of
/// the new image missing from `Img(h)` get the preimage `t^{-1}` in `B*_0`
/// and the smallest free index of the matching `B_i` elsewhere.
pub fn extend_condition(p: &Condition, u: usize, ctx: &BlockContext) -> Result<Condition, ExtendError> {
    if u == 0 || u > ctx.s {
        return Err(ExtendError::OutOfRange(u));
    }
    if p.g.contains_key(&u) {
        return Ok(p.clone());
    }
    let mut h = p.h.clone();
    let mut used: BTreeSet<usize> = image(&h);
    let image_u = match h.get(&u) {
        Some(&x) => x,
        None => {
            let i = ctx.block(u);
            let x = if i == 0 {
                ctx.t(u)
            } else {
                ctx.star_block_range(i).find(|x| !used.contains(x)).ok_or(ExtendError::NoFreeImage(i))?
            };
            h.insert(u, x);
            used.insert(x);
            x
        }
    };
    for child in [ctx.left(image_u), ctx.right(image_u)] {
        if used.contains(&child) {
            continue;
        }
        debug_assert!(child != 0, "0 is always in Img(h)");
        let i = ctx.star_block(child);
        let v = if i == 0 {
            ctx.t_inv(child)
        } else {
            ctx.block_range(i).find(|v| !h.contains_key(v)).ok_or(ExtendError::NoFreePreimage(i))?
        };
        h.insert(v, child);
        used.insert(child);
    }
    let mut g = p.g.clone();
    g.insert(u, image_u);
    Ok(Condition { g, h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    /// Reject inputs that are not refutations of REF(F,s).
    pub require_valid_proof: bool,
    /// Reject inputs with a line of index-width `≥ w`.
    pub require_width: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions { require_valid_proof: true, require_width: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("the proof is empty")]
    EmptyProof,
    #[error("not a refutation of REF(F,s): line {line}: {reason}")]
    NotARefutation { line: usize, reason: crate::proof::RejectReason },
    #[error("line {line} has index-width {width}, not below w = {w}")]
    TooWide { line: usize, width: usize, w: usize },
    #[error(transparent)]
    Encode(#[from] crate::encode::EncodeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditStep {
    /// The resolvent line being explained.
    pub line: usize,
    /// Index mentioned by its pivot, added to `Dom(g)`.
    pub pivot_index: usize,
    /// The parent falsified by the extended condition.
    pub parent: usize,
    /// `Dom(g) \ {0}` after restricting to the parent's indices.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuditOutcome {
    /// An axiom line falsified by `α(p)`. If `premise_falsified` the cited
    /// premise itself is falsified, contradicting the axiom claim;
    /// otherwise the line is not a weakening of its premise.
    Contradiction { line: usize, premise: usize, premise_falsified: bool },
    /// The walk could not continue.
    Stuck { line: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub outcome: AuditOutcome,
    pub steps: Vec<AuditStep>,
    /// Largest `|Dom(g)|` (including 0) of a condition held during the walk.
    pub max_domain: usize,
}

/// Walks a claimed low-index-width refutation of REF(F,s) from its last line,
/// keeping a condition whose assignment falsifies the current line.
pub fn audit_refutation(
    proof: &Proof,
    ctx: &BlockContext,
    options: AuditOptions,
) -> Result<AuditReport, AuditError> {
    if proof.is_empty() {
        return Err(AuditError::EmptyProof);
    }
    let dims = ctx.dims();
    let premises = encode_ref(&ctx.f, ctx.s)?;
    if options.require_valid_proof {
        if let Verdict::Rejected { line, reason } = check_proof(&premises.cnf, proof, true) {
            return Err(AuditError::NotARefutation { line, reason });
        }
    }
    if options.require_width {
        for (k, l) in proof.lines.iter().enumerate() {
            let width = index_width(&l.clause, &dims);
            if width >= ctx.w {
                return Err(AuditError::TooWide { line: k + 1, width, w: ctx.w });
            }
        }
    }
    let mut steps = Vec::new();
    let mut p = Condition::initial();
    let mut max_domain = 1;
    let mut line = proof.len();
    let stuck = |line, detail: &str, steps, max_domain| AuditReport {
        outcome: AuditOutcome::Stuck { line, detail: detail.to_string() },
        steps,
        max_domain,
    };
    loop {
        let current = &proof.lines[line - 1];
        let alpha = condition_assignment(&p, ctx);
        if !alpha.falsifies(&current.clause) {
            return Ok(stuck(line, "the condition does not falsify this line", steps, max_domain));
        }
        match current.justification {
            Justification::Axiom { premise } => {
                let Some(c) = premises.cnf.clause(premise) else {
                    return Ok(stuck(line, "premise index out of range", steps, max_domain));
                };
                let outcome = AuditOutcome::Contradiction { line, premise, premise_falsified: alpha.falsifies(c) };
                return Ok(AuditReport { outcome, steps, max_domain });
            }
            Justification::Resolvent { positive, negative, pivot } => {
                let Some(u) = dims.mentioned(pivot) else {
                    return Ok(stuck(line, "pivot is not a variable of REF(F,s)", steps, max_domain));
                };
                let extended = match extend_condition(&p, u, ctx) {
                    Ok(q) => q,
                    Err(e) => return Ok(stuck(line, &format!("extension failed: {e}"), steps, max_domain)),
                };
                max_domain = max_domain.max(extended.g.len());
                let wider = condition_assignment(&extended, ctx);
                let parent = [positive, negative]
                    .into_iter()
                    .find(|&v| v >= 1 && v < line && wider.falsifies(&proof.lines[v - 1].clause));
                let Some(parent) = parent else {
                    return Ok(stuck(line, "neither parent is falsified", steps, max_domain));
                };
                let mentioned: Vec<usize> =
                    proof.lines[parent - 1].clause.iter().filter_map(|l| dims.mentioned(l.var())).collect();
                p = restrict_condition(&extended, &mentioned, ctx);
                steps.push(AuditStep { line, pivot_index: u, parent, support: p.support() });
                line = parent;
            }
        }
    }
}

/// Pass/fail counts for one property.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checks: u64,
    pub violations: u64,
    /// Description of the first violation seen, if any.
    pub first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.violations += other.violations;
        self.first = self.first.or(other.first);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimsReport {
    pub n: usize,
    pub w: usize,
    pub s: usize,
    pub trials: u64,
    pub seed: u64,
    /// Items 1–3 on pairs `u, v` of sampled maps in 𝓗.
    pub preservation: Tally,
    /// `p↾I` is a condition, extended by `p`, with `α(p↾I) ⊆ α(p)`.
    pub restriction: Tally,
    /// Extensions exist and are conditions with the right domain.
    pub extension: Tally,
    /// `|Dom(h)| ≤ 3|Dom(g)| - 2`.
    pub size_bound: Tally,
    /// `α(p) ⊆ α(p')` along extensions.
    pub monotone: Tally,
    /// No clause of REF(F,s) is falsified by `α(p)`.
    pub axioms: Tally,
    /// Clauses checked per family, (A1) to (A21).
    pub family_checks: Vec<(String, u64)>,
}

impl ClaimsReport {
    pub fn passed(&self) -> bool {
        [&self.preservation, &self.restriction, &self.extension, &self.size_bound, &self.monotone, &self.axioms]
            .iter()
            .all(|t| t.violations == 0 && t.checks > 0)
    }

    pub fn min_family_checks(&self) -> u64 {
        self.family_checks.iter().map(|(_, c)| *c).min().unwrap_or(0)
    }
}

#[derive(Default)]
struct TrialTally {
    preservation: Tally,
    restriction: Tally,
    extension: Tally,
    size_bound: Tally,
    monotone: Tally,
    axioms: Tally,
    families: [u64; 21],
}

impl TrialTally {
    fn merge(self, o: TrialTally) -> TrialTally {
        let mut families = self.families;
        for (a, b) in families.iter_mut().zip(o.families) {
            *a += b;
        }
        TrialTally {
            preservation: self.preservation.merge(o.preservation),
            restriction: self.restriction.merge(o.restriction),
            extension: self.extension.merge(o.extension),
            size_bound: self.size_bound.merge(o.size_bound),
            monotone: self.monotone.merge(o.monotone),
            axioms: self.axioms.merge(o.axioms),
            families,
        }
    }
}

/// A random member of 𝓗 with up to `3w` non-zero entries.
pub fn sample_h<R: Rng + ?Sized>(ctx: &BlockContext, rng: &mut R) -> PartialMap {
    let mut h = PartialMap::from([(0, 0)]);
    let r = rng.gen_range(1..=(3 * ctx.w).min(ctx.s));
    let mut used = BTreeSet::new();
    for k in rand::seq::index::sample(rng, ctx.s, r) {
        let u = k + 1;
        let i = ctx.block(u);
        let x = if i == 0 {
            ctx.t(u)
        } else {
            let free: Vec<usize> = ctx.star_block_range(i).filter(|x| !used.contains(x)).collect();
            match free.choose(rng) {
                Some(&x) => x,
                None => continue,
            }
        };
        used.insert(x);
        h.insert(u, x);
    }
    h
}

fn check_axioms(p: &Condition, alpha: &Assignment, ctx: &BlockContext, tally: &mut TrialTally) {
    let (cnf, tags) = ref_clauses_within(&ctx.f, ctx.s, &p.support()).expect("F was validated");
    for (c, tag) in cnf.clauses().iter().zip(tags) {
        tally.families[tag.number() - 1] += 1;
        tally.axioms.record(!alpha.falsifies(c), || format!("{tag} clause {c} falsified under {p}"));
    }
}

fn run_trial(ctx: &BlockContext, seed: u64, trial: u64) -> TrialTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut t = TrialTally::default();

    // A random chain of w extensions from p0.
    let mut p = Condition::initial();
    let mut alpha = condition_assignment(&p, ctx);
    for _ in 0..ctx.w {
        let free: Vec<usize> = (1..=ctx.s).filter(|u| !p.g.contains_key(u)).collect();
        let &u = free.choose(&mut rng).expect("s > w");
        let q = match extend_condition(&p, u, ctx) {
            Ok(q) => q,
            Err(e) => {
                t.extension.record(false, || format!("extending {p} by {u}: {e}"));
                break;
            }
        };
        let mut dom: BTreeSet<usize> = p.g.keys().copied().collect();
        dom.insert(u);
        let valid = is_condition(&q, ctx);
        let ok = valid.is_ok() && q.extends(&p) && q.g.keys().copied().eq(dom.iter().copied());
        t.extension.record(ok, || format!("extending {p} by {u} gave {q}: {valid:?}"));
        t.size_bound.record(q.h.len() + 2 <= 3 * q.g.len(), || format!("{q}"));
        let next = condition_assignment(&q, ctx);
        t.monotone.record(alpha.is_subassignment_of(&next), || format!("{p} to {q}"));
        check_axioms(&q, &next, ctx, &mut t);
        p = q;
        alpha = next;
    }

    // Items 1–3 on the final h and on a directly sampled member of 𝓗.
    for h in [p.h.clone(), sample_h(ctx, &mut rng)] {
        if let Err(e) = check_script_h(&h, ctx) {
            t.preservation.record(false, || format!("sampled map is not in H: {e}"));
            continue;
        }
        let keys: Vec<usize> = h.keys().copied().filter(|&u| u != 0).collect();
        for &u in &keys {
            for &v in &keys {
                let r = claim_preservation(&h, u, v, ctx);
                t.preservation.record(r.is_ok(), || format!("{r:?} on {h:?}"));
            }
        }
    }

    // Restriction to a random subset of the support plus a random index.
    let mut indices: Vec<usize> = p.support().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    indices.push(rng.gen_range(1..=ctx.s));
    let q = restrict_condition(&p, &indices, ctx);
    let valid = is_condition(&q, ctx);
    let expected_dom = p.g.keys().filter(|&&u| u == 0 || indices.contains(&u));
    let ok = valid.is_ok()
        && p.extends(&q)
        && q.g.keys().eq(expected_dom)
        && condition_assignment(&q, ctx).is_subassignment_of(&alpha);
    t.restriction.record(ok, || format!("{p} restricted to {indices:?} gave {q}: {valid:?}"));
    t
}

/// Randomized checks of the condition machinery; trial `k` draws from the
/// ChaCha8 stream `k` of `seed`.
pub fn run_claims(ctx: &BlockContext, trials: u64, seed: u64) -> ClaimsReport {
    let total = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(ctx, seed, k))
        .reduce(TrialTally::default, TrialTally::merge);
    ClaimsReport {
        n: ctx.n,
        w: ctx.w,
        s: ctx.s,
        trials,
        seed,
        preservation: total.preservation,
        restriction: total.restriction,
        extension: total.extension,
        size_bound: total.size_bound,
        monotone: total.monotone,
        axioms: total.axioms,
        family_checks: Family::REF.iter().map(|f| (f.to_string(), total.families[f.number() - 1])).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;
    use crate::proof::ProofLine;

    fn ctx(n: u32, s: usize, w: usize) -> BlockContext {
        BlockContext::new(&Cnf::from_dimacs_clauses(n, &[&[1], &[-1]]), s, w).unwrap()
    }

    #[test]
    fn block_arithmetic() {
        assert_eq!(block_exponent(2), 2);
        assert_eq!(block_exponent(1), 1);
        let c = ctx(7, 84, 2);
        assert_eq!((c.k, c.s_star), (2, 255));
        assert_eq!(c.block_range(0), 78..=84);
        assert_eq!(c.star_block_range(0), 249..=255);
        let mut covered = 0;
        for i in 0..c.num_blocks() {
            let (b, bs) = (c.block_range(i), c.star_block_range(i));
            covered += b.clone().count();
            assert!(b.clone().all(|u| c.block(u) == i));
            assert!(bs.clone().all(|x| c.star_block(x) == i));
            if i > 0 {
                assert!(b.clone().count() >= 6 && bs.count() >= b.count());
            }
        }
        assert_eq!(covered, 84);
        assert!(c.block_range(0).all(|u| c.t_inv(c.t(u)) == u && c.star_block(c.t(u)) == 0));
    }

    #[test]
    fn regime() {
        assert!(regime_holds(7, 84, 2));
        assert!(!regime_holds(4, 48, 2));
        assert!(matches!(
            BlockContext::new(&Cnf::from_dimacs_clauses(4, &[&[1], &[-1]]), 48, 2),
            Err(ContextError::Regime { .. })
        ));
        assert!(matches!(
            BlockContext::new(&Cnf::from_dimacs_clauses(7, &[&[1]]), 84, 2),
            Err(ContextError::Satisfiable)
        ));
    }

    #[test]
    fn boundaries() {
        let c = ctx(7, 84, 2);
        let root = c.s_star;
        let b = c.boundary(&[root]);
        assert_eq!(b, BTreeSet::from([c.left(root), c.right(root)]));
        assert!(c.boundary(&[0]).is_empty());
        let leaf = 1;
        assert_eq!(c.boundary(&[leaf]), BTreeSet::from([0]));
    }

    #[test]
    fn script_h_examples() {
        let c = ctx(7, 84, 2);
        assert_eq!(check_script_h(&PartialMap::from([(0, 0)]), &c), Ok(()));
        let u = 80;
        assert_eq!(check_script_h(&PartialMap::from([(0, 0), (u, c.t(u))]), &c), Ok(()));
        let bad = check_script_h(&PartialMap::from([(0, 0), (u, c.t(u) + 1)]), &c).unwrap_err();
        assert_eq!(bad.rule, HRule::H3);
        let x = *c.star_block_range(1).start();
        let two = PartialMap::from([(0, 0), (70, x), (71, x)]);
        assert_eq!(check_script_h(&two, &c).unwrap_err().rule, HRule::H1);
        let wrong_block = PartialMap::from([(0, 0), (70, *c.star_block_range(2).start())]);
        assert_eq!(check_script_h(&wrong_block, &c).unwrap_err().rule, HRule::H4);
        assert_eq!(check_script_h(&PartialMap::new(), &c).unwrap_err().rule, HRule::H2);
    }

    #[test]
    fn extending_the_root() {
        let c = ctx(7, 84, 2);
        let p = extend_condition(&Condition::initial(), 84, &c).unwrap();
        assert_eq!(p.g.get(&84), Some(&255));
        let img = image(&p.h);
        assert!(img.contains(&c.left(255)) && img.contains(&c.right(255)));
        assert_eq!(is_condition(&p, &c), Ok(()));
        assert!(p.h.len() + 2 <= 3 * p.g.len());
        let alpha = condition_assignment(&p, &c);
        let d = c.dims();
        for i in 1..=7 {
            for b in [false, true] {
                assert_eq!(alpha.get(d.var(RefVar::D { u: 84, i, b })), Some(false));
            }
        }
    }

    #[test]
    fn assignment_domain() {
        let c = ctx(7, 84, 2);
        assert!(condition_assignment(&Condition::initial(), &c).is_empty());
        let p = extend_condition(&Condition::initial(), 10, &c).unwrap();
        let p = extend_condition(&p, 80, &c).unwrap();
        let alpha = condition_assignment(&p, &c);
        let d = c.dims();
        for (var, _) in alpha.iter() {
            let u = d.mentioned(var).unwrap();
            assert!(u == 10 || u == 80);
        }
        let per_index = 2 * 7 + 8 + (c.f.num_clauses() + 1) + 2 * 85;
        assert_eq!(alpha.len(), 2 * per_index);
    }

    #[test]
    fn restriction_examples() {
        let c = ctx(7, 84, 2);
        let p = extend_condition(&Condition::initial(), 30, &c).unwrap();
        let p = extend_condition(&p, 84, &c).unwrap();
        assert_eq!(restrict_condition(&p, &p.support(), &c), p);
        assert_eq!(restrict_condition(&p, &[], &c), Condition::initial());
        let q = restrict_condition(&p, &[84], &c);
        assert_eq!(is_condition(&q, &c), Ok(()));
        assert!(condition_assignment(&q, &c).is_subassignment_of(&condition_assignment(&p, &c)));
    }

    #[test]
    fn extension_chain() {
        let c = ctx(7, 84, 2);
        for a in 1..=84 {
            for b in [1, 40, 77, 78, 84] {
                let p = extend_condition(&Condition::initial(), a, &c).unwrap();
                let q = extend_condition(&p, b, &c).unwrap();
                assert_eq!(is_condition(&q, &c), Ok(()), "{a} then {b}");
                assert!(q.h.len() + 2 <= 3 * q.g.len());
                assert!(q.extends(&p));
            }
        }
    }

    #[test]
    fn bogus_axiom_line() {
        let c = ctx(7, 84, 2);
        let proof = Proof::new(vec![ProofLine::axiom(Clause::empty(), 1)]);
        let opts = AuditOptions { require_valid_proof: false, require_width: true };
        let r = audit_refutation(&proof, &c, opts).unwrap();
        assert_eq!(r.outcome, AuditOutcome::Contradiction { line: 1, premise: 1, premise_falsified: false });
        assert!(matches!(audit_refutation(&proof, &c, AuditOptions::default()), Err(AuditError::NotARefutation { .. })));
    }

    #[test]
    fn walk_through_a_resolvent() {
        let c = ctx(7, 84, 2);
        let d = c.dims();
        let x = d.var(RefVar::D { u: 84, i: 1, b: false });
        let a21 = encode_ref(&c.f, 84).unwrap();
        let j = a21.cnf.clauses().iter().position(|cl| *cl == Clause::new([x.neg()])).unwrap() + 1;
        let proof = Proof::new(vec![
            ProofLine::axiom(Clause::new([x.pos()]), 1),
            ProofLine::axiom(Clause::new([x.neg()]), j),
            ProofLine::resolvent(Clause::empty(), 1, 2, x),
        ]);
        let opts = AuditOptions { require_valid_proof: false, require_width: true };
        let r = audit_refutation(&proof, &c, opts).unwrap();
        assert_eq!(r.outcome, AuditOutcome::Contradiction { line: 1, premise: 1, premise_falsified: false });
        assert_eq!(r.steps, vec![AuditStep { line: 3, pivot_index: 84, parent: 1, support: vec![84] }]);
    }

    #[test]
    fn small_claim_run() {
        let c = ctx(7, 84, 2);
        let r = run_claims(&c, 200, 1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r, run_claims(&c, 200, 1));
    }
}
