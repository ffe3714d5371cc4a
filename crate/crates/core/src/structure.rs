//! Refutations as finite structures `(D, V, I, L, R)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Clause, Cnf, Var};
use crate::encode::{RefDims, RefVar};
use crate::proof::{Proof, ProofLine};

/// A structure of length `s` over `n` variables and `m` clauses.
///
/// `v`, `i`, `l`, `r` are indexed by line `u - 1`; `d` holds the relation
/// `D ⊆ [s] × [n] × {0,1}` as a dense bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefStructure {
    pub s: usize,
    pub n: usize,
    pub m: usize,
    d: Vec<bool>,
    pub v: Vec<usize>,
    pub i: Vec<usize>,
    pub l: Vec<usize>,
    pub r: Vec<usize>,
}

impl RefStructure {
    /// All-zero structure of the given dimensions.
    pub fn new(s: usize, n: usize, m: usize) -> Self {
        RefStructure { s, n, m, d: vec![false; s * n * 2], v: vec![0; s], i: vec![0; s], l: vec![0; s], r: vec![0; s] }
    }

    fn slot(&self, u: usize, var: usize, b: bool) -> usize {
        ((u - 1) * self.n + (var - 1)) * 2 + usize::from(b)
    }

    pub fn has(&self, u: usize, var: usize, b: bool) -> bool {
        self.d[self.slot(u, var, b)]
    }

    pub fn set_d(&mut self, u: usize, var: usize, b: bool, value: bool) {
        let k = self.slot(u, var, b);
        self.d[k] = value;
    }

    /// Triples of `D` in lexicographic order.
    pub fn d_triples(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        (1..=self.s).flat_map(move |u| {
            (1..=self.n).flat_map(move |i| [false, true].into_iter().map(move |b| (u, i, b)))
        })
        .filter(|&(u, i, b)| self.has(u, i, b))
    }

    pub fn v_of(&self, u: usize) -> usize {
        self.v[u - 1]
    }
    pub fn i_of(&self, u: usize) -> usize {
        self.i[u - 1]
    }
    pub fn l_of(&self, u: usize) -> usize {
        self.l[u - 1]
    }
    pub fn r_of(&self, u: usize) -> usize {
        self.r[u - 1]
    }

    /// The clause `D_u` over `X1..Xn`.
    pub fn line_clause(&self, u: usize) -> Clause {
        Clause::new((1..=self.n).flat_map(|i| {
            [false, true].into_iter().filter(move |&b| self.has(u, i, b)).map(move |b| Var::new(i as u32).lit(b))
        }))
    }

    pub fn ref_dims(&self) -> RefDims {
        RefDims::new(self.n, self.m, self.s, false)
    }
}

/// The rules (R1)–(R8), checked in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4a,
    R4b,
    R5a,
    R5b,
    R6,
    R7,
    R8,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Named witnesses, e.g. `[("u", 3), ("v", 1), ("i", 1)]`.
    pub witness: Vec<(&'static str, usize)>,
}

impl Violation {
    fn new(rule: Rule, witness: &[(&'static str, usize)]) -> Self {
        Violation { rule, witness: witness.to_vec() }
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.witness.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("structure has n={structure} but F has {formula} variables")]
    Vars { structure: usize, formula: usize },
    #[error("structure has m={structure} but F has {formula} clauses")]
    Clauses { structure: usize, formula: usize },
    #[error("structure has length 0")]
    ZeroLength,
    #[error("{what} has {found} entries, expected {expected}")]
    Table { what: &'static str, found: usize, expected: usize },
    #[error("{what}({u}) = {value} is out of range")]
    Value { what: &'static str, u: usize, value: usize },
}

fn check_dimensions(f: &Cnf, st: &RefStructure) -> Result<(), DimensionError> {
    if st.n != f.num_vars() as usize {
        return Err(DimensionError::Vars { structure: st.n, formula: f.num_vars() as usize });
    }
    if st.m != f.num_clauses() {
        return Err(DimensionError::Clauses { structure: st.m, formula: f.num_clauses() });
    }
    if st.s == 0 {
        return Err(DimensionError::ZeroLength);
    }
    if st.d.len() != st.s * st.n * 2 {
        return Err(DimensionError::Table { what: "D", found: st.d.len(), expected: st.s * st.n * 2 });
    }
    for (what, table, max) in [("V", &st.v, st.n), ("I", &st.i, st.m), ("L", &st.l, st.s), ("R", &st.r, st.s)] {
        if table.len() != st.s {
            return Err(DimensionError::Table { what, found: table.len(), expected: st.s });
        }
        if let Some(k) = table.iter().position(|&x| x > max) {
            return Err(DimensionError::Value { what, u: k + 1, value: table[k] });
        }
    }
    Ok(())
}

/// Checks (R1)–(R8) in order and reports the first violated rule.
pub fn validate_structure(f: &Cnf, st: &RefStructure) -> Result<Option<Violation>, DimensionError> {
    check_dimensions(f, st)?;
    Ok(first_violation(f, st))
}

fn first_violation(f: &Cnf, st: &RefStructure) -> Option<Violation> {
    let lines = 1..=st.s;
    for u in lines.clone() {
        if (st.v_of(u) == 0) == (st.i_of(u) == 0) {
            return Some(Violation::new(Rule::R1, &[("u", u)]));
        }
    }
    for u in lines.clone() {
        if st.i_of(u) == 0 && (st.r_of(u) == 0 || st.l_of(u) == 0) {
            return Some(Violation::new(Rule::R2, &[("u", u)]));
        }
    }
    for u in lines.clone() {
        if st.l_of(u) >= u || st.r_of(u) >= u {
            return Some(Violation::new(Rule::R3, &[("u", u)]));
        }
    }
    // (R4)/(R5) only constrain lines with V(u) ≠ 0 and a non-zero parent.
    for (rule, parent_of, b) in [(Rule::R4a, RefStructure::l_of as fn(&RefStructure, usize) -> usize, false), (Rule::R4b, RefStructure::r_of, true)] {
        for u in lines.clone() {
            let (i, v) = (st.v_of(u), parent_of(st, u));
            if i != 0 && v != 0 && !st.has(v, i, b) {
                return Some(Violation::new(rule, &[("u", u), ("v", v), ("i", i)]));
            }
        }
    }
    for (rule, parent_of) in [(Rule::R5a, RefStructure::l_of as fn(&RefStructure, usize) -> usize), (Rule::R5b, RefStructure::r_of)] {
        for u in lines.clone() {
            let (i, v) = (st.v_of(u), parent_of(st, u));
            if i == 0 || v == 0 {
                continue;
            }
            for i2 in (1..=st.n).filter(|&i2| i2 != i) {
                for b in [false, true] {
                    if st.has(v, i2, b) && !st.has(u, i2, b) {
                        return Some(Violation::new(rule, &[("u", u), ("v", v), ("i", i2), ("b", usize::from(b))]));
                    }
                }
            }
        }
    }
    for u in lines.clone() {
        let j = st.i_of(u);
        if j == 0 {
            continue;
        }
        for lit in f.clause(j).expect("checked dimensions") {
            let i = lit.var().index() as usize;
            if !st.has(u, i, lit.sign()) {
                return Some(Violation::new(Rule::R6, &[("u", u), ("j", j), ("i", i), ("b", usize::from(lit.sign()))]));
            }
        }
    }
    for u in lines {
        for i in 1..=st.n {
            if st.has(u, i, false) && st.has(u, i, true) {
                return Some(Violation::new(Rule::R7, &[("u", u), ("i", i)]));
            }
        }
    }
    for i in 1..=st.n {
        for b in [false, true] {
            if st.has(st.s, i, b) {
                return Some(Violation::new(Rule::R8, &[("i", i), ("b", usize::from(b))]));
            }
        }
    }
    None
}

/// Numbering of the full binary tree of height `n`: leaves first, then level
/// by level up to the root `2^(n+1) - 1`; within a level, nodes are ordered
/// by their bit string read as a binary number (`a_1` most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNumbering {
    pub n: usize,
}

impl TreeNumbering {
    pub fn len(&self) -> usize {
        (1usize << (self.n + 1)) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Line number of the node at `level` with bits encoded as `rank`.
    pub fn node(&self, level: usize, rank: usize) -> usize {
        debug_assert!(level <= self.n && rank < (1 << level));
        // Levels below `level` hold 2^(level+1) + ... + 2^n nodes.
        let below = (1usize << (self.n + 1)) - (1usize << (level + 1));
        below + rank + 1
    }

    /// Inverse of [`TreeNumbering::node`].
    pub fn locate(&self, u: usize) -> (usize, usize) {
        debug_assert!(u >= 1 && u <= self.len());
        let mut level = self.n;
        loop {
            let below = (1usize << (self.n + 1)) - (1usize << (level + 1));
            if u <= below + (1 << level) {
                return (level, u - below - 1);
            }
            level -= 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FullTree {
    Refutation(RefStructure),
    /// `F` is satisfiable: a branch whose leaf clause weakens no `C_j` yields
    /// this model.
    CounterModel(Assignment),
}

/// The full-tree refutation of length `2^(n+1) - 1`, or a model of `F`.
///
/// Node `n_a` is labelled by `C_a = X_1^(a_1) ∨ … ∨ X_h^(a_h)`; inner nodes
/// resolve `C_{a1}` (positive on `X_{h+1}`, right parent) with `C_{a0}`
/// (left parent). Leaves cite the smallest `j` with `C_j ⊆ C_a`.
pub fn full_tree(f: &Cnf) -> FullTree {
    let n = f.num_vars() as usize;
    assert!(n >= 1, "full tree needs at least one variable");
    assert!(n < usize::BITS as usize - 2, "tree too large");
    let tree = TreeNumbering { n };
    let mut st = RefStructure::new(tree.len(), n, f.num_clauses());
    for level in 0..=n {
        for rank in 0..(1usize << level) {
            let u = tree.node(level, rank);
            for i in 1..=level {
                let bit = (rank >> (level - i)) & 1 == 1;
                st.set_d(u, i, bit, true);
            }
            if level < n {
                st.v[u - 1] = level + 1;
                st.l[u - 1] = tree.node(level + 1, rank << 1);
                st.r[u - 1] = tree.node(level + 1, (rank << 1) | 1);
            } else {
                let leaf = st.line_clause(u);
                match f.clauses().iter().position(|c| c.is_subset_of(&leaf)) {
                    Some(k) => st.i[u - 1] = k + 1,
                    None => {
                        let values: Vec<bool> = (1..=n).map(|i| (rank >> (n - i)) & 1 == 0).collect();
                        return FullTree::CounterModel(Assignment::from_values(&values));
                    }
                }
            }
        }
    }
    FullTree::Refutation(st)
}

/// The assignment associated with a structure, over the variables of
/// REF(F,s) in the standard numbering.
pub fn structure_to_assignment(st: &RefStructure, f: &Cnf) -> Result<Assignment, DimensionError> {
    check_dimensions(f, st)?;
    let dims = st.ref_dims();
    let mut a = Assignment::with_capacity(dims.num_vars() as u32);
    for u in 1..=st.s {
        for i in 1..=st.n {
            for b in [false, true] {
                a.set(dims.var(RefVar::D { u, i, b }), st.has(u, i, b));
            }
        }
        for i in 0..=st.n {
            a.set(dims.var(RefVar::V { u, i }), st.v_of(u) == i);
        }
        for j in 0..=st.m {
            a.set(dims.var(RefVar::I { u, j }), st.i_of(u) == j);
        }
        for v in 0..=st.s {
            a.set(dims.var(RefVar::L { u, v }), st.l_of(u) == v);
            a.set(dims.var(RefVar::R { u, v }), st.r_of(u) == v);
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("variable {0} is unassigned")]
    Unassigned(RefVar),
    #[error("row {kind}[{u},·] has {ones} true entries, expected exactly one")]
    NonFunctionalRow { kind: char, u: usize, ones: usize },
}

/// Reads back the structure described by a total assignment to REF(F,s).
pub fn assignment_to_structure(alpha: &Assignment, f: &Cnf, s: usize) -> Result<RefStructure, DecodeError> {
    let (n, m) = (f.num_vars() as usize, f.num_clauses());
    let dims = RefDims::new(n, m, s, false);
    let get = |v: RefVar| alpha.get(dims.var(v)).ok_or(DecodeError::Unassigned(v));
    let mut st = RefStructure::new(s, n, m);
    for u in 1..=s {
        for i in 1..=n {
            for b in [false, true] {
                let value = get(RefVar::D { u, i, b })?;
                st.set_d(u, i, b, value);
            }
        }
        let row = |kind: char, width: usize, make: &dyn Fn(usize) -> RefVar| -> Result<usize, DecodeError> {
            let mut ones = Vec::new();
            for x in 0..=width {
                if get(make(x))? {
                    ones.push(x);
                }
            }
            match ones.as_slice() {
                [x] => Ok(*x),
                _ => Err(DecodeError::NonFunctionalRow { kind, u, ones: ones.len() }),
            }
        };
        st.v[u - 1] = row('V', n, &|i| RefVar::V { u, i })?;
        st.i[u - 1] = row('I', m, &|j| RefVar::I { u, j })?;
        st.l[u - 1] = row('L', s, &|v| RefVar::L { u, v })?;
        st.r[u - 1] = row('R', s, &|v| RefVar::R { u, v })?;
    }
    Ok(st)
}

/// A valid structure of length `s + 1`: a copy of line 1 is inserted in front
/// and every line reference shifts by one.
///
/// Line 1 of a valid structure is always an axiom line, since (R2) and (R3)
/// leave no parents for it.
pub fn pad_structure(st: &RefStructure) -> RefStructure {
    let mut out = RefStructure::new(st.s + 1, st.n, st.m);
    let shift = |x: usize| if x == 0 { 0 } else { x + 1 };
    for u in 1..=st.s + 1 {
        let src = if u == 1 { 1 } else { u - 1 };
        for i in 1..=st.n {
            for b in [false, true] {
                out.set_d(u, i, b, st.has(src, i, b));
            }
        }
        out.v[u - 1] = st.v_of(src);
        out.i[u - 1] = st.i_of(src);
        out.l[u - 1] = shift(st.l_of(src));
        out.r[u - 1] = shift(st.r_of(src));
    }
    out
}

/// The proof whose line `u` is `D_u`; resolvent lines cite `R(u)` as the
/// parent holding the positive pivot.
pub fn structure_to_proof(st: &RefStructure) -> Proof {
    let lines = (1..=st.s)
        .map(|u| {
            let clause = st.line_clause(u);
            if st.i_of(u) != 0 {
                ProofLine::axiom(clause, st.i_of(u))
            } else {
                ProofLine::resolvent(clause, st.r_of(u), st.l_of(u), Var::new(st.v_of(u) as u32))
            }
        })
        .collect();
    Proof::new(lines)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct StructureParseError {
    pub line: usize,
    pub message: String,
}

/// Text form: a `p struct <s> <n> <m>` header, then sections `D:` (one
/// `u i b` triple per line), `V:`, `I:`, `L:` and `R:` (one `u value` pair per
/// line, every `u` listed).
pub fn write_structure(st: &RefStructure) -> String {
    let mut out = format!("p struct {} {} {}\nD:\n", st.s, st.n, st.m);
    for (u, i, b) in st.d_triples() {
        out.push_str(&format!("{u} {i} {}\n", u8::from(b)));
    }
    for (name, table) in [("V", &st.v), ("I", &st.i), ("L", &st.l), ("R", &st.r)] {
        out.push_str(name);
        out.push_str(":\n");
        for (k, x) in table.iter().enumerate() {
            out.push_str(&format!("{} {x}\n", k + 1));
        }
    }
    out
}

pub fn parse_structure(text: &str) -> Result<RefStructure, StructureParseError> {
    let mut st: Option<RefStructure> = None;
    let mut section: Option<char> = None;
    let mut seen = [vec![], vec![], vec![], vec![]];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        let err = |message: String| StructureParseError { line, message };
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let Some(cur) = st.as_mut() else {
            let f: Vec<&str> = t.split_whitespace().collect();
            let nums: Option<Vec<usize>> = f.get(2..).map(|x| x.iter().filter_map(|y| y.parse().ok()).collect());
            match (f.first(), f.get(1), nums) {
                (Some(&"p"), Some(&"struct"), Some(v)) if v.len() == 3 && f.len() == 5 => {
                    st = Some(RefStructure::new(v[0], v[1], v[2]));
                }
                _ => return Err(err("expected header `p struct <s> <n> <m>`".into())),
            }
            continue;
        };
        if let Some(name) = t.strip_suffix(':') {
            section = match name {
                "D" | "V" | "I" | "L" | "R" => name.chars().next(),
                _ => return Err(err(format!("unknown section `{name}`"))),
            };
            continue;
        }
        let nums = t
            .split_whitespace()
            .map(|x| x.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err(format!("bad numbers `{t}`")))?;
        let in_line = |u: usize| u >= 1 && u <= cur.s;
        match (section, nums.as_slice()) {
            (Some('D'), &[u, i, b]) if in_line(u) && i >= 1 && i <= cur.n && b <= 1 => cur.set_d(u, i, b == 1, true),
            (Some(c @ ('V' | 'I' | 'L' | 'R')), &[u, x]) if in_line(u) => {
                let k = "VILR".find(c).unwrap();
                let table = match c {
                    'V' => &mut cur.v,
                    'I' => &mut cur.i,
                    'L' => &mut cur.l,
                    _ => &mut cur.r,
                };
                table[u - 1] = x;
                seen[k].push(u);
            }
            (None, _) => return Err(err("entry outside of a section".into())),
            _ => return Err(err(format!("malformed or out-of-range entry `{t}`"))),
        }
    }
    let st = st.ok_or(StructureParseError { line: 0, message: "missing header".into() })?;
    for (k, mut s) in seen.into_iter().enumerate() {
        s.sort_unstable();
        s.dedup();
        if s.len() != st.s {
            let name = &"VILR"[k..k + 1];
            return Err(StructureParseError { line: 0, message: format!("section {name} must list every line once") });
        }
    }
    Ok(st)
}
