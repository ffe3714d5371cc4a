//! Generation of REF(F,s), REF(F,A), RREF(F,s) and RREF′(F,s).
//!
//! Variables are numbered in blocks D, V, I, L, R, P. Within a block the
//! order is lexicographic in the indices:
//!
//! ```text
//! D[u,i,b]  2n(u-1) + 2(i-1) + b + 1
//! V[u,i]    oV + (n+1)(u-1) + i + 1      oV = 2ns
//! I[u,j]    oI + (m+1)(u-1) + j + 1      oI = oV + s(n+1)
//! L[u,v]    oL + (s+1)(u-1) + v + 1      oL = oI + s(m+1)
//! R[u,v]    oR + (s+1)(u-1) + v + 1      oR = oL + s(s+1)
//! P[u]      oP + u                       oP = oR + s(s+1)
//! ```
//!
//! REF(F,A) for `A ⊆ [t]` reuses the numbering of REF(F,t), so a clause of
//! RREF(F,t) restricted by a random restriction can be compared with REF(F,A)
//! directly; [`Reindex`] then maps it onto REF(F,|A|).

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, Cnf, Lit, Var};

/// A variable of the REF/RREF encodings. Line indices `u`, `v` are 1-based;
/// `v = 0`, `i = 0` and `j = 0` are the "none" values of the functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RefVar {
    D { u: usize, i: usize, b: bool },
    V { u: usize, i: usize },
    I { u: usize, j: usize },
    L { u: usize, v: usize },
    R { u: usize, v: usize },
    P { u: usize },
}

impl RefVar {
    /// The single line index this variable mentions. The second component of
    /// `L[u,v]` and `R[u,v]` is not mentioned.
    pub fn mentioned(self) -> usize {
        match self {
            RefVar::D { u, .. }
            | RefVar::V { u, .. }
            | RefVar::I { u, .. }
            | RefVar::L { u, .. }
            | RefVar::R { u, .. }
            | RefVar::P { u } => u,
        }
    }

    pub fn kind(self) -> char {
        match self {
            RefVar::D { .. } => 'D',
            RefVar::V { .. } => 'V',
            RefVar::I { .. } => 'I',
            RefVar::L { .. } => 'L',
            RefVar::R { .. } => 'R',
            RefVar::P { .. } => 'P',
        }
    }

    /// Same variable with every line index passed through `f`.
    pub fn map_indices(self, mut f: impl FnMut(usize) -> usize) -> RefVar {
        let mut g = |v: usize| if v == 0 { 0 } else { f(v) };
        match self {
            RefVar::D { u, i, b } => RefVar::D { u: g(u), i, b },
            RefVar::V { u, i } => RefVar::V { u: g(u), i },
            RefVar::I { u, j } => RefVar::I { u: g(u), j },
            RefVar::L { u, v } => RefVar::L { u: g(u), v: g(v) },
            RefVar::R { u, v } => RefVar::R { u: g(u), v: g(v) },
            RefVar::P { u } => RefVar::P { u: g(u) },
        }
    }
}

impl fmt::Display for RefVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RefVar::D { u, i, b } => write!(f, "D[{u},{i},{}]", u8::from(b)),
            RefVar::V { u, i } => write!(f, "V[{u},{i}]"),
            RefVar::I { u, j } => write!(f, "I[{u},{j}]"),
            RefVar::L { u, v } => write!(f, "L[{u},{v}]"),
            RefVar::R { u, v } => write!(f, "R[{u},{v}]"),
            RefVar::P { u } => write!(f, "P[{u}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{0}` as a REF variable")]
pub struct RefVarParseError(pub String);

impl std::str::FromStr for RefVar {
    type Err = RefVarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RefVarParseError(s.to_string());
        let s = s.trim();
        let open = s.find('[').ok_or_else(bad)?;
        if !s.ends_with(']') {
            return Err(bad());
        }
        let args = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        Ok(match (&s[..open], args.as_slice()) {
            ("D", &[u, i, b]) if b <= 1 => RefVar::D { u, i, b: b == 1 },
            ("V", &[u, i]) => RefVar::V { u, i },
            ("I", &[u, j]) => RefVar::I { u, j },
            ("L", &[u, v]) => RefVar::L { u, v },
            ("R", &[u, v]) => RefVar::R { u, v },
            ("P", &[u]) => RefVar::P { u },
            _ => return Err(bad()),
        })
    }
}

/// Dimensions fixing the variable numbering: `n` variables and `m` clauses of
/// F, `s` lines, and whether the P block exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RefDims {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub with_p: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable {var} is out of range for n={n}, m={m}, s={s}")]
pub struct VarRange {
    pub var: RefVar,
    pub n: usize,
    pub m: usize,
    pub s: usize,
}

impl RefDims {
    pub fn new(n: usize, m: usize, s: usize, with_p: bool) -> Self {
        RefDims { n, m, s, with_p }
    }

    fn off_v(&self) -> usize {
        2 * self.n * self.s
    }
    fn off_i(&self) -> usize {
        self.off_v() + self.s * (self.n + 1)
    }
    fn off_l(&self) -> usize {
        self.off_i() + self.s * (self.m + 1)
    }
    fn off_r(&self) -> usize {
        self.off_l() + self.s * (self.s + 1)
    }
    fn off_p(&self) -> usize {
        self.off_r() + self.s * (self.s + 1)
    }

    /// `2ns + s(n+1) + s(m+1) + 2s(s+1)`, plus `s` with the P block.
    pub fn num_vars(&self) -> usize {
        self.off_p() + if self.with_p { self.s } else { 0 }
    }

    pub fn in_range(&self, var: RefVar) -> bool {
        let line = |u: usize| (1..=self.s).contains(&u);
        match var {
            RefVar::D { u, i, .. } => line(u) && (1..=self.n).contains(&i),
            RefVar::V { u, i } => line(u) && i <= self.n,
            RefVar::I { u, j } => line(u) && j <= self.m,
            RefVar::L { u, v } | RefVar::R { u, v } => line(u) && v <= self.s,
            RefVar::P { u } => self.with_p && line(u),
        }
    }

    pub fn try_var(&self, var: RefVar) -> Result<Var, VarRange> {
        if !self.in_range(var) {
            return Err(VarRange { var, n: self.n, m: self.m, s: self.s });
        }
        Ok(Var::new(self.id_unchecked(var) as u32))
    }

    /// # Panics
    /// If `var` is out of range.
    pub fn var(&self, var: RefVar) -> Var {
        self.try_var(var).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn lit(&self, var: RefVar, sign: bool) -> Lit {
        self.var(var).lit(sign)
    }

    fn id_unchecked(&self, var: RefVar) -> usize {
        let (n, m, s) = (self.n, self.m, self.s);
        match var {
            RefVar::D { u, i, b } => 2 * n * (u - 1) + 2 * (i - 1) + usize::from(b) + 1,
            RefVar::V { u, i } => self.off_v() + (n + 1) * (u - 1) + i + 1,
            RefVar::I { u, j } => self.off_i() + (m + 1) * (u - 1) + j + 1,
            RefVar::L { u, v } => self.off_l() + (s + 1) * (u - 1) + v + 1,
            RefVar::R { u, v } => self.off_r() + (s + 1) * (u - 1) + v + 1,
            RefVar::P { u } => self.off_p() + u,
        }
    }

    pub fn decode(&self, var: Var) -> Option<RefVar> {
        let id = var.index() as usize;
        if id == 0 || id > self.num_vars() {
            return None;
        }
        let (n, m, s) = (self.n, self.m, self.s);
        let k = id - 1;
        Some(if k < self.off_v() {
            let (u, rest) = (k / (2 * n), k % (2 * n));
            RefVar::D { u: u + 1, i: rest / 2 + 1, b: rest % 2 == 1 }
        } else if k < self.off_i() {
            let k = k - self.off_v();
            RefVar::V { u: k / (n + 1) + 1, i: k % (n + 1) }
        } else if k < self.off_l() {
            let k = k - self.off_i();
            RefVar::I { u: k / (m + 1) + 1, j: k % (m + 1) }
        } else if k < self.off_r() {
            let k = k - self.off_l();
            RefVar::L { u: k / (s + 1) + 1, v: k % (s + 1) }
        } else if k < self.off_p() {
            let k = k - self.off_r();
            RefVar::R { u: k / (s + 1) + 1, v: k % (s + 1) }
        } else {
            RefVar::P { u: k - self.off_p() + 1 }
        })
    }

    /// Line index mentioned by a variable of this numbering.
    pub fn mentioned(&self, var: Var) -> Option<usize> {
        self.decode(var).map(RefVar::mentioned)
    }
}

/// Clause families (A1)–(A24).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
    A14,
    A15,
    A16,
    A17,
    A18,
    A19,
    A20,
    A21,
    A22,
    A23,
    A24,
}

impl Family {
    pub const ALL: [Family; 24] = [
        Family::A1,
        Family::A2,
        Family::A3,
        Family::A4,
        Family::A5,
        Family::A6,
        Family::A7,
        Family::A8,
        Family::A9,
        Family::A10,
        Family::A11,
        Family::A12,
        Family::A13,
        Family::A14,
        Family::A15,
        Family::A16,
        Family::A17,
        Family::A18,
        Family::A19,
        Family::A20,
        Family::A21,
        Family::A22,
        Family::A23,
        Family::A24,
    ];

    /// Families of the unrelativized formula.
    pub const REF: &'static [Family] = {
        let (head, _) = Family::ALL.split_at(21);
        head
    };

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("clause C{0} of F is tautological")]
    TautologicalClause(usize),
    #[error("F has no variables")]
    NoVariables,
    #[error("the length s must be at least 1")]
    ZeroLength,
    #[error("the index set is empty")]
    EmptyIndexSet,
    #[error("the index set must be strictly increasing within [1, {0}]")]
    BadIndexSet(usize),
}

/// Which formula to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Ref,
    Rref,
    /// RREF without (A7) and (A8).
    RrefPrime,
}

impl Variant {
    pub fn relativized(self) -> bool {
        !matches!(self, Variant::Ref)
    }
}

/// A generated formula with one family tag per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedCnf {
    pub cnf: Cnf,
    pub tags: Vec<Family>,
    pub dims: RefDims,
    /// The line index set, ascending (`[s]` except for REF(F,A)).
    pub indices: Vec<usize>,
    pub variant: Variant,
}

impl IndexedCnf {
    pub fn len(&self) -> usize {
        self.cnf.num_clauses()
    }

    pub fn is_empty(&self) -> bool {
        self.cnf.num_clauses() == 0
    }

    pub fn count(&self, family: Family) -> usize {
        self.tags.iter().filter(|&&t| t == family).count()
    }

    /// 1-based clause index of a given clause within the listed families.
    pub fn lookup(&self, families: &[Family]) -> HashMap<Clause, usize> {
        self.cnf
            .clauses()
            .iter()
            .zip(&self.tags)
            .enumerate()
            .filter(|(_, (_, t))| families.contains(t))
            .map(|(k, (c, _))| (c.clone(), k + 1))
            .collect()
    }

    /// The variables of the formula's universe, ascending by id.
    pub fn universe(&self) -> Vec<RefVar> {
        universe(&self.dims, &self.indices, self.variant.relativized())
    }

    pub fn max_index_width(&self) -> usize {
        self.cnf.clauses().iter().map(|c| index_width(c, &self.dims)).max().unwrap_or(0)
    }

    pub fn emit_tags(&self) -> String {
        self.tags.iter().enumerate().map(|(k, t)| format!("{} {t}\n", k + 1)).collect()
    }

    pub fn emit_map(&self) -> String {
        emit_map(&self.dims, &self.universe())
    }
}

fn universe(dims: &RefDims, indices: &[usize], with_p: bool) -> Vec<RefVar> {
    let with_zero: Vec<usize> = std::iter::once(0).chain(indices.iter().copied()).collect();
    let mut vars = Vec::new();
    for &u in indices {
        for i in 1..=dims.n {
            vars.push(RefVar::D { u, i, b: false });
            vars.push(RefVar::D { u, i, b: true });
        }
        vars.extend((0..=dims.n).map(|i| RefVar::V { u, i }));
        vars.extend((0..=dims.m).map(|j| RefVar::I { u, j }));
        vars.extend(with_zero.iter().map(|&v| RefVar::L { u, v }));
        vars.extend(with_zero.iter().map(|&v| RefVar::R { u, v }));
        if with_p {
            vars.push(RefVar::P { u });
        }
    }
    vars.sort_by_key(|&v| dims.var(v));
    vars
}

/// Number of distinct line indices mentioned by the clause's variables.
pub fn index_width(clause: &Clause, dims: &RefDims) -> usize {
    let mut seen: Vec<usize> = clause.iter().filter_map(|l| dims.mentioned(l.var())).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// The variable map: a header with the dimensions, then `<id> <name>` lines.
pub fn emit_map(dims: &RefDims, vars: &[RefVar]) -> String {
    let mut out = format!(
        "c refgap variable map n={} m={} s={} p={} vars={}\n",
        dims.n,
        dims.m,
        dims.s,
        u8::from(dims.with_p),
        vars.len()
    );
    for &v in vars {
        out.push_str(&format!("{} {v}\n", dims.var(v).index()));
    }
    out
}

fn validate_input(f: &Cnf) -> Result<(), EncodeError> {
    if f.num_vars() == 0 {
        return Err(EncodeError::NoVariables);
    }
    if let Some(j) = f.first_tautology() {
        return Err(EncodeError::TautologicalClause(j));
    }
    Ok(())
}

/// Emits the clauses family by family.
///
/// `universe` is the line index set. Only clauses whose mentioned indices all
/// lie in `scope` are emitted; `scope == universe` yields the whole formula.
struct Generator<'a> {
    f: &'a Cnf,
    dims: RefDims,
    universe: &'a [usize],
    scope: &'a [usize],
    relativized: bool,
    include_a7a8: bool,
    out: Cnf,
    tags: Vec<Family>,
}

impl<'a> Generator<'a> {
    fn lit(&self, var: RefVar, sign: bool) -> Lit {
        self.dims.lit(var, sign)
    }

    fn emit(&mut self, family: Family, guards: &[usize], lits: impl IntoIterator<Item = Lit>) {
        let mut v: Vec<Lit> = lits.into_iter().collect();
        if self.relativized {
            v.extend(guards.iter().map(|&u| self.lit(RefVar::P { u }, false)));
        }
        self.out.push(Clause::new(v));
        self.tags.push(family);
    }

    fn in_scope(&self, u: usize) -> bool {
        self.scope.binary_search(&u).is_ok()
    }

    fn run(mut self) -> (Cnf, Vec<Family>) {
        let (n, m) = (self.dims.n, self.dims.m);
        let scope = self.scope;
        let universe = self.universe;
        let with_zero: Vec<usize> = std::iter::once(0).chain(universe.iter().copied()).collect();
        let last = *universe.last().expect("non-empty index set");

        // (A1)-(A4): V, I, L, R are total.
        for &u in scope {
            let c: Vec<Lit> = (0..=n).map(|i| self.lit(RefVar::V { u, i }, true)).collect();
            self.emit(Family::A1, &[u], c);
        }
        for &u in scope {
            let c: Vec<Lit> = (0..=m).map(|j| self.lit(RefVar::I { u, j }, true)).collect();
            self.emit(Family::A2, &[u], c);
        }
        for &u in scope {
            let c: Vec<Lit> = with_zero.iter().map(|&v| self.lit(RefVar::L { u, v }, true)).collect();
            self.emit(Family::A3, &[u], c);
        }
        for &u in scope {
            let c: Vec<Lit> = with_zero.iter().map(|&v| self.lit(RefVar::R { u, v }, true)).collect();
            self.emit(Family::A4, &[u], c);
        }
        // (A5)-(A8): ... and functional. Each unordered pair once.
        for &u in scope {
            for i in 0..=n {
                for i2 in i + 1..=n {
                    let c = [self.lit(RefVar::V { u, i }, false), self.lit(RefVar::V { u, i: i2 }, false)];
                    self.emit(Family::A5, &[u], c);
                }
            }
        }
        for &u in scope {
            for j in 0..=m {
                for j2 in j + 1..=m {
                    let c = [self.lit(RefVar::I { u, j }, false), self.lit(RefVar::I { u, j: j2 }, false)];
                    self.emit(Family::A6, &[u], c);
                }
            }
        }
        if self.include_a7a8 {
            for (family, is_l) in [(Family::A7, true), (Family::A8, false)] {
                for &u in scope {
                    for (k, &v) in with_zero.iter().enumerate() {
                        for &v2 in &with_zero[k + 1..] {
                            let (a, b) = if is_l {
                                (RefVar::L { u, v }, RefVar::L { u, v: v2 })
                            } else {
                                (RefVar::R { u, v }, RefVar::R { u, v: v2 })
                            };
                            let c = [self.lit(a, false), self.lit(b, false)];
                            self.emit(family, &[u], c);
                        }
                    }
                }
            }
        }
        // (A9)-(A12): exactly one of V(u), I(u) is non-zero; resolvents have parents.
        for &u in scope {
            let c = [self.lit(RefVar::I { u, j: 0 }, false), self.lit(RefVar::V { u, i: 0 }, false)];
            self.emit(Family::A9, &[u], c);
        }
        for &u in scope {
            let c = [self.lit(RefVar::I { u, j: 0 }, true), self.lit(RefVar::V { u, i: 0 }, true)];
            self.emit(Family::A10, &[u], c);
        }
        for &u in scope {
            let c = [self.lit(RefVar::I { u, j: 0 }, false), self.lit(RefVar::L { u, v: 0 }, false)];
            self.emit(Family::A11, &[u], c);
        }
        for &u in scope {
            let c = [self.lit(RefVar::I { u, j: 0 }, false), self.lit(RefVar::R { u, v: 0 }, false)];
            self.emit(Family::A12, &[u], c);
        }
        // (A13)-(A14): parents are earlier lines.
        for &u in scope {
            for &v in universe.iter().filter(|&&v| u <= v) {
                let c = [self.lit(RefVar::L { u, v }, false)];
                self.emit(Family::A13, &[u], c);
            }
        }
        for &u in scope {
            for &v in universe.iter().filter(|&&v| u <= v) {
                let c = [self.lit(RefVar::R { u, v }, false)];
                self.emit(Family::A14, &[u], c);
            }
        }
        // (A15)-(A16): the pivot occurs with the right sign in the parents.
        for (family, is_l) in [(Family::A15, true), (Family::A16, false)] {
            for &u in scope {
                for &v in scope {
                    for i in 1..=n {
                        let parent = if is_l { RefVar::L { u, v } } else { RefVar::R { u, v } };
                        let c = [
                            self.lit(parent, false),
                            self.lit(RefVar::V { u, i }, false),
                            self.lit(RefVar::D { u: v, i, b: !is_l }, true),
                        ];
                        self.emit(family, &[u, v], c);
                    }
                }
            }
        }
        // (A17)-(A18): the other parent literals are inherited.
        for (family, is_l) in [(Family::A17, true), (Family::A18, false)] {
            for &u in scope {
                for &v in scope {
                    for i in 1..=n {
                        for i2 in (1..=n).filter(|&i2| i2 != i) {
                            for b in [false, true] {
                                let parent = if is_l { RefVar::L { u, v } } else { RefVar::R { u, v } };
                                let c = [
                                    self.lit(parent, false),
                                    self.lit(RefVar::V { u, i }, false),
                                    self.lit(RefVar::D { u: v, i: i2, b }, false),
                                    self.lit(RefVar::D { u, i: i2, b }, true),
                                ];
                                self.emit(family, &[u, v], c);
                            }
                        }
                    }
                }
            }
        }
        // (A19): axiom lines contain their clause.
        for &u in scope {
            for (k, c) in self.f.clauses().iter().enumerate() {
                let j = k + 1;
                for l in c {
                    let i = l.var().index() as usize;
                    let cl = [
                        self.lit(RefVar::I { u, j }, false),
                        self.lit(RefVar::D { u, i, b: l.sign() }, true),
                    ];
                    self.emit(Family::A19, &[u], cl);
                }
            }
        }
        // (A20): no line is tautological.
        for &u in scope {
            for i in 1..=n {
                let c = [
                    self.lit(RefVar::D { u, i, b: false }, false),
                    self.lit(RefVar::D { u, i, b: true }, false),
                ];
                self.emit(Family::A20, &[u], c);
            }
        }
        // (A21): the last line is empty.
        if self.in_scope(last) {
            for i in 1..=n {
                for b in [false, true] {
                    let c = [self.lit(RefVar::D { u: last, i, b }, false)];
                    self.emit(Family::A21, &[last], c);
                }
            }
        }
        if self.relativized {
            // (A22)-(A23): parents of active lines are active.
            for (family, is_l) in [(Family::A22, true), (Family::A23, false)] {
                for &u in scope {
                    for &v in scope {
                        let parent = if is_l { RefVar::L { u, v } } else { RefVar::R { u, v } };
                        let c = [
                            self.lit(RefVar::P { u }, false),
                            self.lit(parent, false),
                            self.lit(RefVar::P { u: v }, true),
                        ];
                        self.emit(family, &[], c);
                    }
                }
            }
            // (A24): the last line is active.
            if self.in_scope(last) {
                let c = [self.lit(RefVar::P { u: last }, true)];
                self.emit(Family::A24, &[], c);
            }
        }
        (self.out, self.tags)
    }
}

fn generate(
    f: &Cnf,
    dims: RefDims,
    universe: &[usize],
    scope: &[usize],
    variant: Variant,
) -> (Cnf, Vec<Family>) {
    let out = Cnf::new(dims.num_vars() as u32, Vec::new()).expect("empty formula");
    Generator {
        f,
        dims,
        universe,
        scope,
        relativized: variant.relativized(),
        include_a7a8: variant != Variant::RrefPrime,
        out,
        tags: Vec::new(),
    }
    .run()
}

fn check_index_set(indices: &[usize], t: usize) -> Result<(), EncodeError> {
    if indices.is_empty() {
        return Err(EncodeError::EmptyIndexSet);
    }
    let increasing = indices.windows(2).all(|w| w[0] < w[1]);
    if !increasing || indices[0] == 0 || *indices.last().unwrap() > t {
        return Err(EncodeError::BadIndexSet(t));
    }
    Ok(())
}

/// Generates `variant` over the line index set `indices ⊆ [t]`.
pub fn encode(f: &Cnf, indices: &[usize], t: usize, variant: Variant) -> Result<IndexedCnf, EncodeError> {
    validate_input(f)?;
    if t == 0 {
        return Err(EncodeError::ZeroLength);
    }
    check_index_set(indices, t)?;
    let dims = RefDims::new(f.num_vars() as usize, f.num_clauses(), t, variant.relativized());
    let (cnf, tags) = generate(f, dims, indices, indices, variant);
    Ok(IndexedCnf { cnf, tags, dims, indices: indices.to_vec(), variant })
}

/// REF(F,s), families (A1)-(A21).
pub fn encode_ref(f: &Cnf, s: usize) -> Result<IndexedCnf, EncodeError> {
    let all: Vec<usize> = (1..=s).collect();
    encode(f, &all, s, Variant::Ref)
}

/// REF(F,A) for an ascending index set `A ⊆ [t]`, numbered as REF(F,t).
pub fn encode_ref_over(f: &Cnf, indices: &[usize], t: usize) -> Result<IndexedCnf, EncodeError> {
    if indices.is_empty() {
        return Err(EncodeError::EmptyIndexSet);
    }
    encode(f, indices, t, Variant::Ref)
}

/// RREF(F,s), families (A1)-(A24), or RREF′(F,s) when `include_a7a8` is off.
pub fn encode_rref(f: &Cnf, s: usize, include_a7a8: bool) -> Result<IndexedCnf, EncodeError> {
    let all: Vec<usize> = (1..=s).collect();
    encode(f, &all, s, if include_a7a8 { Variant::Rref } else { Variant::RrefPrime })
}

/// The clauses of REF(F,s) that mention only indices in `scope`, with tags.
///
/// Every clause of REF(F,s) is listed by exactly one call per scope that
/// contains its mentioned indices; this is what a partial assignment defined
/// only on variables mentioning `scope` can possibly falsify.
pub fn ref_clauses_within(f: &Cnf, s: usize, scope: &[usize]) -> Result<(Cnf, Vec<Family>), EncodeError> {
    validate_input(f)?;
    if s == 0 {
        return Err(EncodeError::ZeroLength);
    }
    let mut scope: Vec<usize> = scope.iter().copied().filter(|&u| (1..=s).contains(&u)).collect();
    scope.sort_unstable();
    scope.dedup();
    let all: Vec<usize> = (1..=s).collect();
    let dims = RefDims::new(f.num_vars() as usize, f.num_clauses(), s, false);
    Ok(generate(f, dims, &all, &scope, Variant::Ref))
}

/// The order isomorphism `A → [|A|]` lifted to variables, from the numbering
/// of `from` (over `[t]`) to that of REF(F,|A|) / RREF(F,|A|).
#[derive(Debug, Clone)]
pub struct Reindex {
    pub from: RefDims,
    pub to: RefDims,
    position: Vec<usize>,
}

impl Reindex {
    pub fn new(from: RefDims, indices: &[usize]) -> Self {
        let mut position = vec![0; from.s + 1];
        for (k, &u) in indices.iter().enumerate() {
            position[u] = k + 1;
        }
        let to = RefDims::new(from.n, from.m, indices.len(), from.with_p);
        Reindex { from, to, position }
    }

    pub fn map_refvar(&self, var: RefVar) -> Option<RefVar> {
        let mut ok = true;
        let mapped = var.map_indices(|u| {
            let p = self.position.get(u).copied().unwrap_or(0);
            ok &= p != 0;
            p
        });
        ok.then_some(mapped)
    }

    pub fn map_var(&self, var: Var) -> Option<Var> {
        let rv = self.from.decode(var)?;
        self.map_refvar(rv).map(|r| self.to.var(r))
    }

    pub fn map_clause(&self, clause: &Clause) -> Option<Clause> {
        clause
            .iter()
            .map(|l| self.map_var(l.var()).map(|v| v.lit(l.sign())))
            .collect::<Option<Vec<_>>>()
            .map(Clause::new)
    }

    pub fn map_cnf(&self, cnf: &Cnf) -> Option<Cnf> {
        let clauses = cnf.clauses().iter().map(|c| self.map_clause(c)).collect::<Option<Vec<_>>>()?;
        Cnf::new(self.to.num_vars() as u32, clauses).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contradiction() -> Cnf {
        Cnf::from_dimacs_clauses(1, &[&[1], &[-1]])
    }

    fn neg(dims: &RefDims, v: RefVar) -> Lit {
        dims.lit(v, false)
    }

    #[test]
    fn closed_form_numbering() {
        let dims = RefDims::new(1, 2, 2, false);
        assert_eq!(dims.var(RefVar::D { u: 1, i: 1, b: false }).index(), 1);
        assert_eq!(dims.var(RefVar::D { u: 2, i: 1, b: true }).index(), 4);
        assert_eq!(dims.num_vars(), 26);
        assert_eq!(dims.var(RefVar::V { u: 1, i: 0 }).index(), 5);
        assert_eq!(dims.var(RefVar::R { u: 2, v: 2 }).index(), 26);
        for id in 1..=26u32 {
            let v = Var::new(id);
            assert_eq!(dims.var(dims.decode(v).unwrap()), v);
        }
        assert!(dims.try_var(RefVar::P { u: 1 }).is_err());
        assert!(dims.try_var(RefVar::I { u: 1, j: 3 }).is_err());
        assert!(dims.try_var(RefVar::L { u: 3, v: 0 }).is_err());
    }

    #[test]
    fn family_counts() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1], &[-2]]);
        let (n, m, s) = (2, 3, 3);
        let g = encode_ref(&f, s).unwrap();
        assert_eq!(g.count(Family::A1), s);
        assert_eq!(g.count(Family::A21), 2 * n);
        assert_eq!(g.count(Family::A5), s * (n + 1) * n / 2);
        assert_eq!(g.count(Family::A6), s * (m + 1) * m / 2);
        assert_eq!(g.count(Family::A7), s * (s + 1) * s / 2);
        assert_eq!(g.count(Family::A13), s * (s + 1) / 2);
        assert_eq!(g.count(Family::A15), s * s * n);
        assert_eq!(g.count(Family::A17), s * s * n * (n - 1) * 2);
        assert_eq!(g.count(Family::A19), s * f.size());
        assert_eq!(g.count(Family::A22), 0);
        assert_eq!(g.tags.len(), g.len());
    }

    #[test]
    fn a13_units() {
        let g = encode_ref(&contradiction(), 3).unwrap();
        let d = g.dims;
        for (u, v) in [(2, 2), (2, 3), (1, 1)] {
            assert!(g.cnf.clauses().contains(&Clause::new([neg(&d, RefVar::L { u, v })])));
        }
        assert!(!g.cnf.clauses().contains(&Clause::new([neg(&d, RefVar::L { u: 3, v: 2 })])));
    }

    #[test]
    fn rref_extras() {
        let f = contradiction();
        let g = encode_rref(&f, 2, true).unwrap();
        let d = g.dims;
        let a24: Vec<_> = g.cnf.clauses().iter().zip(&g.tags).filter(|(_, &t)| t == Family::A24).collect();
        assert_eq!(a24.len(), 1);
        assert_eq!(a24[0].0, &Clause::new([d.lit(RefVar::P { u: 2 }, true)]));
        let a22 = Clause::new([
            neg(&d, RefVar::P { u: 1 }),
            neg(&d, RefVar::L { u: 1, v: 2 }),
            d.lit(RefVar::P { u: 2 }, true),
        ]);
        assert!(g.cnf.clauses().contains(&a22));
    }

    #[test]
    fn rref_prime_drops_a7_a8() {
        let f = Cnf::from_dimacs_clauses(1, &[&[1]]);
        let s = 2;
        let full = encode_rref(&f, s, true).unwrap();
        let prime = encode_rref(&f, s, false).unwrap();
        assert_eq!(full.count(Family::A7), s * (s + 1) * s / 2);
        assert_eq!(full.count(Family::A7), 6);
        assert_eq!(full.count(Family::A8), 6);
        assert_eq!(full.len() - prime.len(), 12);
        assert_eq!(prime.count(Family::A7) + prime.count(Family::A8), 0);
    }

    #[test]
    fn index_width_examples() {
        let d = RefDims::new(2, 1, 5, false);
        let c = Clause::new([
            neg(&d, RefVar::L { u: 3, v: 5 }),
            neg(&d, RefVar::V { u: 3, i: 2 }),
            d.lit(RefVar::D { u: 5, i: 2, b: false }, true),
        ]);
        assert_eq!(index_width(&c, &d), 2);
        assert_eq!(index_width(&Clause::new([neg(&d, RefVar::L { u: 3, v: 5 })]), &d), 1);
        assert_eq!(index_width(&Clause::empty(), &d), 0);
    }

    #[test]
    fn index_width_at_most_two() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1], &[-2]]);
        for s in 1..=4 {
            for g in [encode_ref(&f, s).unwrap(), encode_rref(&f, s, true).unwrap()] {
                assert_eq!(g.max_index_width(), s.min(2));
            }
        }
    }

    #[test]
    fn generated_clauses_are_distinct() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1], &[-2], &[1, 2]]);
        for g in [encode_ref(&f, 3).unwrap(), encode_rref(&f, 3, true).unwrap()] {
            let mut cs = g.cnf.clauses().to_vec();
            cs.sort();
            let before = cs.len();
            cs.dedup();
            assert_eq!(cs.len(), before);
        }
    }

    #[test]
    fn ref_over_full_range_is_ref() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, -2], &[2]]);
        let all: Vec<usize> = (1..=4).collect();
        assert_eq!(encode_ref_over(&f, &all, 4).unwrap(), encode_ref(&f, 4).unwrap());
    }

    #[test]
    fn ref_over_a3_clause() {
        let f = contradiction();
        let a = [2, 5, 9];
        let g = encode_ref_over(&f, &a, 9).unwrap();
        let d = g.dims;
        let want = Clause::new([0, 2, 5, 9].map(|v| d.lit(RefVar::L { u: 5, v }, true)));
        let a3: Vec<_> = g.cnf.clauses().iter().zip(&g.tags).filter(|(_, &t)| t == Family::A3).map(|(c, _)| c).collect();
        assert_eq!(a3.len(), 3);
        assert_eq!(a3[1], &want);
    }

    #[test]
    fn reindexed_ref_over_is_ref() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, -2], &[2], &[-1]]);
        let a = [2, 5, 6, 9];
        let g = encode_ref_over(&f, &a, 9).unwrap();
        let r = Reindex::new(g.dims, &a);
        let mapped = r.map_cnf(&g.cnf).unwrap();
        assert_eq!(mapped, encode_ref(&f, 4).unwrap().cnf);
    }

    #[test]
    fn rejects_bad_inputs() {
        let taut = Cnf::from_dimacs_clauses(1, &[&[1, -1]]);
        assert_eq!(encode_ref(&taut, 2), Err(EncodeError::TautologicalClause(1)));
        assert_eq!(encode_ref(&contradiction(), 0), Err(EncodeError::ZeroLength));
        assert_eq!(encode_ref_over(&contradiction(), &[], 3), Err(EncodeError::EmptyIndexSet));
        assert_eq!(encode_ref_over(&contradiction(), &[3, 2], 3), Err(EncodeError::BadIndexSet(3)));
        assert_eq!(encode_ref(&Cnf::default(), 1), Err(EncodeError::NoVariables));
    }

    #[test]
    fn empty_clause_in_f_is_allowed() {
        let f = Cnf::from_dimacs_clauses(1, &[&[], &[1]]);
        let g = encode_ref(&f, 2).unwrap();
        assert_eq!(g.count(Family::A19), 2);
    }

    #[test]
    fn map_lines() {
        let g = encode_ref(&contradiction(), 2).unwrap();
        let map = g.emit_map();
        let lines: Vec<&str> = map.lines().collect();
        assert_eq!(lines.len(), 1 + g.dims.num_vars());
        assert!(lines[0].contains("n=1 m=2 s=2"));
        assert_eq!(lines[1], "1 D[1,1,0]");
        assert_eq!(lines[4], "4 D[2,1,1]");
        assert_eq!(lines[5], "5 V[1,0]");
    }

    #[test]
    fn refvar_names_parse() {
        for v in [RefVar::D { u: 3, i: 2, b: true }, RefVar::L { u: 1, v: 0 }, RefVar::P { u: 7 }] {
            assert_eq!(v.to_string().parse::<RefVar>().unwrap(), v);
        }
        assert!("Q[1]".parse::<RefVar>().is_err());
    }

    #[test]
    fn within_scope_matches_full_formula() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1, -2], &[2]]);
        let s = 4;
        let full = encode_ref(&f, s).unwrap();
        let scope = [2, 4];
        let (local, _) = ref_clauses_within(&f, s, &scope).unwrap();
        let mut expect: Vec<Clause> = full
            .cnf
            .clauses()
            .iter()
            .filter(|c| c.iter().all(|l| scope.contains(&full.dims.mentioned(l.var()).unwrap())))
            .cloned()
            .collect();
        let mut got = local.clauses().to_vec();
        expect.sort();
        got.sort();
        assert_eq!(got, expect);
    }
}
