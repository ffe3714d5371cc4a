//! Propositional foundations: literals, clauses, CNFs, partial assignments,
//! restriction and DIMACS I/O.

use std::fmt;

use thiserror::Error;

/// A propositional variable, numbered from 1 as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `index` is zero.
    pub fn new(index: u32) -> Self {
        assert!(index > 0, "variables are numbered from 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn lit(self, sign: bool) -> Lit {
        Lit::new(self, sign)
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// A literal `X^(b)`: sign `true` is the variable itself, `false` its negation.
///
/// Ordering is by variable first, negative before positive, which fixes the
/// canonical literal order inside a [`Clause`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    var: Var,
    sign: bool,
}

impl Lit {
    pub fn new(var: Var, sign: bool) -> Self {
        Lit { var, sign }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn sign(self) -> bool {
        self.sign
    }

    pub fn negate(self) -> Lit {
        Lit { var: self.var, sign: !self.sign }
    }

    /// # Panics
    /// If `value` is zero.
    pub fn from_dimacs(value: i32) -> Self {
        assert_ne!(value, 0);
        Lit::new(Var::new(value.unsigned_abs()), value > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var.0 as i32;
        if self.sign {
            v
        } else {
            -v
        }
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.negate()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign {
            write!(f, "{}", self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

/// A clause as a set of literals, kept sorted and duplicate free.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn from_dimacs(lits: &[i32]) -> Self {
        Clause::new(lits.iter().map(|&l| Lit::from_dimacs(l)))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn is_tautological(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var == w[1].var)
    }

    /// `self ⊆ other`, i.e. `other` is a weakening of `self`.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.lits.iter();
        'outer: for l in &self.lits {
            for o in it.by_ref() {
                match o.cmp(l) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// The resolvent `(self \ {X}) ∪ (other \ {~X})`, if `X ∈ self` and `~X ∈ other`.
    pub fn resolve(&self, other: &Clause, pivot: Var) -> Option<Clause> {
        if !self.contains(pivot.pos()) || !other.contains(pivot.neg()) {
            return None;
        }
        Some(Clause::new(
            self.lits
                .iter()
                .filter(|&&l| l != pivot.pos())
                .chain(other.lits.iter().filter(|&&l| l != pivot.neg()))
                .copied(),
        ))
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause::new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.last().map(|l| l.var)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Lit> {
        self.lits.iter()
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Lit;
    type IntoIter = std::slice::Iter<'a, Lit>;
    fn into_iter(self) -> Self::IntoIter {
        self.lits.iter()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "()");
        }
        for (k, l) in self.lits.iter().enumerate() {
            if k > 0 {
                write!(f, " v ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A CNF over variables `X1..Xn`. Clause order is significant: it fixes the
/// indices `C1..Cm`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause {clause} mentions variable {var} but the formula has only {num_vars} variables")]
pub struct VarRangeError {
    pub clause: usize,
    pub var: u32,
    pub num_vars: u32,
}

impl Cnf {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, VarRangeError> {
        for (k, c) in clauses.iter().enumerate() {
            if let Some(v) = c.max_var() {
                if v.0 > num_vars {
                    return Err(VarRangeError { clause: k + 1, var: v.0, num_vars });
                }
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// Builds a CNF from DIMACS-style integer clauses.
    ///
    /// # Panics
    /// If a literal exceeds `num_vars`.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i32]]) -> Self {
        Cnf::new(num_vars, clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
            .expect("literal out of range")
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause `C_j` with `j` counted from 1.
    pub fn clause(&self, j: usize) -> Option<&Clause> {
        j.checked_sub(1).and_then(|k| self.clauses.get(k))
    }

    /// `r(F)`: the sum of the clause sizes.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var)
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    /// 1-based index of the first tautological clause, if any.
    pub fn first_tautology(&self) -> Option<usize> {
        self.clauses.iter().position(Clause::is_tautological).map(|k| k + 1)
    }

    pub(crate) fn push(&mut self, clause: Clause) {
        debug_assert!(clause.max_var().map_or(true, |v| v.0 <= self.num_vars));
        self.clauses.push(clause);
    }
}

/// A partial map from variables to truth values.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
    assigned: usize,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(num_vars: u32) -> Self {
        Assignment { values: vec![None; num_vars as usize + 1], assigned: 0 }
    }

    /// Total assignment over `X1..Xn` from a slice of values for `X1..Xn`.
    pub fn from_values(values: &[bool]) -> Self {
        let mut a = Assignment::with_capacity(values.len() as u32);
        for (k, &b) in values.iter().enumerate() {
            a.set(Var::new(k as u32 + 1), b);
        }
        a
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var.0 as usize).copied().flatten()
    }

    /// Binds `var`, returning its previous value.
    pub fn set(&mut self, var: Var, value: bool) -> Option<bool> {
        let k = var.0 as usize;
        if k >= self.values.len() {
            self.values.resize(k + 1, None);
        }
        let prev = self.values[k].replace(value);
        if prev.is_none() {
            self.assigned += 1;
        }
        prev
    }

    pub fn unset(&mut self, var: Var) -> Option<bool> {
        let prev = self.values.get_mut(var.0 as usize).and_then(Option::take);
        if prev.is_some() {
            self.assigned -= 1;
        }
        prev
    }

    pub fn contains(&self, var: Var) -> bool {
        self.get(var).is_some()
    }

    /// Number of bound variables.
    pub fn len(&self) -> usize {
        self.assigned
    }

    pub fn is_empty(&self) -> bool {
        self.assigned == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|b| (Var(k as u32), b)))
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn is_subassignment_of(&self, other: &Assignment) -> bool {
        self.iter().all(|(v, b)| other.get(v) == Some(b))
    }

    /// Value of a literal, if its variable is bound.
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var).map(|b| b == lit.sign)
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.iter().any(|&l| self.lit_value(l) == Some(true))
    }

    pub fn falsifies(&self, clause: &Clause) -> bool {
        clause.iter().all(|&l| self.lit_value(l) == Some(false))
    }

    pub fn satisfies_cnf(&self, cnf: &Cnf) -> bool {
        cnf.clauses.iter().all(|c| self.satisfies(c))
    }

    /// 1-based index of the first clause not satisfied.
    pub fn first_unsatisfied(&self, cnf: &Cnf) -> Option<usize> {
        cnf.clauses.iter().position(|c| !self.satisfies(c)).map(|k| k + 1)
    }
}

impl PartialEq for Assignment {
    fn eq(&self, other: &Self) -> bool {
        self.assigned == other.assigned && self.is_subassignment_of(other)
    }
}

impl Eq for Assignment {}

/// Outcome of restricting a clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restricted {
    /// Some literal is satisfied (the constant 1).
    Satisfied,
    /// Every literal is falsified (the constant 0).
    Falsified,
    Clause(Clause),
}

/// `C↾α`.
pub fn restrict_clause(clause: &Clause, alpha: &Assignment) -> Restricted {
    let mut kept = Vec::with_capacity(clause.len());
    for &l in clause {
        match alpha.lit_value(l) {
            Some(true) => return Restricted::Satisfied,
            Some(false) => {}
            None => kept.push(l),
        }
    }
    if kept.is_empty() {
        Restricted::Falsified
    } else {
        // `kept` is a subsequence of a sorted clause.
        Restricted::Clause(Clause { lits: kept })
    }
}

/// `F↾α` together with, for each original clause, its index (1-based) in the
/// restricted formula. Satisfied clauses map to `None`; all falsified clauses
/// map to the single empty clause, placed where the first one occurred.
pub fn restrict_cnf_indexed(cnf: &Cnf, alpha: &Assignment) -> (Cnf, Vec<Option<usize>>) {
    let mut out = Cnf { num_vars: cnf.num_vars, clauses: Vec::new() };
    let mut index = Vec::with_capacity(cnf.clauses.len());
    let mut empty_at = None;
    for c in &cnf.clauses {
        match restrict_clause(c, alpha) {
            Restricted::Satisfied => index.push(None),
            Restricted::Falsified => {
                let at = *empty_at.get_or_insert_with(|| {
                    out.clauses.push(Clause::empty());
                    out.clauses.len()
                });
                index.push(Some(at));
            }
            Restricted::Clause(r) => {
                out.clauses.push(r);
                index.push(Some(out.clauses.len()));
            }
        }
    }
    (out, index)
}

/// `F↾α`.
pub fn restrict_cnf(cnf: &Cnf, alpha: &Assignment) -> Cnf {
    restrict_cnf_indexed(cnf, alpha).0
}

/// `r(F)`.
pub fn cnf_size(cnf: &Cnf) -> usize {
    cnf.size()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: missing `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: malformed literal `{token}`")]
    MalformedLiteral { line: usize, token: String },
    #[error("line {line}: variable {var} exceeds declared n={num_vars}")]
    VarOutOfRange { line: usize, var: u32, num_vars: u32 },
    #[error("line {line}: clause is not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: header declares {declared} clauses but {found} were read")]
    ClauseCount { line: usize, declared: usize, found: usize },
}

impl DimacsError {
    pub fn line(&self) -> usize {
        match self {
            DimacsError::MissingHeader { line }
            | DimacsError::MalformedHeader { line, .. }
            | DimacsError::MalformedLiteral { line, .. }
            | DimacsError::VarOutOfRange { line, .. }
            | DimacsError::MissingTerminator { line }
            | DimacsError::ClauseCount { line, .. } => *line,
        }
    }
}

/// Parses DIMACS CNF: comment lines `c ...` before the header, a header
/// `p cnf <n> <m>`, then one zero-terminated clause per line.
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some((num_vars, _)) = header else {
            if trimmed.starts_with('c') {
                continue;
            }
            if !trimmed.starts_with('p') {
                return Err(DimacsError::MissingHeader { line });
            }
            header = Some(parse_header(trimmed, line)?);
            continue;
        };
        if trimmed.starts_with('c') {
            continue;
        }
        let mut lits = Vec::new();
        let mut terminated = false;
        for token in trimmed.split_whitespace() {
            if terminated {
                // Anything after the terminating zero.
                return Err(DimacsError::MalformedLiteral { line, token: token.to_string() });
            }
            let value: i32 = token
                .parse()
                .map_err(|_| DimacsError::MalformedLiteral { line, token: token.to_string() })?;
            if value == 0 {
                terminated = true;
                continue;
            }
            let var = value.unsigned_abs();
            if var > num_vars {
                return Err(DimacsError::VarOutOfRange { line, var, num_vars });
            }
            lits.push(Lit::from_dimacs(value));
        }
        if !terminated {
            return Err(DimacsError::MissingTerminator { line });
        }
        clauses.push(Clause::new(lits));
    }
    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::MissingHeader { line: last_line.max(1) });
    };
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { line: last_line, declared, found: clauses.len() });
    }
    Ok(Cnf { num_vars, clauses })
}

fn parse_header(text: &str, line: usize) -> Result<(u32, usize), DimacsError> {
    let bad = || DimacsError::MalformedHeader { line, text: text.to_string() };
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(bad());
    }
    let n = fields[2].parse().map_err(|_| bad())?;
    let m = fields[3].parse().map_err(|_| bad())?;
    Ok((n, m))
}

/// Canonical DIMACS text: header, then one clause per line in canonical
/// literal order.
pub fn emit_dimacs(cnf: &Cnf) -> String {
    let mut out = String::with_capacity(16 + cnf.size() * 6 + cnf.num_clauses() * 2);
    out.push_str(&format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len()));
    for c in &cnf.clauses {
        for l in c {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: expected `<var> <0|1>`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: variable {var} bound twice")]
    Duplicate { line: usize, var: u32 },
}

/// Parses an assignment file: lines `<var> <0|1>`, `c` comments allowed.
pub fn parse_model(text: &str) -> Result<Assignment, ModelError> {
    let mut a = Assignment::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let bad = || ModelError::Malformed { line, text: t.to_string() };
        let mut it = t.split_whitespace();
        let var: u32 = it.next().and_then(|s| s.parse().ok()).filter(|&v| v > 0).ok_or_else(bad)?;
        let value = match it.next() {
            Some("0") => false,
            Some("1") => true,
            _ => return Err(bad()),
        };
        if it.next().is_some() {
            return Err(bad());
        }
        if a.set(Var::new(var), value).is_some() {
            return Err(ModelError::Duplicate { line, var });
        }
    }
    Ok(a)
}

pub fn write_model(alpha: &Assignment) -> String {
    alpha.iter().map(|(v, b)| format!("{} {}\n", v.index(), u8::from(b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Lit {
        Var::new(i).pos()
    }

    fn nx(i: u32) -> Lit {
        Var::new(i).neg()
    }

    fn assign(pairs: &[(u32, bool)]) -> Assignment {
        let mut a = Assignment::new();
        for &(v, b) in pairs {
            a.set(Var::new(v), b);
        }
        a
    }

    #[test]
    fn restrict_clause_cases() {
        let c = Clause::new([x(1), nx(2)]);
        assert_eq!(restrict_clause(&c, &assign(&[(1, false)])), Restricted::Clause(Clause::new([nx(2)])));
        assert_eq!(restrict_clause(&c, &assign(&[(2, false)])), Restricted::Satisfied);
        assert_eq!(restrict_clause(&Clause::new([x(1)]), &assign(&[(1, false)])), Restricted::Falsified);
        assert_eq!(restrict_clause(&c, &Assignment::new()), Restricted::Clause(c.clone()));
        assert_eq!(restrict_clause(&Clause::empty(), &assign(&[(1, true)])), Restricted::Falsified);
    }

    #[test]
    fn restrict_cnf_cases() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1], &[-1, 2]]);
        assert_eq!(restrict_cnf(&f, &assign(&[(1, true)])).clauses(), &[Clause::new([x(2)])]);

        let g = Cnf::from_dimacs_clauses(1, &[&[1]]);
        assert_eq!(restrict_cnf(&g, &assign(&[(1, false)])).clauses(), &[Clause::empty()]);

        let h = Cnf::from_dimacs_clauses(2, &[&[1, 2]]);
        assert_eq!(restrict_cnf(&h, &Assignment::new()), h);
    }

    #[test]
    fn falsified_clauses_share_one_empty_clause() {
        let f = Cnf::from_dimacs_clauses(2, &[&[1], &[2], &[1, 2], &[-1]]);
        let (r, idx) = restrict_cnf_indexed(&f, &assign(&[(1, false), (2, false)]));
        assert_eq!(r.clauses(), &[Clause::empty()]);
        assert_eq!(idx, vec![Some(1), Some(1), Some(1), None]);
    }

    #[test]
    fn sizes() {
        assert_eq!(cnf_size(&Cnf::from_dimacs_clauses(1, &[&[1], &[-1]])), 2);
        assert_eq!(cnf_size(&Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1], &[-2]])), 4);
        assert_eq!(cnf_size(&Cnf::default()), 0);
    }

    #[test]
    fn clause_set_semantics() {
        let c = Clause::new([x(2), nx(1), x(2)]);
        assert_eq!(c.len(), 2);
        assert!(!c.is_tautological());
        assert!(Clause::new([x(1), nx(1)]).is_tautological());
        assert!(Clause::new([x(1)]).is_subset_of(&c.union(&Clause::new([x(1)]))));
        assert!(!Clause::new([x(1)]).is_subset_of(&c));
        assert!(Clause::empty().is_subset_of(&c));
    }

    #[test]
    fn resolvent() {
        let c = Clause::new([x(1), x(2)]);
        let d = Clause::new([nx(1), nx(3)]);
        assert_eq!(c.resolve(&d, Var::new(1)), Some(Clause::new([x(2), nx(3)])));
        assert_eq!(d.resolve(&c, Var::new(1)), None);
        // only the clashing pair is removed
        let taut = Clause::new([x(1), nx(1)]);
        assert_eq!(Clause::new([x(1)]).resolve(&taut, Var::new(1)), Some(Clause::new([x(1)])));
    }

    #[test]
    fn dimacs_parse_and_emit() {
        let f = parse_dimacs("c hello\np cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert_eq!(f, Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]));
        assert_eq!(emit_dimacs(&f), "p cnf 1 2\n1 0\n-1 0\n");

        let g = parse_dimacs("p cnf 3 2\n3 -1 3 0\n\n0\n").unwrap();
        assert_eq!(emit_dimacs(&g), "p cnf 3 2\n-1 3 0\n0\n");
        assert_eq!(parse_dimacs(&emit_dimacs(&g)).unwrap(), g);
    }

    #[test]
    fn dimacs_errors_carry_lines() {
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(DimacsError::VarOutOfRange { line: 2, var: 2, num_vars: 1 })
        );
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::MissingTerminator { line: 2 }));
        assert!(matches!(parse_dimacs("p dnf 1 1\n1 0\n"), Err(DimacsError::MalformedHeader { line: 1, .. })));
        assert!(matches!(parse_dimacs("1 0\n"), Err(DimacsError::MissingHeader { line: 1 })));
        assert!(matches!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(DimacsError::ClauseCount { declared: 2, found: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n1 x 0\n"), Err(DimacsError::MalformedLiteral { line: 2, .. })));
    }

    #[test]
    fn model_round_trip() {
        let a = assign(&[(1, true), (3, false)]);
        assert_eq!(parse_model(&write_model(&a)).unwrap(), a);
        assert!(parse_model("1 2\n").is_err());
        assert!(matches!(parse_model("1 0\n1 1\n"), Err(ModelError::Duplicate { line: 2, var: 1 })));
    }

    #[test]
    fn assignment_equality_ignores_capacity() {
        let mut a = Assignment::with_capacity(10);
        a.set(Var::new(2), true);
        let b = assign(&[(2, true)]);
        assert_eq!(a, b);
        a.unset(Var::new(2));
        assert!(a.is_empty());
    }
}
