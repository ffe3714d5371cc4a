//! A small DPLL solver used as a ground-truth oracle.
//!
//! Unit propagation and pure-literal elimination, chronological backtracking,
//! branching on the smallest unassigned variable that still occurs in an
//! unsatisfied clause, `true` first.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Cnf, Lit, Var};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of branching decisions; `None` means unbounded.
    pub max_decisions: Option<u64>,
}

impl Limits {
    pub fn decisions(max: u64) -> Self {
        Limits { max_decisions: Some(max) }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// A total model over `1..=num_vars`, checked against every clause.
    Sat { model: Assignment, stats: Stats },
    Unsat { stats: Stats },
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat { .. })
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SolveResult::Sat { model, .. } => Some(model),
            SolveResult::Unsat { .. } => None,
        }
    }

    pub fn stats(&self) -> Stats {
        match self {
            SolveResult::Sat { stats, .. } | SolveResult::Unsat { stats } => *stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("decision budget of {budget} exhausted")]
pub struct BudgetExceeded {
    pub budget: u64,
    pub stats: Stats,
}

fn code(lit: Lit) -> usize {
    (lit.var().index() as usize) * 2 + usize::from(lit.sign())
}

#[derive(Clone, Copy)]
enum Step {
    Decision { flipped: bool },
    Implied,
}

struct State {
    clauses: Vec<Vec<Lit>>,
    occ: Vec<Vec<u32>>,
    value: Vec<Option<bool>>,
    n_false: Vec<u32>,
    n_true: Vec<u32>,
    active: Vec<u32>,
    open: usize,
    trail: Vec<(Lit, Step)>,
    pending: Vec<(Lit, u32)>,
    conflict: bool,
    stats: Stats,
}

impl State {
    fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars() as usize;
        let clauses: Vec<Vec<Lit>> =
            cnf.clauses().iter().filter(|c| !c.is_tautological()).map(|c| c.lits().to_vec()).collect();
        let mut occ = vec![Vec::new(); 2 * n + 2];
        let mut active = vec![0; 2 * n + 2];
        for (k, c) in clauses.iter().enumerate() {
            for &l in c {
                occ[code(l)].push(k as u32);
                active[code(l)] += 1;
            }
        }
        let open = clauses.len();
        let mut st = State {
            n_false: vec![0; clauses.len()],
            n_true: vec![0; clauses.len()],
            clauses,
            occ,
            value: vec![None; n + 1],
            active,
            open,
            trail: Vec::new(),
            pending: Vec::new(),
            conflict: false,
            stats: Stats::default(),
        };
        for k in 0..st.clauses.len() {
            match st.clauses[k].len() {
                0 => st.conflict = true,
                1 => st.pending.push((st.clauses[k][0], k as u32)),
                _ => {}
            }
        }
        st
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var().index() as usize].map(|v| v == l.sign())
    }

    fn assign(&mut self, lit: Lit, step: Step) {
        self.value[lit.var().index() as usize] = Some(lit.sign());
        self.trail.push((lit, step));
        for k in 0..self.occ[code(lit)].len() {
            let c = self.occ[code(lit)][k] as usize;
            self.n_true[c] += 1;
            if self.n_true[c] == 1 {
                self.open -= 1;
                for &l in &self.clauses[c] {
                    self.active[code(l)] -= 1;
                }
            }
        }
        for k in 0..self.occ[code(!lit)].len() {
            let c = self.occ[code(!lit)][k] as usize;
            self.n_false[c] += 1;
            if self.n_true[c] == 0 {
                let len = self.clauses[c].len() as u32;
                if self.n_false[c] == len {
                    self.conflict = true;
                } else if self.n_false[c] + 1 == len {
                    let unit = self.clauses[c].iter().copied().find(|&l| self.lit_value(l).is_none()).expect("one free literal");
                    self.pending.push((unit, c as u32));
                }
            }
        }
    }

    fn unassign(&mut self) -> (Lit, Step) {
        let (lit, step) = self.trail.pop().expect("non-empty trail");
        for k in 0..self.occ[code(!lit)].len() {
            let c = self.occ[code(!lit)][k] as usize;
            self.n_false[c] -= 1;
        }
        for k in 0..self.occ[code(lit)].len() {
            let c = self.occ[code(lit)][k] as usize;
            self.n_true[c] -= 1;
            if self.n_true[c] == 0 {
                self.open += 1;
                for &l in &self.clauses[c] {
                    self.active[code(l)] += 1;
                }
            }
        }
        self.value[lit.var().index() as usize] = None;
        (lit, step)
    }

    fn propagate(&mut self) {
        while !self.conflict {
            let Some((lit, c)) = self.pending.pop() else { return };
            let c = c as usize;
            if self.n_true[c] > 0 {
                continue;
            }
            match self.lit_value(lit) {
                Some(true) => {}
                Some(false) => self.conflict = true,
                None => {
                    self.stats.propagations += 1;
                    self.assign(lit, Step::Implied);
                }
            }
        }
    }

    /// Undoes the trail up to the latest unflipped decision and flips it.
    fn backtrack(&mut self) -> bool {
        self.pending.clear();
        self.conflict = false;
        while !self.trail.is_empty() {
            if let (lit, Step::Decision { flipped: false }) = self.unassign() {
                self.assign(!lit, Step::Decision { flipped: true });
                return true;
            }
        }
        false
    }

    fn pure_literal(&self) -> Option<Lit> {
        (1..self.value.len()).filter(|&i| self.value[i].is_none()).find_map(|i| {
            let var = Var::new(i as u32);
            match (self.active[code(var.pos())], self.active[code(var.neg())]) {
                (0, 0) => None,
                (_, 0) => Some(var.pos()),
                (0, _) => Some(var.neg()),
                _ => None,
            }
        })
    }

    fn branch_var(&self) -> Option<Var> {
        (1..self.value.len())
            .filter(|&i| self.value[i].is_none())
            .map(|i| Var::new(i as u32))
            .find(|v| self.active[code(v.pos())] + self.active[code(v.neg())] > 0)
    }
}

/// Decides satisfiability of `cnf` within the given limits.
pub fn solve(cnf: &Cnf, limits: Limits) -> Result<SolveResult, BudgetExceeded> {
    let mut st = State::new(cnf);
    loop {
        st.propagate();
        if st.conflict {
            if !st.backtrack() {
                return Ok(SolveResult::Unsat { stats: st.stats });
            }
            continue;
        }
        if st.open == 0 {
            break;
        }
        if let Some(lit) = st.pure_literal() {
            st.assign(lit, Step::Implied);
            continue;
        }
        let var = st.branch_var().expect("an open clause has a free variable");
        if limits.max_decisions.is_some_and(|b| st.stats.decisions >= b) {
            return Err(BudgetExceeded { budget: limits.max_decisions.unwrap(), stats: st.stats });
        }
        st.stats.decisions += 1;
        st.assign(var.pos(), Step::Decision { flipped: false });
    }
    let values: Vec<bool> = st.value[1..].iter().map(|v| v.unwrap_or(true)).collect();
    let model = Assignment::from_values(&values);
    assert!(model.satisfies_cnf(cnf), "solver produced a non-model");
    Ok(SolveResult::Sat { model, stats: st.stats })
}

/// Truth-table satisfiability for formulas with few variables.
pub fn brute_force(cnf: &Cnf) -> Option<Assignment> {
    let n = cnf.num_vars() as usize;
    assert!(n < 24, "too many variables for brute force");
    (0u32..1 << n).find_map(|bits| {
        let values: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let a = Assignment::from_values(&values);
        a.satisfies_cnf(cnf).then_some(a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::encode_ref;
    use crate::structure::{assignment_to_structure, full_tree, structure_to_assignment, validate_structure, FullTree};

    fn run(cnf: &Cnf) -> SolveResult {
        solve(cnf, Limits::default()).unwrap()
    }

    #[test]
    fn tiny_cases() {
        assert!(!run(&Cnf::from_dimacs_clauses(1, &[&[1], &[-1]])).is_sat());
        let r = run(&Cnf::from_dimacs_clauses(1, &[&[1]]));
        assert_eq!(r.model().unwrap().get(Var::new(1)), Some(true));
        assert!(run(&Cnf::from_dimacs_clauses(2, &[])).is_sat());
        assert!(!run(&Cnf::from_dimacs_clauses(2, &[&[1, 2], &[]])).is_sat());
        assert!(run(&Cnf::from_dimacs_clauses(1, &[&[1, -1]])).is_sat());
    }

    #[test]
    fn ref_boundary() {
        let f = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let g3 = encode_ref(&f, 3).unwrap();
        let r = run(&g3.cnf);
        let st = assignment_to_structure(r.model().unwrap(), &f, 3).unwrap();
        assert_eq!(validate_structure(&f, &st), Ok(None));
        let FullTree::Refutation(tree) = full_tree(&f) else { panic!() };
        assert!(structure_to_assignment(&tree, &f).unwrap().satisfies_cnf(&g3.cnf));
        assert!(!run(&encode_ref(&f, 2).unwrap().cnf).is_sat());
    }

    #[test]
    fn budget_is_distinct() {
        let f = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let g = encode_ref(&f, 3).unwrap();
        let err = solve(&g.cnf, Limits::decisions(0)).unwrap_err();
        assert_eq!(err.budget, 0);
    }

    #[test]
    fn deterministic_model() {
        let f = Cnf::from_dimacs_clauses(3, &[&[1, 2], &[-1, 3], &[-2, -3]]);
        assert_eq!(run(&f), run(&f));
    }
}
