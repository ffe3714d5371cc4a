//! Seeded random CNF generators for experiments and tests.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Assignment, Clause, Cnf, Var};
use crate::solver::brute_force;

/// The generator behind every seeded experiment.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A clause over `min(k, n)` distinct variables with random signs.
pub fn random_clause<R: Rng + ?Sized>(n: u32, k: usize, rng: &mut R) -> Clause {
    let k = k.min(n as usize);
    sample(rng, n as usize, k).into_iter().map(|i| Var::new(i as u32 + 1).lit(rng.gen())).collect()
}

pub fn random_kcnf<R: Rng + ?Sized>(n: u32, m: usize, k: usize, rng: &mut R) -> Cnf {
    let clauses = (0..m).map(|_| random_clause(n, k, rng)).collect();
    Cnf::new(n, clauses).expect("variables in range")
}

/// A random k-CNF together with a hidden model it is guaranteed to satisfy.
pub fn planted_kcnf<R: Rng + ?Sized>(n: u32, m: usize, k: usize, rng: &mut R) -> (Cnf, Assignment) {
    let values: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let alpha = Assignment::from_values(&values);
    let clauses = (0..m)
        .map(|_| loop {
            let c = random_clause(n, k, rng);
            if alpha.satisfies(&c) {
                break c;
            }
        })
        .collect();
    (Cnf::new(n, clauses).expect("variables in range"), alpha)
}

/// A random unsatisfiable 3-CNF on `n ≤ 20` variables, found by rejection
/// sampling with a growing clause count.
pub fn random_unsat_3cnf<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Cnf {
    assert!((1..=20).contains(&n));
    let mut m = (5 * n as usize).max(2);
    loop {
        for _ in 0..20 {
            let f = random_kcnf(n, m, 3, rng);
            if brute_force(&f).is_none() {
                return f;
            }
        }
        m += n as usize;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let mut rng = seeded(7);
        let f = random_kcnf(5, 10, 3, &mut rng);
        assert_eq!(f.num_clauses(), 10);
        assert!(f.clauses().iter().all(|c| c.len() == 3 && !c.is_tautological()));
        let (g, alpha) = planted_kcnf(6, 15, 3, &mut rng);
        assert!(alpha.satisfies_cnf(&g));
        let h = random_unsat_3cnf(3, &mut rng);
        assert!(brute_force(&h).is_none());
        assert!(h.max_clause_len() <= 3);
    }
}
