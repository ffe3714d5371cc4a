//! Resolution refutations encoded as CNF: the REF/RREF formulas, refutation
//! structures, explicit short refutations, random restrictions and the
//! width apparatus built from partial injections.

pub mod cnf;
pub mod encode;
pub mod proof;
pub mod structure;
pub mod generate;
pub mod solver;
pub mod witness;
pub mod condition;
pub mod restriction;
pub mod reduction;
