//! Sieve-backed brute-force evaluation of the finite sums behind the bound,
//! and numerical checks of the auxiliary lemmas.

pub mod agreement;
pub mod arith;
pub mod lemmas;
pub mod mollifier;
pub mod sieve;
pub mod sums;

pub use lemmas::{verify_lemma, LemmaId, LemmaParams, LemmaReport};
pub use mollifier::{mollifier_coeffs, FiniteMollifier};
pub use sieve::{sieve, ArithmeticTables};
pub use sums::{
    e_alpha_asymptotic, e_alpha_brute, sigma_brute, sigma_direct, sigma_main_term, Lengths,
};
