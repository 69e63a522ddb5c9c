//! Exact computation of Jacobi sums, cyclotomic numbers and Dickson-Hurwitz
//! sums over small finite fields F_q (q = p^r <= 2^24), together with a
//! verifier for the algebraic identities and lambda-adic congruences that
//! relate them.
//!
//! Module map:
//!
//! * [`fieldtab`] — finite field construction, generator search and the full
//!   discrete-log (index) table, plus a versioned binary cache format.
//! * [`cycring`] — exact arithmetic in Z[zeta_e]: reduction mod Phi_e, Galois
//!   action, the (zeta-1) power basis and lambda-adic valuations.
//! * [`charsums`] — cyclotomic numbers, Jacobi sums (two independent routes),
//!   Dickson-Hurwitz sums and the coefficient families built from them.
//! * [`verify`] — suites of identity and congruence checks producing a
//!   structured, JSON-serializable report.

pub mod arith;
pub mod charsums;
pub mod cycring;
pub mod fieldtab;
pub mod verify;
