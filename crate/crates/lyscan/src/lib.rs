//! Numerical reconstruction of Li-Yorke chaos translation sets.
//!
//! For a bounded linear operator `T`, the translation set collects the
//! scalars λ for which `λ + T` is Li-Yorke chaotic. This crate rebuilds that
//! set numerically for a family of concretely representable operators:
//! weighted unilateral shifts and diagonal operators on ℓ²(ℕ), and the
//! Kalisch-type multiplication-minus-Volterra operator on L²[0, 2π].
//!
//! The pipeline is layered:
//!
//! - [`numkit`] — small dense Hermitian eigensolvers, Cholesky, quadrature;
//! - [`operators`] — immutable operator descriptions with exact n-th
//!   iterates, inner products, spectrum models and generator families;
//! - [`kalisch`] — exact step-function calculus and circle-intersection
//!   geometry for the Kalisch operator, plus orbit-bound certificates;
//! - [`dynamics`] — orbit statistics and restricted iterate norms via Gram
//!   matrices;
//! - [`classifier`] — three-valued chaos verdicts: analytic filters first,
//!   then empirical certificate searches, plus a closed-form oracle;
//! - [`scanner`] — λ-plane rasters, metamorphic set-law checks, PPM output;
//! - [`cli`] — the `lyscan` command-line front end.

pub mod classifier;
pub mod cli;
pub mod dynamics;
pub mod kalisch;
pub mod numkit;
pub mod operators;
pub mod scanner;
