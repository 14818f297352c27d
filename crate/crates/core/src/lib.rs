//! Exact-arithmetic toolkit for conjugate-generation rank certificates.
//!
//! The crate is organised around five concerns:
//!
//! * [`cyclo`] — exact elements of cyclotomic fields `Q(ζ_n)` with a unique
//!   canonical form and a text grammar (`E(n)^k`) for values,
//! * [`chartab`] — character tables, consistency validation, class
//!   multiplication coefficients and restriction inner products,
//! * [`permgrp`] — a base/strong-generating-set permutation-group engine
//!   used as an independent brute-force oracle,
//! * [`certify`] — machine-checkable certificates for rank claims, with an
//!   explicit trace of every assumption taken on faith,
//! * [`dataio`] — loading and cross-validating the on-disk data bundle
//!   (tables, fusions, groups, claims, maximal-subgroup data).
//!
//! All arithmetic is exact: rationals are arbitrary precision and equality
//! of cyclotomic values is decidable via canonical forms. Nothing in this
//! crate approximates.

pub mod certify;
pub mod chartab;
pub mod cyclo;
pub mod dataio;
pub mod permgrp;

pub use cyclo::CycloValue;
