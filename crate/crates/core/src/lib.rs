//! Exact arithmetic for the Fourier coefficients of first-order p-adic
//! deformations of weight one newforms.
//!
//! The crate evaluates closed-form p-adic expressions for the coefficients
//! of the derivative of a Hida family through a classical weight one form
//! (the regular case) and of normalised overconvergent generalised
//! eigenforms (the irregular case).  All arithmetic is exact: rationals,
//! number fields presented by a defining polynomial, and capped-precision
//! unramified p-adic fields.
//!
//! Module layout:
//! - [`exactalg`]: rationals, dense polynomials, number fields, Galois
//!   automorphisms as validated polynomial maps, norm-equation search.
//! - [`padics`]: Z_p / Q_{p^f} arithmetic, Teichmüller lifts, the p-adic
//!   logarithm, Frobenius, root lifting, p-adic embeddings of number fields.
//! - [`quadclass`]: binary quadratic form class groups and quadratic-field
//!   ell-unit construction.
//! - [`galoisdata`]: group tables, characters with p-adic root-of-unity
//!   values, 2x2 representation data, the adjoint trace pairing, bracket
//!   and trilinear determinant.
//! - [`regular_deform`]: the regular-setting engine (U_g, A_g, Phi_g and
//!   the coefficient formulas for CM, RM and genus cases).
//! - [`irregular_deform`]: the irregular-setting engine (w(1), w(ell),
//!   their bracket, and canonical-basis coefficients).
//! - [`ingest`]: the problem-spec file format, parser and validator.
//! - [`predict`]: prediction tables and cross-check suites for the CLI.

pub mod exactalg;
pub mod galoisdata;
pub mod ingest;
pub mod irregular_deform;
pub mod padics;
pub mod predict;
pub mod quadclass;
pub mod regular_deform;
