//! Symbolic toolkit for differential invariants of linear ODEs of order
//! three and higher: a jet-space kernel, a parser, Lie generators and
//! prolongation, a catalogue of known invariants, changes of variables and
//! an exact numeric cross-check.

pub mod catalogue;
pub mod harness;
pub mod jet;
pub mod liegen;
pub mod linalg;
pub mod ode;
pub mod parse;
pub mod transforms;

pub use catalogue::{Catalogue, CatalogueError, InvariantRecord, Label, Status, Variant, VerificationReport};
pub use harness::{invariance_trial, run_suite, sample_coefficients, CoefficientSample, HarnessError, SuiteReport, TrialReport};
pub use jet::{EpsExpr, JetError, JetExpr, JetVar, Poly};
pub use liegen::{
    count_invariants, derive_coefficient_generator, lie_apply, prolong, split_by_parameters, verify_annihilates, verify_symmetry,
    CountMethod, LieError, VectorField, Verdict,
};
pub use ode::{Form, LinearODE};
pub use parse::{parse, print, ParseError};
pub use transforms::{
    apply_w_group, brioschi_reduce, group_to_algebra, pullback_invariant, reduce_to_normal, schwarzian, transform_ode, Brioschi,
    PointTransformation, TransformError,
};
