//! Equivalence-theorem checks, efficiencies and reference designs.

mod oracle;
mod report;
mod sweep;
mod verify;

pub use oracle::{brute_force_c, brute_force_e, min_eigenvalue, COracle, OracleOptions};
pub use report::{
    Criterion, Optimality, VerificationReport, VerifyOptions, ESTIMABILITY_TOL, MULTIPLICITY_TOL,
};
pub use sweep::{eig_ratio, eig_ratio_sweep, SweepRow};
pub use verify::{
    c_criterion, c_reference, efficiencies, efficiencies_against, efficiency, unit_references,
    verify_c, verify_e, verify_e_with, CReference, ReferenceSource,
};
