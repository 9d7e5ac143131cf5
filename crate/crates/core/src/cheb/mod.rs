//! Chebyshev polynomials of general function systems.

mod closed_form;
mod remez;
mod tsystem;

pub use closed_form::{cheb_u, closed_form_points, ClosedFormPoints, TauRoot};
pub use remez::{remez, ChebyshevSolution, RemezOptions};
pub use tsystem::{cauchy_vandermonde_det, is_chebyshev_system, ChebyshevCheck, Verdict, ZERO_DET};
