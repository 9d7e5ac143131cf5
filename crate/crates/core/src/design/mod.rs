//! Approximate designs, information matrices and the candidate designs on
//! the Chebyshev points.

mod candidates;
mod measure;
pub mod rational;

pub use candidates::{
    c_from, cheb_weights, design_c, design_estar, estar_from, info_matrix, model_info_matrix,
    ChebyshevDesign, InfoMode, WeightMode, WEIGHT_CLAMP,
};
pub use measure::{Design, MASS_TOL};
