//! Scaled monomial bases, quadrature and L² projections.

mod monomial;
mod multi_index;
mod poly;
mod projection;
mod quadrature;

pub use monomial::ScaledMonomialBasis;
pub use multi_index::{enumerate_multi_indices, index_of, monomial_count, MultiIndex};
pub use poly::{restrict_to_face, Poly};
pub use projection::{
    l2_project_onto_cell_polys, l2_project_onto_face_polys, mass_and_moments, project_with_rule,
};
pub use quadrature::{
    gauss_legendre, quadrature_on_cell, quadrature_on_face, segment_rule, triangle_rule,
    QuadratureRule,
};
