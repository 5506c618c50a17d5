//! Matrices over F_q[Y] and F_q(Y), normal forms, and primitive partial
//! lattices in R^D.

mod lattice;
mod matrix;
mod normal;

pub use lattice::{
    complete_to_sl, covol_exponent, det_exponent, dual_lattice, factor_lattice, is_primitive,
    is_primitive_by_minors, isometric_flatten, maximal_minors, orthogonal_lattice, subsets, undual,
    DualLattice, FactorLattice, PartialLattice,
};
pub use matrix::{MatK, MatR, Matrix, Ring};
pub use normal::{hermite_basis, hermite_form, hermite_pivots, smith_form, SmithForm};
