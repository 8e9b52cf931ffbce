//! Cubic Hecke L-function verification lab over the Eisenstein integers.

pub mod eisenstein;
pub mod euler;
pub mod error;
pub mod factorization;
pub mod family;
pub mod bias;
pub mod gauss;
pub mod lfun;
pub mod scalar;
pub mod special;
pub mod symbol;
pub mod weights;
