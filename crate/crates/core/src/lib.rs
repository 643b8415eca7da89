//! Computations on SU(2,1): exact Lie-algebra structure, coadjoint orbits
//! of the Borel subgroup, orbital integrals by adaptive quadrature, and
//! discrete-series characters with their endoscopic transfer.

pub mod algebra;
pub mod group;
pub mod matrix;
pub mod scalar;
pub mod orbits;
pub mod roots;
pub mod bump;
pub mod quadrature;
pub mod orbital;
pub mod endoscopy;
