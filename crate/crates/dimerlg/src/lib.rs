//! Computational toolkit for dimers on punctured surfaces and their
//! (deformed) Landau-Ginzburg mirrors: classical and deformed superpotentials,
//! Jacobi algebra normal forms, midpoint polygon enumeration and the
//! Cho-Hong-Lau product-table engine — all in exact rational arithmetic.

pub mod chl;
pub mod cover;
pub mod dimer;
pub mod disks;
pub mod jacobi;
pub mod mirror;
pub mod ncpoly;

pub use dimer::{sphere3, standard_sphere_dimer, torus4, Dimer, DimerError};
pub use ncpoly::{DefSeries, NcError, NcPoly, QMonomial, Quiver, QuiverPath, Rat};
