//! Exact chain-level computations with operads over a field.
//!
//! Chain complexes stand in for module spectra. Symmetric sequences,
//! operads, bimodules and algebras are modelled by finite data with
//! exact structure maps, and homotopical statements become rank
//! computations.

pub mod bar;
pub mod chain;
pub mod exactlin;
pub mod filtration;
pub mod operad;
pub mod symseq;
pub mod par;
