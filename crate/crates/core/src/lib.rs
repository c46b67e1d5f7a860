//! Additive error-correcting codes built by expander-based composition,
//! with exact certification of their subspace-design profile.

pub mod gf;
pub mod linalg;
mod poly;
pub mod budget;
pub mod codes;
pub mod rational;
pub mod graphs;
pub mod design;
pub mod ael;
pub mod decode;
pub mod io;
