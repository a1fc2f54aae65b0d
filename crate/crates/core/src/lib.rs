//! Functional regenerating codes for broadcast repair of multiple failed
//! storage nodes.

pub mod collector;
pub mod file;
pub mod gf;
pub mod linpoly;
pub mod longevity;
pub mod mds;
pub mod params;
pub mod properties;
pub mod repair;
pub mod state;
pub mod subspace;
pub mod system;
pub mod tradeoff;
