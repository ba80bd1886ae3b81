//! Partition posets of weight-graded set operads and algebras, chain-edge
//! labellings, PBW bases derived from them, and the homology of the
//! associated order complexes.

pub mod bar;
pub mod counterexample;
pub mod fixtures;
pub mod pbw;
pub mod poset;
pub mod presentation;
pub mod shelling;
pub mod topology;
