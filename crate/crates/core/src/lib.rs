pub mod calculus;
pub mod error;
pub mod gf2;
pub mod graphs;
pub mod morphisms;
pub mod pcgroup;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec};
pub use pcgroup::{GroupElement, PcPresentation};
