mod presentation;
mod subgroup;

pub use presentation::{GroupElement, PcPresentation, Violation};
pub use subgroup::{Subgroup, SMALL_LOG2_CAP};
