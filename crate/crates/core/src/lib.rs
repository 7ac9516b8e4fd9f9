//! Delay-inverse systems over concrete categories.

pub mod category;
pub mod dmorphism;
pub mod error;
pub mod fuzz;
pub mod indexset;
pub mod system;
pub mod verdict;

pub use category::{compose, identity, mor_eq, Backend, Mor, Obj};
pub use dmorphism::{DelayMorphism, LevelPackage, ProIsoExtraction};
pub use error::{Error, Result};
pub use indexset::{IndexElem, IndexPoset, Key, Subset};
pub use system::{CommutationReport, DelaySystem, Material, Restriction};
pub use verdict::{Counterexample, Mode, Status, Verdict, Witness};
