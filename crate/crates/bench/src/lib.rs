//! Fixtures shared by the benchmarks.

use prokit_core::fuzz::{gen_planted_sequence, DelayProfile, GenBackend, PlantSpec};
use prokit_core::DelaySystem;

pub const FIN6: GenBackend = GenBackend::FinSet { max_points: 6 };

/// Planted sequence with random delays of at most `max_extra`.
pub fn planted(length: usize, max_extra: u64, seed: u64) -> DelaySystem {
    let spec = PlantSpec::new(length, FIN6, seed).with_profile(DelayProfile::Random { max_extra });
    gen_planted_sequence(&spec).expect("valid plant")
}
