//! Named generators: the only way a document can describe an infinite system.

use prokit_core::fuzz::{gen_adversarial_sequence, gen_planted_sequence, gen_strict_sequence, PlantSpec};
use prokit_core::{DelaySystem, Obj};

use crate::doc::DocError;

/// `(name, description)` of every generator.
pub const GENERATORS: &[(&str, &str)] = &[
    ("strict", "strict sequence from `plant` (delay profile ignored)"),
    ("planted", "sequence whose minimal commutation indices follow `plant.delay_profile`"),
    ("adversarial", "sequence where index 0 has no commutation index; uses `plant.backend`"),
    ("rudimentary", "the first listed object at every index, identity bonds"),
];

pub fn build(name: &str, plant: Option<&PlantSpec>, first: Option<Obj>) -> Result<DelaySystem, DocError> {
    let need_plant = || plant.ok_or_else(|| DocError::Invalid(format!("generator {name:?} needs a `plant` block")));
    Ok(match name {
        "strict" => gen_strict_sequence(need_plant()?)?,
        "planted" => gen_planted_sequence(need_plant()?)?,
        "adversarial" => gen_adversarial_sequence(need_plant()?.backend)?,
        "rudimentary" => DelaySystem::rudimentary(
            first.ok_or_else(|| DocError::Invalid("rudimentary needs one object entry".into()))?,
        ),
        _ => {
            let known: Vec<&str> = GENERATORS.iter().map(|(n, _)| *n).collect();
            return Err(DocError::Invalid(format!(
                "unknown generator {name:?}; known: {}",
                known.join(", ")
            )));
        }
    })
}
