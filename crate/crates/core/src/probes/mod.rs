//! Finite-dimensional surrogates for generation properties: resolvent bounds
//! on rays, relative bounds, block structure of the propagator and singular
//! value decay. A matrix always generates a semigroup, so the content of
//! these probes is in how the numbers behave under grid refinement.

mod compactness;
mod evolve;
mod hille_yosida;
mod relbound;
mod sector;
mod theorem31;

use serde::{Deserialize, Serialize};

pub use compactness::{compactness_proxy, CompactnessReport, NodeWeighting, SingularValueRow};
pub use evolve::{evolve_and_structure_check, EvolutionEntry, EvolutionReport};
pub use hille_yosida::{hille_yosida_probe, HilleYosidaReport, HilleYosidaSample};
pub use relbound::{relative_bound_probe, RelativeBoundReport, RelativeBoundVerdict};
pub use sector::{sector_angle_estimate, theta_grid, RaySample, SectorOptions, SectorReport};
pub use theorem31::{theorem31_experiment, AngleSummary, Theorem31Options, Theorem31Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotApplicable => "N/A",
        })
    }
}
