//! Ground truth on the explicit cube: Walsh-Hadamard diagonalization of `M`,
//! exact joint probabilities of bijections, and worst-case search.

mod bijection;
mod probability;
mod search;
mod transform;

pub use bijection::{Bijection, Family, Provenance, SearchMode, SearchTrace, BIJECTION_CAP};
pub use probability::{
    chain_bound, conjugated_characters, conjugation_structure_report, joint_count,
    joint_probability, joint_probability_spectral, BijectionProbe, ConjugationReport, ProbeRecord,
    DENSE_CAP, DIRECT_CAP,
};
pub use search::{worst_case_search, EXHAUSTIVE_CAP, LOCAL_SEARCH_CAP};
pub use transform::{eigenvalues_via_wht, halfspace_row, wht_in_place, WHT_CAP};
