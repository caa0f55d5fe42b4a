//! Robot-centered cost maps: binary scan layers, their critical sum, and the
//! vegetation-aware map obtained by clearing pliable regions.

mod clearing;
mod grid;
mod io;
mod layers;
mod unsafe_marks;

pub use clearing::{
    admissibility_threshold, apply_clearing, clear_value, is_inadmissible, ClearingWeights,
    QuadrantEvidence,
};
pub use grid::{CostMap, MapGeometry, MAX_COST};
pub use io::{costmap_from_csv, costmap_to_csv};
pub use layers::{build_layer, critical_sum, height_measure, CRIT_MAX, OCCUPIED};
pub use unsafe_marks::{mark_unsafe, UnsafeRegistry};
