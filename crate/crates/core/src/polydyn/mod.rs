//! Normal-form polynomials `f_c` with `f_c(0) = 0`, `f_c' = prod (z - c_i)`,
//! their escape rates, canonical heights and orbit relations.

mod crit;
mod green;
mod height;
mod normal;
mod orbit;

pub use crit::{critical_heights, depleted_crit_height, DepletedHeight};
pub(crate) use green::NonarchData;
pub use green::{green_arch, green_nonarch, GreenOptions, GreenStatus, GreenValue};
pub use height::{
    canonical_height_green, canonical_height_iter, canonical_height_iter_bounded, one_step_bound,
    relevant_places, CanonicalHeight,
};
pub use normal::{coeffs_from_crit, multiplier_at_zero, CritVector, NormalFormPoly};
pub use orbit::{
    detect_dependence, detect_linear_symmetry, is_preperiodic, multiplier_of_cycle,
    DependenceKind, DependenceVerdict, OrbitBudget, PreperiodicBounds, PreperiodicVerdict,
};
