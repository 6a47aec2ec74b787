//! Gap functions and the summation engines for the length identities.

mod engines;
mod gap;
mod gaps;
mod par;
mod report;
mod tail;

pub use engines::{
    boundary_half_length, general_mcshane_sum, markoff_sum, pants_trivial_identity, torus_mcshane_sum,
    weierstrass_sum, PantsDecomposition, SumOptions,
};
pub use gap::{
    frak_h, gap_g, gap_g_log, gap_s, gap_s_log, h_of_trace, shift_invariance_check, weierstrass_term,
};
pub use gaps::{gap_endpoints, gap_factorization, GapEndpoints};
pub use par::{par_map, tree_sum};
pub use report::{mod_defect, IdentityReport, Modulus, TailConstants, TermRecord};
pub use tail::{fit_tail, tail_estimate, MIN_LEVELS};
