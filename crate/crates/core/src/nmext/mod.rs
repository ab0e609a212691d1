//! Seedless two-source non-malleable extractors at toy sizes: exact checks,
//! random tables, and the induced split-state code.

mod check;
mod code;
mod source;
mod table;

pub use check::{
    check_extraction, check_relaxed_nm, check_strict_nm, decomposition_check, def51_distance_at, def51_rows,
    extraction_distance_exact, fixed_point_simulator, relaxed_pattern_distance, strict_u_form_distance, u_form_rows,
    Cell, DecompositionCheck, NmVerdict, Pattern, PatternDistance, StrictVerdict, DECOMPOSITION_TOLERANCE,
    MAX_STRICT_HALF_BITS,
};
pub use code::{
    extractor_to_code, rate_fifth_params, single_instance_budget, verify_reduction, ExtractorCode, RateFifthParams,
    ReductionReport, ReductionRow, REDUCTION_TOLERANCE,
};
pub use source::{flat_supports, FlatSourcePair, MAX_ENUMERATED_SOURCE_BITS};
pub use table::{sample_random_extractor, ExtractorHeader, ExtractorTable, MAX_EXT_HALF_BITS, MAX_EXT_OUTPUT_BITS};

#[cfg(test)]
mod tests;
