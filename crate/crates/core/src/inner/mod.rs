//! The probabilistic inner code: a random codebook with `t` codewords per
//! message, decoded by table lookup.

mod code;
mod io;
mod params;
mod verify;

pub use code::{InnerCode, REJECTION_BUDGET};
pub use io::{read_inner_code, write_inner_code};
pub use params::{
    binary_entropy, hamming_ball_volume, inverse_binary_entropy, plan_inner_params, ConstraintCheck, InnerParams,
    InnerPlan, MAX_CODEBOOK, MAX_INNER_BITS,
};
pub use verify::{
    cube_min_bottom_fraction_naive, is_identity_on_codewords, single_freeze_tampers, verify_bounded_independence,
    verify_cube_property, verify_cube_property_sampled, verify_error_detection, verify_error_detection_sampled,
    DEFAULT_CUBE_GUARD, DEFAULT_SWEEP_GUARD,
};
pub(crate) use verify::combinations;
