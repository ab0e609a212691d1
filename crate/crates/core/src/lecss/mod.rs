//! Linear error-correcting secret sharing from Reed–Solomon codes.

mod code;
mod gf;
mod verify;

pub use code::{build_lecss, LecssCode, LecssDescriptor};
pub use gf::{GaloisField, GfElement, MAX_FIELD_BITS, PRIMITIVE_MODULI};
pub use verify::{
    check_corruption_detection, verify_lecss, LecssVerification, DEFAULT_LECSS_GUARD,
};
