//! Numeric serialization for emitted files.
//!
//! Every floating-point value written to an output file goes through
//! [`g17`]: scientific notation with 17 significant digits, enough to
//! round-trip any f64 exactly, so reruns compare byte-equal.

/// Format with 17 significant digits (round-trip exact for f64).
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}
