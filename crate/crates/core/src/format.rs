//! Byte-stable number formatting for CSV and JSON output.

use serde::{Serialize, Serializer};

/// Round to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal that round-trips the 12-significant-digit rounding of `x`;
/// magnitudes below 1e-6 use exponent notation.
pub fn num(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && r.abs() < 1e-6 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// `f64` that serializes through [`round12`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round12(self.0))
    }
}
