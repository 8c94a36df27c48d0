//! Unit helpers.
//!
//! Everything inside the crate is SI: angular frequencies in rad/s, times in
//! seconds, lengths in micrometres. Config files and reports use cyclic MHz
//! and microseconds; convert at the boundary with these helpers.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Cyclic MHz to rad/s.
#[inline]
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f * 1e6
}

/// Cyclic GHz to rad/s.
#[inline]
pub fn ghz(f: f64) -> f64 {
    TWO_PI * f * 1e9
}

/// Cyclic kHz to rad/s.
#[inline]
pub fn khz(f: f64) -> f64 {
    TWO_PI * f * 1e3
}

/// rad/s to cyclic MHz.
#[inline]
pub fn to_mhz(w: f64) -> f64 {
    w / (TWO_PI * 1e6)
}

#[inline]
pub fn us(t: f64) -> f64 {
    t * 1e-6
}

#[inline]
pub fn ns(t: f64) -> f64 {
    t * 1e-9
}

#[inline]
pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert!((to_mhz(mhz(34.9)) - 34.9).abs() < 1e-12);
        assert!((to_us(us(2.0)) - 2.0).abs() < 1e-15);
        assert!((ghz(1.0) - mhz(1000.0)).abs() < 1e-3);
        assert!((khz(1000.0) - mhz(1.0)).abs() < 1e-9);
    }
}
