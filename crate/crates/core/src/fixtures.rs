//! Bundled data: air-conditioning failure intervals (hours) of Boeing 720
//! planes 7914 and 7913, and the two censored samples drawn from them.

use crate::io::{parse_lifetimes, parse_sample_csv};
use crate::sample::NjpcSample;
use crate::scheme::CensoringScheme;

pub const PLANE_7914: &str = include_str!("../fixtures/proschan_7914.txt");
pub const PLANE_7913: &str = include_str!("../fixtures/proschan_7913.txt");
pub const SCHEME1_SAMPLE: &str = include_str!("../fixtures/proschan_scheme1.csv");
pub const SCHEME2_SAMPLE: &str = include_str!("../fixtures/proschan_scheme2.csv");

/// Population 1 (plane 7914, 24 intervals).
pub fn plane_7914() -> Vec<f64> {
    parse_lifetimes(PLANE_7914).expect("bundled fixture")
}

/// Population 2 (plane 7913, 27 intervals).
pub fn plane_7913() -> Vec<f64> {
    parse_lifetimes(PLANE_7913).expect("bundled fixture")
}

/// `m = 24, n = 27, k = 8, R = (0, ..., 0)` with its recorded sample.
pub fn proschan_scheme1() -> (CensoringScheme, NjpcSample) {
    (
        CensoringScheme::no_withdrawals(24, 27, 8).expect("feasible"),
        parse_sample_csv(SCHEME1_SAMPLE).expect("bundled fixture"),
    )
}

/// `m = 24, n = 27, k = 8, R = (2, ..., 2)` with its recorded sample.
pub fn proschan_scheme2() -> (CensoringScheme, NjpcSample) {
    (
        CensoringScheme::new(24, 27, 8, vec![2; 7]).expect("feasible"),
        parse_sample_csv(SCHEME2_SAMPLE).expect("bundled fixture"),
    )
}
