//! Compiles every code listing of the guide in `book/` as a doctest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/censoring.md")]
pub mod censoring {}

#[doc = include_str!("../../../book/src/failure-count.md")]
pub mod failure_count {}

#[doc = include_str!("../../../book/src/exact-distribution.md")]
pub mod exact_distribution {}

#[doc = include_str!("../../../book/src/intervals.md")]
pub mod intervals {}

#[doc = include_str!("../../../book/src/studies.md")]
pub mod studies {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
