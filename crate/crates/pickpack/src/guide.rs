//! The user guide, embedded as rustdoc.
//!
//! Each submodule mirrors one chapter of the book under `book/src`, pulled
//! in verbatim with `include_str!`. Because the chapters become doc
//! comments, every fenced Rust example in the book is compiled and run by
//! `cargo test`, which keeps the guide in lockstep with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/gripper.md")]
pub mod gripper {}

#[doc = include_str!("../../../book/src/arm.md")]
pub mod arm {}

#[doc = include_str!("../../../book/src/sensing.md")]
pub mod sensing {}

#[doc = include_str!("../../../book/src/scene.md")]
pub mod scene {}

#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}

#[doc = include_str!("../../../book/src/kpi.md")]
pub mod kpi {}

#[doc = include_str!("../../../book/src/human-baseline.md")]
pub mod human_baseline {}
