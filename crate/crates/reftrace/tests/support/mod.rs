#![allow(dead_code)]

#[path = "../../../core/tests/support/synth.rs"]
pub mod synth;

pub mod replay;
