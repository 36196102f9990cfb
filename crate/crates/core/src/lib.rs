//! Core of the reftrace toolkit.
//!
//! Everything here is pure and allocation-only: a line-level Java lexer,
//! structural metrics, degraded-variant generation, the line aligner and
//! change classifier, trajectory analyses and rank statistics. File IO,
//! providers and the CLI live in the `reftrace` crate.
#![no_std]

extern crate alloc;

pub mod code_model;
pub mod corpus;
pub mod diff;
pub mod prompts;
pub mod stats;
pub mod trajectory;
pub mod variantgen;
