//! Command line front end for the engine: a small textual language for
//! formal data, the analysis pipeline, JSON reports, and DOT rendering.

pub mod catalog;
pub mod dot;
pub mod parse;
pub mod pipeline;
pub mod print;
pub mod report;
