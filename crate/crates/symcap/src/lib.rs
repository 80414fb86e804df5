//! Command-line front end for `symcap-core`: argument parsing, text, JSON and
//! CSV output, and the on-disk catalog cache.

pub mod cache;
pub mod cli;
pub mod output;
pub mod parse;
