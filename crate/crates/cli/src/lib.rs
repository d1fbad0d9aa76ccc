//! Support code for the `tbqudit` binary: table serialization shared with tests.

pub mod emit;
