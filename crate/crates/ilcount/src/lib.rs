//! File format, instance generator, clocked counting and benchmark harness
//! around `ilcount-core`.

pub mod bench;
pub mod config;
pub mod format;
pub mod gen;
pub mod run;

pub use format::{parse, render, ParseError, ParseErrorKind};
pub use gen::{generate, generate_text, GenError, GenParams};

/// Process exit codes of the `ilcount` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const TIMEOUT: i32 = 4;
    pub const MEMOUT: i32 = 5;
    pub const MISMATCH: i32 = 6;
    pub const INTERNAL: i32 = 7;
}
