//! Batch frontend: JSON problem documents in, JSON reports and breakpoint
//! tables out.

pub mod document;
pub mod execute;
pub mod svg;
pub mod wire;

pub use document::{load_document, ProblemDocument, Task};
pub use execute::{execute, Report, Status};
pub use wire::WireError;
