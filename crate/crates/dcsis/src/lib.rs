//! File formats, a thread-pool [`Runtime`](dcsis_core::Runtime), benchmarks
//! and the `dcsis` command-line front end built on `dcsis-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod pool;
pub mod report;

pub use error::{Error, Result};
pub use io::{load_csv, read_csv, write_csv, Schema};
pub use pool::Pool;
