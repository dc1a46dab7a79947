//! File formats, reaction-network ingestion, JSON reports and the
//! command-line front end for `injcert-core`.

pub mod cli;
pub mod crn;
mod error;
pub mod formats;
pub mod report;

pub use error::{Error, ParseError, Result, Source};
