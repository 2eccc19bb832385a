//! Reader, resolver and runner for `.surf` surface documents.

pub mod document;
pub mod model;
pub mod parse;
pub mod queries;
pub mod report;
pub mod run;

pub use document::Document;
pub use parse::{parse, ParseError};
pub use report::Report;
pub use run::{run, Options};
