//! Command-line tools and the HTTP service for tcla.

pub mod api;
pub mod report;
pub mod text;
