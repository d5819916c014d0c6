//! Command-line front end for the strip computations: configuration,
//! cache, CSV/JSON emission, SVG figures and the quick verification suite.

pub mod analyze;
pub mod cache;
pub mod compute;
pub mod config;
pub mod exit;
pub mod figures;
pub mod format;
pub mod records;
pub mod svg;
pub mod verify;
