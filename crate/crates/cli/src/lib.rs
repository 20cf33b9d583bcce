//! Command-line front end for `fracdiff-core`: input parsing, the five
//! pipelines, CSV tables and SVG plots.

pub mod error;
pub mod run;
pub mod spec_io;
pub mod svg;
pub mod table;

pub use error::CliError;
pub use run::{run, Command, JobSpec};
pub use spec_io::{emit, parse_spec, Spec, SpecFile};
pub use svg::{render_svg, PlotStyle, Series};
