//! Command-line tool, SVG renderer and JSON/HTTP service over
//! [`splinelab_core`].

pub mod commands;
pub mod service;
pub mod svg;

pub use commands::{Cli, Command, Summary, UsageError};
pub use service::{router, AppState};
pub use svg::{render_svg, SvgOptions, SvgScene};
