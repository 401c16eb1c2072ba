//! Closedness of non-degenerate symmetric 3-differentials on ℂ², decided on
//! truncated bivariate power series.

pub mod criteria;
pub mod error;
pub mod exterior;
pub mod fixtures;
pub mod generate;
pub mod parse;
pub mod report;
pub mod series;
pub mod web;

pub use criteria::{is_closed, oracle_decompose, thm1_evaluate, thm2_evaluate, Verdict, VerdictKind};
pub use error::{Error, Result};
pub use exterior::{OneForm, Sym3Diff, TwoForm};
pub use parse::{parse_expression, InputMode, InputSpec};
pub use report::{run, Command, Report};
pub use series::{invert_map, Complex, Direction, Point, Series2};
pub use web::{web_frame, WebFrame};
