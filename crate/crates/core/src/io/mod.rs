//! Text formats: `.pfm` models, `.wmc` models, `.qry` queries and results.
//! Parsers return positioned diagnostics and never panic.

mod lexer;
mod model_text;
mod query_text;
mod real;
mod wmc_text;

pub use model_text::{parse_model, serialize_model, MAX_TABLE};
pub use query_text::{parse_query, serialize_result};
pub use real::{fmt_ln_real, fmt_real};
pub use wmc_text::parse_wmc;
