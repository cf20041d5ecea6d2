//! Model files and result export.

mod export;
mod model_file;

pub use export::{export_solve, export_sweep, solve_rows, Format};
pub use model_file::{load_model, model_to_json, parse_model, save_model, LoadError, LoadErrors, FORMAT_VERSION};
