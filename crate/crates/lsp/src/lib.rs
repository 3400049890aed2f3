//! Language server publishing Easy ASP diagnostics and offering the
//! automatic reorder as a code action.

mod convert;
mod server;

pub use server::{run, COMMAND_INIT_CONFIG, COMMAND_REORDER, DEBOUNCE, REORDER_TITLE};
