pub mod cli;
pub mod error;
pub mod linalg;
pub mod nilpotent;
mod pcgs;
pub mod raag;
pub mod rfrs;
pub mod subgroup;

pub use error::{Error, Result};
