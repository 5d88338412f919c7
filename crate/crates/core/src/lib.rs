pub mod certify;
pub mod cli;
pub mod dynsys;
pub mod error;
pub mod measure;
pub mod simulate;

pub use error::{Error, Result};
