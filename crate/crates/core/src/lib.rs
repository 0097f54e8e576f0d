pub mod bell;
pub mod emitter;
pub mod error;
pub mod exec;
pub mod gates;
pub mod interference;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
