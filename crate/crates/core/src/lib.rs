pub mod ages;
pub mod arrows;
pub mod budget;
pub mod certificate;
pub mod error;
pub mod groups;
pub mod patterns;
pub mod stability;
pub mod structures;
mod unions;

pub use budget::Budget;
pub use error::{Error, Result};
