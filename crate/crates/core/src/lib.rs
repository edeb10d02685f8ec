pub mod adversary;
pub mod checks;
pub mod discord;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod linalg;
pub mod maxcut;
pub mod opinion;
pub mod oracle;
pub mod seed;

pub use error::{Error, Result};
