pub mod bp;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod noise;
pub mod oracle;
pub mod osd;
pub mod registry;
pub mod symbreak;
pub mod tanner;

pub use error::{Error, Result};
