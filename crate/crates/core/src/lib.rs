pub mod acceptance;
pub mod caps;
pub mod classes;
pub mod corpus;
pub mod decide;
pub mod digraph;
pub mod endo;
pub mod error;
pub mod ext;
pub mod format;
pub mod group;
pub mod oracle;
pub mod par;
pub mod report;

pub use caps::Caps;
pub use error::{Error, Result};
