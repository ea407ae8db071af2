pub mod classifiers;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod nn;
pub mod recognizers;
pub mod sense;
pub mod treebank;

pub use error::{Error, Result};
