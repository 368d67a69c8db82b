//! Normal forms, regularity and conjugacy search in amalgamated free products
//! `A ∗_C B` of finitely generated free groups.

pub mod amalgam;
pub mod cli;
pub mod cosetalg;
pub mod error;
pub mod stallings;
pub mod words;

pub use error::{Error, Result};
pub use words::{Alphabet, Letter, Word};
