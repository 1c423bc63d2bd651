//! Confluence checking for algebra and strand-category presentations.

pub mod hecke;
pub mod ms;
pub mod presentation;
pub mod scalar;
pub mod word;
