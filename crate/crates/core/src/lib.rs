pub mod alexander;
pub mod certify;
pub mod error;
pub mod holonomy;
pub mod numeric;
pub mod presentation;
pub mod words;
