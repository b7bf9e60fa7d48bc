pub mod arith;
pub mod error;

pub use error::{Error, Result};
pub mod bundles;
pub mod higgs;
pub mod elem;
pub mod normal_form;
pub mod hitchin;
pub mod connections;
pub mod sample;
pub mod json;
pub mod verify;
