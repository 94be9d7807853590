// `!(x > 0.0)` guards double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha_trig;
pub mod batch;
pub mod contact;
pub mod error;
pub mod grushin;
pub mod jacobi;
pub mod numeric;
pub mod singularity;
pub mod sl2;
pub mod su2;
pub mod verify;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
