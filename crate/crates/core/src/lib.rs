//! Symmetrizability tests, capacity-distortion bounds and small-blocklength
//! coding simulations for state-dependent arbitrarily varying channels.

#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::type_complexity
)]

pub mod bounds;
pub mod builtin;
pub mod channel;
pub mod error;
pub mod lp;
pub(crate) mod numfmt;
pub mod sim;
pub mod sym;

pub use error::{Error, Result};
