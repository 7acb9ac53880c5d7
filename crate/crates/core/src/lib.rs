//! Forward-error-correction codecs and an analytic link model for two-channel
//! THz systems, where the systematic data of every block travels over a main
//! channel and its parity over a separate auxiliary channel.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line and
//! parallel campaign execution live in the `thz-fec` companion crate.
//!
//! - [`gf`]: GF(2^s) arithmetic and polynomials over it.
//! - [`rs`]: shortened systematic Reed–Solomon encoder and errors-only decoder.
//! - [`mdpc`]: multidimensional parity-check codes MDPC(nD/mL).
//! - [`link`]: free-space link budget, AWGN bit error rates and data rates.
//! - [`analytics`]: closed-form fault-tolerance, residual-error and goodput model.
//! - [`sim`]: Monte-Carlo harness and exact block-error oracles.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod gf;
pub mod link;
pub mod mdpc;
pub mod rs;
pub mod sim;

pub use gf::{Element, Field, FieldError, Poly};
pub use mdpc::{MdpcCode, MdpcDecoded, MdpcError};
pub use rs::{RsCode, RsDecoded, RsError};
