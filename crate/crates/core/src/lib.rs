//! Short block codes and soft-decision decoders for sentence transmission over
//! BPSK/AWGN, with text metrics, semantic correction confidences and
//! segment retransmission.
//!
//! `no_std` with `alloc`; file formats, networking and the experiment driver live
//! in the `msc-link` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod code;
pub mod decoders;
pub mod ebch;
pub mod error;
pub mod framing;
pub mod gf2;
pub mod harq;
pub mod ldpc;
pub mod metrics;
pub mod pipeline;
pub mod polar;
pub mod sec;

pub use code::{Code, CodeFamily};
pub use decoders::{DecodeResult, DecoderKind, OsdConfig};
pub use error::{CodeError, DecodeError};
