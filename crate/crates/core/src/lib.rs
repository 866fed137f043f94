//! Special intervals of irrational rotations, Ostrowski numeration, gap-block
//! combinatorics of return times, and the cut-and-project nets built from
//! them together with their bounded-displacement maps to lattices.
//!
//! Quadratic surds are handled exactly. Other slopes carry certified
//! rational enclosures; any decision an enclosure cannot settle is reported
//! as an error rather than guessed.

pub mod alpha;
pub mod cf;
pub mod error;
pub mod frame;
pub mod gaps;
pub mod intervals;
pub mod net;
pub mod ostrowski;
pub mod real;

pub use alpha::Irrational;
pub use cf::{cf_digits, cf_until, ConvergentTable};
pub use error::{Error, Result};
pub use frame::{Frame, Lin};
pub use gaps::{enumerate_am, AmEnumerator, BlockWord, PrefixDecomposition};
pub use intervals::{make_interval, Arc, SpecialInterval, WindowUnion};
pub use net::{Net, NetConfig};
pub use ostrowski::{decode_int, encode_int, encode_real, OstrowskiInt, OstrowskiReal};
pub use real::{Quad, RatInterval, Real};
