//! Compact-gadget approximate trapdoors and two hash-and-sign signatures built on them.

pub mod codec;
pub mod error;
pub mod gadget;
pub mod gaussian;
pub mod params;
pub mod perturb;
pub mod ring;
pub mod scheme;
pub mod stattest;
pub mod xof;

pub use error::{Error, Result};
pub use params::{ParamSet, Registry, SchemeKind};
pub use perturb::PerturbMode;
pub use scheme::{by_name, instantiate, PublicKey, Scheme, SecretKey, Signature, Verdict};
