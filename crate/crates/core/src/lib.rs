//! Secrecy analysis and simulation for the untrusted two-hop relay channel.
//!
//! The source talks to the destination through a relay it does not trust,
//! while the destination jams the relay with Gaussian artificial noise during
//! the first hop. Three relaying strategies are modelled:
//!
//! * modulo-and-forward (MF): the relay MMSE-scales its observation and folds
//!   it into the Voronoi cell of the source's coarse lattice, so its transmit
//!   power stays at `Ps` however strong the jamming is;
//! * amplify-and-forward (AF): the relay rescales everything it hears,
//!   jamming included;
//! * lattice decode-and-forward (DF), used only as a rate comparison.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: `K1`, least-squares slopes, chi-square helpers;
//! * [`channel`]: parameter records, SNR thresholds, Rayleigh sampling;
//! * [`rates`]: per-realization capacities and secrecy rates;
//! * [`asymptotics`]: generalized secure DoF and diversity laws;
//! * [`outage`]: closed-form and Monte Carlo outage probabilities;
//! * [`latticesim`]: a symbol-level simulation of the MF chain over `Δ·ℤ`.
//!
//! All rates are in bits per real dimension (base-2 logarithms).

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
mod error;
pub mod latticesim;
pub mod numerics;
pub mod outage;
pub mod rates;
pub mod rng;

pub use error::{Error, Result};
