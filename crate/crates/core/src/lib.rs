//! Ship-type classification from AIS vessel tracks.
//!
//! The crate is organized along the data flow:
//!
//! * [`ais`] decodes AIVDM sentences or pre-decoded CSV into per-vessel tracks.
//! * [`geo`] answers bounded nearest-distance queries against coastline,
//!   harbor and river reference points.
//! * [`pipeline`] segments, chunks, filters and normalizes tracks into
//!   fixed-length feature sequences and persists them as shards plus a manifest.
//! * [`tsnet`] is a small CPU tensor engine with 1D residual networks and MLP
//!   baselines, trained with Adam and a plateau/early-stop schedule.
//! * [`metrics`] accumulates confusion matrices and renders evaluation reports.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise.
//! Results are identical in both modes.

pub mod ais;
pub mod geo;
pub mod metrics;
pub mod par;
pub mod pipeline;
pub mod synth;
pub mod tsnet;

mod error;

pub use error::{Error, Result};
