//! Metric quotients of planar multipolygons under boundary segment pairings.
//!
//! A multipolygon's boundary is identified along length-preserving,
//! orientation-reversing segment pairings (including infinite alternating
//! families with an accumulation point). This crate computes quotient
//! distances, closed-form ball-preimage decompositions in the max metric,
//! areas and Ahlfors 2-regularity scans, linear-local-connectivity checks on
//! a rasterized quotient, and the tight-horseshoe non-regularity experiment.

pub mod balls;
pub mod cli;
pub mod geometry;
pub mod horseshoe;
pub mod llc;
pub mod measure;
pub mod quotient;
pub mod scheme;
pub mod schemefile;
