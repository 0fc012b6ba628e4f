//! Reconstruction and cataloguing of maximally symmetric graphs in the
//! 3-sphere from orbifold group data.

pub mod amalgam;
pub mod atlas;
pub mod cosets;
pub mod genpairs;
pub mod graphs;
pub mod permgrp;
pub mod quatalg;
pub mod spatial;
pub mod words;
