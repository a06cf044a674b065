pub mod coin_transform;
pub mod dist;
pub mod error;
pub mod extrapolation;
pub mod izk;
pub mod lab;
pub mod nizk_deciders;
pub mod protocol;
pub mod reductions;
pub mod report;
