//! placeholder
use alloc::vec::Vec;
#[derive(Debug, Clone)]
pub struct GridSpec { pub y_min: f64, pub y_max: f64, pub dy: f64 }
#[derive(Debug, Clone)]
pub struct HarmonicTable { pub values: Vec<Vec<f64>> }
#[derive(Debug, Clone)]
pub enum HarmonicError { NoConvergence }
