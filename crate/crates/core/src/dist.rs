//! placeholder
use alloc::vec::Vec;
#[derive(Debug, Clone)]
pub struct BinnedLaw { pub weights: Vec<Vec<f64>> }
#[derive(Debug, Clone)]
pub struct Budget;
#[derive(Debug, Clone)]
pub enum DistError { BudgetExceeded }
#[derive(Debug, Clone, Copy)]
pub enum Mode { Killed, Free }
pub struct BoundaryFunctional;
