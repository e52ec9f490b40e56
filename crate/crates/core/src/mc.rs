//! placeholder
#[derive(Debug, Clone)]
pub struct CounterRng;
#[derive(Debug, Clone)]
pub struct McEstimate;
#[derive(Debug, Clone)]
pub struct SampleSummary;
#[derive(Debug, Clone)]
pub enum McError { Zero }
