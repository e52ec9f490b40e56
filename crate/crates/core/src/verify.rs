//! placeholder
#[derive(Debug, Clone, Copy)]
pub enum TheoremId { Survival }
#[derive(Debug, Clone)]
pub struct TheoremReport;
#[derive(Debug, Clone, Copy)]
pub enum Verdict { Converging }
#[derive(Debug, Clone)]
pub enum VerifyError { Bad }
