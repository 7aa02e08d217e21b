pub mod eval;
pub mod formula;
pub mod gf;
pub mod series;
pub mod dichotomy;
pub mod covers;
pub mod twisted;
pub mod cli;
