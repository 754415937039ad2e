//! Saturation-based query answering and query rewriting for the guarded,
//! loosely guarded and clique guarded fragments.

pub mod classes;
pub mod cli;
pub mod clausify;
pub mod engine;
pub mod oracle;
pub mod order;
pub mod qans;
pub mod qic;
pub mod qrew;
pub mod qsep;
pub mod syntax;
pub mod terms;
