pub mod descartes;
pub mod poly;
pub mod rational;
pub mod rootiso;

pub use poly::{Polynomial, Sign};
pub use rational::Rational;
pub mod graph;
pub mod rel;
pub mod forge;
pub mod cli;
