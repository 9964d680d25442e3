pub mod cli;
pub mod corpus;
pub mod detection;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod lexicon;
pub mod numbers;
pub mod supervised;
pub mod synthetic;
mod text;
