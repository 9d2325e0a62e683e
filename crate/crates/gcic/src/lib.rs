//! Gradual dependent types: a gradual source language elaborated into a
//! cast calculus, under three choices of universe parameters.

pub mod convert;
pub mod corpus;
pub mod elab;
pub mod env;
pub mod guard;
pub mod model;
pub mod parse;
pub mod precision;
pub mod print;
pub mod program;
pub mod reduce;
pub mod registry;
pub mod suite;
pub mod syntax;
pub mod typing;
pub mod vectors;

pub use env::{Env, Head, Variant, VARIANTS};
pub use reduce::{Class, Fuel, Outcome, Rule};
pub use syntax::{Context, Hint, Level, Name, Term};
