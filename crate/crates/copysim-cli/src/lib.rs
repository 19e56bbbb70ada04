//! Library surface of the command-line front end, shared with the
//! integration tests: run configurations, the experiment runner, output
//! writers, and reproduction recipes.

pub mod config;
pub mod output;
pub mod recipes;
pub mod runner;
