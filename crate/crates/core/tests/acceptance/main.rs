//! Acceptance criteria with their supporting oracle, property and CLI tests.

mod cli;
mod criteria;
mod oracles;
mod properties;
