pub mod cli;
pub mod exc_theory;
pub mod kernel;
pub mod semantics;
pub mod state_theory;
pub mod syntax;
