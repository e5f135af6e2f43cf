//! Finite set-theoretic models of both theories: carriers, extensional
//! tables, evaluation and the semantic equality oracle.

pub mod enumerate;
pub mod eval;
pub mod mdl;
pub mod model;

pub use enumerate::{enumerate_models, sampling_seed, EnumOptions, TABLE_CAP};
pub use eval::{counterexample, eval, eval_exc, eval_state, exc_inputs, holds, run_exc, run_state, show_outcome, Outcome, State, Table};
pub use mdl::{parse_model, print_model};
pub use model::{default_elem_names, Carrier, Model, ModelKind, PureTable, SemError, Value};
