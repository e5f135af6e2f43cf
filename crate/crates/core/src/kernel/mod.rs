pub mod builder;
pub mod check;
pub mod drv;
pub mod judgment;
pub mod schema;

pub use builder::{realize, Fact, ProofBuilder};
pub use check::{apply_rule, check_derivation, CheckError, Ctx, KernelError};
pub use drv::{parse_derivation, print_derivation};
pub use judgment::{Binding, Bindings, Derivation, Judgment, Step};
pub use schema::{find_rule, rule_catalogue, RuleSchema};
