//! SocialMANET toolchain.
//!
//! - [`dsl`]: the `.sm` specification language (tokenizer, parser,
//!   validation, canonical printer)
//! - [`topic`]: subject hierarchies and the covering relation
//! - [`codegen`]: subject XML, values files and compiler configuration
//! - [`protocol`]: the per-station publish/subscribe state machine
//! - [`simnet`]: a deterministic mobile ad-hoc network simulator
//! - [`cli`]: the `smgen` command-line front end

pub mod cli;
pub mod codegen;
pub mod dsl;
pub mod protocol;
pub mod simnet;
pub mod topic;

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::dsl::{parse, SmModel};
    use crate::topic::TopicHierarchy;

    pub const CONFINFO_SM: &str = include_str!("../fixtures/confinfo/confinfo.sm");

    pub fn confinfo_model() -> SmModel {
        parse(CONFINFO_SM).expect("fixture parses")
    }

    pub fn confinfo_hierarchy() -> TopicHierarchy {
        TopicHierarchy::from_model(&confinfo_model()).expect("fixture is valid")
    }
}
