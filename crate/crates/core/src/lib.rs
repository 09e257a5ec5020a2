//! Summary-first knowledge libraries, two-tier routing, and a deterministic
//! harness for measuring how well a router picks categories and skills.

pub mod bench;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod distractor;
pub mod fixtures;
pub mod guidance;
pub mod library;
pub mod prefix;
pub mod report;
pub mod response;
pub mod retrieval;
pub mod text;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/libraries.md")]
    mod libraries {}
    #[doc = include_str!("../../../book/src/prefix-reading.md")]
    mod prefix_reading {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/benchmark.md")]
    mod benchmark {}
    #[doc = include_str!("../../../book/src/documents.md")]
    mod documents {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
