//! Seeded fault injection for checker validation.

use serde::{Deserialize, Serialize};

/// A deliberately broken build of one of the step machines. `None` is the
/// faithful build; each other variant removes or inverts a single line so the
/// checkers can demonstrate a counterexample.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// Fetch-and-increment build: drop the status reset at the start of
    /// `dequeue`.
    SkipStatReset,
    /// Fetch-and-increment build: invert the boolean returned by `isHead`.
    SwapIsHeadPolarity,
    /// Fetch-and-store build: drop the queue-cell publish at the start of
    /// `enqueue`.
    SkipQueueWrite,
    /// Lock algorithm: drop the re-arming write of the spin flag after the
    /// wait loop exits.
    SkipWaitReset,
}

impl Mutation {
    pub const ALL_BUGS: [Mutation; 4] = [
        Mutation::SkipStatReset,
        Mutation::SwapIsHeadPolarity,
        Mutation::SkipQueueWrite,
        Mutation::SkipWaitReset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::SkipStatReset => "skip-stat-reset",
            Mutation::SwapIsHeadPolarity => "swap-is-head-polarity",
            Mutation::SkipQueueWrite => "skip-queue-write",
            Mutation::SkipWaitReset => "skip-wait-reset",
        }
    }

    pub fn parse(s: &str) -> Option<Mutation> {
        match s {
            "none" => Some(Mutation::None),
            "skip-stat-reset" => Some(Mutation::SkipStatReset),
            "swap-is-head-polarity" => Some(Mutation::SwapIsHeadPolarity),
            "skip-queue-write" => Some(Mutation::SkipQueueWrite),
            "skip-wait-reset" => Some(Mutation::SkipWaitReset),
            _ => None,
        }
    }
}
