//! Sequential specification of the N-process MutexQueue type.
//!
//! A MutexQueue stores an ordered queue `Q` of process IDs together with the
//! subset `V` of those processes that are *visible* (have announced themselves
//! to their predecessor). Three operations are supported: `enqueue` appends
//! the caller and returns OK; `isHead` makes the caller visible and reports
//! whether it is the head; `dequeue` removes the head and returns the ID of
//! the successor if one exists and is visible, `-1` otherwise.
//!
//! Callers must follow an access etiquette: no `enqueue` while already
//! queued, no `isHead` unless queued and not yet visible, no `dequeue` unless
//! the visible head. Violations drive the object into the broken state, after
//! which every response is arbitrary. The broken state is ordinary state, not
//! an error: the transition function stays total.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of one of the N processes, in `[0, N)`.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub struct Pid(pub u32);

impl Pid {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Compact set of process IDs. Process count is bounded by the width of the
/// backing word, which is plenty for a desk-scale laboratory.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct PidSet(u64);

impl PidSet {
    pub const EMPTY: PidSet = PidSet(0);

    pub fn contains(self, p: Pid) -> bool {
        debug_assert!(p.0 < 64);
        self.0 & (1 << p.0) != 0
    }

    #[must_use]
    pub fn with(self, p: Pid) -> PidSet {
        debug_assert!(p.0 < 64);
        PidSet(self.0 | (1 << p.0))
    }

    #[must_use]
    pub fn without(self, p: Pid) -> PidSet {
        PidSet(self.0 & !(1 << p.0))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Pid> {
        (0..64).map(Pid).filter(move |p| self.contains(*p))
    }
}

/// The three MutexQueue operations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum MqOp {
    Enqueue,
    IsHead,
    Dequeue,
}

impl fmt::Display for MqOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MqOp::Enqueue => write!(f, "enqueue"),
            MqOp::IsHead => write!(f, "isHead"),
            MqOp::Dequeue => write!(f, "dequeue"),
        }
    }
}

/// Response of a MutexQueue operation.
///
/// `Arbitrary` is produced only from the broken state (and by the transition
/// into it). The equivalence checker treats it as a wildcard that matches any
/// concrete response, preserving the one-to-many transition mapping while
/// keeping [`apply`] a function.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum MqResponse {
    Ok,
    True,
    False,
    /// The `-1` response of `dequeue`: no visible successor.
    NoSuccessor,
    Pid(Pid),
    Arbitrary,
}

impl MqResponse {
    pub fn from_bool(b: bool) -> MqResponse {
        if b {
            MqResponse::True
        } else {
            MqResponse::False
        }
    }

    /// Wildcard-aware equivalence: `Arbitrary` matches anything.
    pub fn matches(&self, other: &MqResponse) -> bool {
        matches!(self, MqResponse::Arbitrary)
            || matches!(other, MqResponse::Arbitrary)
            || self == other
    }
}

impl fmt::Display for MqResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MqResponse::Ok => write!(f, "OK"),
            MqResponse::True => write!(f, "true"),
            MqResponse::False => write!(f, "false"),
            MqResponse::NoSuccessor => write!(f, "-1"),
            MqResponse::Pid(p) => write!(f, "{p}"),
            MqResponse::Arbitrary => write!(f, "*"),
        }
    }
}

/// State of a MutexQueue: the pair `(Q, V)`, or broken.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum MqState {
    Normal { queue: Vec<Pid>, visible: PidSet },
    Broken,
}

/// Raised when a query is applied to the broken state, which the query
/// contract forbids.
#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
#[error("query applied to a broken MutexQueue state")]
pub struct BrokenQuery;

impl MqState {
    /// The initial state `(⟨⟩, ∅)`.
    pub fn initial() -> MqState {
        MqState::Normal {
            queue: Vec::new(),
            visible: PidSet::EMPTY,
        }
    }

    pub fn is_broken(&self) -> bool {
        matches!(self, MqState::Broken)
    }

    pub fn empty(&self) -> Result<bool, BrokenQuery> {
        self.queue().map(|q| q.is_empty())
    }

    pub fn head(&self) -> Result<Option<Pid>, BrokenQuery> {
        self.queue().map(|q| q.first().copied())
    }

    /// The process immediately before `p` in the queue, if any.
    pub fn pred(&self, p: Pid) -> Result<Option<Pid>, BrokenQuery> {
        let q = self.queue()?;
        Ok(q.iter()
            .position(|&x| x == p)
            .and_then(|i| i.checked_sub(1))
            .map(|i| q[i]))
    }

    /// The process immediately after `p` in the queue, if any.
    pub fn succ(&self, p: Pid) -> Result<Option<Pid>, BrokenQuery> {
        let q = self.queue()?;
        Ok(q.iter().position(|&x| x == p).and_then(|i| q.get(i + 1)).copied())
    }

    pub fn q_procs(&self) -> Result<&[Pid], BrokenQuery> {
        self.queue().map(Vec::as_slice)
    }

    pub fn vis_procs(&self) -> Result<PidSet, BrokenQuery> {
        match self {
            MqState::Normal { visible, .. } => Ok(*visible),
            MqState::Broken => Err(BrokenQuery),
        }
    }

    pub fn in_queue(&self, p: Pid) -> Result<bool, BrokenQuery> {
        self.queue().map(|q| q.contains(&p))
    }

    pub fn is_visible(&self, p: Pid) -> Result<bool, BrokenQuery> {
        self.vis_procs().map(|v| v.contains(p))
    }

    fn queue(&self) -> Result<&Vec<Pid>, BrokenQuery> {
        match self {
            MqState::Normal { queue, .. } => Ok(queue),
            MqState::Broken => Err(BrokenQuery),
        }
    }

    /// Checks the structural facts every reachable normal state satisfies:
    /// `V ⊆ Q` and `Q` duplicate-free.
    pub fn structurally_sound(&self) -> bool {
        match self {
            MqState::Broken => true,
            MqState::Normal { queue, visible } => {
                let no_dups = queue
                    .iter()
                    .enumerate()
                    .all(|(i, p)| !queue[..i].contains(p));
                let vis_in_q = visible.iter().all(|p| queue.contains(&p));
                no_dups && vis_in_q
            }
        }
    }
}

impl fmt::Display for MqState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MqState::Broken => write!(f, "⊥"),
            MqState::Normal { queue, visible } => {
                write!(f, "(<")?;
                for (i, p) in queue.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ">, {{")?;
                for (i, p) in visible.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "}})")
            }
        }
    }
}

/// The state transition mapping of the MutexQueue type.
///
/// Total over all inputs: legal transitions follow the queue semantics,
/// etiquette violations (and anything applied to the broken state) yield
/// `(Broken, Arbitrary)`.
pub fn apply(state: &MqState, p: Pid, op: MqOp) -> (MqState, MqResponse) {
    let (queue, visible) = match state {
        MqState::Broken => return (MqState::Broken, MqResponse::Arbitrary),
        MqState::Normal { queue, visible } => (queue, *visible),
    };
    match op {
        MqOp::Enqueue => {
            if queue.contains(&p) {
                return (MqState::Broken, MqResponse::Arbitrary);
            }
            let mut q = queue.clone();
            q.push(p);
            (
                MqState::Normal {
                    queue: q,
                    visible,
                },
                MqResponse::Ok,
            )
        }
        MqOp::IsHead => {
            if !queue.contains(&p) || visible.contains(p) {
                return (MqState::Broken, MqResponse::Arbitrary);
            }
            let at_head = queue[0] == p;
            (
                MqState::Normal {
                    queue: queue.clone(),
                    visible: visible.with(p),
                },
                MqResponse::from_bool(at_head),
            )
        }
        MqOp::Dequeue => {
            if queue.first() != Some(&p) || !visible.contains(p) {
                return (MqState::Broken, MqResponse::Arbitrary);
            }
            let rest = queue[1..].to_vec();
            let resp = match rest.first() {
                Some(&s) if visible.contains(s) => MqResponse::Pid(s),
                _ => MqResponse::NoSuccessor,
            };
            (
                MqState::Normal {
                    queue: rest,
                    visible: visible.without(p),
                },
                resp,
            )
        }
    }
}

/// True iff applying `op` by `p` would break a normal state (or the state is
/// already broken).
pub fn is_etiquette_violation(state: &MqState, p: Pid, op: MqOp) -> bool {
    match state {
        MqState::Broken => true,
        MqState::Normal { queue, visible } => match op {
            MqOp::Enqueue => queue.contains(&p),
            MqOp::IsHead => !queue.contains(&p) || visible.contains(p),
            MqOp::Dequeue => queue.first() != Some(&p) || !visible.contains(p),
        },
    }
}
