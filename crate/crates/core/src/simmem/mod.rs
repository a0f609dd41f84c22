//! Simulated shared memory: atomic base cells with RMR accounting under the
//! DSM and CC cost models, execution-history recording, and deterministic
//! schedulers.

mod history;
mod memory;
mod sched;

pub use history::{HRet, History, HistOp, Obj, Step, WellFormedness};
pub use memory::{BaseOp, CellId, CellKind, MemoryModel, PairWord, SimMemory, Word};
pub use sched::{
    explore, naive_interleaving_count, run_random, run_round_robin, ExploreBounds, ExploreEvent,
    ExploreStats, RandomOutcome, Sim, RANDOM_GENERATOR_NAME,
};
