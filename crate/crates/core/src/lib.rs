//! A laboratory for queue-based mutual exclusion locks.
//!
//! The crate simulates an N-process shared-memory machine in which a generic
//! queue-based mutual exclusion algorithm runs over one of three providers of
//! the `MutexQueue` object: a sequential oracle applied atomically, a
//! fetch-and-increment implementation, and a fetch-and-store implementation.
//! Exhaustive and seeded-random schedulers drive the step machines while
//! checkers verify mutual exclusion, FCFS, bounded exit, RMR bounds,
//! linearizability and the structural invariants of each implementation on
//! every prefix of every explored history.
//!
//! The `native_locks` module assembles the same algorithms from hardware
//! atomics for multi-thread stress testing.

pub mod checker;
pub mod driver;
pub mod gqme;
pub mod mqfi;
pub mod mqfs;
pub mod mutation;
pub mod native_locks;
pub mod provider;
pub mod run;
pub mod simmem;
pub mod spec_model;

pub use mutation::Mutation;
pub use spec_model::{MqOp, MqResponse, MqState, Pid};
