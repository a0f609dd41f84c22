//! Shared cells and the per-access RMR cost model.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::spec_model::Pid;

/// Handle to an allocated cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CellId(pub(crate) usize);

impl CellId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// An `(index, process)` pair stored as a single word, as used by the
/// fetch-and-store queue cells. `pid = None` marks a cell no process has
/// written.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PairWord {
    pub idx: usize,
    pub pid: Option<Pid>,
}

impl fmt::Display for PairWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pid {
            Some(p) => write!(f, "({},{})", self.idx, p),
            None => write!(f, "({},-)", self.idx),
        }
    }
}

/// Value of a cell: a machine word, which is either an integer or an ordered
/// pair treated as one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Word {
    Int(i64),
    Pair(PairWord),
}

impl Word {
    pub fn pair(idx: usize, pid: Option<Pid>) -> Word {
        Word::Pair(PairWord { idx, pid })
    }

    pub fn as_int(self) -> i64 {
        match self {
            Word::Int(v) => v,
            Word::Pair(_) => panic!("expected integer word, found pair"),
        }
    }

    pub fn as_pair(self) -> PairWord {
        match self {
            Word::Pair(p) => p,
            Word::Int(_) => panic!("expected pair word, found integer"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Int(v) => write!(f, "{v}"),
            Word::Pair(p) => write!(f, "{p}"),
        }
    }
}

/// Kind of a cell, fixing which operations it accepts.
///
/// A counter may carry a modulus so that fetch-and-increment wraps like an
/// m-bit unsigned integer. Counters and swap cells also accept plain reads
/// and writes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellKind {
    Register,
    FaiCounter { modulus: Option<u64> },
    FasCell,
}

/// Atomic operation on a base cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BaseOp {
    Read,
    Write(Word),
    FetchInc,
    FetchStore(Word),
}

impl BaseOp {
    pub fn is_mutation(self) -> bool {
        !matches!(self, BaseOp::Read)
    }
}

/// Memory cost model: distributed shared memory charges by home location,
/// cache coherence charges by cache residency.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryModel {
    Dsm,
    Cc,
}

impl fmt::Display for MemoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryModel::Dsm => write!(f, "dsm"),
            MemoryModel::Cc => write!(f, "cc"),
        }
    }
}

#[derive(Clone, Debug)]
struct Cell {
    name: String,
    kind: CellKind,
    value: Word,
    home: Option<Pid>,
}

/// The simulated memory: a bank of named atomic cells plus per-process cache
/// state for the CC model.
///
/// Cost rules:
/// - DSM: an access costs 0 iff the cell's home is the issuing process.
///   Cells without a home are remote to everyone.
/// - CC: a read costs 0 iff the cell is in the issuing process's cache, and
///   caches the cell afterwards. Every write and read-modify-write costs 1
///   and invalidates the cell in every other process's cache; the result of
///   a read-modify-write is not cached.
#[derive(Clone, Debug)]
pub struct SimMemory {
    model: MemoryModel,
    cells: Vec<Cell>,
    /// Per-process cache membership, one bit per cell (CC only).
    caches: Vec<u64>,
}

impl SimMemory {
    pub fn new(model: MemoryModel, nprocs: u32) -> SimMemory {
        SimMemory {
            model,
            cells: Vec::new(),
            caches: vec![0; nprocs as usize],
        }
    }

    pub fn model(&self) -> MemoryModel {
        self.model
    }

    pub fn alloc(
        &mut self,
        name: impl Into<String>,
        kind: CellKind,
        init: Word,
        home: Option<Pid>,
    ) -> CellId {
        let id = self.cells.len();
        assert!(id < 64, "cell bank limited to 64 cells");
        self.cells.push(Cell {
            name: name.into(),
            kind,
            value: init,
            home,
        });
        CellId(id)
    }

    pub fn name(&self, cell: CellId) -> &str {
        &self.cells[cell.0].name
    }

    /// Current value, without touching caches or cost accounting. Checkers
    /// use this; it is not a step of any process.
    pub fn peek(&self, cell: CellId) -> Word {
        self.cells[cell.0].value
    }

    pub fn cached(&self, p: Pid, cell: CellId) -> bool {
        self.model == MemoryModel::Cc && self.caches[p.index()] & (1 << cell.0) != 0
    }

    /// Applies one atomic operation by `p`, returning the primitive's
    /// response and the RMR cost of the access. Applying an operation a cell
    /// kind does not support is a programming error and panics.
    pub fn apply(&mut self, p: Pid, cell: CellId, op: BaseOp) -> (Word, u8) {
        let cost = self.cost(p, cell, op);
        let c = &mut self.cells[cell.0];
        let ret = match (op, c.kind) {
            (BaseOp::Read, _) => c.value,
            (BaseOp::Write(v), _) => {
                c.value = v;
                v
            }
            (BaseOp::FetchInc, CellKind::FaiCounter { modulus }) => {
                let old = c.value.as_int();
                debug_assert!(old >= 0);
                let mut next = old + 1;
                if let Some(m) = modulus {
                    next %= m as i64;
                }
                c.value = Word::Int(next);
                Word::Int(old)
            }
            (BaseOp::FetchStore(v), CellKind::FasCell) => {
                let old = c.value;
                c.value = v;
                old
            }
            (op, kind) => panic!(
                "operation {op:?} not supported by cell {} of kind {kind:?}",
                c.name
            ),
        };
        if self.model == MemoryModel::Cc {
            let bit = 1u64 << cell.0;
            match op {
                BaseOp::Read => self.caches[p.index()] |= bit,
                _ => {
                    // Mutations knock the cell out of every other cache. The
                    // issuing process's own entry stays coherent and is kept;
                    // RMW results are not newly cached.
                    for (q, mask) in self.caches.iter_mut().enumerate() {
                        if q != p.index() {
                            *mask &= !bit;
                        }
                    }
                }
            }
        }
        (ret, cost)
    }

    fn cost(&self, p: Pid, cell: CellId, op: BaseOp) -> u8 {
        match self.model {
            MemoryModel::Dsm => u8::from(self.cells[cell.0].home != Some(p)),
            MemoryModel::Cc => match op {
                BaseOp::Read => u8::from(!self.cached(p, cell)),
                _ => 1,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mem(model: MemoryModel) -> SimMemory {
        SimMemory::new(model, 2)
    }

    #[test]
    fn dsm_read_at_home_is_free() {
        let mut m = mem(MemoryModel::Dsm);
        let c = m.alloc("Wait[0]", CellKind::Register, Word::Int(1), Some(Pid(0)));
        assert_eq!(m.apply(Pid(0), c, BaseOp::Read).1, 0);
        assert_eq!(m.apply(Pid(1), c, BaseOp::Read).1, 1);
        // Writes follow the same home rule.
        assert_eq!(m.apply(Pid(0), c, BaseOp::Write(Word::Int(0))).1, 0);
        assert_eq!(m.apply(Pid(1), c, BaseOp::Write(Word::Int(0))).1, 1);
    }

    #[test]
    fn dsm_homeless_cell_is_remote_to_all() {
        let mut m = mem(MemoryModel::Dsm);
        let c = m.alloc("Ctr", CellKind::FaiCounter { modulus: None }, Word::Int(0), None);
        assert_eq!(m.apply(Pid(0), c, BaseOp::FetchInc).1, 1);
        assert_eq!(m.apply(Pid(1), c, BaseOp::FetchInc).1, 1);
    }

    #[test]
    fn cc_second_read_hits_cache() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("x", CellKind::Register, Word::Int(7), None);
        assert_eq!(m.apply(Pid(0), c, BaseOp::Read), (Word::Int(7), 1));
        assert_eq!(m.apply(Pid(0), c, BaseOp::Read), (Word::Int(7), 0));
    }

    #[test]
    fn cc_foreign_write_invalidates() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("x", CellKind::Register, Word::Int(7), None);
        m.apply(Pid(0), c, BaseOp::Read);
        m.apply(Pid(1), c, BaseOp::Write(Word::Int(8)));
        assert!(!m.cached(Pid(0), c));
        assert_eq!(m.apply(Pid(0), c, BaseOp::Read), (Word::Int(8), 1));
    }

    #[test]
    fn cc_own_write_keeps_own_cache_entry() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("x", CellKind::Register, Word::Int(0), None);
        m.apply(Pid(0), c, BaseOp::Read);
        m.apply(Pid(0), c, BaseOp::Write(Word::Int(1)));
        assert_eq!(m.apply(Pid(0), c, BaseOp::Read), (Word::Int(1), 0));
    }

    #[test]
    fn cc_rmw_always_remote_and_uncached() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("s", CellKind::FasCell, Word::Int(0), None);
        assert_eq!(m.apply(Pid(0), c, BaseOp::FetchStore(Word::Int(1))).1, 1);
        assert!(!m.cached(Pid(0), c));
        assert_eq!(m.apply(Pid(0), c, BaseOp::FetchStore(Word::Int(2))).1, 1);
    }

    #[test]
    fn fai_wraps_at_modulus() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc(
            "Ctr",
            CellKind::FaiCounter { modulus: Some(8) },
            Word::Int(6),
            None,
        );
        let fetched: Vec<i64> = (0..4)
            .map(|_| m.apply(Pid(0), c, BaseOp::FetchInc).0.as_int())
            .collect();
        assert_eq!(fetched, vec![6, 7, 0, 1]);
    }

    #[test]
    fn counter_accepts_reset_by_write() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("Stat[0]", CellKind::FaiCounter { modulus: None }, Word::Int(2), None);
        m.apply(Pid(0), c, BaseOp::Write(Word::Int(0)));
        assert_eq!(m.apply(Pid(0), c, BaseOp::FetchInc).0, Word::Int(0));
    }

    #[test]
    #[should_panic(expected = "not supported")]
    fn type_mismatched_op_is_a_hard_fault() {
        let mut m = mem(MemoryModel::Cc);
        let c = m.alloc("r", CellKind::Register, Word::Int(0), None);
        m.apply(Pid(0), c, BaseOp::FetchInc);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Two consecutive reads of the same cell by the same process
            /// with no intervening foreign mutation cost 1 then 0 under CC.
            #[test]
            fn cc_consecutive_reads_cost_one_then_zero(preload in prop::collection::vec(0u32..2, 0..6)) {
                let mut m = SimMemory::new(MemoryModel::Cc, 2);
                let c = m.alloc("x", CellKind::Register, Word::Int(0), None);
                // Arbitrary warm-up traffic by both processes.
                for p in preload {
                    m.apply(Pid(p), c, BaseOp::Write(Word::Int(1)));
                }
                // A mutation by the other process guarantees a cold cache.
                m.apply(Pid(1), c, BaseOp::Write(Word::Int(2)));
                prop_assert_eq!(m.apply(Pid(0), c, BaseOp::Read).1, 1);
                prop_assert_eq!(m.apply(Pid(0), c, BaseOp::Read).1, 0);
            }

            /// DSM cost depends only on the (home, process) pair.
            #[test]
            fn dsm_cost_is_static(home in prop::option::of(0u32..2), p in 0u32..2, write in proptest::bool::ANY) {
                let mut m = SimMemory::new(MemoryModel::Dsm, 2);
                let c = m.alloc("x", CellKind::Register, Word::Int(0), home.map(Pid));
                let op = if write { BaseOp::Write(Word::Int(1)) } else { BaseOp::Read };
                let expect = u8::from(home != Some(p));
                prop_assert_eq!(m.apply(Pid(p), c, op).1, expect);
            }
        }
    }
}
