//! Execution histories: sequences of atomic and non-atomic steps.
//!
//! One-level histories contain only `ATOM` steps. Two-level histories
//! additionally contain `INV`/`RES` steps on the target MutexQueue object,
//! with the atomic steps of the access procedures nested between them.

use std::fmt::Write as _;

use crate::simmem::memory::{BaseOp, CellId, SimMemory, Word};
use crate::spec_model::{MqOp, MqResponse, Pid};

/// Object named by an atomic step: a base cell, or the target MutexQueue
/// itself (one-level histories treat the target as an atomic object).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Obj {
    Cell(CellId),
    Target,
}

/// Operation named by an atomic step.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HistOp {
    Base(BaseOp),
    Mq(MqOp),
}

/// Response carried by an atomic step.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HRet {
    Word(Word),
    Mq(MqResponse),
}

/// One step of an execution history.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    Atom {
        p: Pid,
        obj: Obj,
        op: HistOp,
        ret: HRet,
        cost: u8,
    },
    Inv {
        p: Pid,
        op: MqOp,
    },
    Res {
        p: Pid,
        ret: MqResponse,
    },
}

impl Step {
    pub fn pid(&self) -> Pid {
        match *self {
            Step::Atom { p, .. } | Step::Inv { p, .. } | Step::Res { p, .. } => p,
        }
    }

    pub fn cost(&self) -> u8 {
        match *self {
            Step::Atom { cost, .. } => cost,
            _ => 0,
        }
    }
}

/// A recorded execution history.
#[derive(Clone, Debug, Default)]
pub struct History {
    steps: Vec<Step>,
}

impl History {
    pub fn new() -> History {
        History::default()
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn truncate(&mut self, len: usize) {
        self.steps.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// One line per step: `ATOM p cell op ret cost`, `INV p target op`,
    /// `RES p target ret`. Cell names come from the memory that allocated
    /// them.
    pub fn dump(&self, mem: &SimMemory) -> String {
        let mut out = String::new();
        for s in &self.steps {
            match *s {
                Step::Atom { p, obj, op, ret, cost } => {
                    let name = match obj {
                        Obj::Cell(c) => mem.name(c),
                        Obj::Target => "M",
                    };
                    let op_s = match op {
                        HistOp::Base(BaseOp::Read) => "read".to_string(),
                        HistOp::Base(BaseOp::Write(v)) => format!("write({v})"),
                        HistOp::Base(BaseOp::FetchInc) => "F&I".to_string(),
                        HistOp::Base(BaseOp::FetchStore(v)) => format!("F&S({v})"),
                        HistOp::Mq(m) => m.to_string(),
                    };
                    let ret_s = match ret {
                        HRet::Word(w) => w.to_string(),
                        HRet::Mq(r) => r.to_string(),
                    };
                    let _ = writeln!(out, "ATOM {p} {name} {op_s} {ret_s} {cost}");
                }
                Step::Inv { p, op } => {
                    let _ = writeln!(out, "INV {p} M {op}");
                }
                Step::Res { p, ret } => {
                    let _ = writeln!(out, "RES {p} M {ret}");
                }
            }
        }
        out
    }
}

/// Incremental well-formedness checker for histories. Feed it every step in
/// order; it asserts the structural conditions of two-level histories:
///
/// - the target is accessed only by `INV`/`RES` steps and base objects only
///   by `ATOM` steps (mixing a target `ATOM` with `INV`/`RES` is rejected);
/// - a process has at most one pending invocation, and takes no non-atomic
///   step other than the matching response while one is pending;
/// - every `RES` matches a preceding `INV` by the same process;
/// - every base `ATOM` of a process in a two-level history falls between its
///   invocation and matching response.
#[derive(Clone, Debug)]
pub struct WellFormedness {
    pending: Vec<Option<MqOp>>,
    saw_nonatomic: bool,
    saw_target_atom: bool,
}

impl WellFormedness {
    pub fn new(nprocs: u32) -> WellFormedness {
        WellFormedness {
            pending: vec![None; nprocs as usize],
            saw_nonatomic: false,
            saw_target_atom: false,
        }
    }

    pub fn observe(&mut self, step: &Step) -> Result<(), String> {
        match *step {
            Step::Inv { p, op } => {
                self.saw_nonatomic = true;
                if self.saw_target_atom {
                    return Err("history mixes atomic and non-atomic target steps".into());
                }
                if let Some(prev) = self.pending[p.index()] {
                    return Err(format!(
                        "process {p} invoked {op} while {prev} is pending"
                    ));
                }
                self.pending[p.index()] = Some(op);
            }
            Step::Res { p, .. } => {
                self.saw_nonatomic = true;
                if self.pending[p.index()].take().is_none() {
                    return Err(format!("response by {p} matches no invocation"));
                }
            }
            Step::Atom { p, obj: Obj::Target, .. } => {
                self.saw_target_atom = true;
                if self.saw_nonatomic {
                    return Err("history mixes atomic and non-atomic target steps".into());
                }
                let _ = p;
            }
            Step::Atom { p, obj: Obj::Cell(_), .. } => {
                if self.saw_nonatomic && self.pending[p.index()].is_none() {
                    return Err(format!(
                        "base object step by {p} outside any open operation"
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simmem::memory::{CellKind, MemoryModel};

    #[test]
    fn dump_format_one_line_per_step() {
        let mut mem = SimMemory::new(MemoryModel::Cc, 2);
        let w0 = mem.alloc("Wait[0]", CellKind::Register, Word::Int(1), Some(Pid(0)));
        let mut h = History::new();
        h.push(Step::Inv { p: Pid(1), op: MqOp::Enqueue });
        h.push(Step::Atom {
            p: Pid(0),
            obj: Obj::Cell(w0),
            op: HistOp::Base(BaseOp::Read),
            ret: HRet::Word(Word::Int(1)),
            cost: 1,
        });
        h.push(Step::Res { p: Pid(1), ret: MqResponse::Ok });
        h.push(Step::Atom {
            p: Pid(0),
            obj: Obj::Target,
            op: HistOp::Mq(MqOp::Dequeue),
            ret: HRet::Mq(MqResponse::NoSuccessor),
            cost: 1,
        });
        assert_eq!(
            h.dump(&mem),
            "INV 1 M enqueue\nATOM 0 Wait[0] read 1 1\nRES 1 M OK\nATOM 0 M dequeue -1 1\n"
        );
    }

    #[test]
    fn well_formedness_rejects_double_invocation() {
        let mut wf = WellFormedness::new(2);
        wf.observe(&Step::Inv { p: Pid(0), op: MqOp::Enqueue }).unwrap();
        let err = wf
            .observe(&Step::Inv { p: Pid(0), op: MqOp::IsHead })
            .unwrap_err();
        assert!(err.contains("pending"));
    }

    #[test]
    fn well_formedness_rejects_orphan_response() {
        let mut wf = WellFormedness::new(1);
        assert!(wf
            .observe(&Step::Res { p: Pid(0), ret: MqResponse::Ok })
            .is_err());
    }

    #[test]
    fn well_formedness_rejects_atom_outside_operation() {
        let mut wf = WellFormedness::new(1);
        wf.observe(&Step::Inv { p: Pid(0), op: MqOp::Enqueue }).unwrap();
        wf.observe(&Step::Res { p: Pid(0), ret: MqResponse::Ok }).unwrap();
        let atom = Step::Atom {
            p: Pid(0),
            obj: Obj::Cell(CellId(0)),
            op: HistOp::Base(BaseOp::Read),
            ret: HRet::Word(Word::Int(0)),
            cost: 0,
        };
        assert!(wf.observe(&atom).is_err());
    }
}
