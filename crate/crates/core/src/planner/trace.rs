//! Record of the operators applied by a planner run.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub op: String,
    pub operands: String,
    pub result_args: usize,
    pub cells: usize,
    pub elapsed: Duration,
}

/// Steps in application order plus cost counters. Counters measure scalar
/// multiply-adds and table cells, not time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanTrace {
    pub steps: Vec<Step>,
    pub muladds: u64,
    pub max_cells: usize,
    pub fallback: bool,
}

impl PlanTrace {
    pub fn record(&mut self, op: &str, operands: impl Into<String>, result_args: usize, cells: usize, work: u64, elapsed: Duration) {
        self.muladds += work;
        self.max_cells = self.max_cells.max(cells);
        self.steps.push(Step { op: op.to_string(), operands: operands.into(), result_args, cells, elapsed });
    }

    pub fn count(&self, op: &str) -> usize {
        self.steps.iter().filter(|s| s.op == op).count()
    }
}

/// One line per step: index, operator, operands, result argument count and
/// table cells. Times are omitted so that output is reproducible.
impl fmt::Display for PlanTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{i} {} [{}] args={} cells={}", s.op, s.operands, s.result_args, s.cells)?;
        }
        write!(f, "muladds={} maxcells={} fallback={}", self.muladds, self.max_cells, self.fallback)
    }
}
