//! CNOT measurement schedules.
//!
//! A schedule splits the Tanner-graph edges `(check, qubit)` of one check
//! matrix into gate levels. Within a level every check and every qubit appears
//! at most once; over all levels every edge appears exactly once.

use std::collections::HashSet;

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// One CNOT between an ancilla (check) and a data qubit.
pub type Edge = (usize, usize);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    levels: Vec<Vec<Edge>>,
}

impl Schedule {
    /// Wraps the given levels without validating them; see [`Schedule::validate`].
    pub fn from_levels(levels: Vec<Vec<Edge>>) -> Self {
        Self { levels }
    }

    pub fn levels(&self) -> &[Vec<Edge>] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn gate_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Checks per-level disjointness and exact coverage of `h`'s support.
    pub fn validate(&self, h: &BinaryMatrix) -> Result<()> {
        let mut seen = HashSet::with_capacity(h.nnz());
        for (li, level) in self.levels.iter().enumerate() {
            let mut checks = HashSet::new();
            let mut qubits = HashSet::new();
            for &(c, q) in level {
                if c >= h.rows() || q >= h.cols() || !h.get(c, q) {
                    return Err(Error::Schedule(format!(
                        "level {li}: ({c}, {q}) is not an entry of the check matrix"
                    )));
                }
                if !checks.insert(c) {
                    return Err(Error::Schedule(format!("level {li}: check {c} used twice")));
                }
                if !qubits.insert(q) {
                    return Err(Error::Schedule(format!("level {li}: qubit {q} used twice")));
                }
                if !seen.insert((c, q)) {
                    return Err(Error::Schedule(format!("({c}, {q}) scheduled more than once")));
                }
            }
        }
        if seen.len() != h.nnz() {
            return Err(Error::Schedule(format!(
                "schedule covers {} of {} check-matrix entries",
                seen.len(),
                h.nnz()
            )));
        }
        Ok(())
    }

    /// Splits every level into `factor` sublevels (round robin over the
    /// level's gates), multiplying the depth.
    pub fn split_levels(&self, factor: usize) -> Schedule {
        let factor = factor.max(1);
        let mut levels = Vec::with_capacity(self.levels.len() * factor);
        for level in &self.levels {
            for part in 0..factor {
                levels.push(level.iter().skip(part).step_by(factor).copied().collect());
            }
        }
        Schedule { levels }
    }
}

/// Per-basis schedules for one circuit variant. `x` is `None` for codes
/// without X checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedules {
    pub x: Option<Schedule>,
    pub z: Option<Schedule>,
}

impl Schedules {
    fn build(code: &CssCode, f: impl Fn(&BinaryMatrix) -> Schedule) -> Self {
        let pick = |h: &BinaryMatrix| (!h.is_zero()).then(|| f(h));
        Self {
            x: pick(code.h_x()),
            z: pick(code.h_z()),
        }
    }

    /// Minimum-depth schedules from [`greedy_schedule`].
    pub fn greedy(code: &CssCode) -> Self {
        Self::build(code, greedy_schedule)
    }

    /// One gate per level from [`serial_schedule`].
    pub fn serial(code: &CssCode) -> Self {
        Self::build(code, serial_schedule)
    }
}

const NONE: usize = usize::MAX;

/// Edge colouring of the Tanner graph of `h`, visiting edges in row-major
/// order. Conflicts are repaired by swapping colours along an alternating
/// path, so the depth always equals the maximum row or column weight.
pub fn greedy_schedule(h: &BinaryMatrix) -> Schedule {
    let delta = h.max_row_weight().max(h.max_col_weight());
    if delta == 0 {
        return Schedule::default();
    }
    // check_color[c * delta + k] = qubit on colour k at check c
    let mut check_color = vec![NONE; h.rows() * delta];
    let mut qubit_color = vec![NONE; h.cols() * delta];

    for (c, q) in h.entries() {
        let free_c = (0..delta).find(|&k| check_color[c * delta + k] == NONE).expect("check has a free colour");
        let free_q = (0..delta).find(|&k| qubit_color[q * delta + k] == NONE).expect("qubit has a free colour");
        let a = free_c;
        if qubit_color[q * delta + a] != NONE {
            // a is busy at q, b is free at q: swap a/b on the alternating path from q
            let b = free_q;
            let mut path = Vec::new();
            let mut on_qubit_side = true;
            let mut vertex = q;
            let mut color = a;
            loop {
                let next = if on_qubit_side {
                    qubit_color[vertex * delta + color]
                } else {
                    check_color[vertex * delta + color]
                };
                if next == NONE {
                    break;
                }
                let (ec, eq) = if on_qubit_side { (next, vertex) } else { (vertex, next) };
                path.push((ec, eq, color));
                vertex = next;
                on_qubit_side = !on_qubit_side;
                color = if color == a { b } else { a };
            }
            for &(ec, eq, k) in &path {
                check_color[ec * delta + k] = NONE;
                qubit_color[eq * delta + k] = NONE;
            }
            for &(ec, eq, k) in &path {
                let swapped = if k == a { b } else { a };
                check_color[ec * delta + swapped] = eq;
                qubit_color[eq * delta + swapped] = ec;
            }
        }
        debug_assert_eq!(check_color[c * delta + a], NONE);
        debug_assert_eq!(qubit_color[q * delta + a], NONE);
        check_color[c * delta + a] = q;
        qubit_color[q * delta + a] = c;
    }

    let mut levels = vec![Vec::new(); delta];
    for c in 0..h.rows() {
        for (k, level) in levels.iter_mut().enumerate() {
            let q = check_color[c * delta + k];
            if q != NONE {
                level.push((c, q));
            }
        }
    }
    levels.retain(|l| !l.is_empty());
    Schedule { levels }
}

/// One CNOT per level in row-major order: the deepest valid schedule.
pub fn serial_schedule(h: &BinaryMatrix) -> Schedule {
    Schedule {
        levels: h.entries().map(|e| vec![e]).collect(),
    }
}
