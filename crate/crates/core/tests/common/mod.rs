//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use qldpc_gkp::circuit::{Basis, FaultLocation, QubitRef};
use qldpc_gkp::gkp::FaultKind;
use qldpc_gkp::schedule::Schedule;
use qldpc_gkp::{CssCode, Schedules};

/// Dense re-simulation of the whole memory circuit with a set of X faults.
/// Built from the code and schedules alone, without the library's circuit
/// or propagation types.
pub struct DenseSimulator<'a> {
    pub code: &'a CssCode,
    pub schedules: &'a Schedules,
    pub rounds: usize,
}

pub struct DenseOutcome {
    /// Round-differenced Z-check detectors, `rounds × m`.
    pub detectors: Vec<u8>,
    pub data: Vec<u8>,
    /// Raw X-check outcomes; an X frame never changes them.
    pub x_outcomes: Vec<u8>,
}

impl DenseSimulator<'_> {
    pub fn blocks(&self) -> Vec<(Basis, &Schedule, usize)> {
        let mut out = Vec::new();
        if let Some(s) = &self.schedules.x {
            out.push((Basis::X, s, self.code.h_x().rows()));
        }
        out.push((Basis::Z, self.schedules.z.as_ref().unwrap(), self.code.h_z().rows()));
        out
    }

    pub fn run(&self, faults: &[FaultLocation]) -> DenseOutcome {
        let n = self.code.n();
        let mz = self.code.h_z().rows();
        let mut pending: HashSet<(Basis, usize, usize, QubitRef)> = HashSet::new();
        for f in faults {
            let key = (f.basis, f.round, f.level, f.qubit);
            if !pending.remove(&key) {
                pending.insert(key);
            }
        }
        let mut data = vec![0u8; n];
        let mut raw = vec![0u8; self.rounds * mz];
        let mut x_outcomes = Vec::new();
        for (basis, schedule, m) in self.blocks() {
            let depth = schedule.depth();
            for round in 0..self.rounds {
                let mut anc = vec![0u8; m];
                let inject = |data: &mut Vec<u8>, anc: &mut Vec<u8>, level: usize| {
                    for (q, bit) in data.iter_mut().enumerate() {
                        if pending.contains(&(basis, round, level, QubitRef::Data(q))) {
                            *bit ^= 1;
                        }
                    }
                    for (a, bit) in anc.iter_mut().enumerate() {
                        if pending.contains(&(basis, round, level, QubitRef::Ancilla(a))) {
                            *bit ^= 1;
                        }
                    }
                };
                inject(&mut data, &mut anc, 0);
                for (l, level) in schedule.levels().iter().enumerate() {
                    for &(check, qubit) in level {
                        match basis {
                            Basis::Z => anc[check] ^= data[qubit],
                            Basis::X => data[qubit] ^= anc[check],
                        }
                    }
                    inject(&mut data, &mut anc, l + 1);
                }
                inject(&mut data, &mut anc, depth + 1);
                match basis {
                    Basis::Z => raw[round * mz..(round + 1) * mz].copy_from_slice(&anc),
                    Basis::X => x_outcomes.extend(std::iter::repeat_n(0u8, m)),
                }
            }
        }
        let mut detectors = raw.clone();
        for r in 1..self.rounds {
            for i in 0..mz {
                detectors[r * mz + i] ^= raw[(r - 1) * mz + i];
            }
        }
        DenseOutcome {
            detectors,
            data,
            x_outcomes,
        }
    }

    /// Expected kind of each slot, from the schedule alone.
    pub fn kind(&self, basis: Basis, qubit: QubitRef, level: usize) -> FaultKind {
        let schedule = self.blocks().into_iter().find(|b| b.0 == basis).unwrap().1;
        let depth = schedule.depth();
        if let QubitRef::Ancilla(_) = qubit {
            if level == 0 {
                return FaultKind::Prepare;
            }
            if level == depth + 1 {
                return FaultKind::Measure;
            }
        }
        if level == 0 {
            return FaultKind::Idle;
        }
        for &(check, q) in &schedule.levels()[level - 1] {
            let (control, target) = match basis {
                Basis::Z => (QubitRef::Data(q), QubitRef::Ancilla(check)),
                Basis::X => (QubitRef::Ancilla(check), QubitRef::Data(q)),
            };
            if qubit == control {
                return FaultKind::CnotControl;
            }
            if qubit == target {
                return FaultKind::CnotTarget;
            }
        }
        FaultKind::Idle
    }
}

pub fn support(v: &[u8]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect()
}
