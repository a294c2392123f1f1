//! X Pauli-frame propagation through the memory circuit.
//!
//! A frame is a set of qubits carrying an X error. A CNOT copies an X on its
//! control onto its target; an X on the target stays put. Z-check ancillas
//! report their frame bit as a raw measurement flip, X-check ancillas are
//! insensitive to X. Ancilla frames are discarded at measurement.
//!
//! Detector `r·m + i` is the raw flip of Z check `i` in round `r` XOR the raw
//! flip of the same check in round `r − 1` (round 0 compares against the ideal
//! outcome).

use crate::circuit::{Basis, MemoryCircuit};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Syndrome and residual data error caused by a set of faults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultEffect {
    /// Sorted detector indices.
    pub syndrome: Vec<usize>,
    /// Sorted data qubits carrying an X error at the end of the circuit.
    pub data_error: Vec<usize>,
}

impl FaultEffect {
    pub fn is_trivial(&self) -> bool {
        self.syndrome.is_empty() && self.data_error.is_empty()
    }

    /// Symmetric difference of two effects.
    pub fn xor(&self, other: &FaultEffect) -> FaultEffect {
        FaultEffect {
            syndrome: xor_sorted(&self.syndrome, &other.syndrome),
            data_error: xor_sorted(&self.data_error, &other.data_error),
        }
    }
}

pub(crate) fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse X frame over `data + ancilla` qubits.
struct Frame {
    bits: Vec<bool>,
    listed: Vec<bool>,
    active: Vec<u32>,
}

impl Frame {
    fn new(size: usize) -> Self {
        Self {
            bits: vec![false; size],
            listed: vec![false; size],
            active: Vec::new(),
        }
    }

    #[inline]
    fn toggle(&mut self, q: usize) {
        self.bits[q] = !self.bits[q];
        if !self.listed[q] {
            self.listed[q] = true;
            self.active.push(q as u32);
        }
    }

    fn compact(&mut self) {
        let (bits, listed) = (&self.bits, &mut self.listed);
        self.active.retain(|&q| {
            let keep = bits[q as usize];
            if !keep {
                listed[q as usize] = false;
            }
            keep
        });
    }
}

/// Precomputed per-level control→target maps of a [`MemoryCircuit`].
pub struct Propagator<'a> {
    circuit: &'a MemoryCircuit,
    /// `targets[block][level][flat control]`, levels counted from 0.
    targets: Vec<Vec<Vec<u32>>>,
    frame_size: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(circuit: &'a MemoryCircuit) -> Self {
        let targets = circuit
            .circuits()
            .iter()
            .map(|c| {
                let width = c.data_qubits() + c.ancilla_qubits();
                (1..=c.depth())
                    .map(|l| {
                        let mut map = vec![NONE; width];
                        for g in c.level(l) {
                            map[c.flat(g.control)] = c.flat(g.target) as u32;
                        }
                        map
                    })
                    .collect()
            })
            .collect();
        let frame_size = circuit
            .circuits()
            .iter()
            .map(|c| c.data_qubits() + c.ancilla_qubits())
            .max()
            .unwrap_or(circuit.data_qubits());
        Self {
            circuit,
            targets,
            frame_size,
        }
    }

    pub fn circuit(&self) -> &MemoryCircuit {
        self.circuit
    }

    /// Effect of a single fault at location `index`.
    pub fn propagate(&self, index: usize) -> Result<FaultEffect> {
        self.propagate_many(&[index])
    }

    /// Effect of simultaneous faults at the given locations. Repeated indices
    /// cancel in pairs.
    pub fn propagate_many(&self, indices: &[usize]) -> Result<FaultEffect> {
        let total = self.circuit.locations().len();
        if let Some(&bad) = indices.iter().find(|&&i| i >= total) {
            return Err(Error::InvalidLocation(format!("location index {bad} out of {total}")));
        }
        let mut faults = indices.to_vec();
        faults.sort_unstable();
        let Some(&first) = faults.first() else {
            return Ok(FaultEffect::default());
        };
        let mem = self.circuit;
        let n = mem.data_qubits();
        let m = mem.z_checks();
        let mut frame = Frame::new(self.frame_size);
        let mut raw = Vec::new();
        let mut next = 0;
        let mut copies = Vec::new();

        for inst in mem.instance_of(first)..mem.instance_count() {
            let circuit = mem.instance_circuit(inst);
            let block = inst / mem.rounds();
            let round = inst % mem.rounds();
            let offset = mem.instance_offset(inst);
            let width = n + circuit.ancilla_qubits();
            let d = circuit.depth();
            let mut inject = |frame: &mut Frame, start: usize, end: usize, base: usize| {
                while next < faults.len() && faults[next] < end {
                    debug_assert!(faults[next] >= start);
                    frame.toggle(faults[next] - start + base);
                    next += 1;
                }
            };
            for slot in 0..=d {
                let start = offset + slot * width;
                inject(&mut frame, start, start + width, 0);
                if slot < d {
                    let map = &self.targets[block][slot];
                    copies.clear();
                    for &q in &frame.active {
                        if frame.bits[q as usize] {
                            let t = map[q as usize];
                            if t != NONE {
                                copies.push(t as usize);
                            }
                        }
                    }
                    for &t in &copies {
                        frame.toggle(t);
                    }
                    frame.compact();
                }
            }
            let start = offset + (d + 1) * width;
            inject(&mut frame, start, start + circuit.ancilla_qubits(), n);

            for &q in &frame.active {
                let q = q as usize;
                if q >= n && frame.bits[q] {
                    if circuit.basis() == Basis::Z {
                        raw.push(round * m + (q - n));
                    }
                    frame.bits[q] = false;
                }
            }
            frame.compact();
        }

        // difference consecutive rounds
        let rounds = mem.rounds();
        let mut syndrome = Vec::with_capacity(2 * raw.len());
        for &r in &raw {
            syndrome.push(r);
            if r / m + 1 < rounds {
                syndrome.push(r + m);
            }
        }
        syndrome.sort_unstable();
        let mut reduced: Vec<usize> = Vec::with_capacity(syndrome.len());
        for s in syndrome {
            if reduced.last() == Some(&s) {
                reduced.pop();
            } else {
                reduced.push(s);
            }
        }

        let mut data_error: Vec<usize> = frame.active.iter().map(|&q| q as usize).filter(|&q| q < n).collect();
        data_error.sort_unstable();
        Ok(FaultEffect {
            syndrome: reduced,
            data_error,
        })
    }
}

impl MemoryCircuit {
    /// Effect of a single fault; builds a fresh [`Propagator`], so prefer
    /// reusing one when propagating many locations.
    pub fn propagate_fault(&self, index: usize) -> Result<FaultEffect> {
        Propagator::new(self).propagate(index)
    }
}
