//! Faulty syndrome-measurement circuits and their fault locations.
//!
//! A circuit for one check type has `depth` CNOT levels. Every qubit gets one
//! fault slot per gap between levels: data qubits at slots `0..=depth`,
//! ancillas at `0` (preparation), `1..=depth` and `depth + 1` (just before
//! measurement). A slot after a level in which the qubit took part in a CNOT is
//! a control or target fault, every other interior slot is an idle fault.
//!
//! Z checks use `|0⟩` ancillas and data→ancilla CNOTs; X checks use `|+⟩`
//! ancillas and ancilla→data CNOTs.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gkp::FaultKind;
use crate::schedule::{Schedule, Schedules};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::X => "X",
            Basis::Z => "Z",
        }
    }
}

/// A data qubit of the code or the ancilla of a check. Data qubits sort first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitRef {
    Data(usize),
    Ancilla(usize),
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitRef::Data(i) => write!(f, "D{i}"),
            QubitRef::Ancilla(i) => write!(f, "A{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cnot {
    pub control: QubitRef,
    pub target: QubitRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementCircuit {
    basis: Basis,
    data_qubits: usize,
    ancilla_qubits: usize,
    levels: Vec<Vec<Cnot>>,
}

impl MeasurementCircuit {
    /// A circuit with no checks: no ancillas, no gates, no fault locations.
    pub fn empty(basis: Basis, data_qubits: usize) -> Self {
        Self {
            basis,
            data_qubits,
            ancilla_qubits: 0,
            levels: Vec::new(),
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Gates of level `l`, counted from 1.
    pub fn level(&self, l: usize) -> &[Cnot] {
        &self.levels[l - 1]
    }

    pub fn cnot_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ancilla_qubits == 0
    }

    /// Number of fault locations in one round.
    pub fn location_count(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.data_qubits * (self.depth() + 1) + self.ancilla_qubits * (self.depth() + 2)
        }
    }

    /// Index of a qubit in `0..data + ancilla`.
    pub(crate) fn flat(&self, q: QubitRef) -> usize {
        match q {
            QubitRef::Data(i) => i,
            QubitRef::Ancilla(i) => self.data_qubits + i,
        }
    }

    fn kind_at(&self, q: QubitRef, level: usize) -> FaultKind {
        let d = self.depth();
        match q {
            QubitRef::Ancilla(_) if level == 0 => FaultKind::Prepare,
            QubitRef::Ancilla(_) if level == d + 1 => FaultKind::Measure,
            _ if level == 0 => FaultKind::Idle,
            _ => self
                .level(level)
                .iter()
                .find_map(|g| {
                    if g.control == q {
                        Some(FaultKind::CnotControl)
                    } else if g.target == q {
                        Some(FaultKind::CnotTarget)
                    } else {
                        None
                    }
                })
                .unwrap_or(FaultKind::Idle),
        }
    }

    /// Human-readable listing of gate levels and fault slots.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{}-check circuit: {} data, {} ancilla, depth {}",
            self.basis.name(),
            self.data_qubits,
            self.ancilla_qubits,
            self.depth()
        )
        .unwrap();
        if self.is_empty() {
            return out;
        }
        let locations = enumerate_fault_locations(self);
        let mut by_level: BTreeMap<usize, Vec<&FaultLocation>> = BTreeMap::new();
        for loc in &locations {
            by_level.entry(loc.level).or_default().push(loc);
        }
        for (level, locs) in by_level {
            if level >= 1 && level <= self.depth() {
                let gates: Vec<String> =
                    self.level(level).iter().map(|g| format!("{}->{}", g.control, g.target)).collect();
                writeln!(out, "gate {level}: CNOT {}", gates.join(" ")).unwrap();
            }
            let slots: Vec<String> = locs.iter().map(|l| format!("{}:{}", l.qubit, short(l.kind))).collect();
            writeln!(out, "slot {level}: {}", slots.join(" ")).unwrap();
        }
        out
    }
}

fn short(kind: FaultKind) -> &'static str {
    match kind {
        FaultKind::Idle => "I",
        FaultKind::Prepare => "P",
        FaultKind::Measure => "M",
        FaultKind::CnotControl => "C",
        FaultKind::CnotTarget => "T",
    }
}

/// Lays out the CNOTs of `schedule` for the checks of `basis`.
pub fn build_circuit(code: &CssCode, schedule: &Schedule, basis: Basis) -> Result<MeasurementCircuit> {
    let h = match basis {
        Basis::X => code.h_x(),
        Basis::Z => code.h_z(),
    };
    if h.rows() == 0 || h.is_zero() {
        return Err(Error::EmptyCheckMatrix(basis.name()));
    }
    schedule.validate(h)?;
    let levels = schedule
        .levels()
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|&(check, qubit)| match basis {
                    Basis::Z => Cnot {
                        control: QubitRef::Data(qubit),
                        target: QubitRef::Ancilla(check),
                    },
                    Basis::X => Cnot {
                        control: QubitRef::Ancilla(check),
                        target: QubitRef::Data(qubit),
                    },
                })
                .collect()
        })
        .collect();
    Ok(MeasurementCircuit {
        basis,
        data_qubits: code.n(),
        ancilla_qubits: h.rows(),
        levels,
    })
}

/// One fault opportunity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultLocation {
    pub kind: FaultKind,
    pub qubit: QubitRef,
    /// Slot index: 0 before the first gate level, `l` right after level `l`,
    /// `depth + 1` just before ancilla measurement.
    pub level: usize,
    pub round: usize,
    pub basis: Basis,
}

impl fmt::Display for FaultLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:r{}:l{}:{}:{}",
            self.basis.name(),
            self.round,
            self.level,
            self.qubit,
            self.kind.name()
        )
    }
}

/// Fault locations of one round (round index 0), ordered by slot then qubit.
pub fn enumerate_fault_locations(circuit: &MeasurementCircuit) -> Vec<FaultLocation> {
    enumerate_round(circuit, 0)
}

pub(crate) fn enumerate_round(circuit: &MeasurementCircuit, round: usize) -> Vec<FaultLocation> {
    if circuit.is_empty() {
        return Vec::new();
    }
    let d = circuit.depth();
    let mut out = Vec::with_capacity(circuit.location_count());
    let loc = |qubit, level| FaultLocation {
        kind: circuit.kind_at(qubit, level),
        qubit,
        level,
        round,
        basis: circuit.basis,
    };
    for level in 0..=d {
        for q in 0..circuit.data_qubits {
            out.push(loc(QubitRef::Data(q), level));
        }
        for a in 0..circuit.ancilla_qubits {
            out.push(loc(QubitRef::Ancilla(a), level));
        }
    }
    for a in 0..circuit.ancilla_qubits {
        out.push(loc(QubitRef::Ancilla(a), d + 1));
    }
    out
}

/// The full memory-experiment circuit: `rounds` X-check rounds followed by
/// `rounds` Z-check rounds, with every fault location enumerated in time order.
#[derive(Clone, Debug)]
pub struct MemoryCircuit {
    rounds: usize,
    data_qubits: usize,
    z_checks: usize,
    /// Circuits in time order of their blocks: X (when present) then Z.
    circuits: Vec<MeasurementCircuit>,
    locations: Vec<FaultLocation>,
    /// Start of each (block, round) instance in `locations`.
    instance_offsets: Vec<usize>,
    /// For CNOT legs, the location of the other leg of the same gate.
    partner: Vec<Option<usize>>,
}

impl MemoryCircuit {
    pub fn new(code: &CssCode, schedules: &Schedules, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::Config("at least one measurement round is needed".into()));
        }
        let mut circuits = Vec::with_capacity(2);
        if !code.h_x().is_zero() {
            let s = schedules
                .x
                .as_ref()
                .ok_or_else(|| Error::Schedule("missing X-check schedule".into()))?;
            circuits.push(build_circuit(code, s, Basis::X)?);
        }
        let s = schedules
            .z
            .as_ref()
            .ok_or_else(|| Error::Schedule("missing Z-check schedule".into()))?;
        circuits.push(build_circuit(code, s, Basis::Z)?);

        let mut locations = Vec::new();
        let mut instance_offsets = Vec::new();
        let mut partner = Vec::new();
        for circuit in &circuits {
            for round in 0..rounds {
                let offset = locations.len();
                instance_offsets.push(offset);
                let round_locs = enumerate_round(circuit, round);
                partner.extend(std::iter::repeat_n(None, round_locs.len()));
                locations.extend(round_locs);
                let width = circuit.data_qubits + circuit.ancilla_qubits;
                for level in 1..=circuit.depth() {
                    for g in circuit.level(level) {
                        let c = offset + level * width + circuit.flat(g.control);
                        let t = offset + level * width + circuit.flat(g.target);
                        partner[c] = Some(t);
                        partner[t] = Some(c);
                    }
                }
            }
        }
        Ok(Self {
            rounds,
            data_qubits: code.n(),
            z_checks: code.h_z().rows(),
            circuits,
            locations,
            instance_offsets,
            partner,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    /// Rows of `H_Z`; the detector count is `rounds × z_checks`.
    pub fn z_checks(&self) -> usize {
        self.z_checks
    }

    pub fn detector_count(&self) -> usize {
        self.rounds * self.z_checks
    }

    pub fn circuits(&self) -> &[MeasurementCircuit] {
        &self.circuits
    }

    pub fn circuit(&self, basis: Basis) -> Option<&MeasurementCircuit> {
        self.circuits.iter().find(|c| c.basis == basis)
    }

    pub fn locations(&self) -> &[FaultLocation] {
        &self.locations
    }

    pub fn partner(&self, index: usize) -> Option<usize> {
        self.partner[index]
    }

    /// Locations per round of one basis (`r_X` or `r_Z`).
    pub fn locations_per_round(&self, basis: Basis) -> usize {
        self.circuit(basis).map_or(0, MeasurementCircuit::location_count)
    }

    /// Position of `(basis, round)` in the time-ordered instance list.
    pub(crate) fn instance_index(&self, basis: Basis, round: usize) -> Option<usize> {
        let block = self.circuits.iter().position(|c| c.basis == basis)?;
        (round < self.rounds).then_some(block * self.rounds + round)
    }

    pub(crate) fn instance_circuit(&self, instance: usize) -> &MeasurementCircuit {
        &self.circuits[instance / self.rounds]
    }

    pub(crate) fn instance_count(&self) -> usize {
        self.circuits.len() * self.rounds
    }

    pub(crate) fn instance_offset(&self, instance: usize) -> usize {
        self.instance_offsets[instance]
    }

    /// Instance holding location `index`.
    pub(crate) fn instance_of(&self, index: usize) -> usize {
        self.instance_offsets.partition_point(|&o| o <= index) - 1
    }

    /// Index of `loc` in [`MemoryCircuit::locations`], if it is part of the circuit.
    pub fn index_of(&self, loc: &FaultLocation) -> Option<usize> {
        let inst = self.instance_index(loc.basis, loc.round)?;
        let circuit = self.instance_circuit(inst);
        let d = circuit.depth();
        let width = circuit.data_qubits + circuit.ancilla_qubits;
        let in_range = match loc.qubit {
            QubitRef::Data(i) => i < circuit.data_qubits && loc.level <= d,
            QubitRef::Ancilla(i) => i < circuit.ancilla_qubits && loc.level <= d + 1,
        };
        if !in_range {
            return None;
        }
        let idx = if loc.level == d + 1 {
            let QubitRef::Ancilla(a) = loc.qubit else { return None };
            self.instance_offsets[inst] + (d + 1) * width + a
        } else {
            self.instance_offsets[inst] + loc.level * width + circuit.flat(loc.qubit)
        };
        (self.locations[idx] == *loc).then_some(idx)
    }

    /// Location counts per fault kind.
    pub fn kind_counts(&self) -> BTreeMap<FaultKind, usize> {
        let mut counts = BTreeMap::new();
        for loc in &self.locations {
            *counts.entry(loc.kind).or_insert(0) += 1;
        }
        counts
    }
}
