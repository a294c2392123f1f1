//! The circuit-level parity-check matrix and its soft information.
//!
//! Every fault location of the memory circuit is propagated to its
//! `(syndrome, data error)` effect. Locations with identical effects share one
//! column; the column fires when an odd number of its locations fault.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{FaultLocation, MemoryCircuit};
use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::experiment::FaultSample;
use crate::gf2::BinaryMatrix;
use crate::gkp::{
    pair_flip_marginals, pair_posterior_with, posterior_flip_probability, prior_flip_probability, FaultKind,
    GkpParams, PairCovariance, Quadrature,
};
use crate::io::format_matrix;
use crate::propagation::{FaultEffect, Propagator};
use crate::schedule::Schedules;

/// Probabilities are clamped to `[P_MIN, 1 − P_MIN]` before conversion to LLRs.
pub const P_MIN: f64 = 1e-12;

/// `½ − ½ Π(1 − 2pᵢ)`: probability that an odd number of independent events fire.
pub fn merge_probabilities(probs: &[f64]) -> f64 {
    0.5 - 0.5 * probs.iter().map(|p| 1.0 - 2.0 * p).product::<f64>()
}

/// `ln((1 − p) / p)` with `p` clamped away from 0 and 1.
pub fn probability_to_llr(p: f64) -> f64 {
    let p = p.clamp(P_MIN, 1.0 - P_MIN);
    ((1.0 - p) / p).ln()
}

#[derive(Clone, Debug)]
pub struct CircuitCheckMatrix {
    circuit: MemoryCircuit,
    matrix: BinaryMatrix,
    column_groups: Vec<Vec<usize>>,
    column_data_effects: Vec<Vec<usize>>,
    location_column: Vec<usize>,
}

impl CircuitCheckMatrix {
    pub fn build(code: &CssCode, schedules: &Schedules, rounds: usize, execution: Execution) -> Result<Self> {
        Self::from_circuit(MemoryCircuit::new(code, schedules, rounds)?, execution)
    }

    pub fn from_circuit(circuit: MemoryCircuit, execution: Execution) -> Result<Self> {
        let effects = {
            let propagator = Propagator::new(&circuit);
            execution
                .executor()?
                .map(0..circuit.locations().len(), || (), |_, i| propagator.propagate(i))
        };
        let mut index: HashMap<FaultEffect, usize> = HashMap::new();
        let mut column_groups: Vec<Vec<usize>> = Vec::new();
        let mut columns: Vec<FaultEffect> = Vec::new();
        let mut location_column = Vec::with_capacity(effects.len());
        for (loc, effect) in effects.into_iter().enumerate() {
            let effect = effect?;
            let col = *index.entry(effect.clone()).or_insert_with(|| {
                columns.push(effect);
                column_groups.push(Vec::new());
                columns.len() - 1
            });
            column_groups[col].push(loc);
            location_column.push(col);
        }
        let entries = columns
            .iter()
            .enumerate()
            .flat_map(|(c, e)| e.syndrome.iter().map(move |&r| (r, c)));
        let matrix = BinaryMatrix::from_entries(circuit.detector_count(), columns.len(), entries)?;
        let column_data_effects = columns.into_iter().map(|e| e.data_error).collect();
        Ok(Self {
            circuit,
            matrix,
            column_groups,
            column_data_effects,
            location_column,
        })
    }

    pub fn circuit(&self) -> &MemoryCircuit {
        &self.circuit
    }

    /// `H^circ`, of size `rounds·m × columns`.
    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    /// Z checks per round.
    pub fn m(&self) -> usize {
        self.circuit.z_checks()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn columns(&self) -> usize {
        self.matrix.cols()
    }

    /// Location indices merged into each column, in enumeration order.
    pub fn column_groups(&self) -> &[Vec<usize>] {
        &self.column_groups
    }

    pub fn group_locations(&self, column: usize) -> impl Iterator<Item = &FaultLocation> {
        self.column_groups[column].iter().map(|&i| &self.circuit.locations()[i])
    }

    /// Sorted data qubits flipped by each column.
    pub fn column_data_effects(&self) -> &[Vec<usize>] {
        &self.column_data_effects
    }

    pub fn location_column(&self, location: usize) -> usize {
        self.location_column[location]
    }

    /// Number of fault locations before merging: `rounds·(r_X + r_Z)`.
    pub fn location_count(&self) -> usize {
        self.location_column.len()
    }

    /// Column indicator induced by per-location fault indicators.
    pub fn columns_from_locations(&self, location_flips: &[u8]) -> Vec<u8> {
        let mut cols = vec![0u8; self.columns()];
        for (loc, &f) in location_flips.iter().enumerate() {
            cols[self.location_column[loc]] ^= f & 1;
        }
        cols
    }

    /// Data error (length `n`) produced by the flipped columns.
    pub fn data_effect(&self, column_flips: &[u8]) -> Vec<u8> {
        let mut e = vec![0u8; self.circuit.data_qubits()];
        for (c, &f) in column_flips.iter().enumerate() {
            if f & 1 == 1 {
                for &q in &self.column_data_effects[c] {
                    e[q] ^= 1;
                }
            }
        }
        e
    }

    pub fn syndrome(&self, column_flips: &[u8]) -> Vec<u8> {
        self.matrix.mul_vec(column_flips)
    }

    /// One line per column: `column: location location ...`.
    pub fn format_sidecar(&self) -> String {
        let mut out = String::new();
        for (c, group) in self.column_groups.iter().enumerate() {
            write!(out, "{c}:").unwrap();
            for &i in group {
                write!(out, " {}", self.circuit.locations()[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Writes `H^circ` in the sparse-matrix format and the column-group sidecar.
    pub fn export(&self, matrix_path: &Path, sidecar_path: &Path) -> Result<()> {
        fs::write(matrix_path, format_matrix(&self.matrix)).map_err(|e| Error::io(matrix_path, e))?;
        fs::write(sidecar_path, self.format_sidecar()).map_err(|e| Error::io(sidecar_path, e))
    }
}

/// Soft-information regime used to initialise the circuit-level decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlrMode {
    /// One shared LLR on every column.
    Uniform,
    /// Per-column LLRs from the mechanism priors.
    Prior,
    /// Per-column LLRs from the posteriors of the sampled residues.
    RealTime,
}

impl LlrMode {
    pub const ALL: [LlrMode; 3] = [LlrMode::Uniform, LlrMode::Prior, LlrMode::RealTime];

    pub fn name(self) -> &'static str {
        match self {
            LlrMode::Uniform => "uniform",
            LlrMode::Prior => "prior",
            LlrMode::RealTime => "realtime",
        }
    }
}

impl FromStr for LlrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(LlrMode::Uniform),
            "prior" => Ok(LlrMode::Prior),
            "realtime" | "real_time" | "real-time" => Ok(LlrMode::RealTime),
            other => Err(Error::Config(format!("unknown LLR mode `{other}`"))),
        }
    }
}

/// Flip probabilities of every mechanism at one squeezing level.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    params: GkpParams,
    priors: [f64; 5],
    pair_covariance: PairCovariance,
}

impl NoiseModel {
    /// CNOT legs use the flip marginals of the joint pair classification, so
    /// the priors are the exact flip rates of the sampler.
    pub fn new(params: GkpParams) -> Result<Self> {
        let (control, target) = pair_flip_marginals(Quadrature::Q, &params);
        let mut priors = [0.0; 5];
        for kind in FaultKind::ALL {
            priors[kind_slot(kind)] = match kind {
                FaultKind::CnotControl => control,
                FaultKind::CnotTarget => target,
                _ => prior_flip_probability(kind.effective_variance(&params))?,
            };
        }
        Ok(Self {
            params,
            priors,
            pair_covariance: PairCovariance::cnot(Quadrature::Q, &params),
        })
    }

    pub fn params(&self) -> &GkpParams {
        &self.params
    }

    pub fn prior(&self, kind: FaultKind) -> f64 {
        self.priors[kind_slot(kind)]
    }

    pub(crate) fn pair_covariance(&self) -> &PairCovariance {
        &self.pair_covariance
    }

    /// Mean prior over the circuit's fault locations.
    pub fn mean_prior(&self, circuit: &MemoryCircuit) -> f64 {
        let locs = circuit.locations();
        if locs.is_empty() {
            return 0.0;
        }
        locs.iter().map(|l| self.prior(l.kind)).sum::<f64>() / locs.len() as f64
    }

    /// Per-location posterior flip probabilities from sampled residues.
    pub fn location_posteriors(&self, circuit: &MemoryCircuit, residues: &[f64]) -> Result<Vec<f64>> {
        let locs = circuit.locations();
        if residues.len() != locs.len() {
            return Err(Error::MissingResidues);
        }
        let mut post = vec![0.0; locs.len()];
        for (i, loc) in locs.iter().enumerate() {
            match loc.kind {
                FaultKind::CnotControl => {
                    let j = circuit.partner(i).expect("CNOT legs are paired");
                    let p = pair_posterior_with(&self.pair_covariance, residues[i], residues[j]);
                    post[i] = p[2] + p[3];
                    post[j] = p[1] + p[3];
                }
                FaultKind::CnotTarget => {}
                kind => {
                    post[i] = posterior_flip_probability(residues[i], kind.effective_variance(&self.params))?;
                }
            }
        }
        Ok(post)
    }
}

fn kind_slot(kind: FaultKind) -> usize {
    match kind {
        FaultKind::Idle => 0,
        FaultKind::Prepare => 1,
        FaultKind::Measure => 2,
        FaultKind::CnotControl => 3,
        FaultKind::CnotTarget => 4,
    }
}

/// Merges per-location probabilities into per-column LLRs.
pub fn column_llrs(ccm: &CircuitCheckMatrix, location_probs: &[f64]) -> Vec<f64> {
    let mut prod = vec![1.0f64; ccm.columns()];
    for (loc, &p) in location_probs.iter().enumerate() {
        prod[ccm.location_column(loc)] *= 1.0 - 2.0 * p;
    }
    prod.into_iter().map(|x| probability_to_llr(0.5 - 0.5 * x)).collect()
}

/// Initial decoder LLRs for `mode`. `RealTime` needs a sample with residues.
pub fn init_llrs(
    mode: LlrMode,
    ccm: &CircuitCheckMatrix,
    noise: &NoiseModel,
    sample: Option<&FaultSample>,
) -> Result<Vec<f64>> {
    let circuit = ccm.circuit();
    match mode {
        LlrMode::Uniform => Ok(vec![probability_to_llr(noise.mean_prior(circuit)); ccm.columns()]),
        LlrMode::Prior => {
            let probs: Vec<f64> = circuit.locations().iter().map(|l| noise.prior(l.kind)).collect();
            Ok(column_llrs(ccm, &probs))
        }
        LlrMode::RealTime => {
            let sample = sample.ok_or(Error::MissingResidues)?;
            let probs = noise.location_posteriors(circuit, &sample.residues)?;
            Ok(column_llrs(ccm, &probs))
        }
    }
}
