//! Monte Carlo memory experiment.
//!
//! One trial samples GKP shifts at every fault location, decodes the
//! circuit-level syndrome, applies the recovered data correction and hands
//! the remaining data error to a BP-OSD decoder of the outer code, as if the
//! data qubits were read out destructively. The trial fails when the final
//! residual is a logical operator.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::decoder::{BpOsdDecoder, DecoderConfig};
use crate::detector::{init_llrs, probability_to_llr, CircuitCheckMatrix, LlrMode, NoiseModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gkp::{classify_with, draw, is_logical_flip, residue, sample_cnot_q_pair, FaultKind, GkpParams};
use crate::rng::{point_seed, trial_rng};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub const DEFAULT_TRIAL_CAP: u64 = 10_000_000;

/// Faults drawn for one trial, indexed like the circuit's fault locations.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultSample {
    /// Effective q-shift at each location.
    pub shifts: Vec<f64>,
    /// Shift modulo `√π`, the analog syndrome seen by the real-time decoder.
    pub residues: Vec<f64>,
    pub location_flips: Vec<u8>,
    /// Parity of the location flips in each column group.
    pub column_flips: Vec<u8>,
    /// `e₀`, the data error caused by the flipped columns.
    pub data_error: Vec<u8>,
}

impl FaultSample {
    /// Sample with the given per-location flips; shifts are left at zero and
    /// `residues` defaults to all zeros.
    pub fn from_location_flips(ccm: &CircuitCheckMatrix, location_flips: Vec<u8>, residues: Option<Vec<f64>>) -> Result<Self> {
        let count = ccm.location_count();
        if location_flips.len() != count || residues.as_ref().is_some_and(|r| r.len() != count) {
            return Err(Error::Shape(format!("expected {count} per-location entries")));
        }
        let column_flips = ccm.columns_from_locations(&location_flips);
        let data_error = ccm.data_effect(&column_flips);
        Ok(Self {
            shifts: vec![0.0; count],
            residues: residues.unwrap_or_else(|| vec![0.0; count]),
            location_flips,
            column_flips,
            data_error,
        })
    }
}

/// Samples every location of `ccm`'s circuit. CNOT legs are drawn jointly and
/// classified by maximum-likelihood lattice decoding of the pair.
pub fn sample_faults<R: Rng + ?Sized>(ccm: &CircuitCheckMatrix, noise: &NoiseModel, rng: &mut R) -> FaultSample {
    let circuit = ccm.circuit();
    let locs = circuit.locations();
    let params = noise.params();
    let mut shifts = vec![0.0; locs.len()];
    let mut location_flips = vec![0u8; locs.len()];
    for (i, loc) in locs.iter().enumerate() {
        if loc.kind.is_cnot() {
            let j = circuit.partner(i).expect("CNOT legs are paired");
            if j < i {
                continue;
            }
            let (c, t) = if loc.kind == FaultKind::CnotControl { (i, j) } else { (j, i) };
            let pair = sample_cnot_q_pair(params, rng);
            let class = classify_with(noise.pair_covariance(), pair.eta_control, pair.eta_target);
            shifts[c] = pair.eta_control;
            shifts[t] = pair.eta_target;
            location_flips[c] = class.parity_control;
            location_flips[t] = class.parity_target;
        } else {
            let shift = draw(loc.kind.effective_variance(params).sqrt(), rng);
            shifts[i] = shift;
            location_flips[i] = u8::from(is_logical_flip(shift));
        }
    }
    let residues = shifts.iter().map(|&s| residue(s)).collect();
    let column_flips = ccm.columns_from_locations(&location_flips);
    let data_error = ccm.data_effect(&column_flips);
    FaultSample {
        shifts,
        residues,
        location_flips,
        column_flips,
        data_error,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    /// Weight of the data error left after the circuit-level correction.
    pub residual_weight: usize,
    pub decoder_converged: bool,
}

/// Failure count over a number of trials with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FerEstimate {
    pub failures: u64,
    pub trials: u64,
    pub fer: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl FerEstimate {
    /// 95% Wilson interval. `trials` must be positive.
    pub fn new(failures: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(failures, trials, Z_95);
        let fer = failures as f64 / trials as f64;
        Self {
            failures,
            trials,
            fer,
            wilson_lo: lo.min(fer),
            wilson_hi: hi.max(fer),
        }
    }

    pub fn overlaps(&self, other: &FerEstimate) -> bool {
        self.wilson_lo <= other.wilson_hi && other.wilson_lo <= self.wilson_hi
    }
}

pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs `trial(state, index)` for indices `0, 1, ...` until the
/// `failure_target`-th failure or `trial_cap` trials, whichever comes first.
/// The count stops exactly at the trial of the last needed failure, so the
/// result does not depend on batching or worker count.
pub fn run_until_failures<S, I, F>(
    failure_target: u64,
    trial_cap: u64,
    execution: Execution,
    init: I,
    trial: F,
) -> Result<FerEstimate>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> Result<bool> + Sync + Send,
{
    if failure_target == 0 {
        return Err(Error::Config("failure target must be at least 1".into()));
    }
    if trial_cap == 0 {
        return Err(Error::Config("trial cap must be at least 1".into()));
    }
    let executor = execution.executor()?;
    let mut failures = 0;
    let mut done: u64 = 0;
    let mut batch: u64 = 256;
    while done < trial_cap {
        let end = (done + batch).min(trial_cap);
        let results = executor.map(done as usize..end as usize, &init, |s, i| trial(s, i as u64));
        for (offset, r) in results.into_iter().enumerate() {
            if r? {
                failures += 1;
                if failures == failure_target {
                    return Ok(FerEstimate::new(failures, done + offset as u64 + 1));
                }
            }
        }
        done = end;
        batch = (batch * 2).min(1 << 16);
    }
    Ok(FerEstimate::new(failures, done))
}

/// Per-worker decoder pair.
#[derive(Clone, Debug)]
pub struct TrialDecoders {
    pub circuit: BpOsdDecoder,
    pub base: BpOsdDecoder,
}

/// Quantities shared by all trials at one squeezing level.
#[derive(Clone, Debug)]
pub struct PointContext {
    pub noise: NoiseModel,
    pub uniform_llrs: Vec<f64>,
    pub prior_llrs: Vec<f64>,
    /// LLRs of the outer-code decoder: the idle prior on every data qubit.
    pub base_llrs: Vec<f64>,
}

/// A code, its circuit-level matrix and decoder settings.
#[derive(Clone, Debug)]
pub struct MemoryExperiment {
    code: CssCode,
    ccm: CircuitCheckMatrix,
    logical_z: Vec<Vec<u8>>,
    decoders: TrialDecoders,
}

impl MemoryExperiment {
    pub fn new(code: CssCode, ccm: CircuitCheckMatrix, decoder: DecoderConfig) -> Result<Self> {
        if ccm.circuit().data_qubits() != code.n() || ccm.m() != code.h_z().rows() {
            return Err(Error::Shape("circuit matrix does not belong to this code".into()));
        }
        let logical_z = code.logical_z_basis();
        let decoders = TrialDecoders {
            circuit: BpOsdDecoder::new(ccm.matrix(), decoder)?,
            base: BpOsdDecoder::new(code.h_z(), decoder)?,
        };
        Ok(Self {
            code,
            ccm,
            logical_z,
            decoders,
        })
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn ccm(&self) -> &CircuitCheckMatrix {
        &self.ccm
    }

    pub fn logical_z(&self) -> &[Vec<u8>] {
        &self.logical_z
    }

    pub fn decoders(&self) -> TrialDecoders {
        self.decoders.clone()
    }

    pub fn point(&self, params: GkpParams) -> Result<PointContext> {
        let noise = NoiseModel::new(params)?;
        let uniform_llrs = init_llrs(LlrMode::Uniform, &self.ccm, &noise, None)?;
        let prior_llrs = init_llrs(LlrMode::Prior, &self.ccm, &noise, None)?;
        let base_llrs = vec![probability_to_llr(noise.prior(FaultKind::Idle)); self.code.n()];
        Ok(PointContext {
            noise,
            uniform_llrs,
            prior_llrs,
            base_llrs,
        })
    }

    /// Decodes one sample and checks the final residual against the logical
    /// operators of the outer code.
    pub fn run_trial(
        &self,
        sample: &FaultSample,
        mode: LlrMode,
        ctx: &PointContext,
        decoders: &mut TrialDecoders,
    ) -> Result<TrialOutcome> {
        let syndrome = self.ccm.syndrome(&sample.column_flips);
        let realtime;
        let llrs = match mode {
            LlrMode::Uniform => &ctx.uniform_llrs,
            LlrMode::Prior => &ctx.prior_llrs,
            LlrMode::RealTime => {
                realtime = init_llrs(mode, &self.ccm, &ctx.noise, Some(sample))?;
                &realtime
            }
        };
        let decoded = decoders.circuit.decode(&syndrome, llrs)?;
        let recovery = self.ccm.data_effect(&decoded.estimate);
        let residual: Vec<u8> = sample.data_error.iter().zip(&recovery).map(|(a, b)| a ^ b).collect();

        let h_z = self.code.h_z();
        let base_syndrome = h_z.mul_vec(&residual);
        let split: Vec<u8> = h_z
            .mul_vec(&sample.data_error)
            .iter()
            .zip(h_z.mul_vec(&recovery))
            .map(|(a, b)| a ^ b)
            .collect();
        assert_eq!(split, base_syndrome, "residual syndrome bookkeeping");

        let correction = decoders.base.decode(&base_syndrome, &ctx.base_llrs)?;
        let total: Vec<u8> = residual.iter().zip(&correction.estimate).map(|(a, b)| a ^ b).collect();
        Ok(TrialOutcome {
            success: !self.code.is_logical_x(&total, &self.logical_z),
            residual_weight: residual.iter().filter(|&&b| b == 1).count(),
            decoder_converged: decoded.converged,
        })
    }

    /// Samples and decodes trial `index` of the point keyed by `seed`.
    pub fn trial_at(
        &self,
        seed: [u8; 32],
        index: u64,
        mode: LlrMode,
        ctx: &PointContext,
        decoders: &mut TrialDecoders,
    ) -> Result<TrialOutcome> {
        let mut rng = trial_rng(seed, index);
        let sample = sample_faults(&self.ccm, &ctx.noise, &mut rng);
        self.run_trial(&sample, mode, ctx, decoders)
    }

    pub fn run_point(
        &self,
        squeezing_db: f64,
        mode: LlrMode,
        failure_target: u64,
        trial_cap: u64,
        master_seed: u64,
        execution: Execution,
    ) -> Result<FerEstimate> {
        let ctx = self.point(GkpParams::from_squeezing_db(squeezing_db)?)?;
        let seed = point_seed(master_seed, squeezing_db);
        run_until_failures(
            failure_target,
            trial_cap,
            execution,
            || self.decoders(),
            |dec, i| Ok(!self.trial_at(seed, i, mode, &ctx, dec)?.success),
        )
    }

    /// Every `(squeezing, mode)` pair of `config`, squeezing-major.
    pub fn run(&self, config: &ExperimentConfig, execution: Execution) -> Result<Vec<PointResult>> {
        config.validate()?;
        let mut out = Vec::with_capacity(config.squeezing_db.len() * config.modes.len());
        for &db in &config.squeezing_db {
            for &mode in &config.modes {
                let estimate =
                    self.run_point(db, mode, config.failure_target, config.trial_cap, config.seed, execution)?;
                out.push(PointResult {
                    code: config.code_name.clone(),
                    mode,
                    squeezing_db: db,
                    estimate,
                    seed: config.seed,
                });
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub code_name: String,
    pub squeezing_db: Vec<f64>,
    pub modes: Vec<LlrMode>,
    pub failure_target: u64,
    pub trial_cap: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.squeezing_db.is_empty() {
            return Err(Error::Config("squeezing grid is empty".into()));
        }
        if let Some(&bad) = self.squeezing_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSqueezing(bad));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("no decoding modes selected".into()));
        }
        if self.failure_target == 0 {
            return Err(Error::Config("failure target must be at least 1".into()));
        }
        if self.trial_cap == 0 {
            return Err(Error::Config("trial cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub code: String,
    pub mode: LlrMode,
    pub squeezing_db: f64,
    pub estimate: FerEstimate,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "code,mode,squeezing_db,trials,failures,fer,fer_lo,fer_hi,seed";

impl PointResult {
    pub fn csv_row(&self) -> String {
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{:e},{:e},{:e},{}",
            self.code,
            self.mode.name(),
            self.squeezing_db,
            e.trials,
            e.failures,
            e.fer,
            e.wilson_lo,
            e.wilson_hi,
            self.seed
        )
    }
}

pub fn format_csv(results: &[PointResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        writeln!(out, "{}", r.csv_row()).unwrap();
    }
    out
}
