//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::DenseSimulator;
use qldpc_gkp::code::repetition_code;
use qldpc_gkp::decoder::{osd_postprocess, soft_weight};
use qldpc_gkp::detector::{merge_probabilities, probability_to_llr};
use qldpc_gkp::experiment::{format_csv, FerEstimate, Z_95};
use qldpc_gkp::gkp::{
    is_logical_flip, posterior_flip_probability, prior_flip_probability, residue, sample_cnot_shifts, sample_shift,
    SQRT_PI,
};
use qldpc_gkp::io::CodeBundle;
use qldpc_gkp::{
    BinaryMatrix, BpOsdDecoder, CheckRule, CircuitCheckMatrix, DecoderConfig, Execution, ExperimentConfig,
    GkpParams, LlrMode, MemoryExperiment, MemoryCircuit, Basis, Schedules,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn bundle(name: &str) -> CodeBundle {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", "codes", name].iter().collect();
    CodeBundle::load(&dir).unwrap_or_else(|e| panic!("bundle {name}: {e}"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn build_timed(code: &str, schedule: &str) -> (CircuitCheckMatrix, Duration) {
    let b = bundle(code);
    let s = b.schedules(schedule).unwrap();
    let start = Instant::now();
    let ccm = CircuitCheckMatrix::build(&b.code, &s, 3, Execution::Auto).unwrap();
    (ccm, start.elapsed())
}

fn criterion_1() -> Outcome {
    let (bb, t_bb) = build_timed("bb144", "depth6");
    let (lp, t_lp) = build_timed("lp1054", "depth8");
    let detail = format!(
        "BB rows {} ({} columns, {:.1?}); LP rows {} ({} columns, {:.1?})",
        bb.rows(),
        bb.columns(),
        t_bb,
        lp.rows(),
        lp.columns(),
        t_lp
    );
    let limit = Duration::from_secs(60);
    check(bb.rows() == 216 && lp.rows() == 1395 && t_bb < limit && t_lp < limit, detail)
}

fn criterion_2() -> Outcome {
    let b = bundle("rep3");
    let mem = MemoryCircuit::new(&b.code, &b.schedules("serial").unwrap(), 1).unwrap();
    let r_z = mem.locations_per_round(Basis::Z);
    check(r_z == 27, format!("serialized repetition circuit has r_Z = {r_z}"))
}

/// `E[post(residue(x))²]` for `x ~ N(0, v)` by Simpson quadrature over the
/// shift, giving the population standard error of the posterior mean.
fn posterior_second_moment(v: f64) -> f64 {
    let sd = v.sqrt();
    let reach = 40.0 * sd + 2.0 * SQRT_PI;
    let steps = 400_000;
    let h = 2.0 * reach / steps as f64;
    let f = |x: f64| {
        let density = (-x * x / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
        density * posterior_flip_probability(residue(x), v).unwrap().powi(2)
    };
    let mut acc = f(-reach) + f(reach);
    for i in 1..steps {
        acc += f(-reach + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    let n = 10_000_000u64;
    for (i, v) in [0.01, 0.05, 0.1].into_iter().enumerate() {
        let prior = prior_flip_probability(v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let (mut hits, mut sum) = (0u64, 0.0f64);
        for _ in 0..n {
            let shift = sample_shift(v, &mut rng).unwrap();
            hits += u64::from(is_logical_flip(shift));
            sum += posterior_flip_probability(residue(shift), v).unwrap();
        }
        let freq = hits as f64 / n as f64;
        let se_freq = (prior * (1.0 - prior) / n as f64).sqrt();
        let mean = sum / n as f64;
        // population SE: the sample SE collapses when the prior is far below 1/n
        let se_post = ((posterior_second_moment(v) - prior * prior).max(0.0) / n as f64).sqrt();
        let prior_ok = (freq - prior).abs() <= 3.0 * se_freq;
        let total_ok = (mean - prior).abs() <= 3.0 * se_post;
        ok &= prior_ok && total_ok;
        notes.push(format!(
            "σ²={v}: prior {prior:.3e} vs freq {freq:.3e} ({:.1} SE), E[posterior] {mean:.3e} ({:.1} SE)",
            (freq - prior).abs() / se_freq.max(f64::MIN_POSITIVE),
            (mean - prior).abs() / se_post.max(f64::MIN_POSITIVE)
        ));
    }
    let half = [0.01, 0.05, 0.1, 1.0]
        .iter()
        .map(|&v| (posterior_flip_probability(SQRT_PI / 2.0, v).unwrap() - 0.5).abs())
        .fold(0.0, f64::max);
    ok &= half < 1e-9;
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    check(ok, format!("{}; |P(√π/2) − ½| ≤ {half:.1e}; {elapsed:.1?}", notes.join("; ")))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let s2 = 0.05;
    let params = GkpParams::from_variance(s2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 1_000_000;
    let mut q = [[0.0f64; 2]; 2];
    let mut p = [[0.0f64; 2]; 2];
    for _ in 0..n {
        let (qs, ps) = sample_cnot_shifts(&params, &mut rng);
        for (acc, pair) in [(&mut q, qs), (&mut p, ps)] {
            let v = [pair.eta_control, pair.eta_target];
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += v[i] * v[j] / n as f64;
                }
            }
        }
    }
    let q_ref = [[2.0, 1.0], [1.0, 3.0]];
    let p_ref = [[3.0, -1.0], [-1.0, 2.0]];
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((q[i][j] / (q_ref[i][j] * s2) - 1.0).abs());
            worst = worst.max((p[i][j] / (p_ref[i][j] * s2) - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst < 0.02 && elapsed < Duration::from_secs(60),
        format!("worst relative covariance error {:.3}% over {n} samples; {elapsed:.1?}", worst * 100.0),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.0, 1e-9, 1e-3, 0.1, 0.25, 0.4, 0.5] {
        worst = worst.max((merge_probabilities(&[p]) - p).abs());
        worst = worst.max((merge_probabilities(&[0.5, p]) - 0.5).abs());
        worst = worst.max((merge_probabilities(&[p, p]) - 2.0 * p * (1.0 - p)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..10_000 {
        let k = rng.random_range(1..10);
        let probs: Vec<f64> = (0..k).map(|_| rng.random_range(1e-9..1.0)).collect();
        let merged = probability_to_llr(merge_probabilities(&probs)).abs();
        let min = probs.iter().map(|&p| probability_to_llr(p).abs()).fold(f64::INFINITY, f64::min);
        if merged > min + 1e-9 {
            violations += 1;
        }
    }
    check(
        worst <= 1e-12 && violations == 0,
        format!("identity error {worst:.1e}; contraction violations {violations}/10000"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for t in 0..10_000 {
        let rows = rng.random_range(2..12);
        let cols = rng.random_range(rows..30);
        let dense: Vec<Vec<u8>> = (0..rows)
            .map(|_| (0..cols).map(|_| u8::from(rng.random_bool(0.3))).collect())
            .collect();
        let h = BinaryMatrix::from_dense(&dense).unwrap();
        let e: Vec<u8> = (0..cols).map(|_| u8::from(rng.random_bool(0.2))).collect();
        let s = h.mul_vec(&e);
        let llrs: Vec<f64> = (0..cols).map(|_| rng.random_range(-4.0..6.0)).collect();
        let cfg = DecoderConfig {
            rule: if t % 2 == 0 { CheckRule::Tanh } else { CheckRule::MinSum },
            max_iters: rng.random_range(1..40),
            osd_order: t % 5,
        };
        let out = BpOsdDecoder::new(&h, cfg).unwrap().decode(&s, &llrs).unwrap();
        if h.mul_vec(&out.estimate) != s {
            bad += 1;
        }
    }
    let mut worse = 0;
    for _ in 0..100 {
        let dense: Vec<Vec<u8>> = (0..8)
            .map(|_| (0..16).map(|_| u8::from(rng.random_bool(0.3))).collect())
            .collect();
        let h = BinaryMatrix::from_dense(&dense).unwrap();
        let e: Vec<u8> = (0..16).map(|_| u8::from(rng.random_bool(0.25))).collect();
        let s = h.mul_vec(&e);
        let post: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..6.0)).collect();
        let w0 = soft_weight(&osd_postprocess(&h, &s, &post, 0).unwrap(), &post);
        let w4 = soft_weight(&osd_postprocess(&h, &s, &post, 4).unwrap(), &post);
        if w4 > w0 + 1e-12 {
            worse += 1;
        }
    }
    check(
        bad == 0 && worse == 0,
        format!("syndrome violations {bad}/10000; order-4 worse than order-0 {worse}/100"),
    )
}

fn criterion_7() -> Outcome {
    let code = repetition_code(3);
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    for schedules in [Schedules::serial(&code), Schedules::greedy(&code)] {
        let ccm = CircuitCheckMatrix::build(&code, &schedules, 3, Execution::Sequential).unwrap();
        let sim = DenseSimulator {
            code: &code,
            schedules: &schedules,
            rounds: 3,
        };
        let locs = ccm.circuit().locations();
        let n = locs.len();
        let mut compare = |faults: &[usize]| {
            let mut flips = vec![0u8; n];
            for &f in faults {
                flips[f] ^= 1;
            }
            let cols = ccm.columns_from_locations(&flips);
            let dense = sim.run(&faults.iter().map(|&f| locs[f]).collect::<Vec<_>>());
            checked += 1;
            if ccm.syndrome(&cols) != dense.detectors || ccm.data_effect(&cols) != dense.data {
                mismatches += 1;
            }
        };
        for i in 0..n {
            compare(&[i]);
            for j in i + 1..n {
                compare(&[i, j]);
            }
        }
    }
    check(
        mismatches == 0,
        format!("{checked} single and double fault sets over serial and greedy schedules, {mismatches} mismatches"),
    )
}

struct ModeSet {
    uniform: FerEstimate,
    prior: FerEstimate,
    realtime: FerEstimate,
}

const DIRECTIONAL_DB: f64 = 10.0;
const DIRECTIONAL_TARGET: u64 = 1000;

fn modes_for(schedule: &str) -> ModeSet {
    let b = bundle("rep3");
    let s = b.schedules(schedule).unwrap();
    let ccm = CircuitCheckMatrix::build(&b.code, &s, 3, Execution::Auto).unwrap();
    let exp = MemoryExperiment::new(b.code, ccm, DecoderConfig::default()).unwrap();
    let run = |mode| {
        exp.run_point(DIRECTIONAL_DB, mode, DIRECTIONAL_TARGET, 10_000_000, 2024, Execution::Auto)
            .unwrap()
    };
    ModeSet {
        uniform: run(LlrMode::Uniform),
        prior: run(LlrMode::Prior),
        realtime: run(LlrMode::RealTime),
    }
}

/// Improvement factor Uniform/RealTime with a 95% interval from the
/// log-normal approximation `Var ln f̂ ≈ 1/failures`.
fn improvement(m: &ModeSet) -> (f64, f64, f64) {
    let ratio = m.uniform.fer / m.realtime.fer;
    let half = Z_95 * (1.0 / m.uniform.failures as f64 + 1.0 / m.realtime.failures as f64).sqrt();
    (ratio, ratio * (-half).exp(), ratio * half.exp())
}

fn fmt(e: &FerEstimate) -> String {
    format!("{:.3e} [{:.3e}, {:.3e}] ({}/{})", e.fer, e.wilson_lo, e.wilson_hi, e.failures, e.trials)
}

fn criterion_8(greedy: &ModeSet) -> Outcome {
    let (ratio, lo, _) = improvement(greedy);
    let ok = greedy.realtime.fer < greedy.prior.fer
        && greedy.prior.fer <= greedy.uniform.fer
        && !greedy.realtime.overlaps(&greedy.uniform)
        && ratio >= 3.0
        && [&greedy.uniform, &greedy.prior, &greedy.realtime].iter().all(|e| e.failures >= 100);
    check(
        ok,
        format!(
            "rep3 greedy at {DIRECTIONAL_DB} dB: uniform {}, prior {}, realtime {}; factor {ratio:.2} (95% lower {lo:.2})",
            fmt(&greedy.uniform),
            fmt(&greedy.prior),
            fmt(&greedy.realtime)
        ),
    )
}

fn criterion_9(greedy: &ModeSet, serial: &ModeSet) -> Outcome {
    let (g, g_lo, g_hi) = improvement(greedy);
    let (s, s_lo, s_hi) = improvement(serial);
    check(
        g_lo > s_hi,
        format!(
            "improvement factor greedy (depth {}) {g:.2} [{g_lo:.2}, {g_hi:.2}] vs serial (depth {}) {s:.2} [{s_lo:.2}, {s_hi:.2}]; serial uniform {}, realtime {}",
            bundle("rep3").schedules("greedy").unwrap().z.unwrap().depth(),
            bundle("rep3").schedules("serial").unwrap().z.unwrap().depth(),
            fmt(&serial.uniform),
            fmt(&serial.realtime)
        ),
    )
}

fn criterion_10() -> Outcome {
    let b = bundle("rep3");
    let s = b.schedules("greedy").unwrap();
    let ccm = CircuitCheckMatrix::build(&b.code, &s, 3, Execution::Sequential).unwrap();
    let exp = MemoryExperiment::new(b.code, ccm, DecoderConfig::default()).unwrap();
    let config = ExperimentConfig {
        code_name: "rep3".into(),
        squeezing_db: vec![8.0, 9.0, 10.0],
        modes: LlrMode::ALL.to_vec(),
        failure_target: 50,
        trial_cap: 1_000_000,
        seed: 99,
    };
    let mut csvs = Vec::new();
    for w in [1, 2, 8] {
        let results = exp
            .run(&config, Execution::with_workers(w))
            .map_err(|e| format!("{w} workers: {e}"))?;
        csvs.push(format_csv(&results));
    }
    let rerun = format_csv(&exp.run(&config, Execution::Sequential).unwrap());
    let same = csvs.iter().all(|c| c.as_bytes() == csvs[0].as_bytes()) && rerun == csvs[0];
    check(
        same,
        format!("{} CSV bytes, identical across 1, 2 and 8 workers and a rerun: {same}", csvs[0].len()),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS criterion {n}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL criterion {n}: {detail}");
        }
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    report(4, criterion_4());
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7());
    let greedy = modes_for("greedy");
    report(8, criterion_8(&greedy));
    let serial = modes_for("serial");
    report(9, criterion_9(&greedy, &serial));
    report(10, criterion_10());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
