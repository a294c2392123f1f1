use proptest::prelude::*;
use qldpc_gkp::code::repetition_checks;
use qldpc_gkp::decoder::{bp_decode, osd_postprocess, soft_weight};
use qldpc_gkp::detector::init_llrs;
use qldpc_gkp::experiment::FaultSample;
use qldpc_gkp::{
    BinaryMatrix, BpOsdDecoder, CheckRule, CircuitCheckMatrix, DecoderConfig, Execution, GkpParams, LlrMode,
    NoiseModel, Schedules,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random matrix with every row and column of weight at least two.
fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BinaryMatrix {
    loop {
        let dense: Vec<Vec<u8>> = (0..rows)
            .map(|_| (0..cols).map(|_| u8::from(rng.random_bool(density))).collect())
            .collect();
        let row_ok = dense.iter().all(|r| r.iter().filter(|&&b| b == 1).count() >= 2);
        let col_ok = (0..cols).all(|c| dense.iter().filter(|r| r[c] == 1).count() >= 2);
        if row_ok && col_ok {
            return BinaryMatrix::from_dense(&dense).unwrap();
        }
    }
}

fn bits(v: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| (v >> i & 1) as u8).collect()
}

#[test]
fn zero_syndrome_with_confident_llrs() {
    let h = repetition_checks(5);
    let out = bp_decode(&h, &[0; 4], &[8.0; 5], 32, CheckRule::Tanh).unwrap();
    assert_eq!(out.hard_decision, vec![0; 5]);
    assert!(out.converged);
    assert_eq!(out.iterations, 1);
}

#[test]
fn repetition_single_check_matches_exhaustive_minimum() {
    let h = repetition_checks(3);
    for syndrome in [[1u8, 0], [0, 1], [1, 1]] {
        let candidates: Vec<Vec<u8>> = (0..8)
            .map(|v| bits(v, 3))
            .filter(|e| h.mul_vec(e) == syndrome)
            .collect();
        let min = candidates.iter().map(|e| e.iter().sum::<u8>()).min().unwrap();
        let minimal: Vec<_> = candidates.iter().filter(|e| e.iter().sum::<u8>() == min).collect();
        assert_eq!(minimal.len(), 1);
        for rule in [CheckRule::Tanh, CheckRule::MinSum] {
            let cfg = DecoderConfig { rule, ..Default::default() };
            let mut dec = BpOsdDecoder::new(&h, cfg).unwrap();
            let r = dec.decode(&syndrome, &[2.0; 3]).unwrap();
            assert_eq!(&r.estimate, minimal[0], "{syndrome:?}");
        }
    }
    // check 0 alone is explained by D0
    let mut dec = BpOsdDecoder::new(&h, DecoderConfig::default()).unwrap();
    assert_eq!(dec.decode(&[1, 0], &[2.0; 3]).unwrap().estimate, vec![1, 0, 0]);
}

#[test]
fn forced_single_column() {
    let h = BinaryMatrix::from_dense(&[vec![1]]).unwrap();
    for llr in [-30.0, -1.0, 0.0, 1.0, 30.0] {
        let mut dec = BpOsdDecoder::new(&h, DecoderConfig::default()).unwrap();
        assert_eq!(dec.decode(&[1], &[llr]).unwrap().estimate, vec![1]);
    }
}

#[test]
fn dimension_errors() {
    let h = repetition_checks(3);
    assert!(bp_decode(&h, &[0], &[1.0; 3], 5, CheckRule::Tanh).is_err());
    assert!(bp_decode(&h, &[0, 0], &[1.0; 2], 5, CheckRule::Tanh).is_err());
    assert!(bp_decode(&h, &[0, 0], &[1.0; 3], 0, CheckRule::Tanh).is_err());
    assert!(osd_postprocess(&h, &[0, 0, 0], &[1.0; 3], 0).is_err());
    let bad = DecoderConfig { max_iters: 0, ..Default::default() };
    assert!(BpOsdDecoder::new(&h, bad).is_err());
}

#[test]
fn osd_keeps_satisfying_hard_decision() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let h = random_matrix(&mut rng, 6, 12, 0.35);
        let post: Vec<f64> = (0..12).map(|_| rng.random_range(-4.0..4.0)).collect();
        let hard: Vec<u8> = post.iter().map(|&l| u8::from(l < 0.0)).collect();
        let s = h.mul_vec(&hard);
        for order in [0, 3] {
            assert_eq!(osd_postprocess(&h, &s, &post, order).unwrap(), hard);
        }
    }
}

#[test]
fn planted_single_faults_on_repetition_circuit() {
    let code = qldpc_gkp::code::repetition_code(3);
    let ccm = CircuitCheckMatrix::build(&code, &Schedules::serial(&code), 3, Execution::Sequential).unwrap();
    let noise = NoiseModel::new(GkpParams::from_squeezing_db(10.0).unwrap()).unwrap();
    let llrs = init_llrs(LlrMode::Prior, &ccm, &noise, None).unwrap();
    let cols = ccm.matrix().column_supports();
    let mut dec = BpOsdDecoder::new(ccm.matrix(), DecoderConfig::default()).unwrap();
    let mut tested = 0;
    for (c, support) in cols.iter().enumerate() {
        if support.is_empty() || cols.iter().filter(|&s| s == support).count() > 1 {
            continue;
        }
        let loc = ccm.column_groups()[c][0];
        let mut flips = vec![0u8; ccm.location_count()];
        flips[loc] = 1;
        let sample = FaultSample::from_location_flips(&ccm, flips, None).unwrap();
        let s = ccm.syndrome(&sample.column_flips);
        let r = dec.decode(&s, &llrs).unwrap();
        assert_eq!(ccm.matrix().mul_vec(&r.estimate), s);
        assert_eq!(ccm.data_effect(&r.estimate), sample.data_error, "column {c}");
        tested += 1;
    }
    assert!(tested > 10, "only {tested} columns have unique syndromes");
}

#[test]
fn higher_order_never_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let h = random_matrix(&mut rng, 8, 16, 0.3);
        let e: Vec<u8> = (0..16).map(|_| u8::from(rng.random_bool(0.25))).collect();
        let s = h.mul_vec(&e);
        let post: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..6.0)).collect();
        let e0 = osd_postprocess(&h, &s, &post, 0).unwrap();
        let e4 = osd_postprocess(&h, &s, &post, 4).unwrap();
        assert_eq!(h.mul_vec(&e0), s);
        assert_eq!(h.mul_vec(&e4), s);
        assert!(soft_weight(&e4, &post) <= soft_weight(&e0, &post) + 1e-12);
    }
}

#[test]
fn rules_agree_at_high_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let h = random_matrix(&mut rng, 10, 20, 0.25);
        let e: Vec<u8> = (0..20).map(|_| u8::from(rng.random_bool(0.05))).collect();
        let s = h.mul_vec(&e);
        let llrs: Vec<f64> = e
            .iter()
            .map(|&b| rng.random_range(5.0..10.0) * if b == 1 { -1.0 } else { 1.0 })
            .collect();
        let a = bp_decode(&h, &s, &llrs, 32, CheckRule::Tanh).unwrap();
        let b = bp_decode(&h, &s, &llrs, 32, CheckRule::MinSum).unwrap();
        assert_eq!(a.hard_decision, b.hard_decision);
        assert_eq!(a.hard_decision, e);
    }
}

#[test]
fn min_sum_scale_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let h = random_matrix(&mut rng, 8, 14, 0.3);
        let e: Vec<u8> = (0..14).map(|_| u8::from(rng.random_bool(0.2))).collect();
        let s = h.mul_vec(&e);
        let llrs: Vec<f64> = (0..14).map(|_| rng.random_range(-1.0..2.0)).collect();
        // few iterations keep messages far from the clamp, powers of two keep arithmetic exact
        let base = bp_decode(&h, &s, &llrs, 5, CheckRule::MinSum).unwrap();
        for scale in [0.25, 2.0, 4.0] {
            let scaled: Vec<f64> = llrs.iter().map(|l| l * scale).collect();
            let out = bp_decode(&h, &s, &scaled, 5, CheckRule::MinSum).unwrap();
            assert_eq!(out.hard_decision, base.hard_decision);
            assert_eq!(out.iterations, base.iterations);
        }
    }
}

#[test]
fn deterministic_across_threads() {
    let code = qldpc_gkp::code::repetition_code(5);
    let ccm = CircuitCheckMatrix::build(&code, &Schedules::greedy(&code), 5, Execution::Sequential).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let cases: Vec<(Vec<u8>, Vec<f64>)> = (0..50)
        .map(|_| {
            let e: Vec<u8> = (0..ccm.columns()).map(|_| u8::from(rng.random_bool(0.03))).collect();
            let llrs = (0..ccm.columns()).map(|_| rng.random_range(-1.0..6.0)).collect();
            (ccm.syndrome(&e), llrs)
        })
        .collect();
    let cfg = DecoderConfig { osd_order: 3, ..Default::default() };
    let run = || {
        let mut dec = BpOsdDecoder::new(ccm.matrix(), cfg).unwrap();
        cases.iter().map(|(s, l)| dec.decode(s, l).unwrap()).collect::<Vec<_>>()
    };
    let reference = run();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4).map(|_| scope.spawn(run)).collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_always_satisfies_syndrome(
        seed in any::<u64>(),
        order in 0usize..5,
        min_sum in any::<bool>(),
        iters in 1usize..20,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = rng.random_range(2..10);
        let cols = rng.random_range(rows..24);
        let dense: Vec<Vec<u8>> = (0..rows)
            .map(|_| (0..cols).map(|_| u8::from(rng.random_bool(0.3))).collect())
            .collect();
        let h = BinaryMatrix::from_dense(&dense).unwrap();
        let e: Vec<u8> = (0..cols).map(|_| u8::from(rng.random_bool(0.3))).collect();
        let s = h.mul_vec(&e);
        let llrs: Vec<f64> = (0..cols).map(|_| rng.random_range(-5.0..5.0)).collect();
        let rule = if min_sum { CheckRule::MinSum } else { CheckRule::Tanh };
        let mut dec = BpOsdDecoder::new(&h, DecoderConfig { rule, max_iters: iters, osd_order: order }).unwrap();
        let r = dec.decode(&s, &llrs).unwrap();
        prop_assert_eq!(h.mul_vec(&r.estimate), s);
        prop_assert!(r.iterations_used <= iters);
        prop_assert_eq!(r.posterior_llrs.len(), cols);
    }
}
