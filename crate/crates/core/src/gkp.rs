//! Finitely squeezed GKP noise in the shift-error picture.
//!
//! Every fault location of the outer circuit runs one round of teleportation
//! based GKP error correction. Its finite squeezing shows up as Gaussian shifts
//! whose variance depends on the mechanism (idle, preparation, measurement,
//! CNOT). A shift is a logical flip when it lands closer to an odd multiple of
//! `√π` than to an even one; the measured shift modulo `√π` is the analog soft
//! information used by the real-time decoder.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `√π`, the GKP lattice spacing.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Minimum lattice-sum half width for the 1D prior and posterior sums.
pub const LATTICE_TERMS: i64 = 8;

/// Half width of the 2D candidate window used for CNOT pairs.
pub const PAIR_WINDOW: i64 = 5;

/// Squeezing level and the derived base shift variance `σ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GkpParams {
    squeezing_db: f64,
    base_variance: f64,
}

impl GkpParams {
    pub fn from_squeezing_db(squeezing_db: f64) -> Result<Self> {
        if !squeezing_db.is_finite() {
            return Err(Error::InvalidSqueezing(squeezing_db));
        }
        Ok(Self {
            squeezing_db,
            base_variance: squeezing_db_to_variance(squeezing_db),
        })
    }

    pub fn from_variance(base_variance: f64) -> Result<Self> {
        check_variance(base_variance)?;
        Ok(Self {
            squeezing_db: variance_to_squeezing_db(base_variance),
            base_variance,
        })
    }

    pub fn squeezing_db(&self) -> f64 {
        self.squeezing_db
    }

    /// `σ²` of a single prior or posterior GKP shift.
    pub fn base_variance(&self) -> f64 {
        self.base_variance
    }
}

/// `σ² = 10^(−dB/10) / 2`.
pub fn squeezing_db_to_variance(squeezing_db: f64) -> f64 {
    10f64.powf(-squeezing_db / 10.0) / 2.0
}

/// Inverse of [`squeezing_db_to_variance`].
pub fn variance_to_squeezing_db(variance: f64) -> f64 {
    10.0 * (1.0 / (2.0 * variance)).log10()
}

fn check_variance(variance: f64) -> Result<()> {
    if variance > 0.0 && variance.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidVariance(variance))
    }
}

/// The five fault types of the syndrome circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaultKind {
    Idle,
    Prepare,
    Measure,
    CnotControl,
    CnotTarget,
}

impl FaultKind {
    pub const ALL: [FaultKind; 5] = [
        FaultKind::Idle,
        FaultKind::Prepare,
        FaultKind::Measure,
        FaultKind::CnotControl,
        FaultKind::CnotTarget,
    ];

    /// Variance of the effective q-shift at a location of this kind.
    ///
    /// Idle and preparation see a prior plus a posterior (or squeezed-state)
    /// shift, measurement only the last posterior shift. CNOT legs report the
    /// marginal of the correlated pair: `2σ²` on the control, `3σ²` on the
    /// target.
    pub fn effective_variance(self, params: &GkpParams) -> f64 {
        let s2 = params.base_variance();
        match self {
            FaultKind::Idle | FaultKind::Prepare | FaultKind::CnotControl => 2.0 * s2,
            FaultKind::Measure => s2,
            FaultKind::CnotTarget => 3.0 * s2,
        }
    }

    pub fn is_cnot(self) -> bool {
        matches!(self, FaultKind::CnotControl | FaultKind::CnotTarget)
    }

    pub fn name(self) -> &'static str {
        match self {
            FaultKind::Idle => "idle",
            FaultKind::Prepare => "prepare",
            FaultKind::Measure => "measure",
            FaultKind::CnotControl => "cnot_control",
            FaultKind::CnotTarget => "cnot_target",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    Q,
    P,
}

/// Effective shifts on the control and target of one CNOT.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairShift {
    pub eta_control: f64,
    pub eta_target: f64,
    pub quadrature: Quadrature,
}

/// Lattice coset of a decoded pair: the logical flips on control and target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct PairClass {
    pub parity_control: u8,
    pub parity_target: u8,
}

impl PairClass {
    pub fn from_index(i: usize) -> Self {
        Self {
            parity_control: (i >> 1) as u8 & 1,
            parity_target: i as u8 & 1,
        }
    }

    /// Position in the 4-vectors returned by [`pair_posterior`].
    pub fn index(self) -> usize {
        ((self.parity_control as usize) << 1) | self.parity_target as usize
    }
}

/// Zero-mean bivariate Gaussian on a (control, target) shift pair, stored as
/// `½ Σ⁻¹` so that `exponent(x, y)` is the quadratic form in the density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCovariance {
    half_precision: [[f64; 2]; 2],
    det: f64,
}

impl PairCovariance {
    pub fn from_matrix(cov: [[f64; 2]; 2]) -> Result<Self> {
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if !(det > 0.0 && cov[0][0] > 0.0) || cov[0][1] != cov[1][0] {
            return Err(Error::Config(format!(
                "covariance {cov:?} is not symmetric positive definite"
            )));
        }
        let h = 0.5 / det;
        Ok(Self {
            half_precision: [
                [h * cov[1][1], -h * cov[0][1]],
                [-h * cov[1][0], h * cov[0][0]],
            ],
            det,
        })
    }

    /// Covariance of the CNOT effective shifts: `σ²[[2,1],[1,3]]` for the
    /// q-pair and `σ²[[3,−1],[−1,2]]` for the p-pair.
    pub fn cnot(quadrature: Quadrature, params: &GkpParams) -> Self {
        let s2 = params.base_variance();
        let cov = match quadrature {
            Quadrature::Q => [[2.0 * s2, s2], [s2, 3.0 * s2]],
            Quadrature::P => [[3.0 * s2, -s2], [-s2, 2.0 * s2]],
        };
        Self::from_matrix(cov).expect("CNOT covariance is positive definite")
    }

    pub fn diagonal(var_control: f64, var_target: f64) -> Result<Self> {
        check_variance(var_control)?;
        check_variance(var_target)?;
        Self::from_matrix([[var_control, 0.0], [0.0, var_target]])
    }

    #[inline]
    pub fn exponent(&self, x: f64, y: f64) -> f64 {
        let h = &self.half_precision;
        h[0][0] * x * x + (h[0][1] + h[1][0]) * x * y + h[1][1] * y * y
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        (-self.exponent(x, y)).exp() / (2.0 * PI * self.det.sqrt())
    }
}

/// Draws a zero-mean Gaussian shift with the given variance.
pub fn sample_shift<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Result<f64> {
    check_variance(variance)?;
    Ok(draw(variance.sqrt(), rng))
}

#[inline]
pub(crate) fn draw<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

/// True when the shift decodes to an odd lattice point, i.e.
/// `shift mod 2√π ∈ [√π/2, 3√π/2)`.
pub fn is_logical_flip(shift: f64) -> bool {
    let m = shift.rem_euclid(2.0 * SQRT_PI);
    (0.5 * SQRT_PI..1.5 * SQRT_PI).contains(&m)
}

/// Maps a shift to its residue in the canonical window `[0, √π)`.
pub fn residue(shift: f64) -> f64 {
    let r = shift.rem_euclid(SQRT_PI);
    // rem_euclid can round up to exactly the modulus
    if r >= SQRT_PI {
        0.0
    } else {
        r
    }
}

fn lattice_half_width(variance: f64) -> i64 {
    let reach = (10.0 * variance.sqrt() / SQRT_PI).ceil() as i64 + 1;
    reach.max(LATTICE_TERMS)
}

/// `P(a + b)` for the standard normal, computed from tails to keep precision.
fn normal_mass(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if a >= 0.0 {
        0.5 * (libm::erfc(a * s) - libm::erfc(b * s))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b * s) - libm::erfc(-a * s))
    } else {
        1.0 - 0.5 * (libm::erfc(-a * s) + libm::erfc(b * s))
    }
}

/// Probability that a shift of the given variance is a logical flip: the
/// Gaussian mass on `[(4n+1)√π/2, (4n+3)√π/2]` summed over `n`.
pub fn prior_flip_probability(variance: f64) -> Result<f64> {
    check_variance(variance)?;
    let sigma = variance.sqrt();
    let k = lattice_half_width(variance);
    let half = 0.5 * SQRT_PI / sigma;
    let mut total = 0.0;
    for n in -k..=k {
        let a = (4 * n + 1) as f64 * half;
        let b = (4 * n + 3) as f64 * half;
        total += normal_mass(a, b);
    }
    Ok(total)
}

/// Probability that the nearest-point GKP correction was a logical flip,
/// given the measured residue of the shift.
///
/// The residue is first folded to its distance `d ∈ [0, √π/2]` from the
/// nearest lattice point, then the ratio of odd-translate to all-translate
/// Gaussian sums is evaluated at `d`.
pub fn posterior_flip_probability(residue_value: f64, variance: f64) -> Result<f64> {
    check_variance(variance)?;
    let r = residue(residue_value);
    let d = r.min(SQRT_PI - r);
    let k = lattice_half_width(variance);
    let inv = 0.5 / variance;
    // exponents relative to the k = 0 term, which dominates for d ≤ √π/2
    let base = d * d * inv;
    let (mut odd, mut all) = (0.0, 0.0);
    for j in -k..=k + 1 {
        let x = d - j as f64 * SQRT_PI;
        let w = (base - x * x * inv).exp();
        all += w;
        if j.rem_euclid(2) == 1 {
            odd += w;
        }
    }
    Ok(odd / all)
}

/// Draws the eight independent CNOT shifts and combines them into the
/// effective (q-pair, p-pair) shifts on control and target.
pub fn sample_cnot_shifts<R: Rng + ?Sized>(params: &GkpParams, rng: &mut R) -> (PairShift, PairShift) {
    let s = params.base_variance().sqrt();
    let nu_qc = draw(s, rng);
    let nu_qt = draw(s, rng);
    let nu_pc = draw(s, rng);
    let nu_pt = draw(s, rng);
    let mu_qc = draw(s, rng);
    let mu_qt = draw(s, rng);
    let mu_pc = draw(s, rng);
    let mu_pt = draw(s, rng);
    let q = PairShift {
        eta_control: nu_qc + mu_qc,
        eta_target: nu_qt + nu_qc + mu_qt,
        quadrature: Quadrature::Q,
    };
    let p = PairShift {
        eta_control: nu_pc - nu_pt + mu_pc,
        eta_target: nu_pt + mu_pt,
        quadrature: Quadrature::P,
    };
    (q, p)
}

/// Only the q-pair of [`sample_cnot_shifts`]; X faults need nothing else.
pub fn sample_cnot_q_pair<R: Rng + ?Sized>(params: &GkpParams, rng: &mut R) -> PairShift {
    let s = params.base_variance().sqrt();
    let nu_c = draw(s, rng);
    let nu_t = draw(s, rng);
    let mu_c = draw(s, rng);
    let mu_t = draw(s, rng);
    PairShift {
        eta_control: nu_c + mu_c,
        eta_target: nu_t + nu_c + mu_t,
        quadrature: Quadrature::Q,
    }
}

/// Maximum-likelihood lattice point for a shift pair, as integer offsets
/// `(a, b)` in units of `√π` relative to the given coordinates.
fn nearest_lattice_point(cov: &PairCovariance, x: f64, y: f64) -> (i64, i64) {
    let mut best = (0, 0);
    let mut best_e = f64::INFINITY;
    for a in -PAIR_WINDOW..=PAIR_WINDOW {
        let dx = x - a as f64 * SQRT_PI;
        for b in -PAIR_WINDOW..=PAIR_WINDOW {
            let e = cov.exponent(dx, y - b as f64 * SQRT_PI);
            if e < best_e {
                best_e = e;
                best = (a, b);
            }
        }
    }
    best
}

/// Reduces modulo `2√π` into `[−√π, √π)`, preserving the lattice parity.
fn reduce_pair_coordinate(v: f64) -> f64 {
    (v + SQRT_PI).rem_euclid(2.0 * SQRT_PI) - SQRT_PI
}

/// Lattice coset of the most likely lattice point under a given covariance.
pub fn classify_with(cov: &PairCovariance, eta_control: f64, eta_target: f64) -> PairClass {
    let (a, b) = nearest_lattice_point(
        cov,
        reduce_pair_coordinate(eta_control),
        reduce_pair_coordinate(eta_target),
    );
    PairClass {
        parity_control: a.rem_euclid(2) as u8,
        parity_target: b.rem_euclid(2) as u8,
    }
}

/// Decodes a correlated CNOT shift pair to the nearest lattice point under the
/// joint Gaussian of its quadrature and reports the logical flips.
pub fn classify_pair_shift(pair: &PairShift, params: &GkpParams) -> PairClass {
    let cov = PairCovariance::cnot(pair.quadrature, params);
    classify_with(&cov, pair.eta_control, pair.eta_target)
}

/// Class probabilities `[P(0,0), P(0,1), P(1,0), P(1,1)]` (indexed by
/// [`PairClass::index`]) given the measured residues of a CNOT pair.
///
/// Classes are counted relative to the lattice point the pair decoder picks,
/// so `P(0,0)` is the probability that the joint correction was right.
pub fn pair_posterior(
    residue_control: f64,
    residue_target: f64,
    quadrature: Quadrature,
    params: &GkpParams,
) -> [f64; 4] {
    let cov = PairCovariance::cnot(quadrature, params);
    pair_posterior_with(&cov, residue(residue_control), residue(residue_target))
}

pub(crate) fn pair_posterior_with(cov: &PairCovariance, rc: f64, rt: f64) -> [f64; 4] {
    let masses = pair_class_masses(cov, rc, rt);
    let total: f64 = masses.iter().sum();
    masses.map(|m| m / total)
}

/// Unnormalised class masses, scaled by `exp(E_min)` of the decoded point.
fn pair_class_masses(cov: &PairCovariance, rc: f64, rt: f64) -> [f64; 4] {
    let (ua, ub) = nearest_lattice_point(cov, rc, rt);
    let xc = rc - ua as f64 * SQRT_PI;
    let yc = rt - ub as f64 * SQRT_PI;
    let e0 = cov.exponent(xc, yc);
    let mut masses = [0.0; 4];
    for a in -PAIR_WINDOW..=PAIR_WINDOW {
        let dx = xc + a as f64 * SQRT_PI;
        for b in -PAIR_WINDOW..=PAIR_WINDOW {
            let w = (e0 - cov.exponent(dx, yc + b as f64 * SQRT_PI)).exp();
            let class = ((a.rem_euclid(2) as usize) << 1) | b.rem_euclid(2) as usize;
            masses[class] += w;
        }
    }
    masses
}

/// Grid resolution per axis for [`pair_flip_marginals`].
pub const PAIR_PRIOR_GRID: usize = 400;

/// Prior flip probabilities `(control, target)` of a CNOT pair under joint
/// nearest-lattice-point decoding.
///
/// Integrates the class posterior against the periodised joint density over
/// the residue cell `[0, √π)²` with a midpoint rule.
pub fn pair_flip_marginals(quadrature: Quadrature, params: &GkpParams) -> (f64, f64) {
    pair_flip_marginals_on_grid(quadrature, params, PAIR_PRIOR_GRID)
}

pub fn pair_flip_marginals_on_grid(
    quadrature: Quadrature,
    params: &GkpParams,
    grid: usize,
) -> (f64, f64) {
    let cov = PairCovariance::cnot(quadrature, params);
    let h = SQRT_PI / grid as f64;
    let mut class_mass = [0.0f64; 4];
    for i in 0..grid {
        let rc = (i as f64 + 0.5) * h;
        for j in 0..grid {
            let rt = (j as f64 + 0.5) * h;
            let (ua, ub) = nearest_lattice_point(&cov, rc, rt);
            let e0 = cov.exponent(rc - ua as f64 * SQRT_PI, rt - ub as f64 * SQRT_PI);
            let scale = (-e0).exp();
            if scale == 0.0 {
                continue;
            }
            let m = pair_class_masses(&cov, rc, rt);
            for (acc, v) in class_mass.iter_mut().zip(m) {
                *acc += v * scale;
            }
        }
    }
    let total: f64 = class_mass.iter().sum();
    let control = (class_mass[2] + class_mass[3]) / total;
    let target = (class_mass[1] + class_mass[3]) / total;
    (control, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn squeezing_conversion() {
        assert!((squeezing_db_to_variance(0.0) - 0.5).abs() < 1e-15);
        assert!((squeezing_db_to_variance(10.0) - 0.05).abs() < 1e-15);
        assert!((squeezing_db_to_variance(3.0103) - 0.25).abs() < 1e-4);
        for db in [-3.0, 0.0, 4.5, 10.0, 12.7, 20.0] {
            let p = GkpParams::from_squeezing_db(db).unwrap();
            assert!(p.base_variance() > 0.0);
            let back = variance_to_squeezing_db(p.base_variance());
            assert!(((back - db) / db.abs().max(1.0)).abs() < 1e-12);
        }
        assert!(GkpParams::from_squeezing_db(f64::NAN).is_err());
    }

    #[test]
    fn mechanism_variances() {
        let p = GkpParams::from_variance(0.05).unwrap();
        assert_eq!(FaultKind::Idle.effective_variance(&p), 0.1);
        assert_eq!(FaultKind::Prepare.effective_variance(&p), 0.1);
        assert_eq!(FaultKind::Measure.effective_variance(&p), 0.05);
        assert!((FaultKind::CnotTarget.effective_variance(&p) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn sample_shift_is_deterministic_and_validated() {
        let a = sample_shift(0.05, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_shift(0.05, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(sample_shift(0.0, &mut rng).is_err());
        assert!(sample_shift(-1.0, &mut rng).is_err());
    }

    #[test]
    fn sample_shift_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let v = 0.05;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_shift(v, &mut rng).unwrap();
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 * (v / n as f64).sqrt(), "mean {mean}");
        assert!(((var - v) / v).abs() < 0.01, "var {var}");
    }

    #[test]
    fn flip_region() {
        assert!(!is_logical_flip(0.0));
        assert!(is_logical_flip(SQRT_PI));
        assert!(!is_logical_flip(2.0 * SQRT_PI));
        assert!(is_logical_flip(-SQRT_PI));
        assert!(is_logical_flip(0.5 * SQRT_PI));
        assert!(!is_logical_flip(0.49 * SQRT_PI));
        assert!(!is_logical_flip(-0.49 * SQRT_PI));
        assert!(is_logical_flip(-0.51 * SQRT_PI));
        assert!(!is_logical_flip(1.5 * SQRT_PI));
    }

    #[test]
    fn prior_limits_and_monotonicity() {
        assert!(prior_flip_probability(1e-4).unwrap() < 1e-300);
        assert!((prior_flip_probability(50.0).unwrap() - 0.5).abs() < 1e-6);
        assert!(prior_flip_probability(0.0).is_err());
        let mut last = 0.0;
        for i in 0..100 {
            let v = 0.004 * 1.06f64.powi(i);
            let p = prior_flip_probability(v).unwrap();
            assert!(p > 0.0 && p < 0.5, "v={v} p={p}");
            assert!(p > last, "not increasing at v={v}");
            last = p;
        }
    }

    #[test]
    fn posterior_examples() {
        let v = 0.05;
        let p0 = posterior_flip_probability(0.0, v).unwrap();
        assert!(p0 > 0.0 && p0 < 0.01);
        assert!(p0 < prior_flip_probability(v).unwrap());
        for v in [0.01, 0.05, 0.1, 0.3, 1.0, 5.0] {
            let half = posterior_flip_probability(0.5 * SQRT_PI, v).unwrap();
            assert!((half - 0.5).abs() < 1e-9);
        }
        for r in [0.05, 0.3, 0.7, 0.88] {
            let a = posterior_flip_probability(r, 0.08).unwrap();
            let b = posterior_flip_probability(SQRT_PI - r, 0.08).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        assert!(posterior_flip_probability(0.1, -1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let p = GkpParams::from_variance(0.05).unwrap();
        let q = |c, t| PairShift {
            eta_control: c,
            eta_target: t,
            quadrature: Quadrature::Q,
        };
        assert_eq!(classify_pair_shift(&q(0.0, 0.0), &p), PairClass::default());
        assert_eq!(
            classify_pair_shift(&q(SQRT_PI, 0.0), &p),
            PairClass {
                parity_control: 1,
                parity_target: 0
            }
        );
        assert_eq!(
            classify_pair_shift(&q(2.0 * SQRT_PI, 2.0 * SQRT_PI), &p),
            PairClass::default()
        );
    }

    #[test]
    fn pair_posterior_examples() {
        let p = GkpParams::from_variance(0.05).unwrap();
        let post = pair_posterior(0.0, 0.0, Quadrature::Q, &p);
        assert!(post[0] > 0.99);
        let a = pair_posterior(0.3, 1.1, Quadrature::P, &p);
        let b = pair_posterior(SQRT_PI - 0.3, SQRT_PI - 1.1, Quadrature::P, &p);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        let h = 0.5 * SQRT_PI;
        let c = pair_posterior(h, h, Quadrature::Q, &p);
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pair_class_index_round_trip() {
        for i in 0..4 {
            assert_eq!(PairClass::from_index(i).index(), i);
        }
    }

    #[test]
    fn pair_marginals_grid_converged() {
        let p = GkpParams::from_variance(0.05).unwrap();
        let coarse = pair_flip_marginals_on_grid(Quadrature::Q, &p, 200);
        let fine = pair_flip_marginals(Quadrature::Q, &p);
        assert!(((coarse.0 - fine.0) / fine.0).abs() < 2e-3, "{coarse:?} {fine:?}");
        assert!(((coarse.1 - fine.1) / fine.1).abs() < 2e-3, "{coarse:?} {fine:?}");
        // joint decoding beats independent decoding of each leg
        assert!(fine.0 < prior_flip_probability(0.1).unwrap());
        assert!(fine.1 < prior_flip_probability(0.15).unwrap());
    }
}
