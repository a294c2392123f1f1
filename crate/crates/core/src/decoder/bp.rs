//! Flooding belief propagation with syndrome-signed check nodes.

use super::{check_dims, CheckRule, TannerGraph};
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// Bound on every message; also the value sent by a degree-1 check.
pub const MSG_MAX: f64 = 50.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    pub posterior_llrs: Vec<f64>,
    pub hard_decision: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Scratch {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    tanh: Vec<f64>,
    suffix: Vec<f64>,
}

impl Scratch {
    pub fn new(g: &TannerGraph) -> Self {
        let e = g.edge_var.len();
        Self {
            v2c: vec![0.0; e],
            c2v: vec![0.0; e],
            tanh: vec![0.0; e],
            suffix: vec![0.0; e + 1],
        }
    }
}

/// One-shot BP on `h`.
pub fn bp_decode(
    h: &BinaryMatrix,
    syndrome: &[u8],
    llrs: &[f64],
    max_iters: usize,
    rule: CheckRule,
) -> Result<BpOutput> {
    check_dims(h, syndrome, llrs)?;
    if max_iters == 0 {
        return Err(Error::Config("max_iters must be at least 1".into()));
    }
    let g = TannerGraph::new(h);
    let mut scratch = Scratch::new(&g);
    Ok(run(&g, &mut scratch, syndrome, llrs, max_iters, rule))
}

#[inline]
fn atanh2(x: f64) -> f64 {
    // 2·atanh(x), saturating
    let v = ((1.0 + x) / (1.0 - x)).ln();
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-MSG_MAX, MSG_MAX)
    }
}

pub(crate) fn run(
    g: &TannerGraph,
    s: &mut Scratch,
    syndrome: &[u8],
    llrs: &[f64],
    max_iters: usize,
    rule: CheckRule,
) -> BpOutput {
    for (e, &v) in g.edge_var.iter().enumerate() {
        s.v2c[e] = llrs[v];
    }
    let mut posterior = llrs.to_vec();
    let mut hard = vec![0u8; g.cols];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=max_iters {
        iterations = it;
        for (c, &bit) in syndrome.iter().enumerate() {
            let (lo, hi) = (g.check_ptr[c], g.check_ptr[c + 1]);
            let sign = if bit & 1 == 1 { -1.0 } else { 1.0 };
            if hi - lo == 1 {
                s.c2v[lo] = sign * MSG_MAX;
                continue;
            }
            match rule {
                CheckRule::Tanh => {
                    for e in lo..hi {
                        s.tanh[e] = (0.5 * s.v2c[e]).tanh();
                    }
                    s.suffix[hi] = 1.0;
                    for e in (lo..hi).rev() {
                        s.suffix[e] = s.suffix[e + 1] * s.tanh[e];
                    }
                    let mut prefix = 1.0;
                    for e in lo..hi {
                        s.c2v[e] = atanh2(sign * prefix * s.suffix[e + 1]);
                        prefix *= s.tanh[e];
                    }
                }
                CheckRule::MinSum => {
                    let mut parity = sign;
                    let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, lo);
                    for e in lo..hi {
                        let m = s.v2c[e];
                        if m < 0.0 {
                            parity = -parity;
                        }
                        let a = m.abs();
                        if a < min1 {
                            min2 = min1;
                            min1 = a;
                            arg = e;
                        } else if a < min2 {
                            min2 = a;
                        }
                    }
                    for e in lo..hi {
                        let m = s.v2c[e];
                        let own = if m < 0.0 { -1.0 } else { 1.0 };
                        let mag = if e == arg { min2 } else { min1 };
                        s.c2v[e] = (parity * own * mag).clamp(-MSG_MAX, MSG_MAX);
                    }
                }
            }
        }
        for v in 0..g.cols {
            let edges = &g.var_edges[g.var_ptr[v]..g.var_ptr[v + 1]];
            let total = llrs[v] + edges.iter().map(|&e| s.c2v[e]).sum::<f64>();
            posterior[v] = total;
            for &e in edges {
                s.v2c[e] = total - s.c2v[e];
            }
            hard[v] = u8::from(total < 0.0);
        }
        if g.syndrome_matches(&hard, syndrome) {
            converged = true;
            break;
        }
    }
    BpOutput {
        posterior_llrs: posterior,
        hard_decision: hard,
        converged,
        iterations,
    }
}
