//! Ordered-statistics post-processing.
//!
//! Columns are visited from most likely flipped (lowest signed posterior LLR)
//! to least likely, ties by index. Gaussian elimination in that order picks
//! the information set; OSD-0 solves for it with every other bit at zero.
//! Order `w` additionally tries all patterns on the first `w` non-pivot
//! columns and keeps the lowest soft weight. A hard decision that already
//! satisfies the syndrome is returned unchanged.

use super::check_dims;
use crate::error::Result;
use crate::gf2::{BinaryMatrix, BitMatrix};

/// `Σ_{e_j = 1} L_j`: the negative log-likelihood of `estimate` up to a constant.
pub fn soft_weight(estimate: &[u8], llrs: &[f64]) -> f64 {
    estimate.iter().zip(llrs).filter(|(&e, _)| e & 1 == 1).map(|(_, &l)| l).sum()
}

/// Syndrome-consistent estimate from posterior LLRs. The syndrome must lie in
/// the column space of `h`.
pub fn osd_postprocess(h: &BinaryMatrix, syndrome: &[u8], posterior_llrs: &[f64], order: usize) -> Result<Vec<u8>> {
    check_dims(h, syndrome, posterior_llrs)?;
    Ok(solve(h, syndrome, posterior_llrs, order))
}

pub(crate) fn solve(h: &BinaryMatrix, syndrome: &[u8], llrs: &[f64], order: usize) -> Vec<u8> {
    let cols = h.cols();
    let hard: Vec<u8> = llrs.iter().map(|&l| u8::from(l < 0.0)).collect();
    if h.mul_vec(&hard).iter().zip(syndrome).all(|(a, b)| a == &(b & 1)) {
        return hard;
    }
    let mut perm: Vec<usize> = (0..cols).collect();
    perm.sort_by(|&a, &b| llrs[a].total_cmp(&llrs[b]).then(a.cmp(&b)));

    let mut m = BitMatrix::zeros(h.rows(), cols + 1);
    for (r, c) in h.entries() {
        m.set(r, c, true);
    }
    for (r, &s) in syndrome.iter().enumerate() {
        if s & 1 == 1 {
            m.set(r, cols, true);
        }
    }
    let pivots = m.reduce_in_order(perm.iter().copied());
    debug_assert!(
        (pivots.len()..h.rows()).all(|r| !m.get(r, cols)),
        "syndrome outside the column space"
    );

    let mut estimate = vec![0u8; cols];
    for (row, &p) in pivots.iter().enumerate() {
        estimate[p] = u8::from(m.get(row, cols));
    }
    if order == 0 {
        return estimate;
    }

    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = perm.iter().copied().filter(|&c| !is_pivot[c]).take(order).collect();
    if free.is_empty() {
        return estimate;
    }

    let base_rows: Vec<bool> = (0..pivots.len()).map(|r| m.get(r, cols)).collect();
    let mut best = estimate.clone();
    let mut best_weight = soft_weight(&estimate, llrs);
    let mut rows = base_rows.clone();
    for pattern in 1u32..(1 << free.len()) {
        rows.copy_from_slice(&base_rows);
        let mut weight = 0.0;
        for (k, &c) in free.iter().enumerate() {
            if pattern >> k & 1 == 1 {
                weight += llrs[c];
                for (r, bit) in rows.iter_mut().enumerate() {
                    *bit ^= m.get(r, c);
                }
            }
        }
        weight += pivots.iter().zip(&rows).filter(|(_, &b)| b).map(|(&p, _)| llrs[p]).sum::<f64>();
        if weight < best_weight {
            best_weight = weight;
            best.fill(0);
            for (k, &c) in free.iter().enumerate() {
                if pattern >> k & 1 == 1 {
                    best[c] = 1;
                }
            }
            for (&p, &b) in pivots.iter().zip(&rows) {
                best[p] = u8::from(b);
            }
        }
    }
    best
}
