//! BP-OSD decoding over sparse GF(2) check matrices.
//!
//! Belief propagation runs first; when its hard decision does not reproduce
//! the syndrome, ordered-statistics post-processing turns the BP posteriors
//! into a syndrome-consistent estimate.

mod bp;
mod osd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

pub use bp::{bp_decode, BpOutput, MSG_MAX};
pub use osd::{osd_postprocess, soft_weight};

/// Check-node update rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRule {
    /// Exact sum-product (`tanh`) rule.
    #[default]
    Tanh,
    MinSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub rule: CheckRule,
    pub max_iters: usize,
    pub osd_order: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            rule: CheckRule::Tanh,
            max_iters: 32,
            osd_order: 0,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.osd_order > 16 {
            return Err(Error::Config(format!("osd_order {} exceeds 16", self.osd_order)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Column indicator with `H · estimate = syndrome`.
    pub estimate: Vec<u8>,
    /// BP alone reproduced the syndrome.
    pub converged: bool,
    pub iterations_used: usize,
    pub posterior_llrs: Vec<f64>,
}

/// Tanner-graph adjacency in compressed form. Edges are numbered check-major.
#[derive(Clone, Debug)]
pub(crate) struct TannerGraph {
    pub rows: usize,
    pub cols: usize,
    pub check_ptr: Vec<usize>,
    pub edge_var: Vec<usize>,
    pub var_ptr: Vec<usize>,
    /// Edge ids grouped by variable.
    pub var_edges: Vec<usize>,
}

impl TannerGraph {
    pub fn new(h: &BinaryMatrix) -> Self {
        let mut check_ptr = Vec::with_capacity(h.rows() + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        check_ptr.push(0);
        for r in 0..h.rows() {
            edge_var.extend_from_slice(h.row(r));
            check_ptr.push(edge_var.len());
        }
        let mut var_ptr = vec![0usize; h.cols() + 1];
        for &v in &edge_var {
            var_ptr[v + 1] += 1;
        }
        for v in 0..h.cols() {
            var_ptr[v + 1] += var_ptr[v];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0usize; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        Self {
            rows: h.rows(),
            cols: h.cols(),
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
        }
    }

    pub fn syndrome_matches(&self, estimate: &[u8], syndrome: &[u8]) -> bool {
        (0..self.rows).all(|c| {
            let parity = self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ estimate[v]);
            parity == syndrome[c] & 1
        })
    }
}

/// Reusable BP-OSD decoder for one check matrix. Clone it per worker.
#[derive(Clone, Debug)]
pub struct BpOsdDecoder {
    h: BinaryMatrix,
    graph: TannerGraph,
    config: DecoderConfig,
    scratch: bp::Scratch,
}

impl BpOsdDecoder {
    pub fn new(h: &BinaryMatrix, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        let graph = TannerGraph::new(h);
        let scratch = bp::Scratch::new(&graph);
        Ok(Self {
            h: h.clone(),
            graph,
            config,
            scratch,
        })
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.h
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn decode(&mut self, syndrome: &[u8], llrs: &[f64]) -> Result<DecodeResult> {
        check_dims(&self.h, syndrome, llrs)?;
        let out = bp::run(&self.graph, &mut self.scratch, syndrome, llrs, self.config.max_iters, self.config.rule);
        let estimate = if out.converged {
            out.hard_decision
        } else {
            osd::solve(&self.h, syndrome, &out.posterior_llrs, self.config.osd_order)
        };
        Ok(DecodeResult {
            estimate,
            converged: out.converged,
            iterations_used: out.iterations,
            posterior_llrs: out.posterior_llrs,
        })
    }
}

pub(crate) fn check_dims(h: &BinaryMatrix, syndrome: &[u8], llrs: &[f64]) -> Result<()> {
    if syndrome.len() != h.rows() || llrs.len() != h.cols() {
        return Err(Error::Shape(format!(
            "decoder expects syndrome of length {} and {} LLRs, got {} and {}",
            h.rows(),
            h.cols(),
            syndrome.len(),
            llrs.len()
        )));
    }
    Ok(())
}
