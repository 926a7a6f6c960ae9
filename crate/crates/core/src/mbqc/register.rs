//! Lazily entangled graph-state register and the Pauli frame shared by the
//! local evaluator and the blind protocol.

use std::collections::HashMap;

use num_complex::Complex64;

use super::graph::BrickworkGraph;
use super::pattern::MeasurementPattern;
use crate::error::{Error, Result};
use crate::quantum::Statevector;

/// A site joins the register as its least significant qubit, then CZs are
/// applied towards `partners` (positions in the register after the push).
#[derive(Clone, Debug)]
pub(crate) struct Activation {
    pub site: usize,
    pub partners: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub site: usize,
    pub activate: Vec<Activation>,
    /// Register position of `site` when it is measured.
    pub pos: usize,
}

/// Activation and measurement plan in column-major order. Every neighbor
/// of a site joins before the site is measured, so each edge is applied
/// exactly once, when its later endpoint joins. The register never holds
/// more than about `n_rows + 2` qubits.
#[derive(Clone, Debug)]
pub(crate) struct Schedule {
    pub steps: Vec<Step>,
    #[allow(dead_code)]
    pub max_live: usize,
    #[allow(dead_code)]
    pub edges_applied: usize,
}

impl Schedule {
    pub fn new(graph: &BrickworkGraph) -> Self {
        let n = graph.n_sites();
        let mut joined = vec![false; n];
        let mut live: Vec<usize> = Vec::new();
        let mut steps = Vec::with_capacity(n);
        let mut max_live = 0;
        let mut edges_applied = 0;
        for site in 0..n {
            let mut activate = Vec::new();
            let mut want: Vec<usize> = vec![site];
            want.extend_from_slice(graph.neighbors(site));
            for s in want {
                if joined[s] {
                    continue;
                }
                joined[s] = true;
                live.push(s);
                let partners: Vec<usize> = graph
                    .neighbors(s)
                    .iter()
                    .filter_map(|nb| live.iter().position(|l| l == nb))
                    .collect();
                edges_applied += partners.len();
                activate.push(Activation { site: s, partners });
            }
            max_live = max_live.max(live.len());
            let pos = live.iter().position(|&l| l == site).expect("site joined before measurement");
            live.remove(pos);
            steps.push(Step { site, activate, pos });
        }
        Schedule {
            steps,
            max_live,
            edges_applied,
        }
    }
}

/// Runs the activations of `step`, drawing fresh qubits from `prepared`.
pub(crate) fn activate(state: &mut Statevector, step: &Step, prepared: impl Fn(usize) -> Statevector) -> Result<()> {
    for act in &step.activate {
        *state = state.push_qubit(&prepared(act.site))?;
        let new = state.n_qubits() - 1;
        for &p in &act.partners {
            state.cz(p, new);
        }
    }
    Ok(())
}

/// Outcome-to-site fan-out of the flow dependencies.
#[derive(Clone, Debug)]
pub(crate) struct Influence {
    pub x: Vec<Vec<usize>>,
    pub z: Vec<Vec<usize>>,
}

impl Influence {
    pub fn new(p: &MeasurementPattern) -> Self {
        let n = p.n_sites();
        let mut x = vec![Vec::new(); n];
        let mut z = vec![Vec::new(); n];
        for j in 0..n {
            for &d in p.x_deps(j) {
                x[d].push(j);
            }
            for &d in p.z_deps(j) {
                z[d].push(j);
            }
        }
        Influence { x, z }
    }
}

/// Pending `(s_x, s_z)` parities of not-yet-measured sites, kept sparse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub(crate) struct Frame(Vec<(usize, u8)>);

impl Frame {
    fn toggle(&mut self, site: usize, bit: u8) {
        match self.0.binary_search_by_key(&site, |e| e.0) {
            Ok(i) => {
                self.0[i].1 ^= bit;
                if self.0[i].1 == 0 {
                    self.0.remove(i);
                }
            }
            Err(i) => self.0.insert(i, (site, bit)),
        }
    }

    /// Folds outcome `s` of `site` into its dependents.
    pub fn record(&mut self, influence: &Influence, site: usize, s: u8) {
        if s & 1 == 1 {
            for &j in &influence.x[site] {
                self.toggle(j, 1);
            }
            for &j in &influence.z[site] {
                self.toggle(j, 2);
            }
        }
    }

    /// Removes and returns `(s_x, s_z)` for `site`.
    pub fn take(&mut self, site: usize) -> (u8, u8) {
        match self.0.binary_search_by_key(&site, |e| e.0) {
            Ok(i) => {
                let bits = self.0.remove(i).1;
                (bits & 1, (bits >> 1) & 1)
            }
            Err(_) => (0, 0),
        }
    }

    pub fn peek(&self, site: usize) -> (u8, u8) {
        match self.0.binary_search_by_key(&site, |e| e.0) {
            Ok(i) => (self.0[i].1 & 1, (self.0[i].1 >> 1) & 1),
            Err(_) => (0, 0),
        }
    }

    pub fn push_key(&self, key: &mut Vec<i64>) {
        key.push(self.0.len() as i64);
        for &(s, b) in &self.0 {
            key.push(((s as i64) << 2) | b as i64);
        }
    }
}

/// Appends a global-phase-free, quantized image of `state` to `key`.
pub(crate) fn push_state_key(state: &Statevector, key: &mut Vec<i64>) {
    const GRID: f64 = 1e9;
    let amps = state.amplitudes();
    let mut best = Complex64::new(0.0, 0.0);
    for a in amps {
        if a.norm_sqr() > best.norm_sqr() + 1e-12 {
            best = *a;
        }
    }
    let rot = if best.norm() > 0.0 {
        best.conj() / best.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    for a in amps {
        let b = a * rot;
        key.push((b.re * GRID).round() as i64);
        key.push((b.im * GRID).round() as i64);
    }
}

/// One branch of an exact evaluation.
pub(crate) trait BranchNode: Clone {
    fn done(&self) -> bool;
    fn probabilities(&self) -> Result<[f64; 2]>;
    fn advance(&mut self, outcome: u8) -> Result<()>;
    /// Equal keys imply identical futures.
    fn key(&self) -> Vec<i64>;
    fn output_index(&self) -> usize;
}

/// Branches below this conditional probability are dropped.
pub(crate) const PRUNE: f64 = 1e-14;

/// Sums all measurement branches, step by step, merging branches whose
/// futures coincide. Fails once more than `cap` branch nodes are expanded.
pub(crate) fn branch_sum<N: BranchNode>(root: N, n_outcomes: usize, cap: usize) -> Result<Vec<f64>> {
    let mut dist = vec![0.0; n_outcomes];
    let mut layer = vec![(1.0, root)];
    let mut explored = 0usize;
    while !layer.is_empty() {
        let mut next: Vec<(f64, N)> = Vec::new();
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        for (w, node) in layer {
            if node.done() {
                dist[node.output_index()] += w;
                continue;
            }
            let p = node.probabilities()?;
            for (o, &po) in p.iter().enumerate() {
                if po <= PRUNE {
                    continue;
                }
                explored += 1;
                if explored > cap {
                    return Err(Error::BranchCapExceeded(cap));
                }
                let mut child = node.clone();
                child.advance(o as u8)?;
                let wc = w * po;
                match index.entry(child.key()) {
                    std::collections::hash_map::Entry::Occupied(e) => next[*e.get()].0 += wc,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(next.len());
                        next.push((wc, child));
                    }
                }
            }
        }
        layer = next;
    }
    Ok(dist)
}
