//! Measurement patterns and their text form.
//!
//! Text format, one record per line, `#` starts a comment:
//!
//! ```text
//! qfl-pattern v1
//! rows <n_rows>
//! bricks <n_bricks>
//! site <x> <y> <phi> x=<deps> z=<deps>
//! output <x> <y>
//! ```
//!
//! `<deps>` is a comma-separated list of `x:y` sites, or `-` when empty.
//! `phi` is printed with the shortest representation that round-trips.
//! Sites appear in measurement order. The graph is the brickwork graph of
//! the given size.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::graph::{build_brickwork, BrickworkGraph, Site};
use crate::error::{Error, Result};
use crate::quantum::Circuit;

/// Gate realized by one brick.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BrickKind {
    /// Two independent `RZ(γ)·RX(β)·RZ(α)` rotations, given as `(α, β, γ)`.
    SingleQubitPair { top: (f64, f64, f64), bottom: (f64, f64, f64) },
    /// Fixed-angle CNOT.
    Cnot { control_top: bool },
    /// Rotation on a row with no partner in this brick column.
    Single { euler: (f64, f64, f64) },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Brick {
    pub top_row: usize,
    pub bottom_row: usize,
    pub start_col: usize,
    pub kind: BrickKind,
}

/// `(−1)^{s_x}·φ + s_z·π`, reduced into `[0, 2π)`.
pub fn adapt_angle(phi: f64, s_x: u8, s_z: u8) -> f64 {
    let mut a = if s_x & 1 == 1 { -phi } else { phi };
    if s_z & 1 == 1 {
        a += PI;
    }
    reduce_angle(a)
}

/// `a mod 2π` in `[0, 2π)`.
pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Brickwork measurement pattern with flow corrections.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPattern {
    pub(crate) graph: BrickworkGraph,
    pub(crate) phi: Vec<f64>,
    pub(crate) x_deps: Vec<Vec<usize>>,
    pub(crate) z_deps: Vec<Vec<usize>>,
    pub(crate) outputs: Vec<usize>,
    pub(crate) bricks: Vec<Brick>,
    pub(crate) source: Option<Circuit>,
}

impl MeasurementPattern {
    /// Pattern on `graph` with target angles `phi` (one per site, column
    /// major) and the flow `(x, y) → (x+1, y)`:
    /// `x_deps(x,y) = {(x−1,y)}`,
    /// `z_deps(x,y) = {(x−2,y)} ∪ {(x−1,y') : (x,y')–(x,y) vertical edge}`.
    pub fn with_flow(graph: BrickworkGraph, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != graph.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: graph.n_sites(),
                actual: phi.len(),
            });
        }
        if let Some(v) = phi.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteAngle(*v));
        }
        let n = graph.n_sites();
        let mut x_deps = vec![Vec::new(); n];
        let mut z_deps = vec![Vec::new(); n];
        for (j, (xd, zd)) in x_deps.iter_mut().zip(z_deps.iter_mut()).enumerate() {
            let s = graph.site(j);
            if s.x >= 1 {
                xd.push(graph.index(Site::new(s.x - 1, s.y)));
            }
            if s.x >= 2 {
                zd.push(graph.index(Site::new(s.x - 2, s.y)));
            }
            if s.x >= 1 {
                for &nb in graph.neighbors(j) {
                    let t = graph.site(nb);
                    if t.x == s.x {
                        zd.push(graph.index(Site::new(s.x - 1, t.y)));
                    }
                }
            }
            zd.sort_unstable();
        }
        let last = graph.n_cols() - 1;
        let outputs = (0..graph.n_rows()).map(|y| graph.index(Site::new(last, y))).collect();
        Ok(MeasurementPattern {
            graph,
            phi,
            x_deps,
            z_deps,
            outputs,
            bricks: Vec::new(),
            source: None,
        })
    }

    pub fn graph(&self) -> &BrickworkGraph {
        &self.graph
    }

    pub fn n_sites(&self) -> usize {
        self.graph.n_sites()
    }

    pub fn n_wires(&self) -> usize {
        self.graph.n_rows()
    }

    /// Target angle of site `index`.
    pub fn phi(&self, index: usize) -> f64 {
        self.phi[index]
    }

    pub fn phis(&self) -> &[f64] {
        &self.phi
    }

    pub fn x_deps(&self, index: usize) -> &[usize] {
        &self.x_deps[index]
    }

    pub fn z_deps(&self, index: usize) -> &[usize] {
        &self.z_deps[index]
    }

    /// Column-major site indices, i.e. `0..n_sites`.
    pub fn measurement_order(&self) -> std::ops::Range<usize> {
        0..self.n_sites()
    }

    /// Last-column sites, top row first.
    pub fn output_sites(&self) -> &[usize] {
        &self.outputs
    }

    pub fn bricks(&self) -> &[Brick] {
        &self.bricks
    }

    /// Logical circuit the pattern was compiled from, if known.
    pub fn source(&self) -> Option<&Circuit> {
        self.source.as_ref()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let g = &self.graph;
        let deps = |list: &[usize]| -> String {
            if list.is_empty() {
                "-".into()
            } else {
                list.iter()
                    .map(|&i| {
                        let s = g.site(i);
                        format!("{}:{}", s.x, s.y)
                    })
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        let _ = writeln!(out, "qfl-pattern v1");
        let _ = writeln!(out, "rows {}", g.n_rows());
        let _ = writeln!(out, "bricks {}", g.n_bricks());
        for j in self.measurement_order() {
            let s = g.site(j);
            let _ = writeln!(
                out,
                "site {} {} {:?} x={} z={}",
                s.x,
                s.y,
                self.phi[j],
                deps(&self.x_deps[j]),
                deps(&self.z_deps[j])
            );
        }
        for &o in &self.outputs {
            let s = g.site(o);
            let _ = writeln!(out, "output {} {}", s.x, s.y);
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Dependencies must match the
    /// brickwork flow.
    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            what: "pattern",
            line,
            reason,
        };
        let mut rows = None;
        let mut bricks = None;
        let mut sites: Vec<(usize, Site, f64, String, String)> = Vec::new();
        let mut outputs = Vec::new();
        let mut saw_magic = false;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if !saw_magic {
                if line != "qfl-pattern v1" {
                    return Err(err(ln, "missing `qfl-pattern v1` header".into()));
                }
                saw_magic = true;
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(ln, format!("bad integer {s:?}")));
            match tok.as_slice() {
                ["rows", n] => rows = Some(num(n)?),
                ["bricks", n] => bricks = Some(num(n)?),
                ["site", x, y, phi, xd, zd] => {
                    let phi: f64 = phi.parse().map_err(|_| err(ln, format!("bad angle {phi:?}")))?;
                    let xd = xd.strip_prefix("x=").ok_or_else(|| err(ln, "expected x=".into()))?;
                    let zd = zd.strip_prefix("z=").ok_or_else(|| err(ln, "expected z=".into()))?;
                    sites.push((ln, Site::new(num(x)?, num(y)?), phi, xd.into(), zd.into()));
                }
                ["output", x, y] => outputs.push((ln, Site::new(num(x)?, num(y)?))),
                _ => return Err(err(ln, format!("unrecognized record {line:?}"))),
            }
        }
        let rows = rows.ok_or_else(|| err(0, "missing rows".into()))?;
        let bricks = bricks.ok_or_else(|| err(0, "missing bricks".into()))?;
        let graph = build_brickwork(rows, bricks)?;
        if sites.len() != graph.n_sites() {
            return Err(err(0, format!("expected {} sites, got {}", graph.n_sites(), sites.len())));
        }
        let mut phi = vec![0.0; graph.n_sites()];
        for (k, (ln, s, p, _, _)) in sites.iter().enumerate() {
            if s.x >= graph.n_cols() || s.y >= rows || graph.index(*s) != k {
                return Err(err(*ln, format!("site {}:{} out of order or range", s.x, s.y)));
            }
            phi[k] = *p;
        }
        let pattern = MeasurementPattern::with_flow(graph, phi)?;
        let g = &pattern.graph;
        let parse_deps = |ln: usize, s: &str| -> Result<Vec<usize>> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|p| {
                    let (x, y) = p.split_once(':').ok_or_else(|| err(ln, format!("bad site {p:?}")))?;
                    let x = x.parse().map_err(|_| err(ln, format!("bad site {p:?}")))?;
                    let y = y.parse().map_err(|_| err(ln, format!("bad site {p:?}")))?;
                    Ok(g.index(Site::new(x, y)))
                })
                .collect()
        };
        for (k, (ln, _, _, xd, zd)) in sites.iter().enumerate() {
            let mut xs = parse_deps(*ln, xd)?;
            let mut zs = parse_deps(*ln, zd)?;
            xs.sort_unstable();
            zs.sort_unstable();
            if xs != pattern.x_deps[k] || zs != pattern.z_deps[k] {
                return Err(err(*ln, "dependencies do not match the brickwork flow".into()));
            }
        }
        let out_idx: Vec<usize> = outputs.iter().map(|(_, s)| g.index(*s)).collect();
        if out_idx != pattern.outputs {
            let ln = outputs.first().map(|o| o.0).unwrap_or(0);
            return Err(err(ln, "output sites must be the last column, top row first".into()));
        }
        Ok(pattern)
    }
}
