//! Composite Gauss–Legendre quadrature of |F|² with a panel-doubling gate.

use serde::{Deserialize, Serialize};

use super::eval::Evaluator;
use super::jet::C64;
use crate::error::{Error, Result};
use crate::grid::boxes::GridBox;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadSpec {
    pub panels_per_unit_frequency: f64,
    pub base_panels: usize,
    pub gauss_order: usize,
    /// Panels on axes that carry no oscillation.
    pub smooth_panels: usize,
    /// Relative tolerance of the doubling gate.
    pub rel_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            panels_per_unit_frequency: 12.0,
            base_panels: 64,
            gauss_order: 8,
            smooth_panels: 32,
            rel_tol: 1e-6,
        }
    }
}

impl QuadSpec {
    pub fn oscillating_panels(&self, frequency: f64) -> usize {
        self.base_panels
            .max((self.panels_per_unit_frequency * frequency.abs()).ceil() as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
    pub breaks: Vec<f64>,
    pub oscillating: bool,
}

/// Integration region. When `product` names (x, w), the pair is integrated in
/// coordinates (x, p = x·w) with p outer, so oscillation in x·w stays on one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub axes: Vec<Axis>,
    pub frequency: f64,
    pub product: Option<(String, String)>,
}

impl Domain {
    pub fn from_box(b: &GridBox, frequency: f64) -> Self {
        Domain {
            axes: b
                .intervals
                .iter()
                .map(|i| Axis {
                    var: i.var.clone(),
                    lo: i.lo,
                    hi: i.hi,
                    breaks: vec![],
                    oscillating: true,
                })
                .collect(),
            frequency,
            product: None,
        }
    }

    fn axis(&self, var: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.var == var)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Plateau transitions sit on short segments; give each at least this many panels.
const MIN_SEGMENT_PANELS: usize = 16;

/// Composite rule on [lo, hi], panels split over the segments between breaks.
/// At least `min_per_segment` panels go in each segment.
fn composite(
    lo: f64,
    hi: f64,
    breaks: &[f64],
    panels: usize,
    min_per_segment: usize,
    gl: &(Vec<f64>, Vec<f64>),
) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = vec![lo, hi];
    cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    let total = hi - lo;
    let mut out = Vec::new();
    for seg in cuts.windows(2) {
        let len = seg[1] - seg[0];
        let np = ((panels as f64 * len / total).round() as usize).max(min_per_segment);
        let h = len / np as f64;
        for p in 0..np {
            let a = seg[0] + p as f64 * h;
            for (xi, wi) in gl.0.iter().zip(&gl.1) {
                out.push((a + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
            }
        }
    }
    out
}

/// ∫|F_k|² for every function in the evaluator, panels scaled by `mult`.
pub fn integrate_squares(ev: &Evaluator, dom: &Domain, nu: C64, quad: &QuadSpec, mult: usize) -> Result<Vec<f64>> {
    let vars = ev.vars();
    let var_idx = |name: &str| {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidModel(format!("domain axis {name} not a function variable")))
    };
    for v in vars.iter() {
        if dom.axis(v).is_none() {
            return Err(Error::InvalidModel(format!("variable {v} has no quadrature axis")));
        }
    }
    let gl = gauss_legendre(quad.gauss_order);
    let osc = quad.oscillating_panels(dom.frequency) * mult;
    let smooth = quad.smooth_panels * mult;
    let panels = |a: &Axis| if a.oscillating { osc } else { smooth };
    // the floor doubles with the panels so the coarse/fine gate stays meaningful
    let floor = MIN_SEGMENT_PANELS * mult;

    let pair = match &dom.product {
        Some((x, w)) => {
            let ax = dom
                .axis(x)
                .ok_or_else(|| Error::InvalidModel(format!("missing axis {x}")))?;
            let aw = dom
                .axis(w)
                .ok_or_else(|| Error::InvalidModel(format!("missing axis {w}")))?;
            Some((ax.clone(), aw.clone(), var_idx(x)?, var_idx(w)?))
        }
        None => None,
    };
    let mut others: Vec<&Axis> = dom
        .axes
        .iter()
        .filter(|a| match &pair {
            Some((ax, aw, _, _)) => a.var != ax.var && a.var != aw.var,
            None => true,
        })
        .collect();
    // oscillating axes innermost, so smooth-axis factor jets are reused
    others.sort_by_key(|a| a.oscillating);
    let other_idx: Vec<usize> = others.iter().map(|a| var_idx(&a.var)).collect::<Result<_>>()?;
    let other_nodes: Vec<Vec<(f64, f64)>> = others
        .iter()
        .map(|a| composite(a.lo, a.hi, &a.breaks, panels(a), floor, &gl))
        .collect();

    let mut acc = vec![0.0; ev.len()];
    let mut st = ev.state();
    let mut point = vec![0.0; vars.len()];
    let mut counter = vec![0usize; others.len()];
    loop {
        let mut weight = 1.0;
        for (k, &c) in counter.iter().enumerate() {
            let (v, w) = other_nodes[k][c];
            point[other_idx[k]] = v;
            weight *= w;
        }
        match &pair {
            None => {
                ev.eval(&mut st, &point, nu);
                for (a, v) in acc.iter_mut().zip(&st.values) {
                    *a += weight * v.norm_sqr();
                }
            }
            Some((ax, aw, xi, wi)) => {
                let xcuts: Vec<f64> = std::iter::once(ax.lo)
                    .chain(ax.breaks.iter().copied())
                    .chain(std::iter::once(ax.hi))
                    .collect();
                let wcuts: Vec<f64> = std::iter::once(aw.lo)
                    .chain(aw.breaks.iter().copied())
                    .chain(std::iter::once(aw.hi))
                    .collect();
                let pbreaks: Vec<f64> = xcuts.iter().flat_map(|x| wcuts.iter().map(move |w| x * w)).collect();
                let pnodes = composite(ax.lo * aw.lo, ax.hi * aw.hi, &pbreaks, osc, floor, &gl);
                for &(p, wp) in &pnodes {
                    let lo = ax.lo.max(p / aw.hi);
                    let hi = ax.hi.min(p / aw.lo);
                    if !(hi > lo) {
                        continue;
                    }
                    let mut xb = ax.breaks.clone();
                    xb.extend(wcuts.iter().map(|w| p / w));
                    let xn = if ax.oscillating { osc } else { smooth };
                    let span = (hi - lo) / (ax.hi - ax.lo);
                    let xnodes = composite(lo, hi, &xb, ((xn as f64 * span).ceil() as usize).max(1), floor, &gl);
                    for &(x, wx) in &xnodes {
                        point[*xi] = x;
                        point[*wi] = p / x;
                        ev.eval(&mut st, &point, nu);
                        let w = weight * wp * wx / x;
                        for (a, v) in acc.iter_mut().zip(&st.values) {
                            *a += w * v.norm_sqr();
                        }
                    }
                }
            }
        }
        // advance the odometer
        let mut k = counter.len();
        loop {
            if k == 0 {
                return Ok(acc);
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < other_nodes[k].len() {
                break;
            }
            counter[k] = 0;
        }
    }
}

/// Check the doubling gate on a pair of coarse/fine squared integrals.
pub fn gate(coarse: f64, fine: f64, tol: f64) -> Result<f64> {
    let (a, b) = (coarse.max(0.0).sqrt(), fine.max(0.0).sqrt());
    if b == 0.0 && a == 0.0 {
        return Ok(0.0);
    }
    let rel = (b - a).abs() / b.max(a);
    if rel >= tol || !rel.is_finite() {
        return Err(Error::QuadratureNotConverged {
            value: b,
            rel_change: rel,
        });
    }
    Ok(b)
}
