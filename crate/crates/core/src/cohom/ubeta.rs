//! Pointwise û_{j,i}^β f̂ through the r-integral representation, and its T/B split.
//!
//! With ω_r = λ/x + r(ω − λ/x) the solution factors as
//! F(x, ω) = (√−1/x)∫₀¹ ∂_ωĜ₁(x, ω_r) dr (x ≡ 1 when j = 1), so every derivative
//! of F is an integral of jets of ∂_ωĜ₁ composed with (x, ω) ↦ (x, ω_r).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::builder::{x_var, CounterexamplePair};
use crate::closedform::eval::Evaluator;
use crate::closedform::jet::{Jet, C64};
use crate::closedform::quad::gauss_legendre;
use crate::closedform::termsum::TermSum;
use crate::error::{Error, Result};
use crate::grid::boxes::{PLATEAU, SUPPORT};
use crate::models::catalog::DUAL_VAR;

const R_NODES: usize = 64;

struct OpTerm {
    coeff: C64,
    mult: Vec<i32>,
    /// derivative orders in (x, ω)
    local: (usize, usize),
    /// index into the G₂ derivative table
    spectator: usize,
}

/// Evaluates û_{j,i}^β f̂ at points of the support.
pub struct UBetaEvaluator {
    beta: u32,
    nu: C64,
    lambda: f64,
    xi: Option<usize>,
    wi: usize,
    nvars: usize,
    terms: Vec<OpTerm>,
    max_x: usize,
    max_w: usize,
    /// ∂_x^a ∂_ω^{b+1}Ĝ₁, listed in `g1_index` order
    g1: Evaluator,
    g1_index: Vec<(usize, usize)>,
    g2: Evaluator,
    /// ∂_ω^{2β+1}Ĝ₁ for the main term
    t_integrand: Evaluator,
    gl: (Vec<f64>, Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TBValue {
    pub t: [f64; 2],
    pub b: [f64; 2],
    pub point: Vec<f64>,
    pub beta: u32,
}

impl TBValue {
    pub fn t_value(&self) -> C64 {
        C64::new(self.t[0], self.t[1])
    }

    pub fn b_value(&self) -> C64 {
        C64::new(self.b[0], self.b[1])
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn partial_pow(f: &TermSum, var: &str, k: usize) -> Result<TermSum> {
    let mut g = f.clone();
    for _ in 0..k {
        g = g.partial(var)?;
    }
    Ok(g)
}

pub fn u_beta_f(pair: &CounterexamplePair, beta: u32) -> Result<UBetaEvaluator> {
    UBetaEvaluator::new(pair, beta)
}

impl UBetaEvaluator {
    pub fn new(pair: &CounterexamplePair, beta: u32) -> Result<Self> {
        if beta > 4 {
            return Err(Error::UnsupportedDerivativeOrder {
                requested: beta,
                cap: 4,
            });
        }
        let vars = pair.vars().clone();
        let pos = |name: &str| vars.iter().position(|v| v == name);
        let wi = pos(DUAL_VAR).ok_or_else(|| Error::InvalidModel("pair lacks ω".into()))?;
        let xname = x_var(pair.meta.j);
        let xi = xname.as_deref().map(|x| pos(x).unwrap());
        let nu = pair.nu;

        let op = pair.u_direction()?.pow(beta);
        let op_map: Vec<usize> = op
            .vars()
            .iter()
            .map(|v| pos(v).ok_or_else(|| Error::InvalidModel(format!("operator variable {v} missing"))))
            .collect::<Result<_>>()?;
        // entry 0 is the underived G₂
        let mut spectator_list: Vec<Vec<u32>> = vec![vec![0; vars.len()]];
        let mut spectator_ids: HashMap<Vec<u32>, usize> = HashMap::from([(spectator_list[0].clone(), 0)]);
        let mut terms = Vec::new();
        let (mut max_x, mut max_w) = (0, 0);
        for (m, c) in op.terms() {
            let mut mult = vec![0i32; vars.len()];
            let mut deriv = vec![0u32; vars.len()];
            for (k, &target) in op_map.iter().enumerate() {
                mult[target] = m.mult[k];
                deriv[target] = m.deriv[k];
            }
            let dx = xi.map_or(0, |x| deriv[x] as usize);
            let dw = deriv[wi] as usize;
            max_x = max_x.max(dx);
            max_w = max_w.max(dw);
            let mut spect = deriv.clone();
            spect[wi] = 0;
            if let Some(x) = xi {
                spect[x] = 0;
            }
            let next = spectator_list.len();
            let id = *spectator_ids.entry(spect.clone()).or_insert(next);
            if id == next {
                spectator_list.push(spect);
            }
            terms.push(OpTerm {
                coeff: c.eval(nu),
                mult,
                local: (dx, dw),
                spectator: id,
            });
        }

        let total = max_x + max_w;
        let dg1 = pair.g1.partial(DUAL_VAR)?;
        let mut g1_sums = Vec::new();
        let mut g1_index = Vec::new();
        for a in 0..=max_x {
            let base = match &xname {
                Some(x) => partial_pow(&dg1, x, a)?,
                None => dg1.clone(),
            };
            let mut cur = base;
            for b in 0..=(total - a) {
                if b > 0 {
                    cur = cur.partial(DUAL_VAR)?;
                }
                g1_sums.push(cur.clone());
                g1_index.push((a, b));
            }
        }
        let g1_refs: Vec<&TermSum> = g1_sums.iter().collect();
        let g1 = Evaluator::new(&g1_refs, nu)?;

        let mut g2_sums = Vec::new();
        for d in &spectator_list {
            let mut g = pair.g2.clone();
            for (k, &o) in d.iter().enumerate() {
                g = partial_pow(&g, &vars[k], o as usize)?;
            }
            g2_sums.push(g);
        }
        let g2_refs: Vec<&TermSum> = g2_sums.iter().collect();
        let g2 = Evaluator::new(&g2_refs, nu)?;

        let ti = partial_pow(&pair.g1, DUAL_VAR, 2 * beta as usize + 1)?;
        let t_integrand = Evaluator::new(&[&ti], nu)?;

        Ok(UBetaEvaluator {
            beta,
            nu,
            lambda: pair.meta.lambda,
            xi,
            wi,
            nvars: vars.len(),
            terms,
            max_x,
            max_w,
            g1,
            g1_index,
            g2,
            t_integrand,
            gl: gauss_legendre(R_NODES),
        })
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// Composite nodes on [0, 1], split where ω_r crosses a q_ω breakpoint and
    /// fine enough for the phase ν·log(xω/λ) swept by r.
    fn r_nodes(&self, x: f64, w: f64) -> Vec<(f64, f64)> {
        let anchor = self.lambda / x;
        let mut cuts = vec![0.0, 1.0];
        if (w - anchor).abs() > 0.0 {
            for b in [SUPPORT.0, PLATEAU.0, PLATEAU.1, SUPPORT.1] {
                let r = (b * self.lambda - anchor) / (w - anchor);
                if r > 0.0 && r < 1.0 {
                    cuts.push(r);
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sweep = self.nu.norm() * (x * w / self.lambda).ln().abs();
        let mut out = Vec::new();
        for seg in cuts.windows(2) {
            let len = seg[1] - seg[0];
            let mid = (anchor + 0.5 * (seg[0] + seg[1]) * (w - anchor)) / self.lambda;
            // high derivatives of the plateau steps are sharply peaked
            let base = if mid > PLATEAU.0 && mid < PLATEAU.1 { 1 } else { 8 };
            let panels = base + (sweep * len / 8.0).ceil() as usize;
            let h = len / panels as f64;
            for p in 0..panels {
                for (z, wt) in self.gl.0.iter().zip(&self.gl.1) {
                    out.push((seg[0] + h * (p as f64 + 0.5 * (z + 1.0)), 0.5 * h * wt));
                }
            }
        }
        out
    }

    fn xw(&self, point: &[f64]) -> (f64, f64) {
        (self.xi.map_or(1.0, |i| point[i]), point[self.wi])
    }

    /// Jet of F at (x, ω) with orders (max_x, max_w), or (max_w) when j = 1.
    fn f_jet(&self, point: &[f64]) -> Jet {
        let (x0, w0) = self.xw(point);
        let lam = self.lambda;
        let two_d = self.xi.is_some();
        let orders: Vec<usize> = if two_d {
            vec![self.max_x, self.max_w]
        } else {
            vec![self.max_w]
        };
        let wdim = orders.len() - 1;
        let wj = Jet::variable(&orders, wdim, w0);
        let xj = if two_d {
            Jet::variable(&orders, 0, x0)
        } else {
            Jet::constant(&orders, C64::new(1.0, 0.0))
        };
        let anchor = xj.recip().scale(C64::new(lam, 0.0));
        let dx = xj.add_const(C64::new(-x0, 0.0));
        let mut dx_pows = vec![Jet::constant(&orders, C64::new(1.0, 0.0))];
        for a in 1..=self.max_x {
            dx_pows.push(dx_pows[a - 1].mul(&dx));
        }
        let total = self.max_x + self.max_w;
        let mut st = self.g1.state();
        let mut eval_point = point.to_vec();
        let mut acc = Jet::constant(&orders, C64::new(0.0, 0.0));
        for (r, wr) in self.r_nodes(x0, w0) {
            // ω_r = (1−r)λ/x + rω
            let y = anchor.scale(C64::new(1.0 - r, 0.0)).add(&wj.scale(C64::new(r, 0.0)));
            let y0 = y.value().re;
            let dy = y.add_const(C64::new(-y0, 0.0));
            eval_point[self.wi] = y0;
            self.g1.eval(&mut st, &eval_point, self.nu);
            let mut dy_pows = vec![Jet::constant(&orders, C64::new(1.0, 0.0))];
            for b in 1..=total {
                dy_pows.push(dy_pows[b - 1].mul(&dy));
            }
            let mut sum = Jet::constant(&orders, C64::new(0.0, 0.0));
            for (k, &(a, b)) in self.g1_index.iter().enumerate() {
                let h = st.values[k];
                if h == C64::new(0.0, 0.0) {
                    continue;
                }
                let c = h / (factorial(a) * factorial(b));
                sum = sum.add(&dx_pows[a].mul(&dy_pows[b]).scale(c));
            }
            acc = acc.add(&sum.scale(C64::new(wr, 0.0)));
        }
        let pref = xj.recip().scale(C64::new(0.0, 1.0));
        acc.mul(&pref)
    }

    /// û^β f̂ at `point` (coordinates in the pair's variable order).
    pub fn evaluate(&self, point: &[f64]) -> Result<C64> {
        if point.len() != self.nvars || point.iter().any(|v| v.is_nan()) {
            return Err(Error::OutsideSupport);
        }
        let f = self.f_jet(point);
        let mut st = self.g2.state();
        self.g2.eval(&mut st, point, self.nu);
        let mut out = C64::new(0.0, 0.0);
        for t in &self.terms {
            let s = st.values[t.spectator];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            let alpha: Vec<usize> = if self.xi.is_some() {
                vec![t.local.0, t.local.1]
            } else {
                vec![t.local.1]
            };
            let mut v = t.coeff * f.derivative(&alpha) * s;
            for (k, &m) in t.mult.iter().enumerate() {
                if m != 0 {
                    v *= point[k].powi(m);
                }
            }
            out += v;
        }
        Ok(out)
    }

    /// Main term T = √−1^{β+1} λ^β x^{−(2β+1)} ∫₀¹ r^β(1−r)^β ∂_ω^{2β+1}Ĝ₁(x, ω_r) dr · G₂.
    pub fn main_term(&self, point: &[f64]) -> Result<C64> {
        let (x0, w0) = self.xw(point);
        let beta = self.beta as i32;
        let mut st = self.t_integrand.state();
        let mut eval_point = point.to_vec();
        let mut acc = C64::new(0.0, 0.0);
        let anchor = self.lambda / x0;
        for (r, wr) in self.r_nodes(x0, w0) {
            eval_point[self.wi] = anchor + r * (w0 - anchor);
            self.t_integrand.eval(&mut st, &eval_point, self.nu);
            acc += st.values[0] * (wr * (r * (1.0 - r)).powi(beta));
        }
        let mut g2 = self.g2.state();
        self.g2.eval(&mut g2, point, self.nu);
        let g2v = g2.values[0];
        let phase = C64::new(0.0, 1.0).powi(beta + 1);
        Ok(phase * self.lambda.powi(beta) * x0.powi(-(2 * beta + 1)) * acc * g2v)
    }
}

/// T and B = û^β f̂ − T at a point of I^{(j−1)} whose spectator coordinates lie on the G₂ plateau.
pub fn t_and_b(ev: &UBetaEvaluator, point: &[f64]) -> Result<TBValue> {
    let (x0, w0) = ev.xw(point);
    let inside = |v: f64| v >= PLATEAU.0 && v <= PLATEAU.1;
    let spectators_ok = point
        .iter()
        .enumerate()
        .all(|(k, &v)| k == ev.wi || Some(k) == ev.xi || inside(v));
    if !(inside(x0) && inside(w0 / ev.lambda) && spectators_ok) {
        return Err(Error::OutsidePlateau);
    }
    let total = ev.evaluate(point)?;
    let t = ev.main_term(point)?;
    let b = total - t;
    Ok(TBValue {
        t: [t.re, t.im],
        b: [b.re, b.im],
        point: point.to_vec(),
        beta: ev.beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::termsum::apply_operator;
    use crate::cohom::builder::{build_counterexample, Variant};

    fn symbolic(pair: &CounterexamplePair, beta: u32, point: &[f64]) -> C64 {
        let op = pair.u_direction().unwrap().pow(beta);
        apply_operator(&op, &pair.f).unwrap().evaluate(point, pair.nu).unwrap()
    }

    #[test]
    fn beta_zero_is_f() {
        let pair = build_counterexample(3, 2, 3, 32.0, 1.0, Variant::Twist).unwrap();
        let ev = u_beta_f(&pair, 0).unwrap();
        for pt in [[0.9, 1.02], [1.1, 0.93], [0.78, 1.3], [1.0, 1.0]] {
            let a = ev.evaluate(&pt).unwrap();
            let b = pair.f.evaluate(&pt, pair.nu).unwrap();
            assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{pt:?} {a} {b}");
        }
    }

    #[test]
    fn matches_symbolic_off_locus() {
        for (n, j, i) in [(2, 1, 2), (3, 2, 3), (3, 1, 3)] {
            let pair = build_counterexample(n, j, i, 16.0, 1.0, Variant::Twist).unwrap();
            for beta in 1..=2 {
                let ev = u_beta_f(&pair, beta).unwrap();
                for pt in [[0.82, 1.3, 1.0], [1.2, 0.77, 0.9], [0.95, 1.2, 1.1]] {
                    let pt = &pt[..pair.vars().len()];
                    let a = ev.evaluate(pt).unwrap();
                    let b = symbolic(&pair, beta, pt);
                    assert!(
                        (a - b).norm() <= 1e-8 * b.norm().max(1.0),
                        "{n}{j}{i} β={beta} {pt:?} {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn beta_zero_split_is_trivial() {
        let pair = build_counterexample(2, 1, 2, 64.0, 1.0, Variant::Twist).unwrap();
        let ev = u_beta_f(&pair, 0).unwrap();
        let tb = t_and_b(&ev, &[1.004]).unwrap();
        assert!(tb.b_value().norm() <= 1e-12 * tb.t_value().norm());
    }

    #[test]
    fn rejects_points_off_plateau() {
        let pair = build_counterexample(2, 1, 2, 64.0, 1.0, Variant::Twist).unwrap();
        let ev = u_beta_f(&pair, 1).unwrap();
        assert_eq!(t_and_b(&ev, &[1.3]), Err(Error::OutsidePlateau));
    }
}
