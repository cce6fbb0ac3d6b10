//! Twisted-flow and unipotent-map solvers in Fourier pictures, plus the per-component common solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::builder::x_var;
use crate::closedform::eval::Evaluator;
use crate::closedform::jet::{expm1_over_z_taylor, C64};
use crate::closedform::quad::gauss_legendre;
use crate::closedform::termsum::TermSum;
use crate::error::{Error, Result};
use crate::grid::apply::apply_operator_grid;
use crate::grid::boxes::GridBox;
use crate::grid::fd::fd_derivative;
use crate::grid::function::GridFunction;
use crate::grid::scan::{resonance_scan_vars, ScanReport};
use crate::models::catalog::DUAL_VAR;
use crate::models::{ModelKind, ModelSpec};
use crate::weyl::OperatorPoly;

/// Relative threshold on |ĝ| along the resonance set.
pub const OBSTRUCTION_TOL: f64 = 1e-8;
/// Half-width, in phase units, of the band where the h_k regularization is used.
pub const REGULARIZATION_BAND: f64 = 2.0 * PI / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    #[default]
    Grid,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistProblem {
    pub model: ModelSpec,
    pub j: usize,
    pub i: usize,
    /// Twist parameter for (u_{i,j} + √−1λ)f = g.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Map step for f∘exp(L·u_{i,j}) − f = g.
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub picture: Picture,
}

impl TwistProblem {
    pub fn twist(model: ModelSpec, j: usize, i: usize, lambda: f64) -> Self {
        TwistProblem {
            model,
            j,
            i,
            lambda: Some(lambda),
            l: None,
            picture: Picture::Grid,
        }
    }

    pub fn map(model: ModelSpec, j: usize, i: usize, l: f64) -> Self {
        TwistProblem {
            model,
            j,
            i,
            lambda: None,
            l: Some(l),
            picture: Picture::Grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.i > self.j && self.j >= 1) {
            return Err(Error::InvalidIndices(format!(
                "need i > j ≥ 1, got i={} j={}",
                self.i, self.j
            )));
        }
        if let Some(l) = self.l {
            if !(l > 0.0) {
                return Err(Error::InvalidIndices(format!("map step must be positive, got {l}")));
            }
        }
        if let Some(lam) = self.lambda {
            if lam == 0.0 || !lam.is_finite() {
                return Err(Error::InvalidIndices(format!(
                    "twist parameter must be nonzero, got {lam}"
                )));
            }
        }
        Ok(())
    }

    /// Variables whose product carries the flow: (x_{j−1}, ω) in IndP pictures, (x, y) for SL(2,R)⋉R^m.
    pub fn product_vars(&self) -> Result<(Option<String>, String)> {
        match self.model.kind {
            ModelKind::IndPFourier => {
                let a = self.model.axis_index()?;
                if a != self.i - 1 {
                    return Err(Error::InvalidModel(format!(
                        "Fourier axis x{a} does not match i−1 = {}",
                        self.i - 1
                    )));
                }
                Ok((x_var(self.j), DUAL_VAR.to_string()))
            }
            ModelKind::Sl2R2Fourier | ModelKind::Sl2R4bFourier => Ok((Some("x".into()), "y".into())),
            _ => Err(Error::InvalidModel(format!(
                "{} is not a Fourier picture with a multiplicative flow",
                self.model.kind.name()
            ))),
        }
    }

    fn lambda_value(&self) -> Result<f64> {
        self.lambda
            .ok_or_else(|| Error::Config("twist problem needs lambda".into()))
    }

    fn l_value(&self) -> Result<f64> {
        self.l.ok_or_else(|| Error::Config("map problem needs L".into()))
    }
}

/// E1(z) = (e^z − 1)/z.
fn e1(z: C64) -> C64 {
    expm1_over_z_taylor(z, 0)[0]
}

/// h_k(δ) = δ/(e^{−iδ} − 1), smooth across δ = 0.
fn regularizer(delta: f64) -> C64 {
    C64::new(0.0, 1.0) / e1(C64::new(0.0, -delta))
}

/// Evaluates ĝ/(s·(x·w − c)) on grid points, switching to the integral form near the curve.
struct Divider<'a> {
    g: &'a GridFunction,
    xi: Option<usize>,
    wi: usize,
    dg_w: GridFunction,
    dg_x: Option<GridFunction>,
    dg_xw: Option<GridFunction>,
    gl: (Vec<f64>, Vec<f64>),
}

impl<'a> Divider<'a> {
    fn new(g: &'a GridFunction, xi: Option<usize>, wi: usize) -> Result<Self> {
        let dg_w = fd_derivative(g, &g.axes()[wi].var, 1)?;
        let (dg_x, dg_xw) = match xi {
            Some(x) => {
                let name = &g.axes()[x].var;
                (Some(fd_derivative(g, name, 1)?), Some(fd_derivative(&dg_w, name, 1)?))
            }
            None => (None, None),
        };
        Ok(Divider {
            g,
            xi,
            wi,
            dg_w,
            dg_x,
            dg_xw,
            gl: gauss_legendre(16),
        })
    }

    /// ∫₀¹ d(a + r(b − a)) dr along `axis` through `flat`.
    fn mean_along(&self, d: &GridFunction, flat: usize, axis: usize, a: f64, b: f64) -> C64 {
        self.gl
            .0
            .iter()
            .zip(&self.gl.1)
            .map(|(z, w)| d.interpolate_along(flat, axis, a + 0.5 * (z + 1.0) * (b - a)) * (0.5 * w))
            .sum()
    }

    fn divide(&self, flat: usize, point: &[f64], c: f64, s: f64) -> C64 {
        let x = self.xi.map_or(1.0, |k| point[k]);
        let w = point[self.wi];
        let gv = self.g.values()[flat];
        let d = s * (x * w - c);
        let hw = self.g.axes()[self.wi].spacing();
        match self.xi {
            Some(xi) if x.abs() < w.abs() => {
                let xc = c / w;
                let hx = self.g.axes()[xi].spacing();
                if (x - xc).abs() < 2.0 * hx {
                    self.mean_along(self.dg_x.as_ref().unwrap(), flat, xi, xc, x) / (s * w)
                } else {
                    gv / d
                }
            }
            _ if x == 0.0 && w == 0.0 => self.dg_xw.as_ref().map_or(C64::new(0.0, 0.0), |m| m.values()[flat] / s),
            _ => {
                let wc = c / x;
                if (w - wc).abs() < 2.0 * hw {
                    self.mean_along(&self.dg_w, flat, self.wi, wc, w) / (s * x)
                } else {
                    gv / d
                }
            }
        }
    }
}

fn axes_of(g: &GridFunction, prob: &TwistProblem) -> Result<(Option<usize>, usize)> {
    let (x, w) = prob.product_vars()?;
    let wi = g.axis_index(&w)?;
    let xi = x.map(|v| g.axis_index(&v)).transpose()?;
    Ok((xi, wi))
}

/// Largest |ĝ| on the locus x·w = c, interpolated along each w-line.
fn locus_violation(g: &GridFunction, xi: Option<usize>, wi: usize, c: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let stride = g.strides()[wi];
    let aw = &g.axes()[wi];
    for flat in 0..g.len() {
        if (flat / stride) % aw.n != 0 {
            continue;
        }
        let x = xi.map_or(1.0, |k| g.point(flat)[k]);
        if x == 0.0 {
            continue;
        }
        let wc = c / x;
        if wc >= aw.min && wc <= aw.max {
            worst = worst.max(g.interpolate_along(flat, wi, wc).norm());
        }
    }
    worst
}

/// f̂ = √−1·ĝ/(x_{j−1}ω − λ) on a grid.
pub fn solve_twisted_grid(g: &GridFunction, prob: &TwistProblem) -> Result<GridFunction> {
    prob.validate()?;
    let lambda = prob.lambda_value()?;
    let (xi, wi) = axes_of(g, prob)?;
    let gmax = g.max_abs();
    let worst = locus_violation(g, xi, wi, lambda);
    if worst > OBSTRUCTION_TOL * gmax {
        return Err(Error::ResonanceObstruction {
            k: 0,
            max_violation: worst,
        });
    }
    let div = Divider::new(g, xi, wi)?;
    let i = C64::new(0.0, 1.0);
    let mut out = g.clone();
    for (flat, v) in out.values_mut().iter_mut().enumerate() {
        *v = i * div.divide(flat, &g.point(flat), lambda, 1.0);
    }
    Ok(out)
}

/// f̂ = ĝ/(e^{−iL·x_{j−1}ω} − 1) on a grid, h_k-regularized within the band around each curve.
pub fn solve_map(g: &GridFunction, prob: &TwistProblem) -> Result<GridFunction> {
    prob.validate()?;
    let l = prob.l_value()?;
    let (xi, wi) = axes_of(g, prob)?;
    let scan = scan_for(g, prob)?;
    let gmax = g.max_abs();
    if let Some(c) = scan.worst() {
        if c.max_abs > OBSTRUCTION_TOL * gmax {
            return Err(Error::ResonanceObstruction {
                k: c.k,
                max_violation: c.max_abs,
            });
        }
    }
    let div = Divider::new(g, xi, wi)?;
    let mut out = g.clone();
    for (flat, v) in out.values_mut().iter_mut().enumerate() {
        let p = g.point(flat);
        let x = xi.map_or(1.0, |k| p[k]);
        let tau = l * x * p[wi];
        let k = (tau / (2.0 * PI)).round();
        let delta = tau - 2.0 * PI * k;
        *v = if delta.abs() < REGULARIZATION_BAND {
            regularizer(delta) * div.divide(flat, &p, 2.0 * PI * k / l, l)
        } else {
            g.values()[flat] / (C64::new(0.0, -tau).exp() - 1.0)
        };
    }
    Ok(out)
}

/// Resonance scan in the problem's product variables.
pub fn scan_for(g: &GridFunction, prob: &TwistProblem) -> Result<ScanReport> {
    let (x, w) = prob.product_vars()?;
    resonance_scan_vars(g, prob.l_value()?, x.as_deref(), &w)
}

/// ‖−√−1(x_{j−1}ω − λ)f − g‖ / ‖g‖.
pub fn twist_residual(g: &GridFunction, f: &GridFunction, prob: &TwistProblem) -> Result<f64> {
    let lambda = prob.lambda_value()?;
    let (xi, wi) = axes_of(g, prob)?;
    let lhs = f.map_points(|p, v| C64::new(0.0, -1.0) * (xi.map_or(1.0, |k| p[k]) * p[wi] - lambda) * v);
    Ok(lhs.try_sub(g)?.l2_norm(None) / g.l2_norm(None))
}

/// ‖(e^{−iL·x_{j−1}ω} − 1)f − g‖ / ‖g‖.
pub fn map_residual(g: &GridFunction, f: &GridFunction, prob: &TwistProblem) -> Result<f64> {
    let l = prob.l_value()?;
    let (xi, wi) = axes_of(g, prob)?;
    let lhs = f.map_points(|p, v| (C64::new(0.0, -l * xi.map_or(1.0, |k| p[k]) * p[wi]).exp() - 1.0) * v);
    Ok(lhs.try_sub(g)?.l2_norm(None) / g.l2_norm(None))
}

/// Empirical constant C = ‖f‖ / (‖g‖ + ‖Yg‖ + ‖Y²g‖) for a map solution and a direction Y.
pub fn map_norm_constant(g: &GridFunction, f: &GridFunction, y: &OperatorPoly, nu: C64) -> Result<f64> {
    let yg = apply_operator_grid(y, g, nu)?;
    let yyg = apply_operator_grid(y, &yg, nu)?;
    let denom = g.l2_norm(None) + yg.l2_norm(None) + yyg.l2_norm(None);
    if !(denom > 0.0) {
        return Err(Error::DegenerateInput("g vanishes".into()));
    }
    Ok(f.l2_norm(None) / denom)
}

/// Closed-form twisted solution: quotient away from x·ω = λ, r-integral of ∂_ωĝ near it.
pub struct TwistSolution {
    g: Evaluator,
    dg: Evaluator,
    lambda: f64,
    nu: C64,
    xi: Option<usize>,
    wi: usize,
    gl: (Vec<f64>, Vec<f64>),
}

/// Relative distance |xω/λ − 1| below which the integral form is used.
const INTEGRAL_BAND: f64 = 0.05;

impl TwistSolution {
    pub fn evaluate(&self, point: &[f64]) -> Result<C64> {
        if point.iter().any(|v| v.is_nan()) {
            return Err(Error::OutsideSupport);
        }
        let x = self.xi.map_or(1.0, |k| point[k]);
        let w = point[self.wi];
        let i = C64::new(0.0, 1.0);
        let rel = x * w / self.lambda;
        if (rel - 1.0).abs() >= INTEGRAL_BAND || x == 0.0 {
            let mut st = self.g.state();
            self.g.eval(&mut st, point, self.nu);
            return Ok(i * st.values[0] / (x * w - self.lambda));
        }
        // (√−1/x)∫₀¹ ∂_ωĝ(x, ω_r) dr with ω_r = λ/x + r(ω − λ/x)
        let anchor = self.lambda / x;
        let panels = 4 + (self.nu.norm() * rel.ln().abs() / 4.0).ceil() as usize;
        let h = 1.0 / panels as f64;
        let mut st = self.dg.state();
        let mut p = point.to_vec();
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..panels {
            for (z, wt) in self.gl.0.iter().zip(&self.gl.1) {
                let r = h * (k as f64 + 0.5 * (z + 1.0));
                p[self.wi] = anchor + r * (w - anchor);
                self.dg.eval(&mut st, &p, self.nu);
                acc += st.values[0] * (0.5 * h * wt);
            }
        }
        Ok(i * acc / x)
    }

    /// −√−1(x_{j−1}ω − λ)f̂ − ĝ at `point`.
    pub fn residual(&self, point: &[f64]) -> Result<C64> {
        let x = self.xi.map_or(1.0, |k| point[k]);
        let f = self.evaluate(point)?;
        let mut st = self.g.state();
        self.g.eval(&mut st, point, self.nu);
        Ok(C64::new(0.0, -1.0) * (x * point[self.wi] - self.lambda) * f - st.values[0])
    }
}

/// Solve the twisted equation for a closed-form ĝ, checking vanishing on x_{j−1}ω = λ over `region`.
pub fn solve_twisted_closed(g: &TermSum, prob: &TwistProblem, region: &GridBox, nu: C64) -> Result<TwistSolution> {
    prob.validate()?;
    let lambda = prob.lambda_value()?;
    let (x, w) = prob.product_vars()?;
    let vars = g.vars().clone();
    let pos = |name: &str| {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidModel(format!("function lacks variable {name}")))
    };
    let wi = pos(&w)?;
    let xi = x.as_deref().map(pos).transpose()?;
    let ev = Evaluator::new(&[g], nu)?;
    let dg = Evaluator::new(&[&g.partial(&w)?], nu)?;

    // sample the region and the locus inside it
    let intervals: Vec<(f64, f64)> = vars
        .iter()
        .map(|v| {
            region
                .get(v)
                .map(|i| (i.lo, i.hi))
                .ok_or_else(|| Error::DegenerateInput(format!("region lacks {v}")))
        })
        .collect::<Result<_>>()?;
    let m = 33usize;
    let mut st = ev.state();
    let (mut gmax, mut worst): (f64, f64) = (0.0, 0.0);
    let total = m.pow(vars.len() as u32);
    let mut p = vec![0.0; vars.len()];
    for flat in 0..total {
        let mut rem = flat;
        for (k, &(lo, hi)) in intervals.iter().enumerate().rev() {
            p[k] = lo + (hi - lo) * (rem % m) as f64 / (m - 1) as f64;
            rem /= m;
        }
        ev.eval(&mut st, &p, nu);
        gmax = gmax.max(st.values[0].norm());
        let xv = xi.map_or(1.0, |k| p[k]);
        if xv != 0.0 {
            let wc = lambda / xv;
            let (lo, hi) = intervals[wi];
            if wc >= lo && wc <= hi {
                p[wi] = wc;
                ev.eval(&mut st, &p, nu);
                worst = worst.max(st.values[0].norm());
            }
        }
    }
    if worst > OBSTRUCTION_TOL * gmax {
        return Err(Error::ResonanceObstruction {
            k: 0,
            max_violation: worst,
        });
    }
    Ok(TwistSolution {
        g: ev,
        dg,
        lambda,
        nu,
        xi,
        wi,
        gl: gauss_legendre(64),
    })
}

/// ρ = ψ/(e^{√−1v} − 1), the common solution on one spectral component.
pub fn common_solution_component(psi: C64, p: C64, v: f64) -> Result<C64> {
    let _ = p;
    let den = C64::new(0.0, v).exp() - 1.0;
    if den.norm() < 1e-12 {
        return Err(Error::ResonantFrequency(v));
    }
    Ok(psi / den)
}
