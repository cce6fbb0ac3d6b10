//! Sampled complex functions on uniform tensor grids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::boxes::GridBox;
use crate::closedform::jet::C64;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(var: &str, min: f64, max: f64, n: usize) -> Self {
        GridAxis {
            var: var.to_string(),
            min,
            max,
            n,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.min + k as f64 * self.spacing()
    }
}

/// Values in row-major order (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    axes: Vec<GridAxis>,
    values: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    axes: Vec<GridAxis>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn check_axes(axes: &[GridAxis]) -> Result<()> {
    if axes.is_empty() {
        return Err(Error::DegenerateInput("grid needs at least one axis".into()));
    }
    for a in axes {
        if a.n < 2 || !(a.max > a.min) || !a.min.is_finite() || !a.max.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "axis {} must be increasing with at least 2 points",
                a.var
            )));
        }
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.var == a.var) {
            return Err(Error::DegenerateInput(format!("duplicate axis {}", a.var)));
        }
    }
    Ok(())
}

/// Six-point Lagrange stencil around `u` (in index units), clamped to [0, n−1].
pub(crate) fn quintic_stencil(u: f64, n: usize) -> (usize, [f64; 6]) {
    let m = if n >= 6 { 6 } else { n };
    let mut start = (u.floor() as isize - 2).max(0) as usize;
    if start + m > n {
        start = n - m;
    }
    let mut w = [0.0; 6];
    for a in 0..m {
        let xa = (start + a) as f64;
        let mut l = 1.0;
        for b in 0..m {
            if a != b {
                let xb = (start + b) as f64;
                l *= (u - xb) / (xa - xb);
            }
        }
        w[a] = l;
    }
    (start, w)
}

impl GridFunction {
    pub fn new(axes: Vec<GridAxis>, values: Vec<C64>) -> Result<Self> {
        check_axes(&axes)?;
        let len: usize = axes.iter().map(|a| a.n).product();
        if values.len() != len {
            return Err(Error::DegenerateInput(format!(
                "grid expects {len} values, got {}",
                values.len()
            )));
        }
        Ok(GridFunction { axes, values })
    }

    /// Sample `f` at every grid point.
    pub fn sample(axes: Vec<GridAxis>, mut f: impl FnMut(&[f64]) -> C64) -> Result<Self> {
        check_axes(&axes)?;
        let len: usize = axes.iter().map(|a| a.n).product();
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; axes.len()];
        let mut point: Vec<f64> = axes.iter().map(|a| a.min).collect();
        for _ in 0..len {
            for (k, a) in axes.iter().enumerate() {
                point[k] = a.coord(idx[k]);
            }
            values.push(f(&point));
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].n {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(GridFunction { axes, values })
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn axis_index(&self, var: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.var == var)
            .ok_or_else(|| Error::InvalidModel(format!("grid has no axis {var}")))
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.axes.len()];
        for k in (0..self.axes.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.axes[k + 1].n;
        }
        s
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for k in (0..self.axes.len()).rev() {
            idx[k] = flat % self.axes[k].n;
            flat /= self.axes[k].n;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.coord(i))
            .collect()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.axes == other.axes
    }

    fn zip_with(&self, other: &GridFunction, op: impl Fn(C64, C64) -> C64) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::DegenerateInput("grid functions live on different grids".into()));
        }
        Ok(GridFunction {
            axes: self.axes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect(),
        })
    }

    pub fn try_add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        GridFunction {
            axes: self.axes.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise `op(point, value)`.
    pub fn map_points(&self, mut op: impl FnMut(&[f64], C64) -> C64) -> GridFunction {
        let mut out = self.clone();
        for (k, v) in out.values.iter_mut().enumerate() {
            *v = op(&self.point(k), *v);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Tensor quintic Lagrange interpolation; zero outside the grid box.
    pub fn interpolate(&self, point: &[f64]) -> C64 {
        let d = self.axes.len();
        let mut starts = Vec::with_capacity(d);
        let mut weights = Vec::with_capacity(d);
        for (a, &x) in self.axes.iter().zip(point) {
            let tol = 1e-12 * (a.max - a.min);
            if x < a.min - tol || x > a.max + tol {
                return C64::new(0.0, 0.0);
            }
            let (s, w) = quintic_stencil((x - a.min) / a.spacing(), a.n);
            starts.push(s);
            weights.push(w);
        }
        let strides = self.strides();
        let m: Vec<usize> = self.axes.iter().map(|a| a.n.min(6)).collect();
        let mut acc = C64::new(0.0, 0.0);
        let mut off = vec![0usize; d];
        loop {
            let mut w = 1.0;
            let mut flat = 0;
            for k in 0..d {
                w *= weights[k][off[k]];
                flat += (starts[k] + off[k]) * strides[k];
            }
            acc += self.values[flat] * w;
            let mut k = d;
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                off[k] += 1;
                if off[k] < m[k] {
                    break;
                }
                off[k] = 0;
            }
        }
    }

    /// Quintic interpolation along `axis` on the grid line through `flat`; zero off the grid.
    pub fn interpolate_along(&self, flat: usize, axis: usize, v: f64) -> C64 {
        let a = &self.axes[axis];
        let tol = 1e-12 * (a.max - a.min);
        if v < a.min - tol || v > a.max + tol {
            return C64::new(0.0, 0.0);
        }
        let stride = self.strides()[axis];
        let base = flat - ((flat / stride) % a.n) * stride;
        let (s, w) = quintic_stencil((v - a.min) / a.spacing(), a.n);
        (0..a.n.min(6))
            .map(|k| self.values[base + (s + k) * stride] * w[k])
            .sum()
    }

    /// Tensor trapezoid rule over the grid points inside `region` (whole grid when None).
    pub fn l2_norm(&self, region: Option<&GridBox>) -> f64 {
        let per_axis: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|a| {
                let h = a.spacing();
                let (lo, hi) = region
                    .and_then(|b| b.get(&a.var))
                    .map_or((a.min, a.max), |i| (i.lo, i.hi));
                let inside: Vec<usize> = (0..a.n)
                    .filter(|&k| {
                        let x = a.coord(k);
                        x >= lo - 1e-12 * h && x <= hi + 1e-12 * h
                    })
                    .collect();
                let mut w = vec![0.0; a.n];
                if let (Some(&first), Some(&last)) = (inside.first(), inside.last()) {
                    for &k in &inside {
                        w[k] = h;
                    }
                    if last > first {
                        w[first] = 0.5 * h;
                        w[last] = 0.5 * h;
                    }
                }
                w
            })
            .collect();
        let mut acc = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.unflatten(flat);
            let w: f64 = idx.iter().enumerate().map(|(k, &i)| per_axis[k][i]).product();
            if w != 0.0 {
                acc += w * v.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GridJson {
            axes: self.axes.clone(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        })
        .expect("grid serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let g: GridJson = serde_json::from_value(v.clone())?;
        if g.re.len() != g.im.len() {
            return Err(Error::Config("re and im arrays differ in length".into()));
        }
        let values = g.re.iter().zip(&g.im).map(|(r, i)| C64::new(*r, *i)).collect();
        GridFunction::new(g.axes, values).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        GridFunction::from_json(&serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.to_json())?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (1.0 / (x * x - 1.0)).exp()
        }
    }

    #[test]
    fn interpolation_is_exact_on_quintics() {
        let f = GridFunction::sample(vec![GridAxis::new("x", 0.0, 1.0, 11)], |p| {
            C64::new(p[0].powi(5) - 2.0 * p[0], p[0] * p[0])
        })
        .unwrap();
        for x in [0.013f64, 0.5, 0.77, 0.999] {
            let want = C64::new(x.powi(5) - 2.0 * x, x * x);
            assert!((f.interpolate(&[x]) - want).norm() < 1e-13);
        }
        assert_eq!(f.interpolate(&[1.5]), C64::new(0.0, 0.0));
    }

    #[test]
    fn trapezoid_norm_converges() {
        let make = |n| {
            GridFunction::sample(
                vec![GridAxis::new("x", -1.2, 1.2, n), GridAxis::new("y", -1.2, 1.2, n)],
                |p| C64::new(bump(p[0]) * bump(p[1]), 0.0),
            )
            .unwrap()
        };
        let (a, b) = (make(129).l2_norm(None), make(257).l2_norm(None));
        assert!((a - b).abs() / b < 1e-6);
    }

    #[test]
    fn json_round_trip() {
        let f = GridFunction::sample(
            vec![GridAxis::new("x1", 0.0, 1.0, 5), GridAxis::new("w", 1.0, 2.0, 3)],
            |p| C64::new(p[0] / 3.0, p[1].sqrt()),
        )
        .unwrap();
        let back = GridFunction::from_json(&serde_json::from_str(&f.to_json().to_string()).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
