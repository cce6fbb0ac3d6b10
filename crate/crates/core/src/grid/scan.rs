//! Sup of |g| over the resonance curves x·ω ∈ (2π/L)ℤ.

use serde::{Deserialize, Serialize};

use super::function::GridFunction;
use crate::error::{Error, Result};
use crate::models::catalog::DUAL_VAR;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveScan {
    pub k: i64,
    pub max_abs: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    /// Integers k whose curve meets the grid box, ascending.
    pub ks: Vec<i64>,
    pub curves: Vec<CurveScan>,
    pub max_abs: f64,
}

impl ScanReport {
    /// The curve with the largest |g|, if any curve meets the box.
    pub fn worst(&self) -> Option<&CurveScan> {
        self.curves
            .iter()
            .max_by(|a, b| a.max_abs.partial_cmp(&b.max_abs).unwrap())
    }
}

/// Scan the IndP Fourier picture: curves x_{j−1}·ω = 2πk/L (ω = 2πk/L when j = 1).
pub fn resonance_scan(g: &GridFunction, l: f64, j: usize) -> Result<ScanReport> {
    let x = (j > 1).then(|| format!("x{}", j - 1));
    resonance_scan_vars(g, l, x.as_deref(), DUAL_VAR)
}

/// Scan the curves x·w = 2πk/L, with x ≡ 1 when `x` is None.
///
/// Each curve is sampled at 8N points per parametrization (by x and by w), at
/// every grid position of the remaining axes.
pub fn resonance_scan_vars(g: &GridFunction, l: f64, x: Option<&str>, w: &str) -> Result<ScanReport> {
    if !(l > 0.0) {
        return Err(Error::DegenerateInput(format!("map step must be positive, got {l}")));
    }
    let wi = g.axis_index(w)?;
    let xi = x.map(|v| g.axis_index(v)).transpose()?;
    let aw = &g.axes()[wi];
    let period = 2.0 * std::f64::consts::PI / l;
    let (plo, phi) = match xi {
        Some(k) => {
            let ax = &g.axes()[k];
            let c = [ax.min * aw.min, ax.min * aw.max, ax.max * aw.min, ax.max * aw.max];
            (
                c.iter().cloned().fold(f64::MAX, f64::min),
                c.iter().cloned().fold(f64::MIN, f64::max),
            )
        }
        None => (aw.min, aw.max),
    };
    let ks: Vec<i64> = ((plo / period).ceil() as i64..=(phi / period).floor() as i64).collect();

    // curve points in (x, w), before adding the other coordinates
    let curve_points = |c: f64| -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        match xi {
            None => pts.push((1.0, c)),
            Some(k) => {
                let ax = &g.axes()[k];
                let m = 8 * ax.n;
                for s in 0..m {
                    let xv = ax.min + (ax.max - ax.min) * s as f64 / (m - 1) as f64;
                    if xv != 0.0 {
                        let wv = c / xv;
                        if wv >= aw.min && wv <= aw.max {
                            pts.push((xv, wv));
                        }
                    }
                }
                let m = 8 * aw.n;
                for s in 0..m {
                    let wv = aw.min + (aw.max - aw.min) * s as f64 / (m - 1) as f64;
                    if wv != 0.0 {
                        let xv = c / wv;
                        if xv >= ax.min && xv <= ax.max {
                            pts.push((xv, wv));
                        }
                    }
                }
            }
        }
        pts
    };

    let others: Vec<usize> = (0..g.axes().len()).filter(|&a| a != wi && Some(a) != xi).collect();
    let other_count: usize = others.iter().map(|&a| g.axes()[a].n).product();
    let mut curves = Vec::with_capacity(ks.len());
    let mut point = vec![0.0; g.axes().len()];
    for &k in &ks {
        let pts = curve_points(k as f64 * period);
        let mut max_abs: f64 = 0.0;
        for o in 0..other_count {
            let mut rem = o;
            for &a in others.iter().rev() {
                let ax = &g.axes()[a];
                point[a] = ax.coord(rem % ax.n);
                rem /= ax.n;
            }
            for &(xv, wv) in &pts {
                if let Some(xa) = xi {
                    point[xa] = xv;
                }
                point[wi] = wv;
                max_abs = max_abs.max(g.interpolate(&point).norm());
            }
        }
        curves.push(CurveScan {
            k,
            max_abs,
            samples: pts.len() * other_count,
        });
    }
    let max_abs = curves.iter().map(|c| c.max_abs).fold(0.0, f64::max);
    Ok(ScanReport { ks, curves, max_abs })
}
