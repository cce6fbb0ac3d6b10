//! Partial Fourier transform f̂(…, ω) = ∫ f(…, r) e^{−irω} dr on uniform grids.

use rustfft::FftPlanner;

use crate::closedform::jet::C64;
use crate::error::{Error, Result};
use crate::grid::function::{GridAxis, GridFunction};

/// Frequency axis paired with a position axis: N points on [−π/h, π/h).
pub fn dual_axis(x: &GridAxis, name: &str) -> GridAxis {
    let h = x.spacing();
    let dw = 2.0 * std::f64::consts::PI / (x.n as f64 * h);
    let lo = -std::f64::consts::PI / h;
    GridAxis::new(name, lo, lo + (x.n - 1) as f64 * dw, x.n)
}

/// Apply `line` to every 1D slice of `f` along `axis`.
fn along_axis(
    f: &GridFunction,
    axis: usize,
    new_axis: GridAxis,
    mut line: impl FnMut(&mut [C64]),
) -> Result<GridFunction> {
    let n = f.axes()[axis].n;
    let stride = f.strides()[axis];
    let mut out = f.values().to_vec();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for start in 0..f.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for (k, b) in buf.iter_mut().enumerate() {
            *b = out[start + k * stride];
        }
        line(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            out[start + k * stride] = *b;
        }
    }
    let mut axes = f.axes().to_vec();
    axes[axis] = new_axis;
    GridFunction::new(axes, out)
}

/// Transform in `var`, renaming the axis to `dual`. No 1/√(2π) factor is applied.
pub fn partial_fourier(f: &GridFunction, var: &str, dual: &str) -> Result<GridFunction> {
    let a = f.axis_index(var)?;
    if f.axis_index(dual).is_ok() && dual != var {
        return Err(Error::InvalidModel(format!("grid already has an axis named {dual}")));
    }
    let x = f.axes()[a].clone();
    let w = dual_axis(&x, dual);
    let (h, n) = (x.spacing(), x.n);
    let fft = FftPlanner::new().plan_fft_forward(n);
    along_axis(f, a, w.clone(), |buf| {
        // e^{−iω_k x_m} = e^{−iω_k x_0} · e^{−iω_0 m h} · e^{−2πikm/N}
        for (m, b) in buf.iter_mut().enumerate() {
            *b *= C64::new(0.0, -w.min * m as f64 * h).exp();
        }
        fft.process(buf);
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= C64::new(0.0, -w.coord(k) * x.min).exp() * h;
        }
    })
}

/// Inverse of `partial_fourier`: f(x) = (1/2π)∫ f̂(ω) e^{ixω} dω onto the axis `target`.
pub fn inverse_partial_fourier(fhat: &GridFunction, dual: &str, target: &GridAxis) -> Result<GridFunction> {
    let a = fhat.axis_index(dual)?;
    let w = fhat.axes()[a].clone();
    let expected = dual_axis(target, dual);
    if w.n != target.n
        || (w.min - expected.min).abs() > 1e-12 * w.min.abs()
        || (w.spacing() - expected.spacing()).abs() > 1e-12 * w.spacing()
    {
        return Err(Error::InvalidModel(format!(
            "axis {dual} is not the dual grid of {}",
            target.var
        )));
    }
    let (h, n) = (target.spacing(), target.n);
    let dw = w.spacing();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    along_axis(fhat, a, target.clone(), |buf| {
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= C64::new(0.0, w.coord(k) * target.min).exp();
        }
        fft.process(buf);
        for (m, b) in buf.iter_mut().enumerate() {
            *b *= C64::new(0.0, w.min * m as f64 * h).exp() * (dw / (2.0 * std::f64::consts::PI));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fd::fd_derivative;
    use std::f64::consts::PI;

    fn bump(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 / (u * u - 1.0)).exp()
        }
    }

    #[test]
    fn gaussian_transform() {
        let x = GridAxis::new("x", -10.0, 10.0 - 20.0 / 256.0, 256);
        let f = GridFunction::sample(vec![x], |p| C64::new((-p[0] * p[0] / 2.0).exp(), 0.0)).unwrap();
        let g = partial_fourier(&f, "x", "w").unwrap();
        for (k, v) in g.values().iter().enumerate() {
            let w = g.axes()[0].coord(k);
            let exact = (2.0 * PI).sqrt() * (-w * w / 2.0).exp();
            assert!((v - exact).norm() < 1e-10, "{w} {v} {exact}");
        }
    }

    #[test]
    fn bump_matches_fine_quadrature() {
        let shift = 0.3;
        let x = GridAxis::new("x", -3.0, 3.0, 301);
        let f = GridFunction::sample(vec![x], |p| C64::new(bump(p[0] - shift), 0.0)).unwrap();
        let g = partial_fourier(&f, "x", "w").unwrap();
        // oversampled direct quadrature on a 16× finer grid
        let m = 16 * 300;
        let hf = 6.0 / m as f64;
        for k in [100usize, 140, 150, 170, 250] {
            let w = g.axes()[0].coord(k);
            let reference: C64 = (0..=m)
                .map(|i| {
                    let r = -3.0 + i as f64 * hf;
                    C64::new(0.0, -r * w).exp() * bump(r - shift) * hf
                })
                .sum();
            assert!((g.values()[k] - reference).norm() < 1e-6, "{w}");
        }
    }

    #[test]
    fn plancherel_and_inverse() {
        let axes = vec![GridAxis::new("x1", -2.0, 2.0, 41), GridAxis::new("x2", -4.0, 4.0, 128)];
        let f = GridFunction::sample(axes, |p| {
            C64::new(
                bump(p[0] / 1.5) * bump(p[1] / 3.0),
                p[1] * bump(p[0] / 1.5) * bump(p[1] / 3.0),
            )
        })
        .unwrap();
        let g = partial_fourier(&f, "x2", "w").unwrap();
        let ratio = g.l2_norm(None) / f.l2_norm(None);
        assert!((ratio - (2.0 * PI).sqrt()).abs() < 1e-6 * (2.0 * PI).sqrt(), "{ratio}");
        let back = inverse_partial_fourier(&g, "w", &f.axes()[1]).unwrap();
        let err = back.try_sub(&f).unwrap().max_abs();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn derivative_rule() {
        let x = GridAxis::new("x", -4.0, 4.0, 512);
        let f = GridFunction::sample(vec![x], |p| C64::new(bump(p[0] / 3.0), 0.0)).unwrap();
        let df = fd_derivative(&f, "x", 1).unwrap();
        let a = partial_fourier(&df, "x", "w").unwrap();
        let b = partial_fourier(&f, "x", "w").unwrap();
        for k in [200usize, 250, 255, 300] {
            let w = b.axes()[0].coord(k);
            assert!((a.values()[k] - C64::new(0.0, w) * b.values()[k]).norm() < 1e-7, "{w}");
        }
    }

    #[test]
    fn rejects_mismatched_inverse() {
        let x = GridAxis::new("x", -1.0, 1.0, 16);
        let f = GridFunction::sample(vec![x.clone()], |_| C64::new(1.0, 0.0)).unwrap();
        let g = partial_fourier(&f, "x", "w").unwrap();
        assert!(inverse_partial_fourier(&g, "w", &GridAxis::new("x", -1.0, 1.0, 17)).is_err());
    }
}
