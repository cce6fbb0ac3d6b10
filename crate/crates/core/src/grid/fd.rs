//! Eighth-order central finite differences with zero padding.

use super::function::GridFunction;
use crate::closedform::jet::C64;
use crate::error::{Error, Result};

/// Fornberg weights for the `order`-th derivative at 0 on integer offsets −m..=m.
fn central_weights(order: usize, m: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(m as i64)..=m as i64).map(|k| k as f64).collect();
    let n = nodes.len();
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// ∂^order/∂var^order with an 8th-order central stencil; values beyond the box are zero.
pub fn fd_derivative(f: &GridFunction, var: &str, order: u32) -> Result<GridFunction> {
    if order > 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    let k = f.axis_index(var)?;
    if order == 0 {
        return Ok(f.clone());
    }
    let m = if order <= 2 { 4 } else { 5 };
    let h = f.axes()[k].spacing();
    let w: Vec<f64> = central_weights(order as usize, m)
        .into_iter()
        .map(|c| c / h.powi(order as i32))
        .collect();
    let n = f.axes()[k].n as isize;
    let stride = f.strides()[k];
    let vals = f.values();
    let mut out = vec![C64::new(0.0, 0.0); vals.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let i = ((flat / stride) % n as usize) as isize;
        let mut acc = C64::new(0.0, 0.0);
        for (s, c) in w.iter().enumerate() {
            let off = s as isize - m as isize;
            let j = i + off;
            if j >= 0 && j < n {
                acc += vals[(flat as isize + off * stride as isize) as usize] * c;
            }
        }
        *o = acc;
    }
    GridFunction::new(f.axes().to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::function::GridAxis;
    use std::f64::consts::PI;

    #[test]
    fn known_stencil() {
        let w = central_weights(1, 4);
        let want = [
            1.0 / 280.0,
            -4.0 / 105.0,
            0.2,
            -0.8,
            0.0,
            0.8,
            -0.2,
            4.0 / 105.0,
            -1.0 / 280.0,
        ];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_profile_derivative() {
        // sin⁸(πx) vanishes to high order at both ends of [0, 1]
        let f = GridFunction::sample(vec![GridAxis::new("x", 0.0, 1.0, 512)], |p| {
            C64::new((PI * p[0]).sin().powi(8), 0.0)
        })
        .unwrap();
        let d = fd_derivative(&f, "x", 1).unwrap();
        let mut err: f64 = 0.0;
        for (k, v) in d.values().iter().enumerate() {
            let x = f.axes()[0].coord(k);
            let exact = 8.0 * PI * (PI * x).sin().powi(7) * (PI * x).cos();
            err = err.max((v.re - exact).abs());
        }
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn higher_orders() {
        let f = GridFunction::sample(vec![GridAxis::new("x", -6.0, 6.0, 241)], |p| {
            C64::new((-p[0] * p[0]).exp(), 0.0)
        })
        .unwrap();
        let d4 = fd_derivative(&f, "x", 4).unwrap();
        let x = f.axes()[0].coord(126);
        let exact = (16.0 * x.powi(4) - 48.0 * x * x + 12.0) * (-x * x).exp();
        assert!(
            (d4.values()[126].re - exact).abs() < 1e-8,
            "{} {exact}",
            d4.values()[126].re
        );
        assert!(fd_derivative(&f, "x", 5).is_err());
    }

    #[test]
    fn constant_has_zero_interior_derivative() {
        let f = GridFunction::sample(vec![GridAxis::new("x", 0.0, 1.0, 64)], |_| C64::new(3.0, -1.0)).unwrap();
        let d = fd_derivative(&f, "x", 2).unwrap();
        assert!(d.values()[10..54].iter().all(|v| v.norm() < 1e-8));
    }
}
