//! Truncated multivariate Taylor series (Taylor-mode automatic differentiation).
//!
//! A jet stores Taylor coefficients c[α] for multi-indices α bounded
//! componentwise by `orders`; ∂^α f = α! c[α].

use num_complex::Complex64;
use smallvec::{smallvec, SmallVec};

pub type C64 = Complex64;

/// Jets never involve more variables than a model has coordinates.
const MAX_VARS: usize = 8;

/// Per-variable orders or strides, stored inline and copied freely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dims {
    len: usize,
    v: [usize; MAX_VARS],
}

impl Dims {
    fn zeros(len: usize) -> Self {
        assert!(len <= MAX_VARS, "jet with {len} variables");
        Dims { len, v: [0; MAX_VARS] }
    }

    fn from_slice(s: &[usize]) -> Self {
        let mut d = Dims::zeros(s.len());
        d.v[..s.len()].copy_from_slice(s);
        d
    }
}

impl std::ops::Deref for Dims {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.v[..self.len]
    }
}

impl std::ops::DerefMut for Dims {
    fn deref_mut(&mut self) -> &mut [usize] {
        &mut self.v[..self.len]
    }
}

/// Jets are built per quadrature node, so storage stays inline for small orders.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    orders: Dims,
    strides: Dims,
    pub c: SmallVec<[C64; 9]>,
}

pub(crate) fn layout(orders: &[usize]) -> (Dims, usize) {
    let mut strides = Dims::zeros(orders.len());
    let mut size = 1;
    for k in (0..orders.len()).rev() {
        strides[k] = size;
        size *= orders[k] + 1;
    }
    (strides, size)
}

impl Jet {
    pub fn constant(orders: &[usize], v: C64) -> Self {
        let (strides, size) = layout(orders);
        let mut c = smallvec![C64::new(0.0, 0.0); size];
        c[0] = v;
        Jet {
            orders: Dims::from_slice(orders),
            strides,
            c,
        }
    }

    /// The coordinate function `v_k` expanded at `x0`.
    pub fn variable(orders: &[usize], k: usize, x0: f64) -> Self {
        let mut j = Self::constant(orders, C64::new(x0, 0.0));
        if orders[k] >= 1 {
            let s = j.strides[k];
            j.c[s] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    fn multi(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.orders.len()];
        for k in 0..self.orders.len() {
            out[k] = idx / self.strides[k];
            idx %= self.strides[k];
        }
        out
    }

    fn flat(&self, alpha: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for (k, &a) in alpha.iter().enumerate() {
            if a > self.orders[k] {
                return None;
            }
            idx += a * self.strides[k];
        }
        Some(idx)
    }

    /// ∂^α at the expansion point; zero if α exceeds the stored orders.
    pub fn derivative(&self, alpha: &[usize]) -> C64 {
        match self.flat(alpha) {
            Some(i) => {
                let fact: f64 = alpha
                    .iter()
                    .map(|&a| (1..=a).map(|x| x as f64).product::<f64>())
                    .product();
                self.c[i] * fact
            }
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn total_order(&self) -> usize {
        self.orders.iter().sum()
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = self.clone();
        for (a, b) in r.c.iter_mut().zip(&o.c) {
            *a += b;
        }
        r
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut r = self.clone();
        for (a, b) in r.c.iter_mut().zip(&o.c) {
            *a -= b;
        }
        r
    }

    pub fn scale(&self, s: C64) -> Jet {
        let mut r = self.clone();
        for a in r.c.iter_mut() {
            *a *= s;
        }
        r
    }

    pub fn add_const(&self, s: C64) -> Jet {
        let mut r = self.clone();
        r.c[0] += s;
        r
    }

    fn zeros_like(&self) -> Jet {
        Jet {
            orders: self.orders,
            strides: self.strides,
            c: smallvec![C64::new(0.0, 0.0); self.c.len()],
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = self.zeros_like();
        match self.orders.len() {
            1 => {
                let n = self.orders[0];
                for i in 0..=n {
                    if self.c[i] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..=n - i {
                        r.c[i + j] += self.c[i] * o.c[j];
                    }
                }
            }
            2 => {
                let (n0, n1) = (self.orders[0], self.orders[1]);
                let s = self.strides[0];
                for i0 in 0..=n0 {
                    for i1 in 0..=n1 {
                        let a = self.c[i0 * s + i1];
                        if a == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for j0 in 0..=n0 - i0 {
                            for j1 in 0..=n1 - i1 {
                                r.c[(i0 + j0) * s + i1 + j1] += a * o.c[j0 * s + j1];
                            }
                        }
                    }
                }
            }
            _ => {
                for i in 0..self.c.len() {
                    if self.c[i] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let ai = self.multi(i);
                    for j in 0..o.c.len() {
                        let aj = o.multi(j);
                        let sum: Vec<usize> = ai.iter().zip(&aj).map(|(a, b)| a + b).collect();
                        if let Some(k) = self.flat(&sum) {
                            r.c[k] += self.c[i] * o.c[j];
                        }
                    }
                }
            }
        }
        r
    }

    /// f∘self, given the Taylor coefficients of f at `self.value()`.
    pub fn compose(&self, taylor: &[C64]) -> Jet {
        let mut du = self.clone();
        du.c[0] = C64::new(0.0, 0.0);
        let k = taylor.len().min(self.total_order() + 1);
        let mut r = self.zeros_like();
        r.c[0] = taylor[k - 1];
        for a in taylor[..k - 1].iter().rev() {
            r = r.mul(&du);
            r.c[0] += a;
        }
        r
    }

    pub fn exp(&self) -> Jet {
        let k = self.total_order();
        let e0 = self.c[0].exp();
        let mut t = Vec::with_capacity(k + 1);
        let mut f = 1.0;
        for m in 0..=k {
            if m > 0 {
                f *= m as f64;
            }
            t.push(e0 / f);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Jet {
        let k = self.total_order();
        let u0 = self.c[0];
        let mut t = vec![u0.ln()];
        let mut p = C64::new(1.0, 0.0);
        for m in 1..=k {
            p *= u0;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (m as f64 * p));
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Jet {
        let k = self.total_order();
        let u0 = self.c[0];
        let mut t = Vec::with_capacity(k + 1);
        let mut p = 1.0 / u0;
        for m in 0..=k {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            t.push(p * sign);
            p /= u0;
        }
        self.compose(&t)
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    /// self^e for complex e, principal branch.
    pub fn powc(&self, e: C64) -> Jet {
        self.ln().scale(e).exp()
    }
}

/// Taylor coefficients of E1(z) = (e^z − 1)/z = Σ z^k/(k+1)! at z0.
pub fn expm1_over_z_taylor(z0: C64, order: usize) -> Vec<C64> {
    if z0.norm() <= 1.0 {
        // coefficient m: Σ_{k≥m} C(k,m) z0^{k−m} / (k+1)!
        (0..=order)
            .map(|m| {
                let mut sum = C64::new(0.0, 0.0);
                let mut zp = C64::new(1.0, 0.0);
                let mut binom = 1.0;
                let mut fact: f64 = (1..=m + 1).map(|x| x as f64).product();
                for k in m..m + 40 {
                    if k > m {
                        binom = binom * k as f64 / (k - m) as f64;
                        zp *= z0;
                        fact *= (k + 1) as f64;
                    }
                    let term = zp * binom / fact;
                    sum += term;
                    if term.norm_sqr() < 1e-36 * sum.norm_sqr().max(1e-300) && k > m + 4 {
                        break;
                    }
                }
                sum
            })
            .collect()
    } else {
        // (e^z − 1) · (1/z), expanded as series in dz
        let e0 = z0.exp();
        let mut num = Vec::with_capacity(order + 1);
        let mut f = 1.0;
        for m in 0..=order {
            if m > 0 {
                f *= m as f64;
            }
            num.push(if m == 0 { e0 - 1.0 } else { e0 / f });
        }
        let mut inv = Vec::with_capacity(order + 1);
        let mut p = 1.0 / z0;
        for m in 0..=order {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            inv.push(p * sign);
            p /= z0;
        }
        (0..=order)
            .map(|m| (0..=m).map(|k| num[k] * inv[m - k]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn derivatives_of_product() {
        // f(x, y) = x^2 y^3 at (2, 1): ∂x∂y f = 2x·3y^2 = 12
        let o = [3, 3];
        let x = Jet::variable(&o, 0, 2.0);
        let y = Jet::variable(&o, 1, 1.0);
        let f = x.mul(&x).mul(&y.mul(&y).mul(&y));
        assert!((f.derivative(&[1, 1]) - c(12.0)).norm() < 1e-12);
        assert!((f.derivative(&[2, 3]) - c(12.0)).norm() < 1e-12);
    }

    #[test]
    fn exp_ln_recip() {
        let o = [6];
        let x = Jet::variable(&o, 0, 0.7);
        let e = x.exp();
        for k in 0..=6 {
            assert!((e.derivative(&[k]) - c(0.7f64.exp())).norm() < 1e-12);
        }
        let l = x.ln();
        // d^3/dx^3 ln x = 2/x^3
        assert!((l.derivative(&[3]) - c(2.0 / 0.7f64.powi(3))).norm() < 1e-10);
        let r = x.recip().mul(&x);
        assert!((r.value() - c(1.0)).norm() < 1e-14);
        assert!(r.derivative(&[4]).norm() < 1e-9);
    }

    #[test]
    fn complex_power() {
        let o = [4];
        let x = Jet::variable(&o, 0, 1.3);
        let nu = C64::new(0.0, 5.0);
        let p = x.powc(nu);
        // d/dx x^ν = ν x^{ν−1}
        let expect = nu * C64::new(1.3, 0.0).powc(nu - 1.0);
        assert!((p.derivative(&[1]) - expect).norm() < 1e-12);
    }

    #[test]
    fn e1_series_branches_agree() {
        for z0 in [C64::new(0.9, 0.3), C64::new(0.0, -0.99)] {
            let a = expm1_over_z_taylor(z0, 8);
            // compare with the quotient form at the same point
            let e0 = z0.exp();
            let direct0 = (e0 - 1.0) / z0;
            assert!((a[0] - direct0).norm() < 1e-14);
            let d1 = (e0 * z0 - (e0 - 1.0)) / (z0 * z0);
            assert!((a[1] - d1).norm() < 1e-13);
        }
        let b = expm1_over_z_taylor(C64::new(3.0, 1.0), 3);
        let z0 = C64::new(3.0, 1.0);
        assert!((b[0] - (z0.exp() - 1.0) / z0).norm() < 1e-12);
    }
}
