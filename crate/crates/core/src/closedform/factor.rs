//! Catalogued smooth factors, each evaluable as a jet of any order up to the cap.

use serde::{Deserialize, Serialize};

use super::jet::{expm1_over_z_taylor, Jet, C64};

/// Maximum derivative order per variable carried by any factor.
pub const ORDER_CAP: usize = 12;

// Within this fraction of a transition edge the step and its derivatives are
// below e^{-90} and are returned as exact 0 or 1.
const EDGE: f64 = 1.1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothFactor {
    /// Smooth plateau of `var/scale`: 0 outside (lo, hi), 1 on [plat_lo, plat_hi].
    Plateau {
        id: String,
        var: String,
        lo: f64,
        plat_lo: f64,
        plat_hi: f64,
        hi: f64,
        scale: f64,
    },
    /// Mollifier exp(1/(u²−1)), u = (var − center)/radius.
    Bump {
        id: String,
        var: String,
        center: f64,
        radius: f64,
    },
    /// ((w/λ)^ν − x^{−ν})/(x·w − λ); `x = None` means x ≡ 1.
    DividedDiff {
        id: String,
        x: Option<String>,
        w: String,
        lambda: f64,
    },
    /// i(e^{−iL·x·w} − 1)/(x·w − 2π/L).
    MapTransfer {
        id: String,
        x: Option<String>,
        w: String,
        l: f64,
    },
    /// h_k(τ) = (τ − 2kπ)/(e^{−iτ} − 1) at τ = L·x·w, for |τ − 2kπ| < 2π.
    Regularizer {
        id: String,
        x: Option<String>,
        w: String,
        l: f64,
        k: i64,
    },
    /// (e^{−i·a·b} − 1)/(e^{−i·a} − 1), for |a| < 2π.
    PhaseQuotient { id: String, a: String, b: String },
    /// E1(−i·num)/E1(−i·den) with E1(z) = (e^z − 1)/z, for |den| < 2π.
    PhaseRatio { id: String, num: String, den: String },
}

/// Mollifier m(u) = exp(1/(u²−1)) on |u| < 1 as a univariate jet in u.
fn mollifier(u: &Jet) -> Jet {
    let u0 = u.value().re;
    if 1.0 - u0 * u0 <= 2e-3 {
        return zero(u.orders());
    }
    let one = C64::new(1.0, 0.0);
    u.mul(u).add_const(-one).recip().exp()
}

fn mollifier_value(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (u * u - 1.0)).exp()
    }
}

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

// panels graded quadratically towards the flat end at 0
const PANELS: usize = 48;

fn panel_cut(k: usize) -> f64 {
    0.5 * (k as f64 / PANELS as f64).powi(2)
}

/// ∫_a^b m(2s−1) ds by one 8-point Gauss–Legendre panel.
fn mollifier_panel(a: f64, b: f64) -> f64 {
    let h = b - a;
    GL8_NODES
        .iter()
        .zip(&GL8_WEIGHTS)
        .map(|(x, w)| 0.5 * h * w * mollifier_value(2.0 * (a + 0.5 * h * (x + 1.0)) - 1.0))
        .sum()
}

/// ∫_0^{cut(k)} m(2s−1) ds for k = 0..=PANELS.
fn mollifier_prefix() -> &'static [f64] {
    static PREFIX: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    PREFIX.get_or_init(|| {
        let mut acc = vec![0.0];
        for p in 0..PANELS {
            acc.push(acc[p] + mollifier_panel(panel_cut(p), panel_cut(p + 1)));
        }
        acc
    })
}

/// ∫_0^t m(2s−1) ds for t ≤ 1/2, composite Gauss–Legendre.
fn mollifier_integral_half(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let prefix = mollifier_prefix();
    // last panel with cut(p) < t
    let mut p = (((2.0 * t).sqrt() * PANELS as f64) as usize).min(PANELS - 1);
    while p > 0 && panel_cut(p) >= t {
        p -= 1;
    }
    while p + 1 < PANELS && panel_cut(p + 1) < t {
        p += 1;
    }
    prefix[p] + mollifier_panel(panel_cut(p), panel_cut(p + 1).min(t))
}

fn mollifier_mass() -> f64 {
    static MASS: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *MASS.get_or_init(|| 2.0 * mollifier_integral_half(0.5))
}

/// Normalized primitive of the mollifier on [0, 1].
fn mollifier_step_value(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if t <= 0.5 {
        mollifier_integral_half(t) / mollifier_mass()
    } else {
        1.0 - mollifier_integral_half(1.0 - t) / mollifier_mass()
    }
}

/// Smooth step S(t) = ∫_0^t m(2s−1) ds / ∫_0^1 m(2s−1) ds, composed with a jet.
fn mollifier_step(t: &Jet) -> Jet {
    let t0 = t.value().re;
    if t0 <= EDGE {
        return zero(t.orders());
    }
    if t0 >= 1.0 - EDGE {
        return Jet::constant(t.orders(), C64::new(1.0, 0.0));
    }
    let k = t.total_order();
    let mut taylor = vec![C64::new(mollifier_step_value(t0), 0.0)];
    if k > 0 {
        // Taylor coefficients of m(2s−1) at t0, integrated termwise
        let s = Jet::variable(&[k - 1], 0, t0);
        let m = mollifier(&s.scale(C64::new(2.0, 0.0)).add_const(C64::new(-1.0, 0.0)));
        let z = mollifier_mass();
        for (i, c) in m.c.iter().enumerate() {
            taylor.push(*c / ((i + 1) as f64 * z));
        }
    }
    t.compose(&taylor)
}

fn zero(orders: &[usize]) -> Jet {
    Jet::constant(orders, C64::new(0.0, 0.0))
}

/// E1(z) = (e^z − 1)/z composed with a jet.
fn e1(z: &Jet) -> Jet {
    z.compose(&expm1_over_z_taylor(z.value(), z.total_order()))
}

impl SmoothFactor {
    pub fn id(&self) -> &str {
        match self {
            SmoothFactor::Plateau { id, .. }
            | SmoothFactor::Bump { id, .. }
            | SmoothFactor::DividedDiff { id, .. }
            | SmoothFactor::MapTransfer { id, .. }
            | SmoothFactor::Regularizer { id, .. }
            | SmoothFactor::PhaseQuotient { id, .. }
            | SmoothFactor::PhaseRatio { id, .. } => id,
        }
    }

    pub fn vars(&self) -> Vec<String> {
        match self {
            SmoothFactor::Plateau { var, .. } | SmoothFactor::Bump { var, .. } => vec![var.clone()],
            SmoothFactor::DividedDiff { x, w, .. }
            | SmoothFactor::MapTransfer { x, w, .. }
            | SmoothFactor::Regularizer { x, w, .. } => match x {
                Some(x) => vec![x.clone(), w.clone()],
                None => vec![w.clone()],
            },
            SmoothFactor::PhaseQuotient { a, b, .. } => vec![a.clone(), b.clone()],
            SmoothFactor::PhaseRatio { num, den, .. } => vec![num.clone(), den.clone()],
        }
    }

    pub fn depends_on_nu(&self) -> bool {
        matches!(self, SmoothFactor::DividedDiff { .. })
    }

    /// True when the factor vanishes identically on a neighbourhood of `vals`.
    pub fn vanishes_near(&self, vals: &[f64]) -> bool {
        match self {
            SmoothFactor::Plateau {
                lo,
                plat_lo,
                plat_hi,
                hi,
                scale,
                ..
            } => {
                let y = vals[0] / scale;
                y <= lo + EDGE * (plat_lo - lo) || y >= hi - EDGE * (hi - plat_hi)
            }
            SmoothFactor::Bump { center, radius, .. } => {
                let u = (vals[0] - center) / radius;
                1.0 - u * u <= 2e-3
            }
            _ => false,
        }
    }

    /// Jet of the factor at `vals` (ordered as `vars()`), truncated at `orders`.
    pub fn jet(&self, vals: &[f64], orders: &[usize], nu: C64) -> Jet {
        let one = C64::new(1.0, 0.0);
        match self {
            SmoothFactor::Plateau {
                lo,
                plat_lo,
                plat_hi,
                hi,
                scale,
                ..
            } => {
                let y0 = vals[0] / scale;
                if y0 <= *lo || y0 >= *hi {
                    return zero(orders);
                }
                if y0 >= *plat_lo && y0 <= *plat_hi {
                    return Jet::constant(orders, one);
                }
                let y = Jet::variable(orders, 0, vals[0]).scale(one / scale);
                let t = if y0 < *plat_lo {
                    y.add_const(-one * *lo).scale(one / (plat_lo - lo))
                } else {
                    y.scale(-one).add_const(one * *hi).scale(one / (hi - plat_hi))
                };
                mollifier_step(&t)
            }
            SmoothFactor::Bump { center, radius, .. } => {
                let u = Jet::variable(orders, 0, vals[0])
                    .add_const(-one * *center)
                    .scale(one / radius);
                mollifier(&u)
            }
            SmoothFactor::DividedDiff { x, lambda, .. } => {
                // u = ln(xw/λ); value x^{−ν} λ^{−1} ν E1(νu)/E1(u)
                let (wj, xj) = self.split(vals, orders, x.is_some());
                let mut u = wj.ln().add_const(-one * lambda.ln());
                let mut pre = Jet::constant(orders, one / lambda);
                if let Some(xj) = &xj {
                    let lx = xj.ln();
                    u = u.add(&lx);
                    pre = pre.mul(&lx.scale(-nu).exp());
                }
                let num = e1(&u.scale(nu)).scale(nu);
                pre.mul(&num.div(&e1(&u)))
            }
            SmoothFactor::MapTransfer { x, l, .. } => {
                // L·E1(−iLδ), δ = xw − 2π/L
                let p = self.product(vals, orders, x.is_some());
                let lambda = 2.0 * std::f64::consts::PI / l;
                let z = p.add_const(-one * lambda).scale(C64::new(0.0, -l));
                e1(&z).scale(one * *l)
            }
            SmoothFactor::Regularizer { x, l, k, .. } => {
                // i / E1(−iδ), δ = L·x·w − 2kπ
                let p = self.product(vals, orders, x.is_some());
                let d = p
                    .scale(one * *l)
                    .add_const(-one * (2.0 * std::f64::consts::PI * *k as f64));
                e1(&d.scale(C64::new(0.0, -1.0))).recip().scale(C64::new(0.0, 1.0))
            }
            SmoothFactor::PhaseQuotient { .. } => {
                // b · E1(−iab)/E1(−ia)
                let a = Jet::variable(orders, 0, vals[0]);
                let b = Jet::variable(orders, 1, vals[1]);
                let mi = C64::new(0.0, -1.0);
                let num = e1(&a.mul(&b).scale(mi));
                let den = e1(&a.scale(mi));
                b.mul(&num.div(&den))
            }
            SmoothFactor::PhaseRatio { .. } => {
                let mi = C64::new(0.0, -1.0);
                let num = e1(&Jet::variable(orders, 0, vals[0]).scale(mi));
                let den = e1(&Jet::variable(orders, 1, vals[1]).scale(mi));
                num.div(&den)
            }
        }
    }

    fn split(&self, vals: &[f64], orders: &[usize], has_x: bool) -> (Jet, Option<Jet>) {
        if has_x {
            (
                Jet::variable(orders, 1, vals[1]),
                Some(Jet::variable(orders, 0, vals[0])),
            )
        } else {
            (Jet::variable(orders, 0, vals[0]), None)
        }
    }

    fn product(&self, vals: &[f64], orders: &[usize], has_x: bool) -> Jet {
        let (w, x) = self.split(vals, orders, has_x);
        match x {
            Some(x) => x.mul(&w),
            None => w,
        }
    }

    /// Plain value, without derivatives.
    pub fn value(&self, vals: &[f64], nu: C64) -> C64 {
        let orders = vec![0; vals.len()];
        self.jet(vals, &orders, nu).value()
    }
}

/// Plateau factor equal to 1 on [4/5, 5/4] and supported in [3/4, 4/3], in `var/scale`.
pub fn standard_plateau(id: &str, var: &str, scale: f64) -> SmoothFactor {
    SmoothFactor::Plateau {
        id: id.to_string(),
        var: var.to_string(),
        lo: 0.75,
        plat_lo: 0.8,
        plat_hi: 1.25,
        hi: 4.0 / 3.0,
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: &SmoothFactor, v: f64, nu: C64) -> C64 {
        let h = 1e-5;
        (f.value(&[v + h], nu) - f.value(&[v - h], nu)) / (2.0 * h)
    }

    #[test]
    fn plateau_values() {
        let p = standard_plateau("q", "w", 1.0);
        let nu = C64::new(0.0, 0.0);
        assert_eq!(p.value(&[1.0], nu), C64::new(1.0, 0.0));
        assert_eq!(p.value(&[0.7], nu), C64::new(0.0, 0.0));
        assert_eq!(p.value(&[1.4], nu), C64::new(0.0, 0.0));
        let mid = p.value(&[0.775], nu).re;
        assert!((mid - 0.5).abs() < 1e-12);
        // reference primitive by a dense midpoint rule
        let n = 200_000;
        let reference = |t: f64| -> f64 {
            let h = t / n as f64;
            (0..n)
                .map(|k| mollifier_value(2.0 * (k as f64 + 0.5) * h - 1.0) * h)
                .sum()
        };
        let z = reference(1.0);
        for t in [0.05, 0.2, 0.37, 0.8, 0.97] {
            assert!((mollifier_step_value(t) - reference(t) / z).abs() < 1e-9, "t={t}");
        }
        for v in [0.76, 0.79, 1.27, 1.3] {
            let d = p.jet(&[v], &[1], nu).derivative(&[1]);
            assert!((d - fd(&p, v, nu)).norm() < 1e-5 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn cached_primitive_matches_direct_sum() {
        for t in [1e-4, 0.01, 0.1234, 0.25, 0.3, 0.4999, 0.5] {
            let mut direct = 0.0;
            for p in 0..PANELS {
                if panel_cut(p) >= t {
                    break;
                }
                direct += mollifier_panel(panel_cut(p), panel_cut(p + 1).min(t));
            }
            assert!((mollifier_integral_half(t) - direct).abs() < 1e-15, "t={t}");
        }
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let nu = C64::new(0.0, 7.0);
        let f = SmoothFactor::DividedDiff {
            id: "D".into(),
            x: Some("x".into()),
            w: "w".into(),
            lambda: 1.3,
        };
        let (x, w) = (1.1, 0.9);
        let direct = ((C64::new(w / 1.3, 0.0)).powc(nu) - C64::new(x, 0.0).powc(-nu)) / (x * w - 1.3);
        assert!((f.value(&[x, w], nu) - direct).norm() < 1e-12);
        // on the locus xw = λ the limit is ν x^{−ν}/λ
        let x = 1.3 / 0.95;
        let lim = nu * C64::new(x, 0.0).powc(-nu) / 1.3;
        assert!((f.value(&[x, 0.95], nu) - lim).norm() < 1e-12);
    }

    #[test]
    fn map_transfer_matches_quotient() {
        let f = SmoothFactor::MapTransfer {
            id: "H".into(),
            x: None,
            w: "w".into(),
            l: 1.0,
        };
        let w = 5.0;
        let lambda = 2.0 * std::f64::consts::PI;
        let direct = C64::new(0.0, 1.0) * ((C64::new(0.0, -w)).exp() - 1.0) / (w - lambda);
        assert!((f.value(&[w], C64::new(0.0, 0.0)) - direct).norm() < 1e-12);
    }

    #[test]
    fn regularizer_matches_quotient() {
        let f = SmoothFactor::Regularizer {
            id: "h".into(),
            x: None,
            w: "w".into(),
            l: 1.0,
            k: 1,
        };
        let tau = 2.0 * std::f64::consts::PI + 0.4;
        let direct = (tau - 2.0 * std::f64::consts::PI) / ((C64::new(0.0, -tau)).exp() - 1.0);
        assert!((f.value(&[tau], C64::new(0.0, 0.0)) - direct).norm() < 1e-12);
    }

    #[test]
    fn phase_quotient_limit() {
        let f = SmoothFactor::PhaseQuotient {
            id: "r".into(),
            a: "x1".into(),
            b: "x2".into(),
        };
        let v = f.value(&[0.0, 0.7], C64::new(0.0, 0.0));
        assert!((v - C64::new(0.7, 0.0)).norm() < 1e-14);
        let (a, b) = (0.5, 0.3);
        let direct = ((C64::new(0.0, -a * b)).exp() - 1.0) / ((C64::new(0.0, -a)).exp() - 1.0);
        assert!((f.value(&[a, b], C64::new(0.0, 0.0)) - direct).norm() < 1e-13);
    }

    #[test]
    fn phase_ratio_matches_quotient() {
        let f = SmoothFactor::PhaseRatio {
            id: "r".into(),
            num: "x2".into(),
            den: "x1".into(),
        };
        let (u, v) = (0.4, -0.9);
        let direct = (((C64::new(0.0, -u)).exp() - 1.0) / u) / (((C64::new(0.0, -v)).exp() - 1.0) / v);
        assert!((f.value(&[u, v], C64::new(0.0, 0.0)) - direct).norm() < 1e-13);
        assert!((f.value(&[0.0, 0.0], C64::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
    }
}
