//! Closed-form coboundary/solution pairs in the partial Fourier picture.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::closedform::factor::{standard_plateau, SmoothFactor};
use crate::closedform::jet::C64;
use crate::closedform::quad::{Axis, Domain};
use crate::closedform::termsum::TermSum;
use crate::error::{Error, Result};
use crate::models::catalog::{variables, DUAL_VAR};
use crate::models::{realize, GeneratorId, ModelSpec};
use crate::weyl::{OperatorPoly, Scalar, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Twist,
    Map,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMeta {
    pub n: usize,
    pub j: usize,
    pub i: usize,
    /// ν = √−1·t
    pub nu: [f64; 2],
    pub lambda: f64,
    /// Map step; present for the map variant.
    pub l: Option<f64>,
    pub variant: Variant,
}

/// g and f with (u_{i,j} + √−1λ)f = g (twist) or (e^{−iL x_{j−1}ω} − 1)f = g (map).
#[derive(Clone, Debug)]
pub struct CounterexamplePair {
    pub model: ModelSpec,
    pub g: TermSum,
    pub f: TermSum,
    /// Ĝ₁ = q·((ω/λ)^ν − x^{−ν}), without the G₂ plateaus.
    pub g1: TermSum,
    /// G₂ (1 when no spectator variables remain).
    pub g2: TermSum,
    pub nu: C64,
    pub meta: PairMeta,
}

fn check_indices(n: usize, j: usize, i: usize) -> Result<()> {
    if n < 2 || j < 1 || i <= j || i > n {
        return Err(Error::InvalidIndices(format!(
            "need n ≥ 2 and n ≥ i > j ≥ 1, got n={n} j={j} i={i}"
        )));
    }
    Ok(())
}

/// Name of x_{j−1}, or None when j = 1 (x₀ ≡ 1).
pub fn x_var(j: usize) -> Option<String> {
    (j > 1).then(|| format!("x{}", j - 1))
}

pub fn build_counterexample(
    n: usize,
    j: usize,
    i: usize,
    t: f64,
    lambda_or_l: f64,
    variant: Variant,
) -> Result<CounterexamplePair> {
    check_indices(n, j, i)?;
    if t.abs() < 4.0 {
        return Err(Error::InvalidIndices(format!("need |ν| ≥ 4, got t={t}")));
    }
    if !(lambda_or_l > 0.0) {
        return Err(Error::InvalidIndices(format!(
            "λ or L must be positive, got {lambda_or_l}"
        )));
    }
    let (lambda, l) = match variant {
        Variant::Twist => (lambda_or_l, None),
        Variant::Map => (2.0 * std::f64::consts::PI / lambda_or_l, Some(lambda_or_l)),
    };
    let model = ModelSpec::ind_p_fourier(n, i - 1);
    let vars = variables(&model)?;
    let nu = C64::new(0.0, t);
    let xv = x_var(j);

    let one = Rational64::from_integer(1);
    let zero = Rational64::from_integer(0);
    let mut q = TermSum::factor(&vars, standard_plateau("q_w", DUAL_VAR, lambda))?;
    let mut diff = TermSum::power(&vars, DUAL_VAR, lambda, zero, one)?;
    match &xv {
        Some(x) => {
            q = q.try_mul(&TermSum::factor(&vars, standard_plateau("q_x", x, 1.0))?)?;
            diff = diff.try_sub(&TermSum::power(&vars, x, 1.0, zero, -one)?)?;
        }
        None => diff = diff.try_sub(&TermSum::one(&vars))?,
    }
    let g1 = q.try_mul(&diff)?;
    let mut g2 = TermSum::one(&vars);
    for v in vars.iter() {
        if v != DUAL_VAR && Some(v) != xv.as_ref() {
            g2 = g2.try_mul(&TermSum::factor(&vars, standard_plateau("G2", v, 1.0))?)?;
        }
    }
    let g_twist = g1.try_mul(&g2)?;
    let d = TermSum::factor(
        &vars,
        SmoothFactor::DividedDiff {
            id: "D".into(),
            x: xv.clone(),
            w: DUAL_VAR.into(),
            lambda,
        },
    )?;
    let f = q.try_mul(&d)?.try_mul(&g2)?.scale(&Scalar::i());
    let g = match variant {
        Variant::Twist => g_twist,
        Variant::Map => TermSum::factor(
            &vars,
            SmoothFactor::MapTransfer {
                id: "H".into(),
                x: xv.clone(),
                w: DUAL_VAR.into(),
                l: l.unwrap(),
            },
        )?
        .try_mul(&g_twist)?,
    };
    Ok(CounterexamplePair {
        model,
        g,
        f,
        g1,
        g2,
        nu,
        meta: PairMeta {
            n,
            j,
            i,
            nu: [0.0, t],
            lambda,
            l,
            variant,
        },
    })
}

impl CounterexamplePair {
    pub fn vars(&self) -> &VarSet {
        self.g.vars()
    }

    /// û_{j,i}: the direction in which the solution is not tame.
    pub fn u_direction(&self) -> Result<OperatorPoly> {
        realize(&self.model, GeneratorId::Unip(self.meta.j, self.meta.i))
    }

    /// û_{i,j} = −√−1·x_{j−1}ω, the twisted flow direction.
    pub fn flow_direction(&self) -> Result<OperatorPoly> {
        realize(&self.model, GeneratorId::Unip(self.meta.i, self.meta.j))
    }

    /// Integration region covering the support, with plateau edges as breakpoints.
    pub fn domain(&self) -> Domain {
        let (lo, hi) = (0.75, 4.0 / 3.0);
        let breaks = vec![0.8, 1.25];
        let lambda = self.meta.lambda;
        let xv = x_var(self.meta.j);
        let axes = self
            .vars()
            .iter()
            .map(|v| {
                if v == DUAL_VAR {
                    Axis {
                        var: v.clone(),
                        lo: lo * lambda,
                        hi: hi * lambda,
                        breaks: breaks.iter().map(|b| b * lambda).collect(),
                        oscillating: true,
                    }
                } else {
                    Axis {
                        var: v.clone(),
                        lo,
                        hi,
                        breaks: breaks.clone(),
                        oscillating: false,
                    }
                }
            })
            .collect();
        Domain {
            axes,
            frequency: self.nu.im,
            product: xv.map(|x| (x, DUAL_VAR.to_string())),
        }
    }

    /// Pointwise residual of the defining equation at `point`.
    pub fn residual(&self, point: &[f64]) -> Result<f64> {
        let f = self.f.evaluate(point, self.nu)?;
        let g = self.g.evaluate(point, self.nu)?;
        let wi = self.vars().iter().position(|v| v == DUAL_VAR).unwrap();
        let x = match x_var(self.meta.j) {
            Some(xv) => point[self.vars().iter().position(|v| *v == xv).unwrap()],
            None => 1.0,
        };
        let p = x * point[wi];
        let lhs = match self.meta.variant {
            Variant::Twist => C64::new(0.0, -1.0) * (p - self.meta.lambda) * f,
            Variant::Map => ((C64::new(0.0, -self.meta.l.unwrap() * p)).exp() - 1.0) * f,
        };
        Ok((lhs - g).norm())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "g": self.g.to_json(),
            "f": self.f.to_json(),
            "metadata": self.meta,
        })
    }
}
