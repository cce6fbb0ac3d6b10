//! One-parameter subgroup actions of the induced model on sampled functions.

use serde::{Deserialize, Serialize};

use super::spec::{GeneratorId, ModelKind, ModelSpec, Sign};
use crate::closedform::jet::C64;
use crate::error::{Error, Result};
use crate::grid::function::GridFunction;

/// Cells masked near the singular locus may not exceed this share of the grid.
pub const MAX_MASKED_FRACTION: f64 = 0.01;

/// exp(s·Z) for a diagonal X_i or unipotent u_{i,j}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneParamElement {
    pub generator: GeneratorId,
    pub s: f64,
}

#[derive(Clone, Debug)]
pub struct ActedFunction {
    pub f: GridFunction,
    /// Cells within one spacing of 1 − x_{j−1}s = 0; their values are zero.
    pub masked: Vec<bool>,
    pub masked_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionNorms {
    pub before: f64,
    pub after: f64,
    pub masked_fraction: f64,
}

impl ActionNorms {
    pub fn ratio(&self) -> f64 {
        self.after / self.before
    }
}

fn axis_of(f: &GridFunction, k: usize) -> Result<usize> {
    f.axis_index(&format!("x{k}"))
}

/// Apply π(exp(sZ)) on the position model, reading off-grid values by quintic interpolation.
pub fn group_action(model: &ModelSpec, elem: OneParamElement, f: &GridFunction) -> Result<ActedFunction> {
    model.validate()?;
    if model.kind != ModelKind::IndPPosition {
        return Err(Error::InvalidModel(format!(
            "group actions are implemented for ind_p only, got {}",
            model.kind.name()
        )));
    }
    let n = model.n;
    let nv = n - 1;
    if f.axes().len() != nv {
        return Err(Error::InvalidModel(format!(
            "expected {nv} axes, got {}",
            f.axes().len()
        )));
    }
    let idx: Vec<usize> = (1..n).map(|k| axis_of(f, k)).collect::<Result<_>>()?;
    let none = vec![false; f.len()];
    if elem.s == 0.0 {
        return Ok(ActedFunction {
            f: f.clone(),
            masked: none,
            masked_fraction: 0.0,
        });
    }
    let s = elem.s;
    let t = model.t;
    let nf = n as f64;
    let mut src = vec![0.0; nv];
    match elem.generator {
        GeneratorId::Diag(1) => {
            let mult = C64::new(0.0, t * s).exp() * (s * nf / 2.0).exp();
            let out = f.map_points(|p, _| {
                for k in 0..nv {
                    let scale = if k == 0 { (2.0 * s).exp() } else { s.exp() };
                    src[idx[k]] = scale * p[idx[k]];
                }
                mult * f.interpolate(&src)
            });
            Ok(unmasked(out))
        }
        GeneratorId::Diag(i) if (2..n).contains(&i) => {
            let out = f.map_points(|p, _| {
                src.copy_from_slice(p);
                src[idx[i - 2]] = (-s).exp() * p[idx[i - 2]];
                src[idx[i - 1]] = s.exp() * p[idx[i - 1]];
                f.interpolate(&src)
            });
            Ok(unmasked(out))
        }
        GeneratorId::Unip(i, j) if i >= 2 && i <= n && j >= 1 && j <= n && i != j => {
            let target = idx[i - 2];
            let out = f.map_points(|p, _| {
                src.copy_from_slice(p);
                let shift = if j == 1 { s } else { s * p[idx[j - 2]] };
                src[target] = p[target] - shift;
                f.interpolate(&src)
            });
            Ok(unmasked(out))
        }
        GeneratorId::Unip(1, j) if j >= 2 && j <= n => {
            let a = idx[j - 2];
            let h = f.axes()[a].spacing();
            let mut masked = none;
            let mut out = f.clone();
            for (flat, v) in out.values_mut().iter_mut().enumerate() {
                let p = f.point(flat);
                let d = 1.0 - p[a] * s;
                // |d| < |s|·h puts the cell within one spacing of x = 1/s
                if d.abs() <= s.abs() * h {
                    masked[flat] = true;
                    *v = C64::new(0.0, 0.0);
                    continue;
                }
                for k in 0..nv {
                    src[k] = p[k] / d;
                }
                let sign = match model.sign {
                    Sign::Plus => 1.0,
                    Sign::Minus => d.signum(),
                };
                *v = d.abs().powf(-nf / 2.0) * C64::new(0.0, -t * d.abs().ln()).exp() * sign * f.interpolate(&src);
            }
            let masked_fraction = masked.iter().filter(|m| **m).count() as f64 / masked.len() as f64;
            if masked_fraction > MAX_MASKED_FRACTION {
                return Err(Error::SingularLocus { masked_fraction });
            }
            Ok(ActedFunction {
                f: out,
                masked,
                masked_fraction,
            })
        }
        g => Err(Error::UnknownGenerator {
            model: model.label(),
            gen: g.to_string(),
        }),
    }
}

fn unmasked(f: GridFunction) -> ActedFunction {
    let masked = vec![false; f.len()];
    ActedFunction {
        f,
        masked,
        masked_fraction: 0.0,
    }
}

/// ‖f‖ and ‖π(exp sZ)f‖ over the grid, masked cells excluded from both.
pub fn action_norms(model: &ModelSpec, elem: OneParamElement, f: &GridFunction) -> Result<ActionNorms> {
    let acted = group_action(model, elem, f)?;
    let keep = |g: &GridFunction| {
        let mut g = g.clone();
        for (v, m) in g.values_mut().iter_mut().zip(&acted.masked) {
            if *m {
                *v = C64::new(0.0, 0.0);
            }
        }
        g.l2_norm(None)
    };
    Ok(ActionNorms {
        before: keep(f),
        after: keep(&acted.f),
        masked_fraction: acted.masked_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::function::GridAxis;

    fn bump2(n: usize, half: f64) -> GridFunction {
        let axes = vec![GridAxis::new("x1", -half, half, n), GridAxis::new("x2", -half, half, n)];
        GridFunction::sample(axes, |p| {
            let r2 = (p[0] - 0.2).powi(2) + (p[1] + 0.1).powi(2);
            C64::new((-2.0 * r2).exp(), 0.3 * p[0] * (-2.0 * r2).exp())
        })
        .unwrap()
    }

    fn model() -> ModelSpec {
        ModelSpec::ind_p(3).with_t(2.0)
    }

    #[test]
    fn identity_at_zero() {
        let f = bump2(65, 4.0);
        for g in [GeneratorId::Diag(1), GeneratorId::Unip(1, 2), GeneratorId::Unip(3, 1)] {
            let a = group_action(&model(), OneParamElement { generator: g, s: 0.0 }, &f).unwrap();
            assert_eq!(a.f.values(), f.values());
        }
    }

    #[test]
    fn dilation_and_translation_are_unitary() {
        let f = bump2(257, 6.0);
        for (g, s) in [
            (GeneratorId::Diag(1), 0.2),
            (GeneratorId::Diag(2), -0.3),
            (GeneratorId::Unip(2, 1), 0.7),
            (GeneratorId::Unip(3, 2), 0.4),
        ] {
            let r = action_norms(&model(), OneParamElement { generator: g, s }, &f).unwrap();
            assert!((r.ratio() - 1.0).abs() < 1e-6, "{g} {}", r.ratio());
        }
    }

    #[test]
    fn projective_action_is_nearly_unitary() {
        let f = bump2(257, 6.0);
        for sign in [Sign::Plus, Sign::Minus] {
            let mut m = model();
            m.sign = sign;
            let r = action_norms(
                &m,
                OneParamElement {
                    generator: GeneratorId::Unip(1, 2),
                    s: 0.1,
                },
                &f,
            )
            .unwrap();
            assert!((r.ratio() - 1.0).abs() < 1e-3, "{}", r.ratio());
            assert!(r.masked_fraction < MAX_MASKED_FRACTION);
        }
    }

    #[test]
    fn inverse_consistency() {
        let f = bump2(257, 6.0);
        for (g, s) in [
            (GeneratorId::Diag(1), 0.15),
            (GeneratorId::Unip(3, 1), 0.5),
            (GeneratorId::Unip(1, 3), 0.1),
        ] {
            let fwd = group_action(&model(), OneParamElement { generator: g, s }, &f).unwrap();
            let back = group_action(&model(), OneParamElement { generator: g, s: -s }, &fwd.f).unwrap();
            let err = back.f.try_sub(&f).unwrap().l2_norm(None) / f.l2_norm(None);
            assert!(err < 2e-6, "{g} {err}");
        }
    }

    #[test]
    fn rejects_other_models_and_generators() {
        let f = bump2(17, 1.0);
        let e = OneParamElement {
            generator: GeneratorId::Diag(1),
            s: 0.1,
        };
        assert!(group_action(&ModelSpec::new(ModelKind::Sl2R2), e, &f).is_err());
        let bad = OneParamElement {
            generator: GeneratorId::Unip(4, 1),
            s: 0.1,
        };
        assert!(group_action(&model(), bad, &f).is_err());
    }
}
