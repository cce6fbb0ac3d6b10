//! Generator catalogs: the derived Lie-algebra fields of each model.

use num_rational::BigRational;
use num_traits::Zero;

use super::spec::{GeneratorId, ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::weyl::fourier::fourier_substitute;
use crate::weyl::poly::{var_set, OperatorPoly, VarSet};
use crate::weyl::scalar::{gq, q, q_frac, Scalar, Q};

/// Name of the Fourier-dual variable.
pub const DUAL_VAR: &str = "w";

pub(crate) fn exact(v: f64) -> Q {
    BigRational::from_float(v).unwrap_or_else(Q::zero)
}

fn real(v: Q) -> Scalar {
    Scalar::rational(v)
}

fn imag(v: Q) -> Scalar {
    Scalar::constant(gq(Q::zero(), v))
}

/// Variable names of the model, in catalog order.
pub fn variables(spec: &ModelSpec) -> Result<VarSet> {
    spec.validate()?;
    Ok(match spec.kind {
        ModelKind::Sl2R2 | ModelKind::Sl2R4a => var_set(&["x", "xi"]),
        ModelKind::Sl2R2Fourier => var_set(&["x", "y"]),
        ModelKind::Sl2R4bPosition => var_set(&["x", "xi", "z"]),
        ModelKind::Sl2R4bFourier => var_set(&["x", "y", "z"]),
        ModelKind::IndPPosition => ind_p_vars(spec.n),
        ModelKind::IndPFourier => {
            let a = spec.axis_index()?;
            let names: Vec<String> = (1..spec.n)
                .map(|k| if k == a { DUAL_VAR.to_string() } else { format!("x{k}") })
                .collect();
            var_set(&names)
        }
    })
}

fn ind_p_vars(n: usize) -> VarSet {
    let names: Vec<String> = (1..n).map(|k| format!("x{k}")).collect();
    var_set(&names)
}

/// Generator order used by catalogs and matrix oracles.
pub fn generator_ids(spec: &ModelSpec) -> Vec<GeneratorId> {
    match spec.kind {
        ModelKind::Sl2R2 | ModelKind::Sl2R2Fourier => vec![
            GeneratorId::X,
            GeneratorId::U,
            GeneratorId::V,
            GeneratorId::Y(1),
            GeneratorId::Y(2),
        ],
        ModelKind::Sl2R4a | ModelKind::Sl2R4bPosition | ModelKind::Sl2R4bFourier => vec![
            GeneratorId::X,
            GeneratorId::U,
            GeneratorId::V,
            GeneratorId::Y(1),
            GeneratorId::Y(2),
            GeneratorId::Y(3),
            GeneratorId::Y(4),
        ],
        ModelKind::IndPPosition | ModelKind::IndPFourier => {
            let n = spec.n;
            let mut ids: Vec<GeneratorId> = (1..n).map(GeneratorId::Diag).collect();
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        ids.push(GeneratorId::Unip(i, j));
                    }
                }
            }
            ids
        }
    }
}

/// Position-picture field of the induced model, ν formal.
fn ind_p_position(n: usize, gen: GeneratorId, vars: &VarSet) -> Option<OperatorPoly> {
    let x = |k: usize| OperatorPoly::var(vars, &format!("x{k}"));
    let d = |k: usize| OperatorPoly::deriv(vars, &format!("x{k}"));
    let euler = |k: usize| &x(k) * &d(k);
    let c = &Scalar::rational(q_frac(n as i64, 2)) + &Scalar::nu();
    let c_op = OperatorPoly::scalar(vars, c);
    match gen {
        GeneratorId::Diag(1) if n >= 2 => {
            let mut op = &c_op + &euler(1).scale(&Scalar::int(2));
            for k in 2..n {
                op = &op + &euler(k);
            }
            Some(op)
        }
        GeneratorId::Diag(i) if (2..n).contains(&i) => Some(&euler(i) - &euler(i - 1)),
        GeneratorId::Unip(1, j) if (2..=n).contains(&j) => {
            let xj = x(j - 1);
            let mut op = &c_op * &xj;
            for k in 1..n {
                op = &op + &(&xj * &euler(k));
            }
            Some(op)
        }
        GeneratorId::Unip(i, 1) if (2..=n).contains(&i) => Some(-d(i - 1)),
        GeneratorId::Unip(i, j) if (2..=n).contains(&i) && (2..=n).contains(&j) && i != j => {
            Some(-(&x(j - 1) * &d(i - 1)))
        }
        _ => None,
    }
}

fn sl2r2_position(spec: &ModelSpec, gen: GeneratorId, vars: &VarSet) -> Option<OperatorPoly> {
    let x = OperatorPoly::var(vars, "x");
    let xi = OperatorPoly::var(vars, "xi");
    let dx = OperatorPoly::deriv(vars, "x");
    let dxi = OperatorPoly::deriv(vars, "xi");
    let t = exact(spec.t);
    let s = exact(spec.s_param);
    let y1 = xi.scale(&imag(q(-1)));
    let y2 = x.scale(&imag(q(1)));
    Some(match gen {
        GeneratorId::X => &(&xi * &dxi) - &(&x * &dx),
        GeneratorId::U => {
            let mult = OperatorPoly::var_pow(vars, "x", -2).scale(&imag(t));
            &mult - &(&xi * &dx)
        }
        GeneratorId::V => -(&x * &dxi),
        GeneratorId::Y(1) => y1,
        GeneratorId::Y(2) => y2,
        GeneratorId::Y(3) if spec.kind == ModelKind::Sl2R4a => y1.scale(&real(s)),
        GeneratorId::Y(4) if spec.kind == ModelKind::Sl2R4a => y2.scale(&real(s)),
        _ => return None,
    })
}

fn sl2r4b_position(spec: &ModelSpec, gen: GeneratorId, vars: &VarSet) -> Option<OperatorPoly> {
    let x = OperatorPoly::var(vars, "x");
    let xi = OperatorPoly::var(vars, "xi");
    let z = OperatorPoly::var(vars, "z");
    let dx = OperatorPoly::deriv(vars, "x");
    let dxi = OperatorPoly::deriv(vars, "xi");
    let dz = OperatorPoly::deriv(vars, "z");
    let s = exact(spec.s_param);
    Some(match gen {
        GeneratorId::X => &(&xi * &dxi) - &(&x * &dx),
        GeneratorId::U => -(&(&xi * &dx) + &(&OperatorPoly::var_pow(vars, "x", -2) * &dz)),
        GeneratorId::V => -(&x * &dxi),
        GeneratorId::Y(1) => xi.scale(&imag(q(-1))),
        GeneratorId::Y(2) => x.scale(&imag(q(1))),
        GeneratorId::Y(3) => (&OperatorPoly::var_pow(vars, "x", -1) + &(&xi * &z)).scale(&imag(s)),
        GeneratorId::Y(4) => (&x * &z).scale(&imag(-s)),
        _ => return None,
    })
}

/// Realize one generator as an exact operator.
pub fn realize(spec: &ModelSpec, gen: GeneratorId) -> Result<OperatorPoly> {
    let vars = variables(spec)?;
    let unknown = || Error::UnknownGenerator {
        model: spec.label(),
        gen: gen.to_string(),
    };
    let op = match spec.kind {
        ModelKind::IndPPosition => ind_p_position(spec.n, gen, &vars),
        ModelKind::IndPFourier => {
            let a = spec.axis_index()?;
            let pos_vars = ind_p_vars(spec.n);
            ind_p_position(spec.n, gen, &pos_vars).map(|op| fourier_substitute(&op, &format!("x{a}"), DUAL_VAR))
        }
        ModelKind::Sl2R2 | ModelKind::Sl2R4a => sl2r2_position(spec, gen, &vars),
        ModelKind::Sl2R2Fourier => {
            let pos = variables(&ModelSpec {
                kind: ModelKind::Sl2R2,
                ..spec.clone()
            })?;
            sl2r2_position(spec, gen, &pos).map(|op| fourier_substitute(&op, "xi", "y"))
        }
        ModelKind::Sl2R4bPosition => sl2r4b_position(spec, gen, &vars),
        ModelKind::Sl2R4bFourier => {
            let pos = variables(&ModelSpec {
                kind: ModelKind::Sl2R4bPosition,
                ..spec.clone()
            })?;
            sl2r4b_position(spec, gen, &pos).map(|op| fourier_substitute(&op, "xi", "y"))
        }
    };
    op.ok_or_else(unknown)
}

/// Full generator list of the model.
pub fn generators(spec: &ModelSpec) -> Result<Vec<(GeneratorId, OperatorPoly)>> {
    generator_ids(spec)
        .into_iter()
        .map(|g| realize(spec, g).map(|op| (g, op)))
        .collect()
}

/// The sl(2,R) triple (X, U, V) of the model.
pub fn sl2_triple(spec: &ModelSpec) -> Result<[GeneratorId; 3]> {
    match spec.kind {
        ModelKind::IndPPosition | ModelKind::IndPFourier => {
            Ok([GeneratorId::Diag(1), GeneratorId::Unip(1, 2), GeneratorId::Unip(2, 1)])
        }
        _ => Ok([GeneratorId::X, GeneratorId::U, GeneratorId::V]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(spec: &ModelSpec, text: &str) -> OperatorPoly {
        OperatorPoly::parse(&variables(spec).unwrap(), text).unwrap()
    }

    #[test]
    fn ind_p_u21_is_minus_d1() {
        let spec = ModelSpec::ind_p(3);
        let op = realize(&spec, GeneratorId::Unip(2, 1)).unwrap();
        assert_eq!(op, parse(&spec, "(-1+0i)*nu^0 * dx1^1"));
    }

    #[test]
    fn ind_p_catalog_size() {
        assert_eq!(generators(&ModelSpec::ind_p(3)).unwrap().len(), 8);
        assert_eq!(generators(&ModelSpec::ind_p(4)).unwrap().len(), 15);
    }

    #[test]
    fn sl2r2_fourier_fields() {
        let spec = ModelSpec::new(ModelKind::Sl2R2Fourier).with_t(3.0);
        let v = realize(&spec, GeneratorId::V).unwrap();
        assert_eq!(v, parse(&spec, "(0-1i)*nu^0 * x^1 * y^1"));
        let x = realize(&spec, GeneratorId::X).unwrap();
        assert_eq!(
            x,
            parse(
                &spec,
                "(-1+0i)*nu^0\n(-1+0i)*nu^0 * x^1 * dx^1\n(-1+0i)*nu^0 * y^1 * dy^1"
            )
        );
        let u = realize(&spec, GeneratorId::U).unwrap();
        assert_eq!(u, parse(&spec, "(0+3i)*nu^0 * x^-2\n(0-1i)*nu^0 * dx^1 * dy^1"));
        assert_eq!(
            realize(&spec, GeneratorId::Y(1)).unwrap(),
            parse(&spec, "(1+0i)*nu^0 * dy^1")
        );
        assert_eq!(
            realize(&spec, GeneratorId::Y(2)).unwrap(),
            parse(&spec, "(0+1i)*nu^0 * x^1")
        );
    }

    #[test]
    fn sl2r4b_fourier_y3() {
        let spec = ModelSpec::new(ModelKind::Sl2R4bFourier).with_s(2.0);
        let y3 = realize(&spec, GeneratorId::Y(3)).unwrap();
        assert_eq!(y3, parse(&spec, "(-2+0i)*nu^0 * z^1 * dy^1\n(0+2i)*nu^0 * x^-1"));
    }

    #[test]
    fn unknown_generator_rejected() {
        let err = realize(&ModelSpec::ind_p(2), GeneratorId::Diag(2)).unwrap_err();
        assert!(matches!(err, Error::UnknownGenerator { .. }));
        assert!(realize(&ModelSpec::new(ModelKind::Sl2R2), GeneratorId::Y(3)).is_err());
    }
}
