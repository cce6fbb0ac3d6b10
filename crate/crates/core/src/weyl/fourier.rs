//! Partial Fourier transform as a Weyl-algebra substitution.
//!
//! With f̂(ω) = ∫ f(r) e^{−irω} dr, multiplication by the position variable
//! becomes i∂ω and ∂ becomes multiplication by iω.

use super::poly::{OperatorPoly, VarSet, WeylMonomial};
use super::scalar::Scalar;

/// Transform `from` into the dual variable `to`, which takes its slot.
/// Panics if `from` carries a negative power (no polynomial image).
pub fn fourier_substitute(op: &OperatorPoly, from: &str, to: &str) -> OperatorPoly {
    let vars = op.vars();
    let idx = vars
        .iter()
        .position(|v| v == from)
        .unwrap_or_else(|| panic!("variable {from} not present"));
    let new_vars: VarSet = vars
        .iter()
        .map(|v| if v == from { to.to_string() } else { v.clone() })
        .collect::<Vec<_>>()
        .into();
    let mut out = OperatorPoly::zero(&new_vars);
    let i_unit = Scalar::i();
    for (m, c) in op.terms() {
        let p = m.mult[idx];
        let d = m.deriv[idx];
        assert!(p >= 0, "negative power of {from} has no Fourier image");
        let mut left = m.clone();
        left.mult[idx] = 0;
        left.deriv = vec![0; vars.len()];
        let mut right = WeylMonomial::identity(vars.len());
        right.deriv = m.deriv.clone();
        right.deriv[idx] = 0;
        let dual = &OperatorPoly::deriv_pow(&new_vars, to, p as u32) * &OperatorPoly::var_pow(&new_vars, to, d as i32);
        let coeff = c * &i_unit.pow(p as u32 + d);
        let term = &(&OperatorPoly::monomial(&new_vars, left, coeff) * &dual)
            * &OperatorPoly::monomial(&new_vars, right, Scalar::one());
        out = &out + &term;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::poly::var_set;

    #[test]
    fn derivative_becomes_multiplication() {
        let v = var_set(&["x"]);
        let d = OperatorPoly::deriv(&v, "x");
        let f = fourier_substitute(&d, "x", "w");
        let w = var_set(&["w"]);
        assert_eq!(f, OperatorPoly::var(&w, "w").scale(&Scalar::i()));
    }

    #[test]
    fn preserves_brackets() {
        let v = var_set(&["x", "y"]);
        let a = &OperatorPoly::var_pow(&v, "x", 2) * &OperatorPoly::deriv(&v, "y");
        let b = &OperatorPoly::var(&v, "y") * &OperatorPoly::deriv_pow(&v, "x", 2);
        let lhs = fourier_substitute(&a.commutator(&b), "x", "w");
        let rhs = fourier_substitute(&a, "x", "w").commutator(&fourier_substitute(&b, "x", "w"));
        assert_eq!(lhs, rhs);
    }
}
