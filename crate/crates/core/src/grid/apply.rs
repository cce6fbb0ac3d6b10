//! Model operators applied to grid functions by finite differences.

use std::collections::HashMap;

use super::fd::fd_derivative;
use super::function::GridFunction;
use crate::closedform::jet::C64;
use crate::error::{Error, Result};
use crate::weyl::OperatorPoly;

/// Apply a normal-ordered operator; each derivative order per axis must be ≤ 4.
pub fn apply_operator_grid(op: &OperatorPoly, f: &GridFunction, nu: C64) -> Result<GridFunction> {
    let axis_of: Vec<Option<usize>> = op.vars().iter().map(|v| f.axis_index(v).ok()).collect();
    let mut cache: HashMap<Vec<u32>, GridFunction> = HashMap::new();
    let nax = f.axes().len();
    let mut out = f.scale(C64::new(0.0, 0.0));
    for (m, c) in op.terms() {
        let mut d = vec![0u32; nax];
        let mut mult = vec![0i32; nax];
        for (k, target) in axis_of.iter().enumerate() {
            match target {
                Some(a) => {
                    d[*a] = m.deriv[k];
                    mult[*a] = m.mult[k];
                }
                None if m.deriv[k] != 0 || m.mult[k] != 0 => {
                    return Err(Error::InvalidModel(format!("grid has no axis {}", op.vars()[k])))
                }
                None => {}
            }
        }
        if !cache.contains_key(&d) {
            let mut g = f.clone();
            for (a, &o) in d.iter().enumerate() {
                if o > 0 {
                    g = fd_derivative(&g, &f.axes()[a].var, o)?;
                }
            }
            cache.insert(d.clone(), g);
        }
        let coeff = c.eval(nu);
        let term = cache[&d].map_points(|p, v| {
            let mut s = coeff * v;
            for (a, &e) in mult.iter().enumerate() {
                if e != 0 {
                    s *= p[a].powi(e);
                }
            }
            s
        });
        out = out.try_add(&term)?;
    }
    Ok(out)
}
