//! Batch evaluation of several TermSums sharing factor and power caches.

use std::collections::HashMap;

use num_rational::Rational64;

use super::factor::SmoothFactor;
use super::jet::{layout, Jet, C64};
use super::termsum::TermSum;
use crate::error::{Error, Result};
use crate::weyl::VarSet;

struct FactorPlan {
    factor: SmoothFactor,
    vars: Vec<usize>,
    orders: Vec<usize>,
}

struct CompiledTerm {
    coeff: C64,
    /// (factor, flat jet index)
    smooth: Vec<(usize, usize)>,
    power: usize,
}

pub struct Evaluator {
    vars: VarSet,
    factors: Vec<FactorPlan>,
    bases: Vec<(usize, f64)>,
    powers: Vec<Vec<(usize, C64)>>,
    sums: Vec<Vec<CompiledTerm>>,
}

/// Per-thread scratch space; factor jets are reused while their inputs repeat.
pub struct EvalState {
    inputs: Vec<Vec<f64>>,
    jets: Vec<Option<Jet>>,
    logs: Vec<C64>,
    powvals: Vec<C64>,
    pub values: Vec<C64>,
}

fn r(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

impl Evaluator {
    pub fn new(sums: &[&TermSum], nu: C64) -> Result<Self> {
        let vars = match sums.first() {
            Some(s) => s.vars().clone(),
            None => return Err(Error::DegenerateInput("no functions to evaluate".into())),
        };
        let mut reg = TermSum::zero(&vars);
        let mut keyed = Vec::with_capacity(sums.len());
        for s in sums {
            if *s.vars() != vars {
                return Err(Error::InvalidModel("evaluator needs one variable set".into()));
            }
            keyed.push(reg.import(s));
        }
        let var_of = |name: &str| vars.iter().position(|v| v == name).unwrap();
        let mut factors: Vec<FactorPlan> = reg
            .factors()
            .iter()
            .map(|f| FactorPlan {
                vars: f.vars().iter().map(|v| var_of(v)).collect(),
                orders: vec![0; f.vars().len()],
                factor: f.clone(),
            })
            .collect();
        for terms in &keyed {
            for (k, _) in terms {
                for (f, o) in &k.smooth {
                    for (slot, &d) in o.iter().enumerate() {
                        let m = &mut factors[*f as usize].orders[slot];
                        *m = (*m).max(d as usize);
                    }
                }
            }
        }
        let bases: Vec<(usize, f64)> = reg.bases().iter().map(|b| (var_of(&b.var), b.kappa)).collect();
        let mut power_ids: HashMap<Vec<(u16, Rational64, Rational64)>, usize> = HashMap::new();
        let mut powers = Vec::new();
        let mut compiled = Vec::with_capacity(keyed.len());
        for terms in keyed {
            let mut out = Vec::with_capacity(terms.len());
            for (k, c) in terms {
                let mut coeff = c.eval(nu);
                let mut smooth = Vec::with_capacity(k.smooth.len());
                for (f, o) in &k.smooth {
                    let plan = &factors[*f as usize];
                    let (strides, _) = layout(&plan.orders);
                    let mut idx = 0;
                    for (slot, &d) in o.iter().enumerate() {
                        idx += d as usize * strides[slot];
                        coeff *= (1..=d as usize).map(|x| x as f64).product::<f64>();
                    }
                    smooth.push((*f as usize, idx));
                }
                let next = powers.len();
                let power = *power_ids.entry(k.powers.clone()).or_insert(next);
                if power == next {
                    powers.push(
                        k.powers
                            .iter()
                            .map(|&(b, a, e)| (b as usize, C64::new(r(a), 0.0) + nu * r(e)))
                            .collect(),
                    );
                }
                out.push(CompiledTerm { coeff, smooth, power });
            }
            compiled.push(out);
        }
        Ok(Evaluator {
            vars,
            factors,
            bases,
            powers,
            sums: compiled,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn state(&self) -> EvalState {
        EvalState {
            inputs: self.factors.iter().map(|_| Vec::new()).collect(),
            jets: self.factors.iter().map(|_| None).collect(),
            logs: vec![C64::new(0.0, 0.0); self.bases.len()],
            powvals: vec![C64::new(0.0, 0.0); self.powers.len()],
            values: vec![C64::new(0.0, 0.0); self.sums.len()],
        }
    }

    /// Evaluate every sum at `point`; results land in `st.values`.
    pub fn eval(&self, st: &mut EvalState, point: &[f64], nu: C64) {
        for (i, plan) in self.factors.iter().enumerate() {
            let vals: Vec<f64> = plan.vars.iter().map(|&v| point[v]).collect();
            if st.inputs[i] == vals && !st.inputs[i].is_empty() {
                continue;
            }
            st.jets[i] = if plan.factor.vanishes_near(&vals) {
                None
            } else {
                Some(plan.factor.jet(&vals, &plan.orders, nu))
            };
            st.inputs[i] = vals;
        }
        for (i, &(v, kappa)) in self.bases.iter().enumerate() {
            st.logs[i] = C64::new(point[v] / kappa, 0.0).ln();
        }
        for (i, p) in self.powers.iter().enumerate() {
            let mut e = C64::new(0.0, 0.0);
            for &(b, ex) in p {
                e += ex * st.logs[b];
            }
            st.powvals[i] = if p.is_empty() { C64::new(1.0, 0.0) } else { e.exp() };
        }
        for (k, terms) in self.sums.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            'term: for t in terms {
                let mut v = t.coeff * st.powvals[t.power];
                for &(f, idx) in &t.smooth {
                    match &st.jets[f] {
                        Some(j) => v *= j.c[idx],
                        None => continue 'term,
                    }
                }
                acc += v;
            }
            st.values[k] = acc;
        }
    }
}
