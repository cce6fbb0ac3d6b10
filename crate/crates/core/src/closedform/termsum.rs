//! Sums of coefficient × smooth-factor-derivative × power products.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::factor::{SmoothFactor, ORDER_CAP};
use super::jet::C64;
use crate::error::{Error, Result};
use crate::weyl::scalar::{Gq, Q};
use crate::weyl::{OperatorPoly, Scalar, VarSet};

/// `(var/kappa)^{a + bν}`; bases with kappa ≠ 1 carry only ν-exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBase {
    pub var: String,
    pub kappa: f64,
}

/// One term's shape: smooth factor derivatives and power exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    /// (factor index, derivative order per factor variable), sorted, repeats allowed.
    pub smooth: Vec<(u16, Vec<u8>)>,
    /// (base index, a, b), sorted by base, no zero exponents.
    pub powers: Vec<(u16, Rational64, Rational64)>,
}

#[derive(Clone, Debug)]
pub struct TermSum {
    vars: VarSet,
    factors: Vec<SmoothFactor>,
    bases: Vec<PowerBase>,
    terms: BTreeMap<TermKey, Scalar>,
}

pub(crate) fn r64_to_q(r: Rational64) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn exponent_scalar(a: Rational64, b: Rational64) -> Scalar {
    &Scalar::rational(r64_to_q(a)) + &Scalar::nu().scale(&Gq::new(r64_to_q(b), Q::zero()))
}

fn merge_powers(
    a: &[(u16, Rational64, Rational64)],
    b: &[(u16, Rational64, Rational64)],
) -> Vec<(u16, Rational64, Rational64)> {
    let mut m: BTreeMap<u16, (Rational64, Rational64)> = BTreeMap::new();
    for &(k, x, y) in a.iter().chain(b) {
        let e = m.entry(k).or_insert((Rational64::zero(), Rational64::zero()));
        e.0 += x;
        e.1 += y;
    }
    m.into_iter()
        .filter(|(_, (x, y))| !x.is_zero() || !y.is_zero())
        .map(|(k, (x, y))| (k, x, y))
        .collect()
}

impl TermSum {
    pub fn zero(vars: &VarSet) -> Self {
        TermSum {
            vars: vars.clone(),
            factors: Vec::new(),
            bases: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: Scalar) -> Self {
        let mut s = Self::zero(vars);
        s.add_term(
            TermKey {
                smooth: vec![],
                powers: vec![],
            },
            c,
        );
        s
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn factor(vars: &VarSet, f: SmoothFactor) -> Result<Self> {
        for v in f.vars() {
            if !vars.contains(&v) {
                return Err(Error::InvalidModel(format!(
                    "factor {} uses variable {v} outside {:?}",
                    f.id(),
                    vars
                )));
            }
        }
        let nv = f.vars().len();
        let mut s = Self::zero(vars);
        s.factors.push(f);
        s.add_term(
            TermKey {
                smooth: vec![(0, vec![0; nv])],
                powers: vec![],
            },
            Scalar::one(),
        );
        Ok(s)
    }

    /// `(var/kappa)^{a + bν}`; a must be zero when kappa ≠ 1.
    pub fn power(vars: &VarSet, var: &str, kappa: f64, a: Rational64, b: Rational64) -> Result<Self> {
        if !vars.iter().any(|v| v == var) {
            return Err(Error::InvalidModel(format!("unknown variable {var}")));
        }
        if kappa != 1.0 && !a.is_zero() {
            return Err(Error::InvalidModel("scaled power bases carry only ν-exponents".into()));
        }
        let mut s = Self::zero(vars);
        let base = s.base_index(var, kappa);
        s.add_term(
            TermKey {
                smooth: vec![],
                powers: if a.is_zero() && b.is_zero() {
                    vec![]
                } else {
                    vec![(base, a, b)]
                },
            },
            Scalar::one(),
        );
        Ok(s)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn factors(&self) -> &[SmoothFactor] {
        &self.factors
    }

    pub fn bases(&self) -> &[PowerBase] {
        &self.bases
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn base_index(&mut self, var: &str, kappa: f64) -> u16 {
        if let Some(i) = self.bases.iter().position(|b| b.var == var && b.kappa == kappa) {
            return i as u16;
        }
        self.bases.push(PowerBase {
            var: var.to_string(),
            kappa,
        });
        (self.bases.len() - 1) as u16
    }

    fn factor_index(&mut self, f: &SmoothFactor) -> u16 {
        if let Some(i) = self.factors.iter().position(|g| g == f) {
            return i as u16;
        }
        self.factors.push(f.clone());
        (self.factors.len() - 1) as u16
    }

    fn add_term(&mut self, key: TermKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check_vars(&self, other: &TermSum) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::InvalidModel(format!(
                "variable sets differ: {:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    /// Re-index `other`'s keys into this registry.
    pub(crate) fn import(&mut self, other: &TermSum) -> Vec<(TermKey, Scalar)> {
        let fmap: Vec<u16> = other.factors.iter().map(|f| self.factor_index(f)).collect();
        let bmap: Vec<u16> = other.bases.iter().map(|b| self.base_index(&b.var, b.kappa)).collect();
        other
            .terms
            .iter()
            .map(|(k, c)| {
                let mut smooth: Vec<_> = k.smooth.iter().map(|(f, o)| (fmap[*f as usize], o.clone())).collect();
                smooth.sort();
                let mut powers: Vec<_> = k.powers.iter().map(|(b, x, y)| (bmap[*b as usize], *x, *y)).collect();
                powers.sort();
                (TermKey { smooth, powers }, c.clone())
            })
            .collect()
    }

    pub fn try_add(&self, other: &TermSum) -> Result<TermSum> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (k, c) in out.import(other) {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &TermSum) -> Result<TermSum> {
        self.try_add(&other.scale(&Scalar::int(-1)))
    }

    pub fn try_mul(&self, other: &TermSum) -> Result<TermSum> {
        self.check_vars(other)?;
        let mut reg = self.clone();
        reg.terms.clear();
        let imported = reg.import(other);
        let mut out = reg.clone();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &imported {
                let mut smooth = ka.smooth.clone();
                smooth.extend(kb.smooth.iter().cloned());
                smooth.sort();
                let powers = merge_powers(&ka.powers, &kb.powers);
                out.add_term(TermKey { smooth, powers }, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> TermSum {
        let mut out = self.clone();
        out.terms.clear();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub(crate) fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// ∂/∂vars[vi] applied to one term.
    fn diff_term(&mut self, key: &TermKey, c: &Scalar, vi: usize, out: &mut Vec<(TermKey, Scalar)>) -> Result<()> {
        let name = self.vars[vi].clone();
        for (pos, (f, orders)) in key.smooth.iter().enumerate() {
            let fvars = self.factors[*f as usize].vars();
            if let Some(slot) = fvars.iter().position(|v| *v == name) {
                let requested = orders[slot] as usize + 1;
                if requested > ORDER_CAP {
                    return Err(Error::UnsupportedDerivativeOrder {
                        requested: requested as u32,
                        cap: ORDER_CAP as u32,
                    });
                }
                let mut smooth = key.smooth.clone();
                smooth[pos].1[slot] += 1;
                smooth.sort();
                out.push((
                    TermKey {
                        smooth,
                        powers: key.powers.clone(),
                    },
                    c.clone(),
                ));
            }
        }
        for &(b, a, e) in &key.powers {
            if self.bases[b as usize].var != name {
                continue;
            }
            let factor = exponent_scalar(a, e);
            let plain = self.base_index(&name, 1.0);
            let shift = [(plain, -Rational64::one(), Rational64::zero())];
            out.push((
                TermKey {
                    smooth: key.smooth.clone(),
                    powers: merge_powers(&key.powers, &shift),
                },
                c * &factor,
            ));
        }
        Ok(())
    }

    pub fn partial(&self, var: &str) -> Result<TermSum> {
        let vi = self
            .var_index(var)
            .ok_or_else(|| Error::InvalidModel(format!("unknown variable {var}")))?;
        let mut out = self.clone();
        out.terms.clear();
        let mut acc = Vec::new();
        for (k, c) in &self.terms {
            out.diff_term(k, c, vi, &mut acc)?;
        }
        for (k, c) in acc {
            out.add_term(k, c);
        }
        Ok(out)
    }

    /// Multiply by `var^p`.
    pub fn mul_var_pow(&self, var: &str, p: i64) -> Result<TermSum> {
        let mut out = self.clone();
        out.terms.clear();
        let b = out.base_index(var, 1.0);
        let shift = [(b, Rational64::from_integer(p), Rational64::zero())];
        for (k, c) in &self.terms {
            out.add_term(
                TermKey {
                    smooth: k.smooth.clone(),
                    powers: merge_powers(&k.powers, &shift),
                },
                c.clone(),
            );
        }
        Ok(out)
    }

    /// Per factor, the largest derivative order used per factor variable.
    pub fn max_orders(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.factors.iter().map(|f| vec![0; f.vars().len()]).collect();
        for k in self.terms.keys() {
            for (f, o) in &k.smooth {
                for (slot, &d) in o.iter().enumerate() {
                    let m = &mut out[*f as usize][slot];
                    *m = (*m).max(d as usize);
                }
            }
        }
        out
    }

    /// Pointwise value; `point` is ordered as `vars()`.
    pub fn evaluate(&self, point: &[f64], nu: C64) -> Result<C64> {
        if point.iter().any(|v| v.is_nan()) || point.len() != self.vars.len() {
            return Err(Error::OutsideSupport);
        }
        let orders = self.max_orders();
        let mut jets = Vec::with_capacity(self.factors.len());
        for (f, o) in self.factors.iter().zip(&orders) {
            let vals: Vec<f64> = f.vars().iter().map(|v| point[self.var_index(v).unwrap()]).collect();
            jets.push(f.jet(&vals, o, nu));
        }
        let logs: Vec<C64> = self
            .bases
            .iter()
            .map(|b| C64::new(point[self.var_index(&b.var).unwrap()] / b.kappa, 0.0).ln())
            .collect();
        let mut sum = C64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut v = c.eval(nu);
            for (f, o) in &k.smooth {
                let alpha: Vec<usize> = o.iter().map(|&d| d as usize).collect();
                v *= jets[*f as usize].derivative(&alpha);
            }
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let mut e = C64::new(0.0, 0.0);
            for &(b, x, y) in &k.powers {
                let ex =
                    C64::new(*x.numer() as f64 / *x.denom() as f64, 0.0) + nu * (*y.numer() as f64 / *y.denom() as f64);
                e += ex * logs[b as usize];
            }
            sum += v * e.exp();
        }
        Ok(sum)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TermSumJson::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TermSum> {
        let j: TermSumJson = serde_json::from_value(v.clone())?;
        j.try_into()
    }
}

type CanonicalKey = (Vec<(String, Vec<u8>)>, Vec<(String, u64, Rational64, Rational64)>);

impl TermSum {
    /// Registry-independent form, used for equality.
    fn canonical(&self) -> BTreeMap<CanonicalKey, Scalar> {
        let names: Vec<String> = self
            .factors
            .iter()
            .map(|f| serde_json::to_string(f).expect("serializable"))
            .collect();
        self.terms
            .iter()
            .map(|(k, c)| {
                let mut smooth: Vec<_> = k
                    .smooth
                    .iter()
                    .map(|(f, o)| (names[*f as usize].clone(), o.clone()))
                    .collect();
                smooth.sort();
                let mut powers: Vec<_> = k
                    .powers
                    .iter()
                    .map(|(b, x, y)| {
                        let base = &self.bases[*b as usize];
                        (base.var.clone(), base.kappa.to_bits(), *x, *y)
                    })
                    .collect();
                powers.sort();
                ((smooth, powers), c.clone())
            })
            .collect()
    }
}

impl PartialEq for TermSum {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.canonical() == other.canonical()
    }
}

/// Apply a Weyl-algebra operator symbolically.
pub fn apply_operator(op: &OperatorPoly, f: &TermSum) -> Result<TermSum> {
    let map: Vec<Option<usize>> = op.vars().iter().map(|v| f.var_index(v)).collect();
    let nv = f.vars.len();
    let mut cache: HashMap<Vec<u32>, TermSum> = HashMap::new();
    cache.insert(vec![0; nv], f.clone());
    let mut out = f.clone();
    out.terms.clear();
    for (m, c) in op.terms() {
        let mut d = vec![0u32; nv];
        let mut mult = vec![0i64; nv];
        for (i, target) in map.iter().enumerate() {
            match target {
                Some(j) => {
                    d[*j] = m.deriv[i];
                    mult[*j] = m.mult[i] as i64;
                }
                None if m.deriv[i] != 0 || m.mult[i] != 0 => {
                    return Err(Error::InvalidModel(format!(
                        "operator variable {} missing from function",
                        op.vars()[i]
                    )))
                }
                None => {}
            }
        }
        let mut g = derivative_multi(&mut cache, &d, &f.vars)?;
        for (j, &p) in mult.iter().enumerate() {
            if p != 0 {
                g = g.mul_var_pow(&f.vars[j], p)?;
            }
        }
        out = out.try_add(&g.scale(c))?;
    }
    Ok(out)
}

fn derivative_multi(cache: &mut HashMap<Vec<u32>, TermSum>, d: &[u32], vars: &VarSet) -> Result<TermSum> {
    if let Some(v) = cache.get(d) {
        return Ok(v.clone());
    }
    let k = d.iter().rposition(|&x| x > 0).expect("nonzero order");
    let mut prev = d.to_vec();
    prev[k] -= 1;
    let base = derivative_multi(cache, &prev, vars)?;
    let r = base.partial(&vars[k])?;
    cache.insert(d.to_vec(), r.clone());
    Ok(r)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: Vec<[String; 2]>,
    smooth: Vec<(u16, Vec<u8>)>,
    powers: Vec<(String, String, String, f64)>,
}

#[derive(Serialize, Deserialize)]
struct TermSumJson {
    vars: Vec<String>,
    factors: Vec<SmoothFactor>,
    bases: Vec<PowerBase>,
    terms: Vec<TermJson>,
}

impl From<&TermSum> for TermSumJson {
    fn from(s: &TermSum) -> Self {
        TermSumJson {
            vars: s.vars.to_vec(),
            factors: s.factors.clone(),
            bases: s.bases.clone(),
            terms: s
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    coeff: c
                        .coeffs()
                        .iter()
                        .map(|z| [z.re.to_string(), z.im.to_string()])
                        .collect(),
                    smooth: k.smooth.clone(),
                    powers: k
                        .powers
                        .iter()
                        .map(|(b, x, y)| {
                            let base = &s.bases[*b as usize];
                            (base.var.clone(), x.to_string(), y.to_string(), base.kappa)
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

fn parse_q(s: &str) -> Result<Q> {
    s.parse::<Q>()
        .map_err(|e| Error::Config(format!("bad rational {s}: {e}")))
}

fn parse_r64(s: &str) -> Result<Rational64> {
    s.parse::<Rational64>()
        .map_err(|e| Error::Config(format!("bad exponent {s}: {e}")))
}

impl TryFrom<TermSumJson> for TermSum {
    type Error = Error;

    fn try_from(j: TermSumJson) -> Result<TermSum> {
        let vars: VarSet = j.vars.into();
        let mut out = TermSum::zero(&vars);
        out.factors = j.factors;
        out.bases = j.bases;
        for t in j.terms {
            let coeffs = t
                .coeff
                .iter()
                .map(|[re, im]| Ok(Gq::new(parse_q(re)?, parse_q(im)?)))
                .collect::<Result<Vec<_>>>()?;
            if t.smooth.iter().any(|(f, _)| *f as usize >= out.factors.len()) {
                return Err(Error::Config("smooth part references unknown factor".into()));
            }
            let mut powers = Vec::new();
            for (var, a, b, kappa) in &t.powers {
                let idx = out.base_index(var, *kappa);
                powers.push((idx, parse_r64(a)?, parse_r64(b)?));
            }
            powers.sort();
            out.add_term(
                TermKey {
                    smooth: t.smooth,
                    powers,
                },
                Scalar::from_coeffs(coeffs),
            );
        }
        Ok(out)
    }
}
