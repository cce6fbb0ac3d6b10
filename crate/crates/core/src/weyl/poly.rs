use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::{fmt_gq, gq, q, Gq, Scalar, Q};

/// Ordered variable names shared by every operator of one model.
pub type VarSet = Arc<[String]>;

pub fn var_set<S: AsRef<str>>(names: &[S]) -> VarSet {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// `Π v^mult[v] · Π ∂v^deriv[v]`, multiplications to the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylMonomial {
    pub mult: Vec<i32>,
    pub deriv: Vec<u32>,
}

impl WeylMonomial {
    pub fn identity(nvars: usize) -> Self {
        WeylMonomial {
            mult: vec![0; nvars],
            deriv: vec![0; nvars],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mult.iter().all(|&m| m == 0) && self.deriv.iter().all(|&d| d == 0)
    }

    pub fn order(&self) -> u32 {
        self.deriv.iter().sum()
    }
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Falling factorial b(b-1)...(b-k+1), valid for negative b.
fn falling(b: i32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(b as i64 - i);
    }
    acc
}

/// Normal-ordered product of two monomials, as integer-weighted monomials.
pub(crate) fn monomial_product(a: &WeylMonomial, b: &WeylMonomial) -> Vec<(BigInt, WeylMonomial)> {
    let nv = a.mult.len();
    let mut acc: Vec<(BigInt, WeylMonomial)> = vec![(BigInt::one(), WeylMonomial::identity(nv))];
    for v in 0..nv {
        let d = a.deriv[v];
        let p = b.mult[v];
        let mut next = Vec::with_capacity(acc.len() * (d as usize + 1));
        for k in 0..=d {
            let c = binom(d, k) * falling(p, k);
            if c.is_zero() {
                continue;
            }
            for (w, m) in &acc {
                let mut m = m.clone();
                m.mult[v] = a.mult[v] + p - k as i32;
                m.deriv[v] = d - k + b.deriv[v];
                next.push((w * &c, m));
            }
        }
        acc = next;
    }
    acc
}

/// Normal-ordered differential operator with Laurent coefficients and
/// ν-polynomial scalars.
#[derive(Clone, PartialEq, Eq)]
pub struct OperatorPoly {
    vars: VarSet,
    terms: BTreeMap<WeylMonomial, Scalar>,
}

impl OperatorPoly {
    pub fn zero(vars: &VarSet) -> Self {
        OperatorPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(vars: &VarSet, c: Scalar) -> Self {
        let mut op = Self::zero(vars);
        op.add_term(WeylMonomial::identity(vars.len()), c);
        op
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::scalar(vars, Scalar::one())
    }

    fn index(vars: &VarSet, name: &str) -> usize {
        vars.iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("variable {name} not in {:?}", vars))
    }

    /// Multiplication by `name^power`.
    pub fn var_pow(vars: &VarSet, name: &str, power: i32) -> Self {
        let mut m = WeylMonomial::identity(vars.len());
        m.mult[Self::index(vars, name)] = power;
        Self::monomial(vars, m, Scalar::one())
    }

    pub fn var(vars: &VarSet, name: &str) -> Self {
        Self::var_pow(vars, name, 1)
    }

    pub fn deriv(vars: &VarSet, name: &str) -> Self {
        Self::deriv_pow(vars, name, 1)
    }

    pub fn deriv_pow(vars: &VarSet, name: &str, order: u32) -> Self {
        let mut m = WeylMonomial::identity(vars.len());
        m.deriv[Self::index(vars, name)] = order;
        Self::monomial(vars, m, Scalar::one())
    }

    pub fn monomial(vars: &VarSet, m: WeylMonomial, c: Scalar) -> Self {
        assert_eq!(m.mult.len(), vars.len());
        let mut op = Self::zero(vars);
        op.add_term(m, c);
        op
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &Scalar)> {
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

    /// The scalar value if the operator is a multiple of the identity.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_identity().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_vars(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "operators over different variable sets: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn scale_gq(&self, c: &Gq) -> Self {
        self.scale(&Scalar::constant(c.clone()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let cab = ca * cb;
                for (w, m) in monomial_product(ma, mb) {
                    out.add_term(m, cab.scale(&gq(Q::from_integer(w), Q::zero())));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.compose(other) - &other.compose(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.vars);
        for _ in 0..e {
            out = out.compose(self);
        }
        out
    }

    /// Re-express over a variable set that contains every variable in use.
    pub fn with_vars(&self, vars: &VarSet) -> Self {
        let map: Vec<Option<usize>> = self.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
        let mut out = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut nm = WeylMonomial::identity(vars.len());
            for (i, target) in map.iter().enumerate() {
                match target {
                    Some(j) => {
                        nm.mult[*j] = m.mult[i];
                        nm.deriv[*j] = m.deriv[i];
                    }
                    None => assert!(
                        m.mult[i] == 0 && m.deriv[i] == 0,
                        "variable {} in use but missing from target set",
                        self.vars[i]
                    ),
                }
            }
            out.add_term(nm, c.clone());
        }
        out
    }

    /// Substitute ν ↦ ν + shift (shift a Gaussian rational).
    pub fn shift_nu(&self, shift: &Gq) -> Self {
        let base = &Scalar::nu() + &Scalar::constant(shift.clone());
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut acc = Scalar::zero();
            let mut pw = Scalar::one();
            for a in c.coeffs() {
                acc += &pw.scale(a);
                pw = &pw * &base;
            }
            out.add_term(m.clone(), acc);
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parse the line format produced by `Display`.
    pub fn parse(vars: &VarSet, text: &str) -> Result<Self, String> {
        let mut out = Self::zero(vars);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| format!("line {}: {msg}: {line}", lineno + 1);
            let mut parts = line.split(" * ");
            let head = parts.next().ok_or_else(|| err("empty term"))?;
            let (coef_str, nu_pow) = match head.rsplit_once("*nu^") {
                Some((c, p)) => (c, p.parse::<usize>().map_err(|_| err("bad nu power"))?),
                None => (head, 0),
            };
            let coef = parse_gq(coef_str).ok_or_else(|| err("bad coefficient"))?;
            let mut m = WeylMonomial::identity(vars.len());
            for factor in parts {
                let (name, pow) = factor.split_once('^').ok_or_else(|| err("bad factor"))?;
                let pow: i32 = pow.parse().map_err(|_| err("bad exponent"))?;
                if let Some(idx) = vars.iter().position(|v| v == name) {
                    m.mult[idx] = pow;
                } else if let Some(idx) = name
                    .strip_prefix('d')
                    .and_then(|base| vars.iter().position(|v| v == base))
                {
                    if pow < 0 {
                        return Err(err("negative derivative order"));
                    }
                    m.deriv[idx] = pow as u32;
                } else {
                    return Err(err("unknown variable"));
                }
            }
            let mut coeffs = vec![Gq::zero(); nu_pow + 1];
            coeffs[nu_pow] = coef;
            out.add_term(m, Scalar::from_coeffs(coeffs));
        }
        Ok(out)
    }
}

fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub(crate) fn parse_gq(s: &str) -> Option<Gq> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix("i)")?;
    // split at the sign that separates the imaginary part (skip a leading sign)
    let bytes = inner.as_bytes();
    let pos = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/')?;
    let re = parse_q(&inner[..pos])?;
    let im = parse_q(&inner[pos + 1..])?;
    let im = if bytes[pos] == b'-' { -im } else { im };
    Some(gq(re, im))
}

impl Add for &OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: OperatorPoly) -> OperatorPoly {
        &self + &rhs
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        self.scale(&Scalar::int(-1))
    }
}

impl Neg for OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        -&self
    }
}

impl Sub for &OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        self + &(-rhs)
    }
}

impl Sub for OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: OperatorPoly) -> OperatorPoly {
        &self - &rhs
    }
}

impl Mul for &OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.compose(rhs)
    }
}

impl Mul for OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: OperatorPoly) -> OperatorPoly {
        self.compose(&rhs)
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, c) in &self.terms {
            for (k, a) in c.coeffs().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                write!(f, "{}*nu^{}", fmt_gq(a), k)?;
                for (i, v) in self.vars.iter().enumerate() {
                    write!(f, " * {}^{} * d{}^{}", v, m.mult[i], v, m.deriv[i])?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self)
    }
}

/// Integer constant as an operator scalar.
pub fn int_op(vars: &VarSet, n: i64) -> OperatorPoly {
    OperatorPoly::scalar(vars, Scalar::rational(q(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs() -> VarSet {
        var_set(&["x", "w"])
    }

    #[test]
    fn heisenberg_relation() {
        let v = vs();
        let d = OperatorPoly::deriv(&v, "w");
        let w = OperatorPoly::var(&v, "w");
        let expect = &(&w * &d) + &OperatorPoly::one(&v);
        assert_eq!(&d * &w, expect);
        assert_eq!(d.commutator(&w), OperatorPoly::one(&v));
    }

    #[test]
    fn euler_operator_squared() {
        let v = vs();
        let e = &OperatorPoly::var(&v, "x") * &OperatorPoly::deriv(&v, "x");
        let mut m = WeylMonomial::identity(2);
        m.mult[0] = 2;
        m.deriv[0] = 2;
        let expect = &OperatorPoly::monomial(&v, m, Scalar::one()) + &e;
        assert_eq!(&e * &e, expect);
    }

    #[test]
    fn laurent_leibniz() {
        let v = vs();
        let lhs = &(&OperatorPoly::var_pow(&v, "x", -1) * &OperatorPoly::deriv(&v, "x")) * &OperatorPoly::var(&v, "x");
        let expect = &OperatorPoly::deriv(&v, "x") + &OperatorPoly::var_pow(&v, "x", -1);
        assert_eq!(lhs, expect);
        // ∂x·x^{-1} = x^{-1}∂x − x^{-2}
        let lhs = &OperatorPoly::deriv(&v, "x") * &OperatorPoly::var_pow(&v, "x", -1);
        let expect = &(&OperatorPoly::var_pow(&v, "x", -1) * &OperatorPoly::deriv(&v, "x"))
            - &OperatorPoly::var_pow(&v, "x", -2);
        assert_eq!(lhs, expect);
    }

    #[test]
    fn text_round_trip() {
        let v = vs();
        let op = &(&OperatorPoly::var_pow(&v, "x", -2)
            .scale(&Scalar::nu())
            .scale(&Scalar::int(-1))
            * &OperatorPoly::deriv(&v, "w"))
            + &OperatorPoly::scalar(&v, Scalar::rational(super::super::scalar::q_frac(-3, 7)));
        let text = op.to_text();
        assert!(text.contains("(-1+0i)*nu^1 * x^-2 * dx^0 * w^0 * dw^1"));
        assert_eq!(OperatorPoly::parse(&v, &text).unwrap(), op);
    }

    #[test]
    fn parse_gaussian_signs() {
        assert_eq!(
            parse_gq("(-1/2-3/4i)"),
            Some(gq(
                super::super::scalar::q_frac(-1, 2),
                super::super::scalar::q_frac(-3, 4)
            ))
        );
        assert_eq!(parse_gq("(0+1i)"), Some(gq(q(0), q(1))));
    }
}
