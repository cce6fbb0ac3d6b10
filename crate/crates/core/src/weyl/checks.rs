//! Symbolic verification routines over the model catalog.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use super::linalg;
use super::poly::{var_set, OperatorPoly, VarSet, WeylMonomial};
use super::scalar::{gq, q, q_frac, Gq, Scalar, Q};
use crate::error::{Error, Result};
use crate::models::catalog::{self, generator_ids, realize, DUAL_VAR};
use crate::models::oracle::{expand, mat_bracket, matrix_of};
use crate::models::spec::{GeneratorId, ModelSpec};

#[derive(Clone, Debug, Serialize)]
pub struct BracketMismatch {
    pub a: String,
    pub b: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismReport {
    pub model: String,
    pub pairs_checked: usize,
    /// `[A, B] = expansion` rows, one per unordered pair.
    pub table: Vec<(String, String, String)>,
    pub mismatches: Vec<BracketMismatch>,
}

impl HomomorphismReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn expansion_label(terms: &[(GeneratorId, Q)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(g, c)| format!("{}*{}", super::scalar::fmt_q(c), g))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Compare every realized bracket with the matrix bracket of the oracle.
pub fn check_homomorphism(spec: &ModelSpec) -> Result<HomomorphismReport> {
    let gens = catalog::generators(spec)?;
    let vars = catalog::variables(spec)?;
    let mut report = HomomorphismReport {
        model: spec.label(),
        pairs_checked: 0,
        table: Vec::new(),
        mismatches: Vec::new(),
    };
    for (ia, (ga, opa)) in gens.iter().enumerate() {
        for (gb, opb) in gens.iter().skip(ia + 1) {
            let ma = matrix_of(spec, *ga).expect("oracle covers catalog");
            let mb = matrix_of(spec, *gb).expect("oracle covers catalog");
            let lhs = opa.commutator(opb);
            let terms = expand(spec, &mat_bracket(&ma, &mb));
            report.pairs_checked += 1;
            let Some(terms) = terms else {
                report.mismatches.push(BracketMismatch {
                    a: ga.to_string(),
                    b: gb.to_string(),
                    residual: "matrix bracket leaves the generator span".into(),
                });
                continue;
            };
            let mut rhs = OperatorPoly::zero(&vars);
            for (g, c) in &terms {
                rhs = &rhs + &realize(spec, *g)?.scale(&Scalar::rational(c.clone()));
            }
            let residual = &lhs - &rhs;
            report
                .table
                .push((ga.to_string(), gb.to_string(), expansion_label(&terms)));
            if !residual.is_zero() {
                report.mismatches.push(BracketMismatch {
                    a: ga.to_string(),
                    b: gb.to_string(),
                    residual: residual.to_text(),
                });
            }
        }
    }
    Ok(report)
}

/// □ = −X² − 2(UV + VU) on the model's sl(2,R) triple.
pub fn casimir(spec: &ModelSpec) -> Result<OperatorPoly> {
    let [gx, gu, gv] = catalog::sl2_triple(spec)?;
    if spec.kind.is_ind_p() && spec.n < 2 {
        return Err(Error::NoSL2Triple(spec.label()));
    }
    let x = realize(spec, gx)?;
    let u = realize(spec, gu)?;
    let v = realize(spec, gv)?;
    let sym = &(&u * &v) + &(&v * &u);
    Ok(-(&(&x * &x) + &sym.scale(&Scalar::int(2))))
}

/// Flatten operators into exact coefficient vectors over a common key set.
fn coefficient_rows(ops: &[OperatorPoly]) -> (Vec<(WeylMonomial, usize, bool)>, Vec<Vec<Gq>>) {
    let mut keys: BTreeSet<(WeylMonomial, usize, bool)> = BTreeSet::new();
    for op in ops {
        for (m, c) in op.terms() {
            for k in 0..c.coeffs().len() {
                keys.insert((m.clone(), k, false));
                keys.insert((m.clone(), k, true));
            }
        }
    }
    let keys: Vec<_> = keys.into_iter().collect();
    let cols = ops
        .iter()
        .map(|op| {
            let map: BTreeMap<&WeylMonomial, &Scalar> = op.terms().collect();
            keys.iter()
                .map(|(m, k, im)| {
                    let c = map
                        .get(m)
                        .and_then(|s| s.coeffs().get(*k).cloned())
                        .unwrap_or_else(Gq::zero);
                    gq(if *im { c.im } else { c.re }, Q::zero())
                })
                .collect::<Vec<Gq>>()
        })
        .collect();
    (keys, cols)
}

/// Express each diagonal field X_i in the basis [u_{k,k+1}, u_{k+1,k}] by
/// exact linear solve. Row i holds the coefficients of X_{i+1}.
pub fn fit_cartan(spec: &ModelSpec) -> Result<Vec<Vec<Q>>> {
    if !spec.kind.is_ind_p() {
        return Err(Error::InvalidModel("fit_cartan needs an induced model".into()));
    }
    let n = spec.n;
    let hs: Vec<OperatorPoly> = (1..n)
        .map(|k| {
            Ok(realize(spec, GeneratorId::Unip(k, k + 1))?.commutator(&realize(spec, GeneratorId::Unip(k + 1, k))?))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..n {
        let target = realize(spec, GeneratorId::Diag(i))?;
        let mut all = hs.clone();
        all.push(target);
        let (_, cols) = coefficient_rows(&all);
        let rows = cols[0].len();
        let a: Vec<Vec<Gq>> = (0..rows)
            .map(|r| (0..hs.len()).map(|c| cols[c][r].clone()).collect())
            .collect();
        let b: Vec<Gq> = (0..rows).map(|r| cols[hs.len()][r].clone()).collect();
        let x = linalg::solve(&a, &b)
            .ok_or_else(|| Error::InvalidModel(format!("X{i} is not in the span of the sl(2) brackets")))?;
        out.push(x.into_iter().map(|c| c.re).collect());
    }
    Ok(out)
}

/// V̂_0 = −i[(2 − n/2 − ν)∂ω + ω∂ω²] over the given variables.
pub fn v0_operator(vars: &VarSet, n: usize) -> OperatorPoly {
    let c = &(&Scalar::rational(q_frac(n as i64, 2)) + &Scalar::nu()) - &Scalar::int(2);
    let dw = OperatorPoly::deriv(vars, DUAL_VAR);
    let w = OperatorPoly::var(vars, DUAL_VAR);
    let inner = &dw.scale(&c) - &(&w * &OperatorPoly::deriv_pow(vars, DUAL_VAR, 2));
    inner.scale(&Scalar::i())
}

fn stirling2(n: u32, k: u32) -> u64 {
    if n == 0 && k == 0 {
        return 1;
    }
    if n == 0 || k == 0 {
        return 0;
    }
    k as u64 * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// All compositions of `total` into `parts` non-negative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Sum of all products with `l` factors `a` and `len − l` factors `b`.
fn mixed_products(a: &OperatorPoly, b: &OperatorPoly, len: u32, l: u32) -> OperatorPoly {
    if len == 0 {
        return OperatorPoly::one(a.vars());
    }
    let mut out = OperatorPoly::zero(a.vars());
    if l > 0 {
        out = &out + &(a * &mixed_products(a, b, len - 1, l - 1));
    }
    if l < len {
        out = &out + &(b * &mixed_products(a, b, len - 1, l));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub i: usize,
    pub beta: u32,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub residual: String,
    pub leading_coefficients_one: bool,
    pub coefficients_positive: bool,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.residual.is_empty() && self.leading_coefficients_one && self.coefficients_positive
    }
}

/// Expand û_{1,i}^β in the Fourier picture along x_{i−1} and compare with
/// Σ_l Π_β^{(l)} · i^{β−l} · (Σ_{k≠a} x_k∂x_k)^{β−l}, the Euler powers written
/// as positive-integer combinations of x_k^m ∂^m x_k.
pub fn verify_u_decomposition(n: usize, i: usize, beta: u32) -> Result<DecompositionReport> {
    if !(2..=n).contains(&i) {
        return Err(Error::InvalidIndices(format!("need 2 ≤ i ≤ n, got i={i}, n={n}")));
    }
    let a = i - 1;
    let spec = ModelSpec::ind_p_fourier(n, a);
    let vars = catalog::variables(&spec)?;
    let u = realize(&spec, GeneratorId::Unip(1, i))?;
    let lhs = u.pow(beta);

    let v0 = v0_operator(&vars, n);
    let dw = OperatorPoly::deriv(&vars, DUAL_VAR);
    let others: Vec<usize> = (1..n).filter(|&k| k != a).collect();
    let mut leading_ok = true;
    let mut positive = true;
    let mut rhs = OperatorPoly::zero(&vars);
    for l in 0..=beta {
        let pi = mixed_products(&v0, &dw, beta, l);
        let e = beta - l;
        let mut euler_power = OperatorPoly::zero(&vars);
        for alpha in compositions(e, others.len()) {
            let multinomial = factorial(e) / alpha.iter().map(|&x| factorial(x)).product::<u64>();
            positive &= multinomial > 0;
            let mut prod = OperatorPoly::scalar(&vars, Scalar::int(multinomial as i64));
            for (&k, &ak) in others.iter().zip(&alpha) {
                if ak == 0 {
                    continue;
                }
                let name = format!("x{k}");
                let mut sum = OperatorPoly::zero(&vars);
                for m in 1..=ak {
                    let c = stirling2(ak, m);
                    positive &= c > 0;
                    if m == ak {
                        leading_ok &= c == 1;
                    }
                    let term =
                        &OperatorPoly::var_pow(&vars, &name, m as i32) * &OperatorPoly::deriv_pow(&vars, &name, m);
                    sum = &sum + &term.scale(&Scalar::int(c as i64));
                }
                prod = &prod * &sum;
            }
            euler_power = &euler_power + &prod;
        }
        let phase = Scalar::i().pow(e);
        rhs = &rhs + &(&pi * &euler_power).scale(&phase);
    }
    let residual = &lhs - &rhs;
    Ok(DecompositionReport {
        n,
        i,
        beta,
        lhs_terms: lhs.len(),
        rhs_terms: rhs.len(),
        residual: residual.to_text(),
        leading_coefficients_one: leading_ok,
        coefficients_positive: positive,
    })
}

/// Functions c·ω^p·h1^{(a)}·h2^{(b)} of one variable, h1, h2 abstract.
type BiFun = BTreeMap<(i32, u32, u32), Scalar>;

fn bi_add(f: &mut BiFun, key: (i32, u32, u32), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = f.entry(key).or_insert_with(Scalar::zero);
    *e = &*e + &c;
    if e.is_zero() {
        f.remove(&key);
    }
}

fn bi_diff(f: &BiFun) -> BiFun {
    let mut out = BiFun::new();
    for (&(p, a, b), c) in f {
        if p != 0 {
            bi_add(&mut out, (p - 1, a, b), c.scale(&gq(q(p as i64), Q::zero())));
        }
        bi_add(&mut out, (p, a + 1, b), c.clone());
        bi_add(&mut out, (p, a, b + 1), c.clone());
    }
    out
}

/// Apply an ω-only operator, `diff` being the derivation to use.
fn bi_apply(op: &OperatorPoly, f: &BiFun, diff: &dyn Fn(&BiFun) -> BiFun) -> BiFun {
    let w = op.vars().iter().position(|v| v == DUAL_VAR).unwrap();
    let mut out = BiFun::new();
    let max_d = op.max_order();
    let mut derivs = vec![f.clone()];
    for _ in 0..max_d {
        let next = diff(derivs.last().unwrap());
        derivs.push(next);
    }
    for (m, c) in op.terms() {
        let g = &derivs[m.deriv[w] as usize];
        for (&(p, a, b), cg) in g {
            bi_add(&mut out, (p + m.mult[w], a, b), c * cg);
        }
    }
    out
}

fn single_diff_first(f: &BiFun) -> BiFun {
    let mut out = BiFun::new();
    for (&(p, a, b), c) in f {
        if p != 0 {
            bi_add(&mut out, (p - 1, a, b), c.scale(&gq(q(p as i64), Q::zero())));
        }
        bi_add(&mut out, (p, a + 1, b), c.clone());
    }
    out
}

fn single_diff_second(f: &BiFun) -> BiFun {
    let mut out = BiFun::new();
    for (&(p, a, b), c) in f {
        if p != 0 {
            bi_add(&mut out, (p - 1, a, b), c.scale(&gq(q(p as i64), Q::zero())));
        }
        bi_add(&mut out, (p, a, b + 1), c.clone());
    }
    out
}

fn bi_mul(f: &BiFun, g: &BiFun) -> BiFun {
    let mut out = BiFun::new();
    for (&(p1, a1, _), c1) in f {
        for (&(p2, _, b2), c2) in g {
            bi_add(&mut out, (p1 + p2, a1, b2), c1 * c2);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LeibnizReport {
    pub order: u32,
    pub n: usize,
    /// (z0, z1, z2, z3, b) with b printed exactly.
    pub table: Vec<(u32, u32, u32, u32, String)>,
    /// True when a solution with ν-independent coefficients exists.
    pub nu_free: bool,
}

/// Find coefficients b with V̂_0^order(h1 h2) = Σ b [∂^{z3} V̂_0^{z0} h1][(ω∂ω)^{z2} V̂_0^{z1} h2].
pub fn verify_leibniz_v0(order: u32, n: usize) -> Result<LeibnizReport> {
    if order > 4 {
        return Err(Error::UnsupportedDerivativeOrder {
            requested: order,
            cap: 4,
        });
    }
    let vars = var_set(&[DUAL_VAR]);
    let v0 = v0_operator(&vars, n);
    let dw = OperatorPoly::deriv(&vars, DUAL_VAR);
    let euler = &OperatorPoly::var(&vars, DUAL_VAR) * &dw;
    let unit: BiFun = [((0, 0, 0), Scalar::one())].into_iter().collect();

    let mut lhs = unit.clone();
    for _ in 0..order {
        lhs = bi_apply(&v0, &lhs, &bi_diff);
    }

    let mut tuples = Vec::new();
    let mut shapes = Vec::new();
    for z0 in 0..=order {
        for z1 in 0..=order - z0 {
            for z3 in 0..=order - z0 - z1 {
                for z2 in 0..=z3 {
                    let mut f1 = unit.clone();
                    for _ in 0..z0 {
                        f1 = bi_apply(&v0, &f1, &single_diff_first);
                    }
                    f1 = bi_apply(&dw.pow(z3), &f1, &single_diff_first);
                    let mut f2 = unit.clone();
                    for _ in 0..z1 {
                        f2 = bi_apply(&v0, &f2, &single_diff_second);
                    }
                    f2 = bi_apply(&euler.pow(z2), &f2, &single_diff_second);
                    tuples.push((z0, z1, z2, z3));
                    shapes.push(bi_mul(&f1, &f2));
                }
            }
        }
    }

    // Try ν-free coefficients first, then polynomial ones of degree ≤ order.
    for nu_degree in [0u32, order] {
        if let Some(b) = solve_shape(&lhs, &shapes, nu_degree) {
            let table = tuples
                .iter()
                .zip(b)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&(z0, z1, z2, z3), c)| (z0, z1, z2, z3, c.to_string()))
                .collect();
            return Ok(LeibnizReport {
                order,
                n,
                table,
                nu_free: nu_degree == 0,
            });
        }
        if order == 0 {
            break;
        }
    }
    Err(Error::ShapeMismatch(order))
}

fn solve_shape(lhs: &BiFun, shapes: &[BiFun], nu_degree: u32) -> Option<Vec<Scalar>> {
    // unknown (shape s, ν-power k); equation per (key, ν-power)
    let nunk = shapes.len() * (nu_degree as usize + 1);
    let mut eqs: BTreeMap<((i32, u32, u32), usize), Vec<Gq>> = BTreeMap::new();
    let mut rhs: BTreeMap<((i32, u32, u32), usize), Gq> = BTreeMap::new();
    for (s, shape) in shapes.iter().enumerate() {
        for (key, c) in shape {
            for (p, coef) in c.coeffs().iter().enumerate() {
                for k in 0..=nu_degree as usize {
                    let row = eqs.entry((*key, p + k)).or_insert_with(|| vec![Gq::zero(); nunk]);
                    let col = s * (nu_degree as usize + 1) + k;
                    row[col] = &row[col] + coef;
                }
            }
        }
    }
    for (key, c) in lhs {
        for (p, coef) in c.coeffs().iter().enumerate() {
            eqs.entry((*key, p)).or_insert_with(|| vec![Gq::zero(); nunk]);
            rhs.insert((*key, p), coef.clone());
        }
    }
    let keys: Vec<_> = eqs.keys().cloned().collect();
    let a: Vec<Vec<Gq>> = keys.iter().map(|k| eqs[k].clone()).collect();
    let b: Vec<Gq> = keys
        .iter()
        .map(|k| rhs.get(k).cloned().unwrap_or_else(Gq::zero))
        .collect();
    let x = linalg::solve(&a, &b)?;
    Some(
        x.chunks(nu_degree as usize + 1)
            .map(|ch| Scalar::from_coeffs(ch.to_vec()))
            .collect(),
    )
}

/// V̂_0 applied to ω^{ν+r}: the scalar multiplying ω^{ν+r−1}.
pub fn v0_on_power(n: usize, r: i64) -> Scalar {
    // (a∂ + bω∂²) ω^e = (a e + b e(e−1)) ω^{e−1}
    let e = &Scalar::nu() + &Scalar::int(r);
    let a = &(&Scalar::rational(q_frac(n as i64, 2)) + &Scalar::nu()) - &Scalar::int(2);
    let e_minus = &e - &Scalar::one();
    let val = &(&a * &e) - &(&e * &e_minus);
    &val * &Scalar::i()
}

/// The closed form −i(ν+r)(r+1−n/2).
pub fn v0_on_power_expected(n: usize, r: i64) -> Scalar {
    let e = &Scalar::nu() + &Scalar::int(r);
    let f = &Scalar::int(r + 1) - &Scalar::rational(q_frac(n as i64, 2));
    (&e * &f).scale(&gq(Q::zero(), -Q::one()))
}

/// Generator list for reports.
pub fn generator_names(spec: &ModelSpec) -> Vec<String> {
    generator_ids(spec).iter().map(|g| g.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_numbers() {
        assert_eq!(stirling2(2, 1), 1);
        assert_eq!(stirling2(2, 2), 1);
        assert_eq!(stirling2(3, 2), 3);
        assert_eq!(stirling2(4, 2), 7);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(0, 0).len(), 1);
        assert_eq!(compositions(2, 0).len(), 0);
    }

    #[test]
    fn leibniz_order_zero_is_identity() {
        let r = verify_leibniz_v0(0, 3).unwrap();
        assert_eq!(r.table, vec![(0, 0, 0, 0, "(1+0i)".to_string())]);
    }
}
