//! Matrix realizations of each model's Lie algebra, used as bracket oracles.

use num_traits::{One, Zero};

use super::catalog::generator_ids;
use super::spec::{GeneratorId, ModelKind, ModelSpec};
use crate::weyl::linalg;
use crate::weyl::scalar::{gq, Gq, Q};

pub type Mat = Vec<Vec<Q>>;

fn zeros(d: usize) -> Mat {
    vec![vec![Q::zero(); d]; d]
}

fn unit(d: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(d);
    m[i][j] = Q::one();
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..d {
                out[i][j] = &out[i][j] + &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

pub fn mat_bracket(a: &Mat, b: &Mat) -> Mat {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    ab.iter()
        .zip(&ba)
        .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x - y).collect())
        .collect()
}

/// Matrix of one generator.
pub fn matrix_of(spec: &ModelSpec, gen: GeneratorId) -> Option<Mat> {
    match spec.kind {
        ModelKind::IndPPosition | ModelKind::IndPFourier => {
            let n = spec.n;
            match gen {
                GeneratorId::Diag(i) if (1..n).contains(&i) => {
                    let mut m = zeros(n);
                    m[i - 1][i - 1] = Q::one();
                    m[i][i] = -Q::one();
                    Some(m)
                }
                GeneratorId::Unip(i, j) if i != j && (1..=n).contains(&i) && (1..=n).contains(&j) => {
                    Some(unit(n, i - 1, j - 1))
                }
                _ => None,
            }
        }
        // block matrices [[A, v], [0, 0]] with A ∈ sl(2)
        kind => {
            let d = match kind {
                ModelKind::Sl2R2 | ModelKind::Sl2R2Fourier => 3,
                _ => 4,
            };
            match gen {
                GeneratorId::X => {
                    let mut m = zeros(d);
                    m[0][0] = Q::one();
                    m[1][1] = -Q::one();
                    Some(m)
                }
                GeneratorId::U => Some(unit(d, 0, 1)),
                GeneratorId::V => Some(unit(d, 1, 0)),
                GeneratorId::Y(1) => Some(unit(d, 0, 2)),
                GeneratorId::Y(2) => Some(unit(d, 1, 2)),
                GeneratorId::Y(3) if d == 4 => Some(unit(d, 0, 3)),
                GeneratorId::Y(4) if d == 4 => Some(unit(d, 1, 3)),
                _ => None,
            }
        }
    }
}

/// Expand a matrix in the generator basis; `None` if it leaves the span.
pub fn expand(spec: &ModelSpec, m: &Mat) -> Option<Vec<(GeneratorId, Q)>> {
    let ids = generator_ids(spec);
    let basis: Vec<Mat> = ids.iter().map(|g| matrix_of(spec, *g).unwrap()).collect();
    let d = m.len();
    let mut a: Vec<Vec<Gq>> = Vec::with_capacity(d * d);
    let mut b: Vec<Gq> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            a.push(basis.iter().map(|bm| gq(bm[i][j].clone(), Q::zero())).collect());
            b.push(gq(m[i][j].clone(), Q::zero()));
        }
    }
    let x = linalg::solve(&a, &b)?;
    Some(
        ids.into_iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| (g, c.re))
            .collect(),
    )
}
