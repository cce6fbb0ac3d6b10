//! Cocycle families over several unipotent directions that admit no common L² transfer function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closedform::factor::SmoothFactor;
use crate::closedform::jet::C64;
use crate::closedform::quad::gauss_legendre;
use crate::closedform::termsum::TermSum;
use crate::error::{Error, Result};
use crate::experiments::fit::fit_loglog;
use crate::weyl::{var_set, VarSet};

pub const IDENTITY_POINTS: usize = 1000;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const DIVERGENCE_SLOPE: f64 = -1.0;
pub const DIVERGENCE_SLOPE_TOL: f64 = 0.1;

/// Which second family of directions accompanies u_{2,1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionCase {
    /// u_{2,i_k}, Fourier transform in x₁ only.
    SameRow,
    /// u_{i_k,1}, Fourier transform in every variable.
    SameColumn,
}

impl ObstructionCase {
    pub fn from_number(c: u32) -> Result<Self> {
        match c {
            1 => Ok(ObstructionCase::SameRow),
            2 => Ok(ObstructionCase::SameColumn),
            _ => Err(Error::InvalidIndices(format!("case must be 1 or 2, got {c}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceFit {
    pub eps: Vec<f64>,
    /// ∫_{ε<|x|<1} |p(x)/(e^{−ix}−1)|² dx
    pub norm_sq: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub n: usize,
    pub case: ObstructionCase,
    pub indices: Vec<usize>,
    pub points: usize,
    pub identity_max_error: f64,
    /// Largest |∂^k f_k| (k ≤ 4, each variable) over the sample points.
    pub derivative_max: f64,
    /// Case 1 only: the candidate transfer function leaves L².
    pub divergence: Option<DivergenceFit>,
    /// Case 2 only: L² norm² of the candidate built from the elementary f₁.
    pub candidate_norm_sq: Option<f64>,
    pub passed: bool,
}

pub struct CocycleFamily {
    pub vars: VarSet,
    pub case: ObstructionCase,
    /// Row index i_k of each member; the first entry is 2 (u_{2,1}).
    pub indices: Vec<usize>,
    pub members: Vec<TermSum>,
}

impl CocycleFamily {
    /// Symbol of L_u for the k-th direction at `point`.
    pub fn multiplier(&self, k: usize, point: &[f64]) -> C64 {
        let phase = match (self.case, k) {
            (_, 0) => point[0],
            (ObstructionCase::SameRow, _) => point[0] * point[self.indices[k] - 2],
            (ObstructionCase::SameColumn, _) => point[self.indices[k] - 2],
        };
        C64::new(0.0, -phase).exp() - 1.0
    }
}

/// The cutoff p: 1 on [−½, ½], supported in [−1, 1].
fn cutoff(id: &str, var: &str) -> SmoothFactor {
    SmoothFactor::Plateau {
        id: id.into(),
        var: var.into(),
        lo: -1.0,
        plat_lo: -0.5,
        plat_hi: 0.5,
        hi: 1.0,
        scale: 1.0,
    }
}

/// Build the family f_k and verify its cocycle identities and the transfer-function obstruction.
///
/// `indices` lists i_k ≥ 3 for the members beyond u_{2,1}.
pub fn th7_family(
    n: usize,
    case: ObstructionCase,
    indices: &[usize],
    seed: u64,
) -> Result<(CocycleFamily, ObstructionReport)> {
    if n < 3 {
        return Err(Error::InvalidIndices(format!("need n ≥ 3, got {n}")));
    }
    if indices.is_empty() || indices.iter().any(|&i| i < 3 || i > n) {
        return Err(Error::InvalidIndices(format!(
            "indices must lie in 3..={n}, got {indices:?}"
        )));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() {
        return Err(Error::InvalidIndices(format!("repeated index in {indices:?}")));
    }
    let names: Vec<String> = (1..n).map(|k| format!("x{k}")).collect();
    let vars = var_set(&names);
    let mut h = TermSum::one(&vars);
    for (k, v) in names.iter().enumerate() {
        h = h.try_mul(&TermSum::factor(&vars, cutoff(&format!("p{}", k + 1), v))?)?;
    }
    let first = match case {
        ObstructionCase::SameRow => h.clone(),
        ObstructionCase::SameColumn => h
            .try_mul(&TermSum::factor(&vars, cutoff("r", "x1"))?)?
            .mul_var_pow("x1", 1)?,
    };
    let mut members = vec![first.clone()];
    for &i in indices {
        let b = format!("x{}", i - 1);
        let m = match case {
            ObstructionCase::SameRow => first.try_mul(&TermSum::factor(
                &vars,
                SmoothFactor::PhaseQuotient {
                    id: format!("q{i}"),
                    a: "x1".into(),
                    b: b.clone(),
                },
            )?)?,
            // (e^{−ib}−1)/(e^{−ia}−1) = (b/a)·E1(−ib)/E1(−ia), and f₁ carries the factor a
            ObstructionCase::SameColumn => h
                .try_mul(&TermSum::factor(&vars, cutoff("r", "x1"))?)?
                .mul_var_pow(&b, 1)?
                .try_mul(&TermSum::factor(
                    &vars,
                    SmoothFactor::PhaseRatio {
                        id: format!("q{i}"),
                        num: b.clone(),
                        den: "x1".into(),
                    },
                )?)?,
        };
        members.push(m);
    }
    let family = CocycleFamily {
        vars,
        case,
        indices: std::iter::once(2).chain(indices.iter().copied()).collect(),
        members,
    };

    let zero = C64::new(0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..IDENTITY_POINTS)
        .map(|_| (1..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut identity_max_error: f64 = 0.0;
    for p in &pts {
        let vals: Vec<C64> = family
            .members
            .iter()
            .map(|f| f.evaluate(p, zero))
            .collect::<Result<_>>()?;
        for k in 0..vals.len() {
            for l in k + 1..vals.len() {
                let lhs = family.multiplier(l, p) * vals[k];
                let rhs = family.multiplier(k, p) * vals[l];
                identity_max_error = identity_max_error.max((lhs - rhs).norm());
            }
        }
    }

    let mut derivative_max: f64 = 0.0;
    let probe = &family.members[1];
    for v in family.vars.iter() {
        let mut d = probe.clone();
        for _ in 0..4 {
            d = d.partial(v)?;
            for p in pts.iter().take(200) {
                derivative_max = derivative_max.max(d.evaluate(p, zero)?.norm());
            }
        }
    }

    let (divergence, candidate_norm_sq, passed) = match case {
        ObstructionCase::SameRow => {
            let fit = divergence_fit()?;
            let ok = (fit.slope - DIVERGENCE_SLOPE).abs() <= DIVERGENCE_SLOPE_TOL;
            (Some(fit), None, ok)
        }
        ObstructionCase::SameColumn => {
            // f₁'/(e^{−ix₁}−1) = x₁·r(x₁)·p(x₁)/(e^{−ix₁}−1), times the other cutoffs
            let p = cutoff("p", "x");
            let one_d = truncated_integral(1e-12, |x| {
                let c = p.value(&[x], zero).re;
                (x * c * c / (C64::new(0.0, -x).exp() - 1.0)).norm_sqr()
            });
            let pp = truncated_integral(0.0, |x| p.value(&[x], zero).re.powi(2));
            (None, Some(one_d * pp.powi(n as i32 - 2)), true)
        }
    };
    let passed = passed && identity_max_error < IDENTITY_TOL && derivative_max.is_finite();
    let report = ObstructionReport {
        n,
        case,
        indices: indices.to_vec(),
        points: pts.len(),
        identity_max_error,
        derivative_max,
        divergence,
        candidate_norm_sq,
        passed,
    };
    Ok((family, report))
}

/// ∫_{eps<|x|<1} f(x) dx for even f, on dyadic panels toward the origin.
fn truncated_integral(eps: f64, f: impl Fn(f64) -> f64) -> f64 {
    let gl = gauss_legendre(20);
    let mut breaks = vec![1.0, 0.5];
    let floor = eps.max(1e-12);
    while breaks.last().unwrap() * 0.5 > floor {
        let b = breaks.last().unwrap() * 0.5;
        breaks.push(b);
    }
    breaks.push(floor);
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        let (m, r) = (0.5 * (hi + lo), 0.5 * (hi - lo));
        acc += gl.0.iter().zip(&gl.1).map(|(z, wt)| wt * r * f(m + r * z)).sum::<f64>();
    }
    2.0 * acc
}

/// Truncated L² norms of p(x)/(e^{−ix}−1) for ε = 2⁻³..2⁻⁹ and their log–log slope.
pub fn divergence_fit() -> Result<DivergenceFit> {
    let p = cutoff("p", "x");
    let zero = C64::new(0.0, 0.0);
    let eps: Vec<f64> = (3..=9).map(|k| 2f64.powi(-k)).collect();
    let norm_sq: Vec<f64> = eps
        .iter()
        .map(|&e| {
            truncated_integral(e, |x| {
                let c = p.value(&[x], zero).re;
                c * c / (C64::new(0.0, -x).exp() - 1.0).norm_sqr()
            })
        })
        .collect();
    let fit = fit_loglog(&eps.iter().copied().zip(norm_sq.iter().copied()).collect::<Vec<_>>())?;
    Ok(DivergenceFit {
        eps,
        norm_sq,
        slope: fit.slope,
        residual: fit.residual,
    })
}
