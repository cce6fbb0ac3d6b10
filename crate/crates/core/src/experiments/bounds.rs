//! Pointwise bounds on the T/B split and the cosine lower bound on I_ν.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_loglog, LogLogFit};
use super::lower_bound::Check;
use crate::cohom::builder::{build_counterexample, x_var, Variant};
use crate::cohom::ubeta::{t_and_b, u_beta_f};
use crate::error::{Error, Result};
use crate::grid::boxes::{i_nu, PLATEAU};
use crate::models::catalog::DUAL_VAR;

pub const B_SLOPE_MAX: f64 = 0.1;
pub const T_FLOOR: f64 = 1e-3;
pub const TB_CONSISTENCY_TOL: f64 = 1e-8;
/// Relative size of B below which it counts as zero.
pub const B_ZERO_TOL: f64 = 1e-10;
pub const COS_FLOOR: f64 = 1.0 / 20.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderRow {
    pub t: f64,
    /// max |B| / t^{2β}
    pub b_scaled_max: f64,
    /// min |T| / t^{2β+1}
    pub t_scaled_min: f64,
    /// max |T + B − û^β f| / |û^β f|
    pub consistency: f64,
    /// max |B| / |T|
    pub b_relative_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    pub beta: u32,
    pub rows: Vec<RemainderRow>,
    /// Fit of b_scaled_max against t; absent for β = 0.
    pub b_fit: Option<LogLogFit>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub runtime_s: f64,
}

/// Seeded points with x_{j−1}ω ∈ λ·I_ν and every other coordinate on the plateau.
fn sample_points(vars: &[String], j: usize, lambda: f64, t: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (lo, hi) = i_nu(t);
    let xv = x_var(j);
    let xi = xv.as_ref().and_then(|x| vars.iter().position(|v| v == x));
    let wi = vars
        .iter()
        .position(|v| v == DUAL_VAR)
        .expect("Fourier variable present");
    (0..count)
        .map(|_| {
            let mut p: Vec<f64> = vars.iter().map(|_| rng.gen_range(PLATEAU.0..PLATEAU.1)).collect();
            let prod = lambda * rng.gen_range(lo..hi);
            let x = match xi {
                Some(k) => {
                    // keep ω/λ on the plateau as well
                    p[k] = rng.gen_range(0.85..1.15);
                    p[k]
                }
                None => 1.0,
            };
            p[wi] = prod / x;
            p
        })
        .collect()
}

/// Scaled |B| maxima and |T| minima over I_ν for each t.
pub fn remainder_and_t_check(cfg: &ExperimentConfig) -> Result<RemainderReport> {
    cfg.validate()?;
    if cfg.beta > 2 {
        return Err(Error::Config(format!("β must be ≤ 2, got {}", cfg.beta)));
    }
    if cfg.variant != Variant::Twist {
        return Err(Error::Config("the T/B split is defined for the twist variant".into()));
    }
    let start = Instant::now();
    let beta = cfg.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for &t in &cfg.nu_schedule {
        let pair = build_counterexample(cfg.n, cfg.j, cfg.i, t, cfg.parameter(), Variant::Twist)?;
        let ev = u_beta_f(&pair, beta)?;
        let vars: Vec<String> = pair.vars().iter().cloned().collect();
        let pts = sample_points(&vars, cfg.j, pair.meta.lambda, t, cfg.points, &mut rng);
        let (mut bmax, mut tmin, mut cons, mut brel): (f64, f64, f64, f64) = (0.0, f64::INFINITY, 0.0, 0.0);
        for p in &pts {
            let tb = t_and_b(&ev, p)?;
            let direct = ev.evaluate(p)?;
            let sum = tb.t_value() + tb.b_value();
            cons = cons.max((sum - direct).norm() / direct.norm().max(f64::MIN_POSITIVE));
            bmax = bmax.max(tb.b_value().norm() / t.powi(2 * beta as i32));
            brel = brel.max(tb.b_value().norm() / tb.t_value().norm());
            tmin = tmin.min(tb.t_value().norm() / t.powi(2 * beta as i32 + 1));
        }
        rows.push(RemainderRow {
            t,
            b_scaled_max: bmax,
            t_scaled_min: tmin,
            consistency: cons,
            b_relative_max: brel,
        });
    }
    let t_floor = rows.iter().map(|r| r.t_scaled_min).fold(f64::INFINITY, f64::min);
    let consistency = rows.iter().map(|r| r.consistency).fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_least("t_floor", t_floor, T_FLOOR),
        Check::at_most("tb_consistency", consistency, TB_CONSISTENCY_TOL),
    ];
    let b_fit = if beta == 0 {
        // the β = 0 representation is exact, so B is rounding noise
        let brel = rows.iter().map(|r| r.b_relative_max).fold(0.0, f64::max);
        checks.push(Check::at_most("b_relative", brel, B_ZERO_TOL));
        None
    } else {
        let fit = fit_loglog(&rows.iter().map(|r| (r.t, r.b_scaled_max)).collect::<Vec<_>>())?;
        checks.push(Check::at_most("b_slope", fit.slope, B_SLOPE_MAX));
        Some(fit)
    };
    let pass = checks.iter().all(|c| c.passed);
    Ok(RemainderReport {
        beta,
        rows,
        b_fit,
        checks,
        pass,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosBoundRow {
    pub t: f64,
    /// min cos(t·log(1 + r(ωx − 1))) over the samples
    pub cos_min: f64,
    /// max |log(1 + u) − u|·t² over the samples, u = r(ωx − 1)
    pub phase_defect_scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosBoundReport {
    pub rows: Vec<CosBoundRow>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Samples per axis of the (r, ωx) grid.
const COS_SAMPLES: usize = 401;

pub fn cos_bound_check(schedule: &[f64]) -> Result<CosBoundReport> {
    if schedule.is_empty() || schedule.iter().any(|t| !(*t >= 4.0)) {
        return Err(Error::Config("cos-bound schedule needs t ≥ 4".into()));
    }
    let rows: Vec<CosBoundRow> = schedule
        .iter()
        .map(|&t| {
            let (lo, hi) = i_nu(t);
            let mut cos_min = f64::INFINITY;
            let mut defect: f64 = 0.0;
            for a in 0..COS_SAMPLES {
                let r = a as f64 / (COS_SAMPLES - 1) as f64;
                for b in 0..COS_SAMPLES {
                    let p = lo + (hi - lo) * b as f64 / (COS_SAMPLES - 1) as f64;
                    let u = r * (p - 1.0);
                    let log = u.ln_1p();
                    cos_min = cos_min.min((t * log).cos());
                    defect = defect.max((log - u).abs() * t * t);
                }
            }
            CosBoundRow {
                t,
                cos_min,
                phase_defect_scaled: defect,
            }
        })
        .collect();
    let cos_min = rows.iter().map(|r| r.cos_min).fold(f64::INFINITY, f64::min);
    let defect = rows.iter().map(|r| r.phase_defect_scaled).fold(0.0, f64::max);
    let checks = vec![
        Check::at_least("cos_min", cos_min, COS_FLOOR),
        Check::at_most("phase_defect_t2", defect, 1.0),
    ];
    let pass = checks.iter().all(|c| c.passed);
    Ok(CosBoundReport { rows, checks, pass })
}
