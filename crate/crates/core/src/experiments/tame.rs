//! Boundedness of the solution in a direction other than û_{j,i}, against the û_{j,i} contrast.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_loglog, LogLogFit};
use super::lower_bound::Check;
use crate::closedform::norms::{directional_norm, sobolev_norm};
use crate::cohom::builder::build_counterexample;
use crate::error::{Error, Result};
use crate::models::{realize, GeneratorId};

pub const TAME_SLOPE_MAX: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameRow {
    pub t: f64,
    /// ‖(I − a²)^{s/2} f‖
    pub norm_f_tame: f64,
    /// ‖(I − û_{j,i}²)^{s/2} f‖
    pub norm_f_contrast: f64,
    /// ‖g‖_{s + s_loss}
    pub norm_g_loss: f64,
    /// ‖g‖_{s + σ}
    pub norm_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameReport {
    pub direction: String,
    pub s_loss: usize,
    pub rows: Vec<TameRow>,
    pub fit_tame: LogLogFit,
    pub fit_contrast: LogLogFit,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub runtime_s: f64,
}

/// Default tame direction: u_{i,1} when j ≠ 1, else u_{i,j} itself.
fn default_direction(cfg: &ExperimentConfig) -> GeneratorId {
    if cfg.j != 1 {
        GeneratorId::Unip(cfg.i, 1)
    } else {
        GeneratorId::Unip(cfg.i, cfg.j)
    }
}

pub fn tame_direction_check(cfg: &ExperimentConfig) -> Result<TameReport> {
    cfg.validate()?;
    let start = Instant::now();
    let dir = match &cfg.direction {
        Some(name) => name
            .parse::<GeneratorId>()
            .map_err(|_| Error::DirectionNotComputable(name.clone()))?,
        None => default_direction(cfg),
    };
    if dir == GeneratorId::Unip(cfg.j, cfg.i) {
        return Err(Error::DirectionNotComputable(format!(
            "{dir} is the non-tame direction itself"
        )));
    }
    let s_loss = cfg.s_max.unwrap_or(cfg.s).saturating_sub(cfg.s).min(12);
    let quad = cfg.quad_spec();
    let mut rows = Vec::new();
    for &t in &cfg.nu_schedule {
        let pair = build_counterexample(cfg.n, cfg.j, cfg.i, t, cfg.parameter(), cfg.variant)?;
        let mut model = pair.model.clone();
        model.sign = cfg.sign;
        let a = realize(&model, dir).map_err(|_| Error::DirectionNotComputable(dir.to_string()))?;
        let dom = pair.domain();
        let norm_f_tame = directional_norm(&pair.f, &a, cfg.s, pair.nu, &quad, &dom)?;
        let norm_f_contrast = directional_norm(&pair.f, &pair.u_direction()?, cfg.s, pair.nu, &quad, &dom)?;
        let norm_g = sobolev_norm(&pair.g, &model, cfg.s + cfg.sigma, pair.nu, &quad, &dom)?;
        let norm_g_loss = if s_loss == cfg.sigma {
            norm_g
        } else {
            sobolev_norm(&pair.g, &model, cfg.s + s_loss, pair.nu, &quad, &dom)?
        };
        rows.push(TameRow {
            t,
            norm_f_tame,
            norm_f_contrast,
            norm_g_loss,
            norm_g,
        });
    }
    let fit_tame = fit_loglog(
        &rows
            .iter()
            .map(|r| (r.t, r.norm_f_tame / r.norm_g_loss))
            .collect::<Vec<_>>(),
    )?;
    let fit_contrast = fit_loglog(
        &rows
            .iter()
            .map(|r| (r.t, r.norm_f_contrast / r.norm_g))
            .collect::<Vec<_>>(),
    )?;
    let checks = vec![
        Check::at_most("tame_ratio_slope", fit_tame.slope, TAME_SLOPE_MAX),
        Check::at_least("contrast_ratio_slope", fit_contrast.slope, cfg.s as f64 + 0.2),
    ];
    let pass = checks.iter().all(|c| c.passed);
    Ok(TameReport {
        direction: dir.to_string(),
        s_loss,
        rows,
        fit_tame,
        fit_contrast,
        checks,
        pass,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_tame_and_unknown_directions() {
        let mut cfg = ExperimentConfig {
            direction: Some("u1,2".into()),
            nu_schedule: vec![8.0, 16.0, 32.0],
            ..Default::default()
        };
        assert!(matches!(
            tame_direction_check(&cfg),
            Err(Error::DirectionNotComputable(_))
        ));
        cfg.direction = Some("Y7".into());
        assert!(matches!(
            tame_direction_check(&cfg),
            Err(Error::DirectionNotComputable(_))
        ));
    }

    #[test]
    fn flow_direction_is_tame_for_the_line_model() {
        let cfg = ExperimentConfig {
            nu_schedule: vec![32.0, 64.0, 128.0],
            ..Default::default()
        };
        let r = tame_direction_check(&cfg).unwrap();
        assert_eq!(r.direction, "u2,1");
        assert!(r.pass, "{:?}", r.checks);
    }
}
