//! Subcommand bodies. Each merges the config file with flag overrides, validates
//! the result against a typed schema, then runs one library entry point.

use std::path::{Path, PathBuf};

use cohomlab::closedform::C64;
use cohomlab::cohom::{
    map_norm_constant, map_residual, solve_map, solve_twisted_grid, th7_family, twist_residual, ObstructionCase,
    TwistProblem,
};
use cohomlab::experiments::{
    cos_bound_check, lower_bound_experiment, remainder_and_t_check, tame_direction_check, Check, ExperimentConfig,
};
use cohomlab::grid::GridFunction;
use cohomlab::models::catalog::sl2_triple;
use cohomlab::models::roots::all_roots;
use cohomlab::models::{realize, roots_classify, GeneratorId, ModelKind, ModelSpec};
use cohomlab::weyl::checks::{v0_on_power, v0_on_power_expected};
use cohomlab::weyl::{casimir, check_homomorphism};
use cohomlab::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::args::{ExperimentArgs, ModelArgs, ObstructionArgs, RootsArgs, SolveArgs};

/// What a subcommand produced.
pub struct Outcome {
    pub summary: Value,
    /// Human-readable lines for stdout, printed before the summary.
    pub text: Vec<String>,
    /// CSV body for rows.csv.
    pub csv: Option<String>,
    /// Names of failed checks; empty means pass.
    pub failed: Vec<String>,
}

/// Shared flags that apply to every subcommand.
pub struct Globals<'a> {
    pub config: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub seed: Option<u64>,
}

/// Config file object with the given overrides applied, deserialized strictly.
fn merged<T: DeserializeOwned>(config: Option<&Path>, overrides: Vec<(&str, Option<Value>)>) -> Result<T> {
    let mut map = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text)? {
                Value::Object(m) => m,
                _ => return Err(Error::Config("config must be a JSON object".into())),
            }
        }
        None => Map::new(),
    };
    for (key, v) in overrides {
        if let Some(v) = v {
            map.insert(key.to_string(), v);
        }
    }
    Ok(serde_json::from_value(Value::Object(map))?)
}

fn opt<T: Serialize>(v: &Option<T>) -> Option<Value> {
    v.as_ref().map(|x| serde_json::to_value(x).expect("plain value"))
}

fn rows_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn failed_checks(checks: &[Check]) -> Vec<String> {
    checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    model: Option<String>,
    n: Option<usize>,
    axis: Option<usize>,
    t: Option<f64>,
    s_param: Option<f64>,
    sign: Option<String>,
}

fn model_overrides(a: &ModelArgs) -> Vec<(&'static str, Option<Value>)> {
    vec![
        ("model", opt(&a.model)),
        ("n", opt(&a.n)),
        ("axis", opt(&a.axis)),
        ("t", opt(&a.t)),
        ("s_param", opt(&a.s_param)),
        ("sign", opt(&a.sign)),
    ]
}

fn model_spec(kind: &str, c: &ModelConfig) -> Result<ModelSpec> {
    let kind: ModelKind = kind.parse()?;
    let n = c.n.unwrap_or(2);
    let mut spec = match kind {
        ModelKind::IndPFourier => ModelSpec::ind_p_fourier(n, c.axis.unwrap_or(1)),
        ModelKind::IndPPosition => ModelSpec::ind_p(n),
        k => ModelSpec::new(k),
    };
    spec.t = c.t.unwrap_or(0.0);
    spec.s_param = c.s_param.unwrap_or(1.0);
    if let Some(s) = &c.sign {
        spec.sign = serde_json::from_value(Value::String(s.clone()))
            .map_err(|_| Error::Config(format!("sign must be + or -, got {s}")))?;
    }
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(spec)
}

fn catalogue() -> Vec<ModelSpec> {
    let mut out = vec![
        ModelSpec::new(ModelKind::Sl2R2).with_t(1.5),
        ModelSpec::new(ModelKind::Sl2R2Fourier).with_t(-2.0),
        ModelSpec::new(ModelKind::Sl2R4a).with_t(0.5).with_s(3.0),
        ModelSpec::new(ModelKind::Sl2R4bPosition).with_s(-1.25),
        ModelSpec::new(ModelKind::Sl2R4bFourier).with_s(2.0),
    ];
    out.extend((2..=4).map(ModelSpec::ind_p));
    for n in 2..=3 {
        out.extend((1..n).map(|a| ModelSpec::ind_p_fourier(n, a)));
    }
    out
}

pub fn verify_algebra(g: &Globals, a: &ModelArgs) -> Result<Outcome> {
    let cfg: ModelConfig = merged(g.config, model_overrides(a))?;
    let specs = match &cfg.model {
        Some(kind) => vec![model_spec(kind, &cfg)?],
        None => catalogue(),
    };
    let mut text = Vec::new();
    let mut failed = Vec::new();
    let mut models = Vec::new();
    for spec in &specs {
        let rep = check_homomorphism(spec)?;
        text.push(format!("# {}", rep.model));
        for (x, y, rhs) in &rep.table {
            text.push(format!("[{x}, {y}] = {rhs}"));
        }
        for m in &rep.mismatches {
            text.push(format!("MISMATCH [{}, {}]: residual {}", m.a, m.b, m.residual));
        }
        let cas = casimir(spec)?;
        let mut casimir_central = true;
        for gen in sl2_triple(spec)? {
            casimir_central &= cas.commutator(&realize(spec, gen)?).is_zero();
        }
        if !rep.passed() {
            failed.push(format!("{}: brackets", rep.model));
        }
        if !casimir_central {
            failed.push(format!("{}: casimir", rep.model));
        }
        models.push(json!({
            "model": rep.model,
            "pairs_checked": rep.pairs_checked,
            "mismatches": rep.mismatches,
            "casimir_central": casimir_central,
        }));
    }
    let mut powers_exact = true;
    if specs.iter().any(|s| s.kind.is_ind_p()) {
        for n in 2..=4 {
            for r in -2..=2 {
                powers_exact &= v0_on_power(n, r) == v0_on_power_expected(n, r);
            }
        }
    }
    if !powers_exact {
        failed.push("v0_powers".into());
    }
    Ok(Outcome {
        summary: json!({ "models": models, "v0_powers_exact": powers_exact, "pass": failed.is_empty() }),
        text,
        csv: None,
        failed,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    model: Option<String>,
    n: Option<usize>,
    axis: Option<usize>,
    t: Option<f64>,
    s_param: Option<f64>,
    sign: Option<String>,
    input: PathBuf,
    j: Option<usize>,
    i: Option<usize>,
    lambda: Option<f64>,
    #[serde(rename = "L")]
    l: Option<f64>,
}

pub fn solve(g: &Globals, a: &SolveArgs) -> Result<Outcome> {
    let mut overrides = model_overrides(&a.model);
    overrides.extend([
        ("input", Some(Value::String(a.input.display().to_string()))),
        ("j", opt(&a.j)),
        ("i", opt(&a.i)),
        ("lambda", opt(&a.lambda)),
        ("L", opt(&a.l)),
    ]);
    let c: SolveConfig = merged(g.config, overrides)?;
    let mc = ModelConfig {
        model: None,
        n: c.n,
        axis: c.axis,
        t: c.t,
        s_param: c.s_param,
        sign: c.sign.clone(),
    };
    let kind = c
        .model
        .clone()
        .ok_or_else(|| Error::Config("solve needs --model".into()))?;
    let spec = model_spec(&kind, &mc)?;
    let (j, i) = match spec.kind {
        ModelKind::IndPFourier => (c.j.unwrap_or(spec.axis_index()? + 1), c.i.unwrap_or(spec.n)),
        _ => (c.j.unwrap_or(1), c.i.unwrap_or(2)),
    };
    let prob = match (c.lambda, c.l) {
        (Some(lam), None) => TwistProblem::twist(spec, j, i, lam),
        (None, Some(l)) => TwistProblem::map(spec, j, i, l),
        _ => {
            return Err(Error::Config(
                "give exactly one of --lambda (twist) or --L (map)".into(),
            ))
        }
    };
    prob.validate().map_err(|e| Error::Config(e.to_string()))?;
    let rhs = GridFunction::load(&c.input).map_err(|e| Error::Config(format!("{}: {e}", c.input.display())))?;
    let mut norm_constant = None;
    let (f, residual, equation) = if c.lambda.is_some() {
        let f = solve_twisted_grid(&rhs, &prob)?;
        let r = twist_residual(&rhs, &f, &prob)?;
        (f, r, "twist")
    } else {
        let f = solve_map(&rhs, &prob)?;
        let r = map_residual(&rhs, &f, &prob)?;
        if let Ok(y1) = realize(&prob.model, GeneratorId::Y(1)) {
            norm_constant = Some(map_norm_constant(&rhs, &f, &y1, C64::new(0.0, prob.model.t))?);
        }
        (f, r, "map")
    };
    let out = g.out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let path = out.join("solution.json");
    f.save(&path)?;
    Ok(Outcome {
        summary: json!({
            "equation": equation,
            "j": j,
            "i": i,
            "relative_residual": residual,
            "norm_constant": norm_constant,
            "solution": path.display().to_string(),
            "pass": true,
        }),
        text: Vec::new(),
        csv: None,
        failed: Vec::new(),
    })
}

pub fn experiment_config(g: &Globals, a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let value: Value = merged(
        g.config,
        vec![
            ("n", opt(&a.n)),
            ("j", opt(&a.j)),
            ("i", opt(&a.i)),
            ("sign", opt(&a.sign)),
            ("s", opt(&a.s)),
            ("sigma", opt(&a.sigma)),
            ("variant", opt(&a.variant)),
            ("lambda", opt(&a.lambda)),
            ("L", opt(&a.l)),
            ("nu_schedule", opt(&a.schedule)),
            ("beta", opt(&a.beta)),
            ("points", opt(&a.points)),
            ("direction", opt(&a.direction)),
            ("s_max", opt(&a.s_max)),
            ("seed", opt(&g.seed)),
        ],
    )?;
    ExperimentConfig::from_json_str(&value.to_string())
}

pub fn lower_bound(g: &Globals, a: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(g, a)?;
    let rep = lower_bound_experiment(&cfg)?;
    let mut csv = Vec::new();
    rep.write_csv(&mut csv)?;
    Ok(Outcome {
        summary: rep.summary_json(),
        text: Vec::new(),
        csv: Some(String::from_utf8(csv).expect("csv is utf-8")),
        failed: failed_checks(&rep.checks),
    })
}

pub fn remainder(g: &Globals, a: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(g, a)?;
    let rep = remainder_and_t_check(&cfg)?;
    Ok(Outcome {
        summary: json!({
            "beta": rep.beta,
            "b_fit": rep.b_fit,
            "checks": rep.checks,
            "pass": rep.pass,
            "runtime_s": rep.runtime_s,
            "config": cfg,
        }),
        text: Vec::new(),
        csv: Some(rows_csv(&rep.rows)?),
        failed: failed_checks(&rep.checks),
    })
}

pub fn cos_bound(g: &Globals, a: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(g, a)?;
    let rep = cos_bound_check(&cfg.nu_schedule)?;
    Ok(Outcome {
        summary: json!({ "checks": rep.checks, "pass": rep.pass, "nu_schedule": cfg.nu_schedule }),
        text: Vec::new(),
        csv: Some(rows_csv(&rep.rows)?),
        failed: failed_checks(&rep.checks),
    })
}

pub fn tame_check(g: &Globals, a: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(g, a)?;
    let rep = tame_direction_check(&cfg)?;
    Ok(Outcome {
        summary: json!({
            "direction": rep.direction,
            "s_loss": rep.s_loss,
            "slope_tame": rep.fit_tame.slope,
            "slope_contrast": rep.fit_contrast.slope,
            "residuals": { "tame": rep.fit_tame.residual, "contrast": rep.fit_contrast.residual },
            "checks": rep.checks,
            "pass": rep.pass,
            "runtime_s": rep.runtime_s,
            "config": cfg,
        }),
        text: Vec::new(),
        csv: Some(rows_csv(&rep.rows)?),
        failed: failed_checks(&rep.checks),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstructionConfig {
    #[serde(default = "three")]
    n: usize,
    #[serde(default = "one")]
    case: u32,
    indices: Option<Vec<usize>>,
    #[serde(default)]
    seed: u64,
}

fn three() -> usize {
    3
}

fn one() -> u32 {
    1
}

pub fn obstruction(g: &Globals, a: &ObstructionArgs) -> Result<Outcome> {
    let c: ObstructionConfig = merged(
        g.config,
        vec![
            ("n", opt(&a.n)),
            ("case", opt(&a.case)),
            ("indices", opt(&a.indices)),
            ("seed", opt(&g.seed)),
        ],
    )?;
    let case = ObstructionCase::from_number(c.case).map_err(|e| Error::Config(e.to_string()))?;
    let indices = c.indices.unwrap_or_else(|| (3..=c.n).collect());
    let (_, rep) = th7_family(c.n, case, &indices, c.seed).map_err(|e| match e {
        Error::InvalidIndices(m) => Error::Config(m),
        other => other,
    })?;
    let failed = if rep.passed {
        Vec::new()
    } else {
        vec!["obstruction".into()]
    };
    Ok(Outcome {
        summary: json!({ "report": rep, "pass": rep.passed }),
        text: Vec::new(),
        csv: None,
        failed,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootsConfig {
    #[serde(default = "three")]
    n: usize,
    phi: Option<String>,
}

fn parse_root(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("root must look like i,j; got {s}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn roots(g: &Globals, a: &RootsArgs) -> Result<Outcome> {
    let c: RootsConfig = merged(g.config, vec![("n", opt(&a.n)), ("phi", opt(&a.phi))])?;
    let phis = match &c.phi {
        Some(p) => vec![parse_root(p)?],
        None => all_roots(c.n),
    };
    let mut text = Vec::new();
    let mut reports = Vec::new();
    for phi in phis {
        let rep = roots_classify(c.n, phi).map_err(|e| Error::Config(e.to_string()))?;
        let fmt = |v: &[(usize, usize)]| {
            v.iter()
                .map(|(i, j)| format!("e{i}-e{j}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        text.push(format!(
            "e{}-e{}: E = [{}]  Ebar = [{}]",
            phi.0,
            phi.1,
            fmt(&rep.e_phi),
            fmt(&rep.ebar_phi)
        ));
        reports.push(rep);
    }
    Ok(Outcome {
        summary: json!({ "n": c.n, "roots": reports, "pass": true }),
        text,
        csv: None,
        failed: Vec::new(),
    })
}
