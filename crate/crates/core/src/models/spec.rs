use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// SL(2,R)⋉R², position picture in (x, ξ).
    #[serde(rename = "sl2r2")]
    Sl2R2,
    #[serde(rename = "sl2r2_fourier")]
    Sl2R2Fourier,
    /// ρ_{t,s} of SL(2,R)⋉(R²⊕R²), position picture.
    #[serde(rename = "sl2r4a")]
    Sl2R4a,
    #[serde(rename = "sl2r4b_position")]
    Sl2R4bPosition,
    #[serde(rename = "sl2r4b_fourier")]
    Sl2R4bFourier,
    #[serde(rename = "ind_p_position", alias = "ind_p")]
    IndPPosition,
    #[serde(rename = "ind_p_fourier")]
    IndPFourier,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sl2R2 => "sl2r2",
            ModelKind::Sl2R2Fourier => "sl2r2_fourier",
            ModelKind::Sl2R4a => "sl2r4a",
            ModelKind::Sl2R4bPosition => "sl2r4b_position",
            ModelKind::Sl2R4bFourier => "sl2r4b_fourier",
            ModelKind::IndPPosition => "ind_p_position",
            ModelKind::IndPFourier => "ind_p_fourier",
        }
    }

    pub fn is_ind_p(self) -> bool {
        matches!(self, ModelKind::IndPPosition | ModelKind::IndPFourier)
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown model kind {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Sign {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

fn default_n() -> usize {
    2
}

fn default_s() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_s")]
    pub s_param: f64,
    #[serde(default)]
    pub sign: Sign,
    /// Position variable replaced by the Fourier variable `w` (IndPFourier).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier_axis: Option<String>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            n: 2,
            t: 0.0,
            s_param: 1.0,
            sign: Sign::Plus,
            fourier_axis: None,
        }
    }

    pub fn ind_p(n: usize) -> Self {
        ModelSpec {
            n,
            ..Self::new(ModelKind::IndPPosition)
        }
    }

    /// Fourier picture in `x_axis`, 1 ≤ axis ≤ n−1.
    pub fn ind_p_fourier(n: usize, axis: usize) -> Self {
        ModelSpec {
            n,
            fourier_axis: Some(format!("x{axis}")),
            ..Self::new(ModelKind::IndPFourier)
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s_param = s;
        self
    }

    /// Index of the Fourier axis for IndPFourier.
    pub fn axis_index(&self) -> Result<usize> {
        let axis = self
            .fourier_axis
            .as_deref()
            .ok_or_else(|| Error::InvalidModel("ind_p_fourier needs fourier_axis".into()))?;
        let a: usize = axis
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidModel(format!("bad fourier_axis {axis}")))?;
        if a == 0 || a >= self.n {
            return Err(Error::InvalidModel(format!(
                "fourier_axis {axis} outside x1..x{}",
                self.n - 1
            )));
        }
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.is_ind_p() && self.n < 2 {
            return Err(Error::InvalidModel("n must be ≥ 2".into()));
        }
        if matches!(
            self.kind,
            ModelKind::Sl2R4a | ModelKind::Sl2R4bPosition | ModelKind::Sl2R4bFourier
        ) && self.s_param == 0.0
        {
            return Err(Error::InvalidModel("s must be nonzero".into()));
        }
        if !self.t.is_finite() || !self.s_param.is_finite() {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        if self.kind == ModelKind::IndPFourier {
            self.axis_index()?;
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.kind {
            ModelKind::IndPPosition => format!("ind_p_position(n={})", self.n),
            ModelKind::IndPFourier => format!(
                "ind_p_fourier(n={}, axis={})",
                self.n,
                self.fourier_axis.as_deref().unwrap_or("?")
            ),
            k => k.name().to_string(),
        }
    }
}

/// Generator labels across all catalogued models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    /// Diagonal generator X_i of the induced model.
    Diag(usize),
    /// Unipotent generator u_{i,j}, i ≠ j.
    Unip(usize, usize),
    X,
    U,
    V,
    /// Y_1..Y_4 of the abelian ideal.
    Y(usize),
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::Diag(i) => write!(f, "X{i}"),
            GeneratorId::Unip(i, j) => write!(f, "u{i},{j}"),
            GeneratorId::X => write!(f, "X"),
            GeneratorId::U => write!(f, "U"),
            GeneratorId::V => write!(f, "V"),
            GeneratorId::Y(k) => write!(f, "Y{k}"),
        }
    }
}

impl FromStr for GeneratorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad generator name {s}"));
        match s {
            "X" => return Ok(GeneratorId::X),
            "U" => return Ok(GeneratorId::U),
            "V" => return Ok(GeneratorId::V),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('Y') {
            return rest.parse().map(GeneratorId::Y).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('X') {
            return rest.parse().map(GeneratorId::Diag).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('u') {
            let (i, j) = rest.split_once(',').ok_or_else(bad)?;
            return Ok(GeneratorId::Unip(
                i.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
            ));
        }
        Err(bad())
    }
}
