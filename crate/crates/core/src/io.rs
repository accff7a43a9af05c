//! JSON file formats for states, measurements, bases and discord results.
//!
//! Complex matrices are arrays of rows of `[re, im]` pairs. Floats are written
//! with 17 significant digits so values survive a round trip bit-for-bit.

use std::io::Write;
use std::path::Path;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::discord::{DiscordResult, Measure, OptimizerConfig};
use crate::error::{Error, Result, StateViolation};
use crate::linalg::{CMatrix, RMatrix, RVector};
use crate::measurement::ProjectiveMeasurement;
use crate::states::{
    bipartite_compose, bipartite_decompose, bloch_to_density, BipartiteState, BlochVector, DensityMatrix,
};
use crate::su_algebra::{GellMannBasis, StructureTensors};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix<f64>) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Format("matrix has no rows".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::InvalidState(StateViolation::NotSquare {
            rows: n,
            cols: rows[bad].len(),
        }));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| Complex::new(rows[r][c][0], rows[r][c][1])))
}

fn real_matrix_from_json(rows: &[Vec<f64>], n: usize) -> Result<RMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Format(format!("K must be {n}x{n}")));
    }
    Ok(RMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn real_matrix_to_json(m: &RMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn vector_from_json(v: &[f64], n: usize, name: &str) -> Result<RVector<f64>> {
    if v.len() != n {
        return Err(Error::Format(format!("{name} must have {n} entries, found {}", v.len())));
    }
    Ok(RVector::from_column_slice(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Repr {
    Matrix,
    /// Single-qudit Bloch vector in the `n` field.
    Bloch,
    BipartiteBloch,
}

/// On-disk state, either single-qudit or bipartite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub repr: Repr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Single(DensityMatrix<f64>),
    Bipartite(BipartiteState<f64>),
}

impl LoadedState {
    pub fn d(&self) -> usize {
        match self {
            LoadedState::Single(s) => s.d(),
            LoadedState::Bipartite(s) => s.d,
        }
    }

    pub fn into_bipartite(self) -> Result<BipartiteState<f64>> {
        match self {
            LoadedState::Bipartite(s) => Ok(s),
            LoadedState::Single(_) => Err(Error::Format("expected a bipartite state".into())),
        }
    }
}

impl StateFile {
    pub fn from_bipartite(s: &BipartiteState<f64>, repr: Repr) -> Self {
        let mut f = Self::empty(s.d, repr);
        match repr {
            Repr::BipartiteBloch => {
                f.x = Some(s.x.iter().copied().collect());
                f.y = Some(s.y.iter().copied().collect());
                f.k = Some(real_matrix_to_json(&s.k));
            }
            _ => f.matrix = Some(matrix_to_json(&s.matrix)),
        }
        f.repr = if repr == Repr::BipartiteBloch { repr } else { Repr::Matrix };
        f
    }

    pub fn from_density(rho: &DensityMatrix<f64>) -> Self {
        Self {
            matrix: Some(matrix_to_json(rho.matrix())),
            ..Self::empty(rho.d(), Repr::Matrix)
        }
    }

    pub fn from_bloch(n: &BlochVector<f64>) -> Self {
        Self {
            n: Some(n.n.iter().copied().collect()),
            ..Self::empty(n.d, Repr::Bloch)
        }
    }

    fn empty(d: usize, repr: Repr) -> Self {
        Self {
            d,
            repr,
            matrix: None,
            n: None,
            x: None,
            y: None,
            k: None,
        }
    }

    /// Builds the state and checks every validity invariant.
    pub fn into_state(self) -> Result<LoadedState> {
        let d = self.d;
        let basis = GellMannBasis::<f64>::new(d)?;
        let dim = basis.dim();
        let missing = |field: &str| Error::Format(format!("repr {:?} requires field {field:?}", self.repr));
        match self.repr {
            Repr::Matrix => {
                let m = matrix_from_json(self.matrix.as_ref().ok_or_else(|| missing("matrix"))?)?;
                if m.nrows() == d {
                    Ok(LoadedState::Single(DensityMatrix::new(m)?))
                } else if m.nrows() == d * d {
                    Ok(LoadedState::Bipartite(bipartite_decompose(&m, &basis)?))
                } else {
                    Err(StateViolation::DimensionMismatch {
                        expected: d * d,
                        found: m.nrows(),
                    }
                    .into())
                }
            }
            Repr::Bloch => {
                let n = vector_from_json(self.n.as_ref().ok_or_else(|| missing("n"))?, dim, "n")?;
                let rho = bloch_to_density(&BlochVector::new(d, n)?, &basis)?;
                rho.validate()?;
                Ok(LoadedState::Single(rho))
            }
            Repr::BipartiteBloch => {
                let x = vector_from_json(self.x.as_ref().ok_or_else(|| missing("x"))?, dim, "x")?;
                let y = vector_from_json(self.y.as_ref().ok_or_else(|| missing("y"))?, dim, "y")?;
                let k = real_matrix_from_json(self.k.as_ref().ok_or_else(|| missing("K"))?, dim)?;
                Ok(LoadedState::Bipartite(bipartite_compose(&x, &y, &k, &basis)?))
            }
        }
    }
}

pub fn parse_state(json: &str) -> Result<LoadedState> {
    serde_json::from_str::<StateFile>(json)?.into_state()
}

pub fn load_state(path: impl AsRef<Path>) -> Result<LoadedState> {
    parse_state(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub d: usize,
    pub unitary: JsonMatrix,
}

impl MeasurementFile {
    pub fn from_measurement(m: &ProjectiveMeasurement<f64>) -> Self {
        Self {
            d: m.d(),
            unitary: matrix_to_json(m.unitary()),
        }
    }

    pub fn into_measurement(self) -> Result<ProjectiveMeasurement<f64>> {
        let u = matrix_from_json(&self.unitary)?;
        if u.nrows() != self.d {
            return Err(Error::LengthMismatch {
                expected: self.d,
                found: u.nrows(),
            });
        }
        ProjectiveMeasurement::from_unitary(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscordFile {
    pub measure: Measure,
    pub value: f64,
    pub lower_bound: f64,
    pub best_unitary: JsonMatrix,
    pub per_start: Vec<f64>,
    pub objective_evals: usize,
    pub seed: u64,
    pub config: OptimizerConfig,
}

impl From<&DiscordResult<f64>> for DiscordFile {
    fn from(r: &DiscordResult<f64>) -> Self {
        Self {
            measure: r.measure,
            value: r.value,
            lower_bound: r.lower_bound,
            best_unitary: matrix_to_json(&r.best_unitary),
            per_start: r.per_start_values.clone(),
            objective_evals: r.objective_evals,
            seed: r.config.seed,
            config: r.config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

/// Generators plus the independent structure constants, indices 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub d: usize,
    pub generators: Vec<JsonMatrix>,
    /// `d_jkl` for `j ≤ k ≤ l`.
    pub sym: Vec<TensorEntry>,
    /// `f_jkl` for `j < k < l`.
    pub antisym: Vec<TensorEntry>,
}

impl BasisFile {
    pub fn new(basis: &GellMannBasis<f64>, tensors: &StructureTensors<f64>) -> Self {
        let entry = |[j, k, l]: [usize; 3], value: f64| TensorEntry {
            j: j + 1,
            k: k + 1,
            l: l + 1,
            value,
        };
        Self {
            d: basis.d(),
            generators: basis.generators().iter().map(matrix_to_json).collect(),
            sym: tensors
                .sym_entries()
                .filter(|([j, k, l], _)| j <= k && k <= l)
                .map(|(idx, v)| entry(idx, v))
                .collect(),
            antisym: tensors
                .antisym_entries()
                .filter(|([j, k, l], _)| j < k && k < l)
                .map(|(idx, v)| entry(idx, v))
                .collect(),
        }
    }
}

/// Pretty printer that writes every float with 17 significant digits.
pub struct PrecisionFormatter<'a>(PrettyFormatter<'a>);

impl Default for PrecisionFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

impl Formatter for PrecisionFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        if value == 0.0 {
            // Normalizes -0.0 as well.
            return w.write_all(b"0.0");
        }
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` with [`PrecisionFormatter`].
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PrecisionFormatter::default());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<S: Serialize + ?Sized>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
