//! Geometric discord: trace-norm (D₁) and Hilbert–Schmidt (D₂) disturbance
//! minimized over projective measurements on subsystem A, the Ξ lower bounds,
//! the closed-form families, Werner and isotropic states, and an independent
//! brute-force minimizer used as a cross-check.

use nalgebra::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    exp_i_hermitian, frobenius_sq, identity, kron, max_abs_real, swap_operator, trace_norm_hermitian, CMatrix,
    RMatrix, RVector,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::sampling::{haar_unitary, stream_rng};
use crate::scalar::{abs, c_real, real, to_f64, Real};
use crate::states::{bipartite_compose, bipartite_decompose, BipartiteState};
use crate::su_algebra::{adjoint_rep, preserves_d_tensor, preserves_f_tensor, GellMannBasis, StructureTensors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    D1,
    D2,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::D1 => "d1",
            Measure::D2 => "d2",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(Measure::D1),
            "d2" => Ok(Measure::D2),
            other => Err(Error::InvalidConfig(format!("unknown measure {other:?}"))),
        }
    }
}

/// Overall scale applied to the minimized distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `d/(2(d-1))·‖S‖₁` for D₁ and `d/(d-1)·‖S‖²_F` for D₂.
    #[default]
    Scaled,
    /// `‖S‖₁` and `‖S‖²_F` without prefactor.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    /// Simplex iterations per start.
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    pub seed: u64,
    pub parallel: bool,
    #[serde(default)]
    pub normalization: Normalization,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iterations: 2000,
            objective_tolerance: 1e-8,
            seed: 0,
            parallel: true,
            normalization: Normalization::Scaled,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("starts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.objective_tolerance > 0.0 && self.objective_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "objective_tolerance must be positive and finite (got {})",
                self.objective_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult<T: Real> {
    pub measure: Measure,
    /// Smallest value over all starts.
    pub value: T,
    pub best_unitary: CMatrix<T>,
    pub objective_evals: usize,
    pub per_start_values: Vec<T>,
    /// Ξ bound for `measure`, in the same normalization as `value`.
    pub lower_bound: T,
    pub config: OptimizerConfig,
}

fn check_state<T: Real>(state: &BipartiteState<T>, basis: &GellMannBasis<T>) -> Result<()> {
    if state.d != basis.d() || state.matrix.nrows() != state.d * state.d {
        return Err(Error::LengthMismatch {
            expected: basis.d(),
            found: state.d,
        });
    }
    Ok(())
}

/// `S' = (U†⊗I)(ρ - P_A(ρ))(U⊗I)`: in the rotated frame the measurement is
/// canonical, so `S'` is `ρ'` with its diagonal A-blocks removed. `S'` is
/// unitarily equivalent to the disturbance, so both norms agree.
fn rotated_disturbance<T: Real>(rho: &CMatrix<T>, u: &CMatrix<T>) -> CMatrix<T> {
    let d = u.nrows();
    let w = kron(u, &identity(d));
    let mut s = w.adjoint() * rho * w;
    for a in 0..d {
        s.view_mut((a * d, a * d), (d, d)).fill(c_real(T::zero()));
    }
    s
}

fn prefactor<T: Real>(measure: Measure, normalization: Normalization, d: usize) -> T {
    let df = d as f64;
    match (normalization, measure) {
        (Normalization::Raw, _) => T::one(),
        (Normalization::Scaled, Measure::D1) => real(df / (2.0 * (df - 1.0))),
        (Normalization::Scaled, Measure::D2) => real(df / (df - 1.0)),
    }
}

fn objective_value<T: Real>(rho: &CMatrix<T>, u: &CMatrix<T>, measure: Measure, scale: T) -> T {
    let s = rotated_disturbance(rho, u);
    scale
        * match measure {
            Measure::D1 => trace_norm_hermitian(&s),
            Measure::D2 => frobenius_sq(&s),
        }
}

/// `d/(2(d-1)) · ‖ρ - P_A(ρ)‖₁` for the measurement in the columns of `u`.
pub fn d1_objective<T: Real>(state: &BipartiteState<T>, u: &CMatrix<T>) -> Result<T> {
    let m = crate::measurement::measurement_from_unitary(u)?;
    let d = m.d();
    if state.d != d {
        return Err(Error::LengthMismatch {
            expected: state.d,
            found: d,
        });
    }
    Ok(objective_value(
        &state.matrix,
        m.unitary(),
        Measure::D1,
        prefactor(Measure::D1, Normalization::Scaled, d),
    ))
}

/// `d/(d-1) · ‖ρ - P_A(ρ)‖²_F` for the measurement in the columns of `u`.
pub fn d2_objective<T: Real>(state: &BipartiteState<T>, u: &CMatrix<T>) -> Result<T> {
    let m = crate::measurement::measurement_from_unitary(u)?;
    let d = m.d();
    if state.d != d {
        return Err(Error::LengthMismatch {
            expected: state.d,
            found: d,
        });
    }
    Ok(objective_value(
        &state.matrix,
        m.unitary(),
        Measure::D2,
        prefactor(Measure::D2, Normalization::Scaled, d),
    ))
}

/// `U(θ) = exp(i Σ_j θ_j λ_j / 2)`.
pub fn unitary_from_angles<T: Real>(theta: &[T], basis: &GellMannBasis<T>) -> Result<CMatrix<T>> {
    let v = RVector::from_column_slice(theta).map(|x| x * real::<T>(0.5));
    Ok(exp_i_hermitian(&basis.combination(&v)?))
}

/// Sub-seed of start `index`; independent of execution order.
fn start_angles<T: Real>(seed: u64, index: usize, n: usize) -> Vec<T> {
    let mut rng = stream_rng(seed, "discord-start", index as u64);
    (0..n)
        .map(|_| real(rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI)))
        .collect()
}

const INITIAL_STEP: f64 = 0.6;
const SIMPLEX_RESTARTS: usize = 4;
const POLISH_STEP: f64 = 0.05;
const POLISH_FACTOR: f64 = 1e-4;

fn minimize<T: Real>(
    state: &BipartiteState<T>,
    basis: &GellMannBasis<T>,
    cfg: &OptimizerConfig,
    measure: Measure,
) -> Result<DiscordResult<T>> {
    cfg.validate()?;
    check_state(state, basis)?;
    let d = basis.d();
    let n = basis.dim();
    let scale = prefactor::<T>(measure, cfg.normalization, d);
    let opts = NelderMeadOptions {
        initial_step: real::<T>(INITIAL_STEP),
        max_iterations: cfg.max_iterations,
        f_tolerance: real::<T>(cfg.objective_tolerance),
        max_restarts: SIMPLEX_RESTARTS,
    };
    let objective = |theta: &[T]| {
        // Angle vectors always have the basis length, so the combination
        // cannot fail.
        let u = unitary_from_angles(theta, basis).expect("angle vector has basis length");
        objective_value(&state.matrix, &u, measure, scale)
    };
    let run = |i: usize| nelder_mead(objective, &start_angles::<T>(cfg.seed, i, n), &opts);
    let mut runs: Vec<_> = if cfg.parallel {
        (0..cfg.starts).into_par_iter().map(run).collect()
    } else {
        (0..cfg.starts).map(run).collect()
    };

    // First start wins ties so the choice is order-independent.
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            a.1.value
                .partial_cmp(&b.1.value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
        .expect("at least one start");

    // The objective has a kink at its minimum, where a simplex stalls at
    // roughly the requested tolerance; polish the winner with a finer one.
    let polish = NelderMeadOptions {
        initial_step: real::<T>(POLISH_STEP),
        f_tolerance: real::<T>(cfg.objective_tolerance * POLISH_FACTOR),
        ..opts
    };
    let refined = nelder_mead(objective, &runs[best].x, &polish);
    let winner = &mut runs[best];
    winner.evaluations += refined.evaluations;
    if refined.value < winner.value {
        winner.value = refined.value;
        winner.x = refined.x;
    }

    let best_unitary = unitary_from_angles(&runs[best].x, basis)?;
    let (b1, b2) = lower_bounds(&state.k, d)?;
    let raw_scale = |m: Measure| prefactor::<T>(m, Normalization::Scaled, d) / scale;
    let lower_bound = match measure {
        Measure::D1 => b1 / raw_scale(Measure::D1),
        Measure::D2 => b2 / raw_scale(Measure::D2),
    };
    Ok(DiscordResult {
        measure,
        value: runs[best].value,
        best_unitary,
        objective_evals: runs.iter().map(|r| r.evaluations).sum(),
        per_start_values: runs.iter().map(|r| r.value).collect(),
        lower_bound,
        config: cfg.clone(),
    })
}

/// Trace-norm discord by multi-start simplex search over `U(θ)`.
///
/// The value is attained by an explicit measurement and is therefore an upper
/// bound on the exact minimum.
pub fn d1_discord<T: Real>(
    state: &BipartiteState<T>,
    basis: &GellMannBasis<T>,
    cfg: &OptimizerConfig,
) -> Result<DiscordResult<T>> {
    minimize(state, basis, cfg, Measure::D1)
}

/// Hilbert–Schmidt discord `d/(d-1) · min ‖ρ - P_A(ρ)‖²_F`.
pub fn d2_discord<T: Real>(
    state: &BipartiteState<T>,
    basis: &GellMannBasis<T>,
    cfg: &OptimizerConfig,
) -> Result<DiscordResult<T>> {
    minimize(state, basis, cfg, Measure::D2)
}

pub fn discord<T: Real>(
    state: &BipartiteState<T>,
    basis: &GellMannBasis<T>,
    cfg: &OptimizerConfig,
    measure: Measure,
) -> Result<DiscordResult<T>> {
    minimize(state, basis, cfg, measure)
}

fn check_k<T: Real>(k: &RMatrix<T>, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidLevel(d));
    }
    let n = d * d - 1;
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: if k.nrows() != n { k.nrows() } else { k.ncols() },
        });
    }
    Ok(n)
}

/// Eigenvalues of `K Kᵀ` summed after dropping the `d - 1` largest.
pub fn xi<T: Real>(k: &RMatrix<T>, d: usize) -> Result<T> {
    check_k(k, d)?;
    let kkt = k * k.transpose();
    let mut ev: Vec<T> = kkt.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).expect("NaN eigenvalue"));
    let sum = ev.iter().skip(d - 1).fold(T::zero(), |acc, &x| acc + x);
    Ok(sum.max(T::zero()))
}

/// `(√Ξ/(d(d-1)), 4Ξ/(d³(d-1)))`.
pub fn lower_bounds<T: Real>(k: &RMatrix<T>, d: usize) -> Result<(T, T)> {
    let x = xi(k, d)?;
    let df = real::<T>(d as f64);
    let dm1 = df - T::one();
    Ok((x.sqrt() / (df * dm1), real::<T>(4.0) * x / (df * df * df * dm1)))
}

/// Diagonal `±1` matrix with `(I₀)_kk = ½ tr(λ_kᵀ λ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct I0Matrix<T: Real> {
    pub d: usize,
    pub diag: RVector<T>,
}

impl<T: Real> I0Matrix<T> {
    pub fn matrix(&self) -> RMatrix<T> {
        RMatrix::from_diagonal(&self.diag)
    }
}

pub fn i0_matrix<T: Real>(basis: &GellMannBasis<T>) -> I0Matrix<T> {
    let diag = RVector::from_iterator(
        basis.dim(),
        basis
            .generators()
            .iter()
            .map(|g| {
                // The trace is exactly ±2; snap away rounding.
                if (g.transpose() * g).trace().re > T::zero() {
                    T::one()
                } else {
                    -T::one()
                }
            }),
    );
    I0Matrix { d: basis.d(), diag }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `K = t R(U)`.
    A,
    /// `K = t R(U₁) I₀ R(U₂)ᵀ`.
    AA,
}

/// Admissible `t` interval of a family.
pub fn t_range<T: Real>(kind: FamilyKind, d: usize) -> (T, T) {
    let df = d as f64;
    let (lo, hi) = match kind {
        FamilyKind::A => (-df / (2.0 * (df - 1.0)), df / (2.0 * (df + 1.0))),
        FamilyKind::AA => (-df / (2.0 * (df * df - 1.0)), df / 2.0),
    };
    (real(lo), real(hi))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec<T: Real> {
    A { t: T, u: CMatrix<T> },
    AA { t: T, u1: CMatrix<T>, u2: CMatrix<T> },
}

impl<T: Real> FamilySpec<T> {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::A { .. } => FamilyKind::A,
            FamilySpec::AA { .. } => FamilyKind::AA,
        }
    }

    pub fn t(&self) -> T {
        match self {
            FamilySpec::A { t, .. } | FamilySpec::AA { t, .. } => *t,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            FamilySpec::A { u, .. } => u.nrows(),
            FamilySpec::AA { u1, .. } => u1.nrows(),
        }
    }

    fn check_range(&self) -> Result<()> {
        let d = self.d();
        if d < 2 {
            return Err(Error::InvalidLevel(d));
        }
        let (lo, hi) = t_range::<T>(self.kind(), d);
        let t = self.t();
        let slack = real::<T>(1e-12);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::TOutOfRange {
                t: to_f64(t),
                lo: to_f64(lo),
                hi: to_f64(hi),
            });
        }
        Ok(())
    }

    /// Correlation matrix of the family member.
    pub fn correlation_matrix(&self, basis: &GellMannBasis<T>) -> Result<RMatrix<T>> {
        let k = match self {
            FamilySpec::A { t, u } => adjoint_rep(u, basis)?.entries * *t,
            FamilySpec::AA { t, u1, u2 } => {
                let r1 = adjoint_rep(u1, basis)?.entries;
                let r2 = adjoint_rep(u2, basis)?.entries;
                r1 * i0_matrix(basis).matrix() * r2.transpose() * *t
            }
        };
        Ok(k)
    }
}

/// Locally maximally mixed state with the family's correlation matrix.
pub fn make_family<T: Real>(spec: &FamilySpec<T>, basis: &GellMannBasis<T>) -> Result<BipartiteState<T>> {
    spec.check_range()?;
    if spec.d() != basis.d() {
        return Err(Error::LengthMismatch {
            expected: basis.d(),
            found: spec.d(),
        });
    }
    let k = spec.correlation_matrix(basis)?;
    let zero = RVector::<T>::zeros(basis.dim());
    bipartite_compose(&zero, &zero, &k, basis)
}

/// Closed-form D₁: `|t|` for family A and `(2/d)|t|` for family AA.
pub fn analytic_d1<T: Real>(spec: &FamilySpec<T>) -> Result<T> {
    spec.check_range()?;
    let t = abs(spec.t());
    Ok(match spec.kind() {
        FamilyKind::A => t,
        FamilyKind::AA => t * real::<T>(2.0 / spec.d() as f64),
    })
}

/// `(I + aF)/(d² + ad)` with `F` the swap operator.
pub fn werner_state<T: Real>(d: usize, a: T, basis: &GellMannBasis<T>) -> Result<BipartiteState<T>> {
    check_level(d, basis)?;
    let af = to_f64(a);
    if !(-1.0..=1.0).contains(&af) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            value: af,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let df = real::<T>(d as f64);
    let norm = df * df + a * df;
    let m = (identity::<T>(d * d) + swap_operator::<T>(d).map(|z| z * a)).map(|z| z / c_real(norm));
    bipartite_decompose(&m, basis)
}

/// Two-qubit `p|Ψ⁻⟩⟨Ψ⁻| + (1-p)I/4`; equal to [`werner_state`] with `a = -2p/(1+p)`.
pub fn werner_singlet_mixture<T: Real>(p: T, basis: &GellMannBasis<T>) -> Result<BipartiteState<T>> {
    check_level(2, basis)?;
    let pf = to_f64(p);
    if !(0.0..=1.0).contains(&pf) {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: pf,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let h = real::<T>(0.5);
    let mut singlet = CMatrix::<T>::zeros(4, 4);
    singlet[(1, 1)] = c_real(h);
    singlet[(2, 2)] = c_real(h);
    singlet[(1, 2)] = c_real(-h);
    singlet[(2, 1)] = c_real(-h);
    let q = (T::one() - p) * real::<T>(0.25);
    let m = singlet.map(|z| z * p) + identity::<T>(4).map(|z| z * q);
    bipartite_decompose(&m, basis)
}

/// `f|Φ⁺⟩⟨Φ⁺| + (1-f)/(d²-1) (I - |Φ⁺⟩⟨Φ⁺|)` with `|Φ⁺⟩ = Σ_k |kk⟩/√d`.
pub fn isotropic_state<T: Real>(d: usize, f: T, basis: &GellMannBasis<T>) -> Result<BipartiteState<T>> {
    check_level(d, basis)?;
    let ff = to_f64(f);
    if !(0.0..=1.0).contains(&ff) {
        return Err(Error::ParameterOutOfRange {
            name: "f",
            value: ff,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let phi = maximally_entangled::<T>(d);
    let rest = real::<T>(1.0 - ff) / real::<T>((d * d - 1) as f64);
    let m = phi.map(|z| z * f) + (identity::<T>(d * d) - &phi).map(|z| z * rest);
    bipartite_decompose(&m, basis)
}

/// `|Φ⁺⟩⟨Φ⁺|` on `C^d ⊗ C^d`.
pub fn maximally_entangled<T: Real>(d: usize) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(d * d, d * d);
    let w = c_real(real::<T>(1.0 / d as f64));
    for a in 0..d {
        for b in 0..d {
            m[(a * d + a, b * d + b)] = w;
        }
    }
    m
}

fn check_level<T: Real>(d: usize, basis: &GellMannBasis<T>) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidLevel(d));
    }
    if basis.d() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: basis.d(),
        });
    }
    Ok(())
}

/// Result of matching a correlation matrix against the two families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMatch<T> {
    /// `None` when `K Kᵀ` is not a multiple of the identity.
    pub kind: Option<FamilyKind>,
    pub t: T,
}

/// Recovers `(kind, t)` from `K` when `K Kᵀ = s² I`.
///
/// For `d ≥ 3`, `±K/s` (or `±K I₀/s`) must preserve both structure tensors:
/// the transpose map `I₀` preserves `d_jkl` but flips `f_jkl`, so only the
/// pair of tests separates the two families. For `d = 2` the families
/// coincide as sets; the closed forms `±I` and `±I₀` are recognized first,
/// otherwise the sign follows `det K`.
pub fn extract_family_parameter<T: Real>(
    k: &RMatrix<T>,
    tensors: &StructureTensors<T>,
    basis: &GellMannBasis<T>,
) -> Result<FamilyMatch<T>> {
    let d = basis.d();
    let n = check_k(k, d)?;
    let none = FamilyMatch {
        kind: None,
        t: T::zero(),
    };
    let tol = real::<T>(1e-8);
    let kkt = k * k.transpose();
    let s2 = kkt.trace() / real::<T>(n as f64);
    let id = RMatrix::<T>::identity(n, n);
    if max_abs_real(&(&kkt - &id * s2)) > tol {
        return Ok(none);
    }
    let s = s2.max(T::zero()).sqrt();
    if s <= tol {
        return Ok(FamilyMatch {
            kind: Some(FamilyKind::A),
            t: T::zero(),
        });
    }
    let w = k / s;
    let i0 = i0_matrix(basis).matrix();

    if d == 2 {
        for (sign, v) in [(T::one(), id.clone()), (-T::one(), -&id)] {
            if max_abs_real(&(&w - &v)) <= tol {
                return Ok(FamilyMatch {
                    kind: Some(FamilyKind::A),
                    t: sign * s,
                });
            }
            if max_abs_real(&(&w - &v * &i0)) <= tol {
                return Ok(FamilyMatch {
                    kind: Some(FamilyKind::AA),
                    t: sign * s,
                });
            }
        }
        let sign = if w.determinant() >= T::zero() { T::one() } else { -T::one() };
        return Ok(FamilyMatch {
            kind: Some(FamilyKind::A),
            t: sign * s,
        });
    }

    let in_adjoint_image = |v: &RMatrix<T>| -> Result<bool> {
        Ok(preserves_d_tensor(v, tensors, tol)? && preserves_f_tensor(v, tensors, tol)?)
    };
    for sign in [T::one(), -T::one()] {
        let v = &w * sign;
        if in_adjoint_image(&v)? {
            return Ok(FamilyMatch {
                kind: Some(FamilyKind::A),
                t: sign * s,
            });
        }
        if in_adjoint_image(&(&v * &i0))? {
            return Ok(FamilyMatch {
                kind: Some(FamilyKind::AA),
                t: sign * s,
            });
        }
    }
    Ok(none)
}

/// Brute-force D₁ reference: the smallest objective over a fixed set of
/// measurements. For `d = 2` the set is a Fibonacci lattice of `budget`
/// Bloch-sphere directions; for `d ≥ 3` it is `budget` Haar-random bases.
pub fn oracle_d1<T: Real>(state: &BipartiteState<T>, budget: usize, seed: u64) -> Result<T> {
    let d = state.d;
    if budget == 0 {
        return Err(Error::InvalidConfig("oracle budget must be at least 1".into()));
    }
    let scale = prefactor::<T>(Measure::D1, Normalization::Scaled, d);
    let eval = |u: &CMatrix<T>| objective_value(&state.matrix, u, Measure::D1, scale);
    let best = if d == 2 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..budget)
            .into_par_iter()
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / budget as f64;
                let theta = z.clamp(-1.0, 1.0).acos();
                let phi = golden * i as f64;
                eval(&direction_basis::<T>(theta, phi))
            })
            .reduce(|| T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    } else {
        (0..budget)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, "oracle", i as u64);
                eval(&haar_unitary::<T, _>(d, &mut rng))
            })
            .reduce(|| T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    };
    Ok(best)
}

/// Qubit basis `{|n⟩, |-n⟩}` for the Bloch direction `(θ, φ)`.
fn direction_basis<T: Real>(theta: f64, phi: f64) -> CMatrix<T> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |sign: f64| Complex::new(real::<T>(phi.cos()), real::<T>(sign * phi.sin()));
    let cr = |x: f64| c_real(real::<T>(x));
    CMatrix::from_row_slice(
        2,
        2,
        &[cr(c), -e(-1.0) * cr(s), e(1.0) * cr(s), cr(c)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, trace_norm_hermitian, unitarity_residual};
    use crate::measurement::{disturbance, measurement_from_unitary};
    use crate::sampling::random_density;
    use crate::su_algebra::structure_constants;
    use proptest::prelude::*;

    fn basis(d: usize) -> GellMannBasis<f64> {
        GellMannBasis::new(d).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            starts: 8,
            ..OptimizerConfig::with_seed(5)
        }
    }

    fn bell_state() -> BipartiteState<f64> {
        bipartite_decompose(&maximally_entangled::<f64>(2), &basis(2)).unwrap()
    }

    fn random_state(d: usize, seed: u64) -> BipartiteState<f64> {
        let mut rng = stream_rng(seed, "discord-test", 0);
        let rho = random_density::<f64, _>(d * d, &mut rng);
        bipartite_decompose(rho.matrix(), &basis(d)).unwrap()
    }

    #[test]
    fn fast_objective_matches_disturbance() {
        for d in [2, 3] {
            let b = basis(d);
            for i in 0..10 {
                let state = random_state(d, i);
                let mut rng = stream_rng(i, "u", 0);
                let u = haar_unitary::<f64, _>(d, &mut rng);
                let m = measurement_from_unitary(&u).unwrap();
                let s = disturbance(&state, &m, &b).unwrap();
                let pre = d as f64 / (2.0 * (d as f64 - 1.0));
                let want1 = pre * trace_norm_hermitian(&s);
                let want2 = d as f64 / (d as f64 - 1.0) * frobenius_sq(&s);
                assert!((d1_objective(&state, &u).unwrap() - want1).abs() < 1e-12);
                assert!((d2_objective(&state, &u).unwrap() - want2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_objective_canonical_is_one() {
        let v = d1_objective(&bell_state(), &identity(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_classical_state_has_zero_objective() {
        let mut m = CMatrix::<f64>::zeros(9, 9);
        for (i, p) in [(0, 0.5), (4, 0.3), (8, 0.2)] {
            m[(i, i)] = c_real(p);
        }
        let s = bipartite_decompose(&m, &basis(3)).unwrap();
        assert!(d1_objective(&s, &identity(3)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_bad_unitary() {
        let u = CMatrix::<f64>::from_element(2, 2, c_real(1.0));
        assert!(matches!(
            d1_objective(&bell_state(), &u),
            Err(Error::NonUnitaryInput { .. })
        ));
    }

    #[test]
    fn angles_give_unitaries() {
        let b = basis(3);
        let u = unitary_from_angles(&[0.3, -1.0, 2.0, 0.1, 0.0, 0.7, -2.5, 1.1], &b).unwrap();
        assert!(unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        for bad in [
            OptimizerConfig {
                starts: 0,
                ..Default::default()
            },
            OptimizerConfig {
                max_iterations: 0,
                ..Default::default()
            },
            OptimizerConfig {
                objective_tolerance: 0.0,
                ..Default::default()
            },
            OptimizerConfig {
                objective_tolerance: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn xi_examples() {
        let z = RMatrix::<f64>::zeros(8, 8);
        assert_eq!(xi(&z, 3).unwrap(), 0.0);
        let mut rank2 = RMatrix::<f64>::zeros(8, 8);
        rank2[(0, 1)] = 0.4;
        rank2[(3, 5)] = -0.2;
        assert!(xi(&rank2, 3).unwrap().abs() < 1e-15);
        assert_eq!(lower_bounds(&rank2, 3).unwrap(), (0.0, 0.0));
        let mut rng = stream_rng(1, "v", 0);
        let v = crate::sampling::haar_orthogonal::<f64, _>(8, &mut rng);
        let k = &v * 0.3;
        assert!((xi(&k, 3).unwrap() - 6.0 * 0.09).abs() < 1e-12);
        let (b1, _) = lower_bounds(&k, 3).unwrap();
        assert!((b1 - 0.3 * 6f64.sqrt() / 6.0).abs() < 1e-12);
        assert!(xi(&RMatrix::<f64>::zeros(3, 3), 3).is_err());
    }

    #[test]
    fn bell_bounds() {
        let s = bell_state();
        assert!((xi(&s.k, 2).unwrap() - 2.0).abs() < 1e-12);
        let (b1, b2) = lower_bounds(&s.k, 2).unwrap();
        assert!((b1 - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((b2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn i0_examples() {
        assert_eq!(i0_matrix(&basis(2)).diag.as_slice(), &[1.0, -1.0, 1.0]);
        let i3 = i0_matrix(&basis(3));
        for (k, &v) in i3.diag.iter().enumerate() {
            let want = if [1, 4, 6].contains(&k) { -1.0 } else { 1.0 };
            assert_eq!(v, want);
        }
        for d in 2..=5 {
            let m = i0_matrix(&basis(d)).matrix();
            assert_eq!(&m * &m, RMatrix::identity(d * d - 1, d * d - 1));
        }
    }

    #[test]
    fn family_ranges_and_analytic_values() {
        let u = identity::<f64>(2);
        let a = FamilySpec::A { t: -0.7, u: u.clone() };
        assert!((analytic_d1(&a).unwrap() - 0.7).abs() < 1e-15);
        let aa = FamilySpec::<f64>::AA {
            t: 1.5,
            u1: identity(3),
            u2: identity(3),
        };
        assert!((analytic_d1(&aa).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(analytic_d1(&FamilySpec::A { t: 0.0, u: u.clone() }).unwrap(), 0.0);
        assert!(matches!(
            analytic_d1(&FamilySpec::A { t: 0.5, u }),
            Err(Error::TOutOfRange { .. })
        ));
    }

    #[test]
    fn family_a_zero_is_maximally_mixed() {
        let s = make_family(&FamilySpec::A { t: 0.0, u: identity(3) }, &basis(3)).unwrap();
        let want = identity::<f64>(9).map(|z| z / 9.0);
        assert!(max_abs(&(&s.matrix - want)) < 1e-15);
    }

    #[test]
    fn family_aa_identity_is_bell() {
        let b = basis(2);
        let s = make_family(
            &FamilySpec::AA {
                t: 1.0,
                u1: identity(2),
                u2: identity(2),
            },
            &b,
        )
        .unwrap();
        assert!(max_abs(&(&s.matrix - maximally_entangled::<f64>(2))) < 1e-14);
        assert_eq!(s.k, bell_state().k);
    }

    #[test]
    fn family_a_range_end_is_a_state() {
        let mut rng = stream_rng(9, "u", 0);
        let u = haar_unitary::<f64, _>(3, &mut rng);
        let s = make_family(&FamilySpec::A { t: 0.375, u }, &basis(3)).unwrap();
        assert!(crate::linalg::min_eigenvalue(&s.matrix) > -1e-12);
    }

    #[test]
    fn d1_on_family_a() {
        let b = basis(3);
        let mut rng = stream_rng(2, "u", 0);
        let s = make_family(
            &FamilySpec::A {
                t: 0.3,
                u: haar_unitary(3, &mut rng),
            },
            &b,
        )
        .unwrap();
        let r = d1_discord(&s, &b, &OptimizerConfig::with_seed(7)).unwrap();
        assert!((r.value - 0.3).abs() < 1e-4, "{}", r.value);
        assert_eq!(r.per_start_values.len(), 32);
        let min = r.per_start_values.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(r.value, min);
        assert!(r.value >= r.lower_bound - 1e-6);
        assert!((d1_objective(&s, &r.best_unitary).unwrap() - r.value).abs() < 1e-12);
    }

    #[test]
    fn d1_on_family_aa() {
        let b = basis(3);
        let mut rng = stream_rng(3, "u", 0);
        let s = make_family(
            &FamilySpec::AA {
                t: 1.0,
                u1: haar_unitary(3, &mut rng),
                u2: haar_unitary(3, &mut rng),
            },
            &b,
        )
        .unwrap();
        let r = d1_discord(&s, &b, &OptimizerConfig::with_seed(7)).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn product_state_has_zero_discord() {
        let b = basis(2);
        let mut rng = stream_rng(4, "prod", 0);
        let ra = random_density::<f64, _>(2, &mut rng);
        let rb = random_density::<f64, _>(2, &mut rng);
        let s = bipartite_decompose(&kron(ra.matrix(), rb.matrix()), &b).unwrap();
        let r = d1_discord(&s, &b, &quick()).unwrap();
        assert!(r.value < 1e-8, "{:?}", r.per_start_values);
        assert!(d2_discord(&s, &b, &quick()).unwrap().value < 1e-8);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let b = basis(2);
        let s = random_state(2, 17);
        let par = d1_discord(&s, &b, &quick()).unwrap();
        let ser = d1_discord(
            &s,
            &b,
            &OptimizerConfig {
                parallel: false,
                ..quick()
            },
        )
        .unwrap();
        assert_eq!(par.value, ser.value);
        assert_eq!(par.per_start_values, ser.per_start_values);
        assert_eq!(par.best_unitary, ser.best_unitary);
    }

    #[test]
    fn raw_normalization_scales_values_and_bounds() {
        let b = basis(3);
        let mut rng = stream_rng(6, "u", 0);
        let s = make_family(
            &FamilySpec::A {
                t: -0.5,
                u: haar_unitary(3, &mut rng),
            },
            &b,
        )
        .unwrap();
        let scaled = d1_discord(&s, &b, &quick()).unwrap();
        let raw = d1_discord(
            &s,
            &b,
            &OptimizerConfig {
                normalization: Normalization::Raw,
                ..quick()
            },
        )
        .unwrap();
        let pre = 3.0 / 4.0;
        assert!((raw.value * pre - scaled.value).abs() < 1e-10);
        assert!((raw.lower_bound * pre - scaled.lower_bound).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_werner_d1_and_d2() {
        let b = basis(2);
        let s = werner_singlet_mixture(0.5, &b).unwrap();
        let want = RMatrix::<f64>::identity(3, 3) * -0.5;
        assert!(max_abs_real(&(&s.k - want)) < 1e-14);
        let r1 = d1_discord(&s, &b, &quick()).unwrap();
        assert!((r1.value - 0.5).abs() < 1e-6);
        let r2 = d2_discord(&s, &b, &quick()).unwrap();
        assert!((r2.lower_bound - 0.25).abs() < 1e-12);
        assert!(r2.value >= 0.25 - 1e-6);
    }

    #[test]
    fn bell_d2_meets_bound() {
        let b = basis(2);
        let r = d2_discord(&bell_state(), &b, &quick()).unwrap();
        assert!((r.lower_bound - 1.0).abs() < 1e-12);
        assert!(r.value >= 1.0 - 1e-6);
    }

    #[test]
    fn werner_parametrizations_agree() {
        let b = basis(2);
        for p in [0.0, 0.25, 0.6, 1.0] {
            let a = -2.0 * p / (1.0 + p);
            let w = werner_state(2, a, &b).unwrap();
            let m = werner_singlet_mixture(p, &b).unwrap();
            assert!(max_abs(&(&w.matrix - &m.matrix)) < 1e-14);
        }
    }

    #[test]
    fn werner_k_is_scalar() {
        for d in [2, 3, 4] {
            let b = basis(d);
            for a in [-1.0, -0.3, 0.5, 1.0] {
                let s = werner_state(d, a, &b).unwrap();
                let df = d as f64;
                let t = df * a / (2.0 * (df + a));
                let want = RMatrix::<f64>::identity(d * d - 1, d * d - 1) * t;
                assert!(max_abs_real(&(&s.k - want)) < 1e-12);
            }
        }
        assert!(werner_state(2, 1.5, &basis(2)).is_err());
        assert!(isotropic_state(2, -0.1, &basis(2)).is_err());
    }

    #[test]
    fn isotropic_edge_cases() {
        let b = basis(3);
        let mixed = isotropic_state(3, 1.0 / 9.0, &b).unwrap();
        assert!(max_abs_real(&mixed.k) < 1e-14);
        let me = isotropic_state(3, 1.0, &b).unwrap();
        let t = extract_family_parameter(&me.k, &structure_constants(&b), &b).unwrap();
        assert_eq!(t.kind, Some(FamilyKind::AA));
        assert!((t.t - 1.5).abs() < 1e-12);
        let b2 = basis(2);
        let bell = isotropic_state(2, 1.0, &b2).unwrap();
        assert!(max_abs(&(&bell.matrix - maximally_entangled::<f64>(2))) < 1e-15);
    }

    #[test]
    fn extraction_round_trips_families() {
        for d in [3, 4] {
            let b = basis(d);
            let tensors = structure_constants(&b);
            let mut rng = stream_rng(d as u64, "extract", 0);
            for t in [-0.2, 0.1, 0.3] {
                let spec = FamilySpec::A {
                    t,
                    u: haar_unitary(d, &mut rng),
                };
                let k = spec.correlation_matrix(&b).unwrap();
                let m = extract_family_parameter(&k, &tensors, &b).unwrap();
                assert_eq!(m.kind, Some(FamilyKind::A));
                assert!((m.t - t).abs() < 1e-10);
                let spec = FamilySpec::AA {
                    t,
                    u1: haar_unitary(d, &mut rng),
                    u2: haar_unitary(d, &mut rng),
                };
                let k = spec.correlation_matrix(&b).unwrap();
                let m = extract_family_parameter(&k, &tensors, &b).unwrap();
                assert_eq!(m.kind, Some(FamilyKind::AA));
                assert!((m.t - t).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn extraction_d2_closed_forms() {
        let b = basis(2);
        let tensors = structure_constants(&b);
        let w = werner_singlet_mixture(0.4, &b).unwrap();
        let m = extract_family_parameter(&w.k, &tensors, &b).unwrap();
        assert_eq!(m.kind, Some(FamilyKind::A));
        assert!((m.t + 0.4).abs() < 1e-12);
        let iso = isotropic_state(2, 0.8, &b).unwrap();
        let m = extract_family_parameter(&iso.k, &tensors, &b).unwrap();
        assert_eq!(m.kind, Some(FamilyKind::AA));
        assert!(m.t > 0.0);
    }

    #[test]
    fn extraction_rejects_generic_k() {
        let b = basis(3);
        let tensors = structure_constants(&b);
        let s = random_state(3, 1);
        assert_eq!(
            extract_family_parameter(&s.k, &tensors, &b).unwrap(),
            FamilyMatch { kind: None, t: 0.0 }
        );
        // Scalar K K^T from a generic orthogonal matrix is in neither family.
        let mut rng = stream_rng(2, "o", 0);
        let v = crate::sampling::haar_orthogonal::<f64, _>(8, &mut rng) * 0.2;
        assert_eq!(extract_family_parameter(&v, &tensors, &b).unwrap().kind, None);
    }

    #[test]
    fn oracle_on_werner_and_product() {
        let b = basis(2);
        let w = werner_singlet_mixture(0.5, &b).unwrap();
        let o = oracle_d1(&w, 10_000, 0).unwrap();
        assert!((o - 0.5).abs() < 1e-3);
        let mut rng = stream_rng(8, "prod", 0);
        let ra = random_density::<f64, _>(2, &mut rng);
        let rb = random_density::<f64, _>(2, &mut rng);
        let p = bipartite_decompose(&kron(ra.matrix(), rb.matrix()), &b).unwrap();
        assert!(oracle_d1(&p, 10_000, 0).unwrap() <= 1e-2);
        assert!(oracle_d1(&p, 0, 0).is_err());
    }

    #[test]
    fn direction_basis_is_unitary() {
        for (th, ph) in [(0.0, 0.0), (1.0, 2.0), (3.1, -0.4)] {
            assert!(unitarity_residual(&direction_basis::<f64>(th, ph)) < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn objective_bounded_below_by_xi_bound(seed in any::<u64>(), d in 2usize..=3) {
            let state = random_state(d, seed);
            let mut rng = stream_rng(seed, "u", 1);
            let u = haar_unitary::<f64, _>(d, &mut rng);
            let (b1, b2) = lower_bounds(&state.k, d).unwrap();
            prop_assert!(d1_objective(&state, &u).unwrap() >= b1 - 1e-12);
            prop_assert!(d2_objective(&state, &u).unwrap() >= b2 - 1e-12);
        }

        #[test]
        fn family_a_objective_never_below_abs_t(seed in any::<u64>(), frac in 0.0f64..1.0) {
            let b = basis(3);
            let (lo, hi) = t_range::<f64>(FamilyKind::A, 3);
            let t = lo + (hi - lo) * frac;
            let mut rng = stream_rng(seed, "fam", 0);
            let s = make_family(&FamilySpec::A { t, u: haar_unitary(3, &mut rng) }, &b).unwrap();
            let u = haar_unitary::<f64, _>(3, &mut rng);
            prop_assert!(d1_objective(&s, &u).unwrap() >= t.abs() - 1e-9);
        }

        #[test]
        fn xi_invariant_under_orthogonal_conjugation(seed in any::<u64>()) {
            let mut rng = stream_rng(seed, "xi", 0);
            let k = crate::linalg::real_part(&random_density::<f64, _>(8, &mut rng).into_matrix());
            let o1 = crate::sampling::haar_orthogonal::<f64, _>(8, &mut rng);
            let o2 = crate::sampling::haar_orthogonal::<f64, _>(8, &mut rng);
            let rotated = &o1 * &k * o2.transpose();
            prop_assert!((xi(&k, 3).unwrap() - xi(&rotated, 3).unwrap()).abs() < 1e-12);
        }
    }
}
