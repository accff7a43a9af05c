//! Seeded random ensembles and the Monte Carlo experiments built on them.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose seed is derived
//! from `(seed, purpose tag, index)` with SplitMix64 mixing, so results do not
//! depend on evaluation order or thread count.

use nalgebra::{Complex, ComplexField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::discord::{
    analytic_d1, d1_discord, d2_discord, make_family, t_range, xi, FamilyKind, FamilySpec, Measure, OptimizerConfig,
};
use crate::error::{Error, Result};
use crate::linalg::{kron, min_eigenvalue, CMatrix, RMatrix, RVector};
use crate::scalar::{real, to_f64, Real};
use crate::states::{
    bipartite_compose, bipartite_decompose, bloch_to_density, correlation_ball_radius, density_to_bloch,
    BipartiteState, BlochVector, DensityMatrix,
};
use crate::su_algebra::GellMannBasis;

/// Identifies the stream-derivation scheme; bump when it changes.
pub const RNG_SCHEME: &str = "chacha8/splitmix64/v1";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Independent generator for sub-stream `(seed, tag, index)`.
pub fn stream_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let h = splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(tag)) ^ index);
    ChaCha8Rng::seed_from_u64(h)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    real(rng.sample::<f64, _>(StandardNormal))
}

fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::<T>::from_fn(rows, cols, |_, _| {
        let re = gaussian::<T, R>(rng);
        let im = gaussian::<T, R>(rng);
        Complex::new(re, im)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal pushed into `Q`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    let qr = ginibre::<T, R>(d, d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let z = r[(k, k)];
        let m = z.modulus();
        if m > T::zero() {
            let phase = z / Complex::new(m, T::zero());
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// Haar-distributed element of O(n) (same construction over the reals).
pub fn haar_orthogonal<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix<T> {
    let g = RMatrix::<T>::from_fn(n, n, |_, _| gaussian::<T, R>(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        if r[(k, k)] < T::zero() {
            let mut col = q.column_mut(k);
            col *= -T::one();
        }
    }
    q
}

/// Hilbert–Schmidt random state `G G† / tr(G G†)`.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::unchecked(w.map(|z| z / Complex::new(tr, T::zero())))
}

/// Haar-random pure state `|ψ⟩⟨ψ|` on `C^d`.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix<T> {
    let psi = ginibre::<T, R>(d, 1, rng);
    let psi = &psi / Complex::new(psi.norm(), T::zero());
    DensityMatrix::unchecked(&psi * psi.adjoint())
}

/// Uniform point in the Euclidean ball of radius `radius` in `R^n`.
pub fn uniform_in_ball<T: Real, R: Rng + ?Sized>(n: usize, radius: T, rng: &mut R) -> RVector<T> {
    let dir = RVector::<T>::from_fn(n, |_, _| gaussian::<T, R>(rng));
    let u: f64 = rng.random();
    let r = radius * real::<T>(u.powf(1.0 / n as f64));
    dir.normalize() * r
}

/// Locally maximally mixed state: a Hilbert–Schmidt draw on `C^d ⊗ C^d` with
/// its local Bloch vectors zeroed, retried until positive.
///
/// Returns the state and the number of draws used.
pub fn random_lmm_state<T: Real, R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
    max_tries: usize,
    basis: &GellMannBasis<T>,
) -> Result<(BipartiteState<T>, usize)> {
    let zero = RVector::<T>::zeros(basis.dim());
    for attempt in 1..=max_tries {
        let rho = random_density::<T, R>(d * d, rng);
        let full = bipartite_decompose(rho.matrix(), basis)?;
        match bipartite_compose(&zero, &zero, &full.k, basis) {
            Ok(s) => return Ok((s, attempt)),
            Err(Error::NotAState { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RejectionExhausted { tries: max_tries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    HaarUnitary,
    HsDensity,
    LmmRejection,
    FamilyA,
    FamilyAa,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Self::HaarUnitary => "haar-unitary",
            Self::HsDensity => "hs-density",
            Self::LmmRejection => "lmm-rejection",
            Self::FamilyA => "family-a",
            Self::FamilyAa => "family-aa",
        }
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "haar-unitary" => Self::HaarUnitary,
            "hs-density" => Self::HsDensity,
            "lmm-rejection" => Self::LmmRejection,
            "family-a" => Self::FamilyA,
            "family-aa" => Self::FamilyAa,
            other => return Err(Error::UnsupportedEnsemble(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    pub d: usize,
    pub ensemble: Ensemble,
    /// Draw budget per accepted sample for `lmm-rejection`.
    pub max_tries: usize,
}

impl SamplerConfig {
    pub fn new(d: usize, ensemble: Ensemble, count: usize, seed: u64) -> Self {
        Self {
            seed,
            count,
            d,
            ensemble,
            max_tries: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidLevel(self.d));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if self.max_tries == 0 {
            return Err(Error::InvalidConfig("max_tries must be at least 1".into()));
        }
        Ok(())
    }
}

/// One sampled state of a bound experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub d: usize,
    pub ensemble: Ensemble,
    pub xi: f64,
    pub bound: f64,
    pub value: f64,
    /// `value - bound`.
    pub margin: f64,
    /// Closed-form discord for family ensembles.
    pub analytic: Option<f64>,
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut n = 0usize;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for v in values {
            n += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        (n > 0).then(|| Summary {
            min,
            max,
            mean: sum / n as f64,
        })
    }
}

/// Violation count of one named check inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Smallest slack `limit - observed` (negative when violated).
    pub worst_margin: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub statistics: Option<Summary>,
    pub checks: Vec<CheckOutcome>,
    pub acceptance_rate: Option<f64>,
    pub rng_scheme: String,
    pub sampler: SamplerConfig,
    pub optimizer: Option<OptimizerConfig>,
    pub measure: Option<Measure>,
    pub records: Vec<SampleRecord>,
}

/// Slack allowed below a lower bound before a sample counts as a violation.
pub const BOUND_TOLERANCE: f64 = 1e-6;
/// Allowed deviation of the optimizer from a closed-form family value.
pub const ANALYTIC_TOLERANCE: f64 = 1e-4;

fn sample_family(
    cfg: &SamplerConfig,
    index: usize,
    basis: &GellMannBasis<f64>,
) -> Result<(BipartiteState<f64>, FamilySpec<f64>)> {
    let d = cfg.d;
    let mut rng = stream_rng(cfg.seed, "family", index as u64);
    let kind_a = cfg.ensemble == Ensemble::FamilyA;
    let (lo, hi) = t_range::<f64>(if kind_a { FamilyKind::A } else { FamilyKind::AA }, d);
    let t = lo + (hi - lo) * rng.random::<f64>();
    let spec = if kind_a {
        FamilySpec::A {
            t,
            u: haar_unitary(d, &mut rng),
        }
    } else {
        FamilySpec::AA {
            t,
            u1: haar_unitary(d, &mut rng),
            u2: haar_unitary(d, &mut rng),
        }
    };
    Ok((make_family(&spec, basis)?, spec))
}

/// Samples locally maximally mixed states, computes the optimized discord and
/// its universal lower bound for each, and counts bound violations.
///
/// For the family ensembles the optimizer is also compared against the
/// closed-form value (tolerance [`ANALYTIC_TOLERANCE`], D₁ only).
pub fn run_bound_experiment(cfg: &SamplerConfig, opt: &OptimizerConfig, measure: Measure) -> Result<ExperimentReport> {
    cfg.validate()?;
    opt.validate()?;
    if !matches!(
        cfg.ensemble,
        Ensemble::LmmRejection | Ensemble::FamilyA | Ensemble::FamilyAa
    ) {
        return Err(Error::UnsupportedEnsemble(cfg.ensemble.name().into()));
    }
    let basis = GellMannBasis::<f64>::new(cfg.d)?;
    let mut records = Vec::with_capacity(cfg.count);
    let mut draws = 0usize;
    let mut analytic_violations = 0usize;
    let mut analytic_worst = f64::INFINITY;
    for i in 0..cfg.count {
        let (state, spec) = match cfg.ensemble {
            Ensemble::LmmRejection => {
                let mut rng = stream_rng(cfg.seed, "lmm", i as u64);
                let (s, tries) = random_lmm_state(cfg.d, &mut rng, cfg.max_tries, &basis)?;
                draws += tries;
                (s, None)
            }
            _ => {
                let (s, spec) = sample_family(cfg, i, &basis)?;
                (s, Some(spec))
            }
        };
        let sample_opt = OptimizerConfig {
            seed: splitmix64(opt.seed ^ (i as u64).wrapping_mul(0x9E37_79B9)),
            ..opt.clone()
        };
        let result = match measure {
            Measure::D1 => d1_discord(&state, &basis, &sample_opt)?,
            Measure::D2 => d2_discord(&state, &basis, &sample_opt)?,
        };
        let bound = result.lower_bound;
        let analytic = match (&spec, measure) {
            (Some(s), Measure::D1) => Some(analytic_d1(s)?),
            _ => None,
        };
        if let Some(a) = analytic {
            let slack = ANALYTIC_TOLERANCE - (result.value - a).abs();
            analytic_worst = analytic_worst.min(slack);
            if slack < 0.0 {
                analytic_violations += 1;
            }
        }
        records.push(SampleRecord {
            index: i,
            d: cfg.d,
            ensemble: cfg.ensemble,
            xi: xi(&state.k, cfg.d)?,
            bound,
            value: result.value,
            margin: result.value - bound,
            analytic,
            t: spec.as_ref().map(|s| s.t()),
        });
    }

    let bound_violations = records
        .iter()
        .filter(|r| r.margin < -BOUND_TOLERANCE)
        .count();
    let worst_margin = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let mut checks = vec![CheckOutcome {
        name: format!("{} >= lower bound", measure.name()),
        samples: records.len(),
        violations: bound_violations,
        worst_margin: worst_margin + BOUND_TOLERANCE,
        tolerance: BOUND_TOLERANCE,
    }];
    if records.iter().any(|r| r.analytic.is_some()) {
        checks.push(CheckOutcome {
            name: "|optimizer - analytic| <= tolerance".into(),
            samples: records.len(),
            violations: analytic_violations,
            worst_margin: analytic_worst,
            tolerance: ANALYTIC_TOLERANCE,
        });
    }
    Ok(ExperimentReport {
        experiment: "bounds".into(),
        samples: records.len(),
        violations: checks.iter().map(|c| c.violations).sum(),
        worst_margin,
        statistics: Summary::of(records.iter().map(|r| r.value)),
        checks,
        acceptance_rate: (cfg.ensemble == Ensemble::LmmRejection).then(|| cfg.count as f64 / draws as f64),
        rng_scheme: RNG_SCHEME.into(),
        sampler: cfg.clone(),
        optimizer: Some(opt.clone()),
        measure: Some(measure),
        records,
    })
}

/// Checks, with `cfg.count` samples each:
/// (a) Bloch vectors with `‖n‖ ≤ 1/(d-1)` give positive matrices,
/// (b) random states have `‖n‖ ≤ 1`,
/// (c) random bipartite states satisfy `‖K‖_F ≤ (d/2)√(d²-1)`.
pub fn run_containment_experiment(cfg: &SamplerConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let d = cfg.d;
    let basis = GellMannBasis::<f64>::new(d)?;
    let n = basis.dim();
    let insphere = 1.0 / (d as f64 - 1.0);
    let psd_tol = <f64 as Real>::PSD_TOL;

    let mut insphere_check = CheckOutcome {
        name: "insphere vectors give positive states".into(),
        samples: cfg.count,
        violations: 0,
        worst_margin: f64::INFINITY,
        tolerance: psd_tol,
    };
    let mut norms = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let mut rng = stream_rng(cfg.seed, "insphere", i as u64);
        let v = uniform_in_ball::<f64, _>(n, insphere, &mut rng);
        let rho = bloch_to_density(&BlochVector { d, n: v }, &basis)?;
        let slack = min_eigenvalue(rho.matrix()) + psd_tol;
        insphere_check.worst_margin = insphere_check.worst_margin.min(slack);
        if slack < 0.0 {
            insphere_check.violations += 1;
        }
    }

    let norm_tol = 1e-10;
    let mut norm_check = CheckOutcome {
        name: "random states have ||n|| <= 1".into(),
        samples: cfg.count,
        violations: 0,
        worst_margin: f64::INFINITY,
        tolerance: norm_tol,
    };
    for i in 0..cfg.count {
        let mut rng = stream_rng(cfg.seed, "single-state", i as u64);
        let rho = random_density::<f64, _>(d, &mut rng);
        let norm = density_to_bloch(&rho, &basis)?.norm();
        norms.push(norm);
        let slack = 1.0 + norm_tol - norm;
        norm_check.worst_margin = norm_check.worst_margin.min(slack);
        if slack < 0.0 {
            norm_check.violations += 1;
        }
    }

    let ball = correlation_ball_radius::<f64>(d);
    let ball_tol = 1e-8;
    let mut ball_check = CheckOutcome {
        name: "random bipartite states satisfy ||K||_F <= (d/2)sqrt(d^2-1)".into(),
        samples: cfg.count,
        violations: 0,
        worst_margin: f64::INFINITY,
        tolerance: ball_tol,
    };
    for i in 0..cfg.count {
        let mut rng = stream_rng(cfg.seed, "bipartite-state", i as u64);
        let rho = random_density::<f64, _>(d * d, &mut rng);
        let k = correlation_matrix_unchecked(rho.matrix(), &basis);
        let slack = ball + ball_tol - k.norm();
        ball_check.worst_margin = ball_check.worst_margin.min(slack);
        if slack < 0.0 {
            ball_check.violations += 1;
        }
    }

    let checks = vec![insphere_check, norm_check, ball_check];
    Ok(ExperimentReport {
        experiment: "containment".into(),
        samples: cfg.count * checks.len(),
        violations: checks.iter().map(|c| c.violations).sum(),
        worst_margin: checks.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min),
        statistics: Summary::of(norms),
        checks,
        acceptance_rate: None,
        rng_scheme: RNG_SCHEME.into(),
        sampler: cfg.clone(),
        optimizer: None,
        measure: None,
        records: Vec::new(),
    })
}

/// `K_jk = (d²/4) tr(ρ λ_j ⊗ λ_k)` without the validity checks of
/// [`bipartite_decompose`], so the Frobenius bound can be tested independently.
fn correlation_matrix_unchecked(rho: &CMatrix<f64>, basis: &GellMannBasis<f64>) -> RMatrix<f64> {
    let n = basis.dim();
    let d = basis.d();
    let scale = (d * d) as f64 / 4.0;
    RMatrix::from_fn(n, n, |j, k| {
        let op = kron(basis.generator(j), basis.generator(k));
        crate::linalg::trace_of_product(rho, &op).re * scale
    })
}

/// Haar first moment: the mean of `tr(U)/d`, returned as `(re, im)`.
pub fn haar_trace_mean(d: usize, draws: usize, seed: u64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..draws {
        let mut rng = stream_rng(seed, "haar-moment", i as u64);
        let tr = haar_unitary::<f64, _>(d, &mut rng).trace();
        re += tr.re / d as f64;
        im += tr.im / d as f64;
    }
    (re / draws as f64, im / draws as f64)
}

/// Mean purity of the Hilbert–Schmidt ensemble on `C^n`.
pub fn hs_mean_purity(n: usize, draws: usize, seed: u64) -> f64 {
    (0..draws)
        .map(|i| {
            let mut rng = stream_rng(seed, "hs-purity", i as u64);
            to_f64(random_density::<f64, _>(n, &mut rng).purity())
        })
        .sum::<f64>()
        / draws as f64
}
