use std::path::{Path, PathBuf};

use quditcorr::io::{load_state, to_json_string, write_json, BasisFile, DiscordFile, LoadedState, Repr, StateFile};
use quditcorr::linalg::{frobenius_sq, identity, min_eigenvalue};
use quditcorr::sampling::ExperimentReport;
use quditcorr::states::{correlation_ball_radius, is_locally_maximally_mixed};
use quditcorr::{
    analytic_d1, d1_discord, density_to_bloch, d2_discord, haar_unitary, isotropic_state, lower_bounds, make_family, oracle_d1,
    ppt_min_eigenvalue, run_bound_experiment, run_containment_experiment, stream_rng, structure_constants, t_range,
    werner_state, xi, BipartiteState, Ensemble, Error, FamilyKind, FamilySpec, GellMannBasis, Measure,
    OptimizerConfig, SamplerConfig,
};
use serde::Serialize;
use thiserror::Error;

use crate::{
    BasisArgs, Cli, Command, DiscordArgs, EnsembleFlag, FamilyArgs, FamilyFlag, IsotropicArgs, MeasureFlag,
    OptimizerArgs, OracleArgs, ReprFlag, SampleArgs, StateArgs, WernerArgs,
};

/// Fixed CSV layout; bump the version when columns change.
pub const CSV_VERSION: &str = "quditcorr-samples/v1";
pub const CSV_COLUMNS: [&str; 7] = ["d", "ensemble", "xi", "bound", "value", "margin", "analytic"];

/// Allowed excess of the optimizer over the brute-force oracle.
const ORACLE_TOLERANCE: f64 = 1e-6;
/// Singular values below this count as zero in `rank K`.
const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    InvalidState(Error),
    #[error("{0}")]
    Optimizer(Error),
    #[error("{0}")]
    Other(Error),
    /// The command ran and produced a report, but found a failure it must signal.
    #[error("{reason}")]
    Failed { report: String, reason: String, code: u8 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::InvalidState(_) => 3,
            CliError::Optimizer(_) => 4,
            CliError::Other(_) => 1,
            CliError::Failed { code, .. } => *code,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidLevel(_) | Error::UnsupportedEnsemble(_) => CliError::Usage(e.to_string()),
            Error::InvalidConfig(_) => CliError::Optimizer(e),
            Error::InvalidState(_)
            | Error::NotAState { .. }
            | Error::TOutOfRange { .. }
            | Error::ParameterOutOfRange { .. }
            | Error::Format(_)
            | Error::Json(_)
            | Error::LengthMismatch { .. } => CliError::InvalidState(e),
            _ => CliError::Other(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Honors `QUDITCORR_THREADS`. Results never depend on the pool size.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("QUDITCORR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("QUDITCORR_THREADS must be a positive integer (got {raw:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    result: R,
}

fn render<C: Serialize, R: Serialize>(json: bool, command: &str, config: &C, result: R) -> CliResult<String> {
    let report = Report {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        result,
    };
    if json {
        Ok(to_json_string(&report)? + "\n")
    } else {
        let value = serde_json::to_value(&report).map_err(|e| CliError::Other(e.into()))?;
        Ok(crate::render::human(&value))
    }
}

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Basis(a) => basis(cli.json, a),
        Command::Check(a) => check(cli.json, a),
        Command::Discord(a) => discord(cli.json, a),
        Command::Bounds(a) => bounds(cli.json, a),
        Command::Family(a) => family(cli.json, a),
        Command::Werner(a) => werner(cli.json, a),
        Command::Isotropic(a) => isotropic(cli.json, a),
        Command::Sample(a) => sample(cli.json, a),
        Command::OracleCompare(a) => oracle_compare(cli.json, a),
    }
}

fn require_level(d: usize) -> CliResult<GellMannBasis<f64>> {
    if d < 2 {
        return Err(CliError::Usage(format!("--d must be at least 2 (got {d})")));
    }
    Ok(GellMannBasis::new(d)?)
}

fn load_any(path: &Path) -> CliResult<LoadedState> {
    load_state(path).map_err(|e| match e {
        Error::Io(io) => CliError::InvalidState(Error::Format(format!("cannot read {}: {io}", path.display()))),
        other => CliError::InvalidState(other),
    })
}

fn load_bipartite(path: &Path) -> CliResult<BipartiteState<f64>> {
    load_any(path)?.into_bipartite().map_err(CliError::InvalidState)
}

fn write_out<S: Serialize>(path: Option<&PathBuf>, value: &S) -> CliResult<()> {
    if let Some(p) = path {
        write_json(p, value).map_err(CliError::Other)?;
    }
    Ok(())
}

fn measure_of(m: MeasureFlag) -> Measure {
    match m {
        MeasureFlag::D1 => Measure::D1,
        MeasureFlag::D2 => Measure::D2,
    }
}

fn repr_of(r: ReprFlag) -> Repr {
    match r {
        ReprFlag::Matrix => Repr::Matrix,
        ReprFlag::BipartiteBloch => Repr::BipartiteBloch,
    }
}

fn optimizer_config(a: &OptimizerArgs) -> CliResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        starts: a.starts,
        max_iterations: a.max_iterations,
        objective_tolerance: a.tol,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(CliError::Optimizer)?;
    Ok(cfg)
}

fn family_spec(kind: FamilyFlag, d: usize, t: f64, haar: bool, seed: u64) -> FamilySpec<f64> {
    let mut rng = stream_rng(seed, "cli-family", 0);
    let mut unitary = || if haar { haar_unitary(d, &mut rng) } else { identity(d) };
    match kind {
        FamilyFlag::A => FamilySpec::A { t, u: unitary() },
        FamilyFlag::Aa => FamilySpec::AA {
            t,
            u1: unitary(),
            u2: unitary(),
        },
    }
}

// ---- basis ----

fn basis(json: bool, a: &BasisArgs) -> CliResult<String> {
    let b = require_level(a.d)?;
    let file = BasisFile::new(&b, &structure_constants(&b));
    write_out(a.out.as_ref(), &file)?;
    render(json, "basis", a, file)
}

// ---- check ----

#[derive(Serialize)]
struct CheckResult {
    d: usize,
    kind: &'static str,
    valid: bool,
    min_eigenvalue: f64,
    purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bloch_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bipartite: Option<BipartiteSummary>,
}

#[derive(Serialize)]
struct BipartiteSummary {
    x_norm: f64,
    y_norm: f64,
    k_frobenius: f64,
    correlation_ball_radius: f64,
    locally_maximally_mixed: bool,
    ppt_min_eigenvalue: f64,
    ppt: bool,
}

fn bipartite_summary(s: &BipartiteState<f64>) -> BipartiteSummary {
    let ppt_min = ppt_min_eigenvalue(&s.matrix, s.d);
    BipartiteSummary {
        x_norm: s.x.norm(),
        y_norm: s.y.norm(),
        k_frobenius: s.k.norm(),
        correlation_ball_radius: correlation_ball_radius(s.d),
        locally_maximally_mixed: is_locally_maximally_mixed(s, 1e-10),
        ppt_min_eigenvalue: ppt_min,
        ppt: ppt_min >= -1e-10,
    }
}

fn check(json: bool, a: &StateArgs) -> CliResult<String> {
    let loaded = load_any(&a.state)?;
    let basis = GellMannBasis::<f64>::new(loaded.d())?;
    let result = match loaded {
        LoadedState::Single(rho) => CheckResult {
            d: rho.d(),
            kind: "single",
            valid: true,
            min_eigenvalue: rho.min_eigenvalue(),
            purity: rho.purity(),
            bloch_norm: Some(density_to_bloch(&rho, &basis)?.norm()),
            bipartite: None,
        },
        LoadedState::Bipartite(s) => CheckResult {
            d: s.d,
            kind: "bipartite",
            valid: true,
            min_eigenvalue: min_eigenvalue(&s.matrix),
            purity: frobenius_sq(&s.matrix),
            bloch_norm: None,
            bipartite: Some(bipartite_summary(&s)),
        },
    };
    render(json, "check", a, result)
}

// ---- discord ----

#[derive(Serialize)]
struct DiscordResultOut {
    d: usize,
    source: String,
    xi: f64,
    d1_lower_bound: f64,
    d2_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_d1: Option<f64>,
    discord: DiscordFile,
}

fn discord(json: bool, a: &DiscordArgs) -> CliResult<String> {
    let cfg = optimizer_config(&a.optimizer)?;
    let (state, source, spec) = match (&a.state, a.family.family) {
        (Some(path), _) => (load_bipartite(path)?, path.display().to_string(), None),
        (None, Some(kind)) => {
            let (Some(d), Some(t)) = (a.family.d, a.family.t) else {
                return Err(CliError::Usage("--family requires --d and --t".into()));
            };
            let basis = require_level(d)?;
            let spec = family_spec(kind, d, t, a.family.haar, a.optimizer.seed);
            let state = make_family(&spec, &basis)?;
            let name = match kind {
                FamilyFlag::A => "family-a",
                FamilyFlag::Aa => "family-aa",
            };
            (state, name.to_string(), Some(spec))
        }
        (None, None) => return Err(CliError::Usage("pass either --state FILE or --family a|aa".into())),
    };
    let basis = GellMannBasis::<f64>::new(state.d)?;
    let measure = measure_of(a.measure);
    let result = match measure {
        Measure::D1 => d1_discord(&state, &basis, &cfg)?,
        Measure::D2 => d2_discord(&state, &basis, &cfg)?,
    };
    let (b1, b2) = lower_bounds(&state.k, state.d)?;
    let out = DiscordResultOut {
        d: state.d,
        source,
        xi: xi(&state.k, state.d)?,
        d1_lower_bound: b1,
        d2_lower_bound: b2,
        analytic_d1: spec.as_ref().map(analytic_d1).transpose()?,
        discord: DiscordFile::from(&result),
    };
    write_out(a.out.as_ref(), &out)?;
    render(json, "discord", a, out)
}

// ---- bounds ----

#[derive(Serialize)]
struct BoundsResult {
    d: usize,
    xi: f64,
    d1_lower_bound: f64,
    d2_lower_bound: f64,
    k_frobenius: f64,
    rank_k: usize,
    correlation_ball_radius: f64,
    /// `radius - ‖K‖_F`; non-negative for every state.
    ball_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn bounds(json: bool, a: &StateArgs) -> CliResult<String> {
    let s = load_bipartite(&a.state)?;
    let d = s.d;
    let (b1, b2) = lower_bounds(&s.k, d)?;
    let rank = s.k.rank(RANK_TOLERANCE);
    let radius = correlation_ball_radius::<f64>(d);
    let out = BoundsResult {
        d,
        xi: xi(&s.k, d)?,
        d1_lower_bound: b1,
        d2_lower_bound: b2,
        k_frobenius: s.k.norm(),
        rank_k: rank,
        correlation_ball_radius: radius,
        ball_margin: radius - s.k.norm(),
        note: (rank < d).then(|| format!("rank K < d ({rank} < {d}): both lower bounds vanish")),
    };
    render(json, "bounds", a, out)
}

// ---- state builders ----

#[derive(Serialize)]
struct BuiltState {
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_d1: Option<f64>,
    xi: f64,
    ppt_min_eigenvalue: f64,
    state: StateFile,
}

fn built(s: &BipartiteState<f64>, repr: ReprFlag) -> CliResult<BuiltState> {
    Ok(BuiltState {
        d: s.d,
        t_range: None,
        analytic_d1: None,
        xi: xi(&s.k, s.d)?,
        ppt_min_eigenvalue: ppt_min_eigenvalue(&s.matrix, s.d),
        state: StateFile::from_bipartite(s, repr_of(repr)),
    })
}

fn family(json: bool, a: &FamilyArgs) -> CliResult<String> {
    let basis = require_level(a.d)?;
    let spec = family_spec(a.family, a.d, a.t, a.haar, a.seed);
    let s = make_family(&spec, &basis)?;
    let kind = match a.family {
        FamilyFlag::A => FamilyKind::A,
        FamilyFlag::Aa => FamilyKind::AA,
    };
    let (lo, hi) = t_range::<f64>(kind, a.d);
    let out = BuiltState {
        t_range: Some([lo, hi]),
        analytic_d1: Some(analytic_d1(&spec)?),
        ..built(&s, a.repr)?
    };
    write_out(a.out.as_ref(), &out.state)?;
    render(json, "family", a, out)
}

fn werner(json: bool, a: &WernerArgs) -> CliResult<String> {
    let basis = require_level(a.d)?;
    let s = werner_state(a.d, a.a, &basis)?;
    let out = built(&s, a.repr)?;
    write_out(a.out.as_ref(), &out.state)?;
    render(json, "werner", a, out)
}

fn isotropic(json: bool, a: &IsotropicArgs) -> CliResult<String> {
    let basis = require_level(a.d)?;
    let s = isotropic_state(a.d, a.f, &basis)?;
    let out = built(&s, a.repr)?;
    write_out(a.out.as_ref(), &out.state)?;
    render(json, "isotropic", a, out)
}

// ---- sample ----

fn ensemble_of(e: EnsembleFlag) -> Ensemble {
    match e {
        EnsembleFlag::HaarUnitary => Ensemble::HaarUnitary,
        EnsembleFlag::HsDensity => Ensemble::HsDensity,
        EnsembleFlag::LmmRejection => Ensemble::LmmRejection,
        EnsembleFlag::FamilyA => Ensemble::FamilyA,
        EnsembleFlag::FamilyAa => Ensemble::FamilyAa,
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    d: usize,
    ensemble: &'a str,
    xi: f64,
    bound: f64,
    value: f64,
    margin: f64,
    analytic: Option<f64>,
}

/// One row per sample behind a versioned comment line.
pub fn samples_csv(report: &ExperimentReport) -> CliResult<Vec<u8>> {
    let mut buf = format!(
        "# {CSV_VERSION} quditcorr {} experiment={} columns={}\n",
        env!("CARGO_PKG_VERSION"),
        report.experiment,
        CSV_COLUMNS.join(",")
    )
    .into_bytes();
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        let csv_err = |e: csv::Error| CliError::Other(Error::Format(e.to_string()));
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for r in &report.records {
            w.serialize(CsvRow {
                d: r.d,
                ensemble: r.ensemble.name(),
                xi: r.xi,
                bound: r.bound,
                value: r.value,
                margin: r.margin,
                analytic: r.analytic,
            })
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Other(e.into()))?;
    }
    Ok(buf)
}

fn sample(json: bool, a: &SampleArgs) -> CliResult<String> {
    require_level(a.d)?;
    if a.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    if a.max_tries == 0 {
        return Err(CliError::Usage("--max-tries must be at least 1".into()));
    }
    let ensemble = ensemble_of(a.ensemble);
    let cfg = SamplerConfig {
        max_tries: a.max_tries,
        ..SamplerConfig::new(a.d, ensemble, a.count, a.seed)
    };
    let report = match ensemble {
        Ensemble::HaarUnitary | Ensemble::HsDensity => run_containment_experiment(&cfg)?,
        _ => {
            let opt = OptimizerConfig {
                starts: a.starts,
                ..OptimizerConfig::with_seed(a.seed)
            };
            opt.validate().map_err(CliError::Optimizer)?;
            run_bound_experiment(&cfg, &opt, measure_of(a.measure))?
        }
    };
    if let Some(p) = &a.csv {
        std::fs::write(p, samples_csv(&report)?).map_err(|e| CliError::Other(e.into()))?;
    }
    write_out(a.out.as_ref(), &report)?;
    let violations = report.violations;
    let text = render(json, "sample", a, report)?;
    if violations > 0 {
        return Err(CliError::Failed {
            report: text,
            reason: format!("{violations} violation(s) found"),
            code: 5,
        });
    }
    Ok(text)
}

// ---- oracle-compare ----

#[derive(Serialize)]
struct OracleResult {
    d: usize,
    optimizer: f64,
    oracle: f64,
    /// `oracle - optimizer`; negative beyond the tolerance is a regression.
    difference: f64,
    tolerance: f64,
    regression: bool,
}

fn oracle_compare(json: bool, a: &OracleArgs) -> CliResult<String> {
    if a.budget == 0 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    let cfg = OptimizerConfig {
        starts: a.starts,
        ..OptimizerConfig::with_seed(a.seed)
    };
    cfg.validate().map_err(CliError::Optimizer)?;
    let s = load_bipartite(&a.state)?;
    let basis = GellMannBasis::<f64>::new(s.d)?;
    let opt = d1_discord(&s, &basis, &cfg)?.value;
    let oracle = oracle_d1(&s, a.budget, a.seed)?;
    let regression = opt > oracle + ORACLE_TOLERANCE;
    let text = render(
        json,
        "oracle-compare",
        a,
        OracleResult {
            d: s.d,
            optimizer: opt,
            oracle,
            difference: oracle - opt,
            tolerance: ORACLE_TOLERANCE,
            regression,
        },
    )?;
    if regression {
        return Err(CliError::Failed {
            report: text,
            reason: format!("optimizer {opt} exceeds oracle {oracle} by more than {ORACLE_TOLERANCE:e}"),
            code: 6,
        });
    }
    Ok(text)
}
