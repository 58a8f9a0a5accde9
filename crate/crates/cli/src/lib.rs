//! Configuration-driven experiment runner: parses a JSON run config,
//! dispatches to the band/stripe/evolve/classify/oracle-check pipelines,
//! and serializes deterministic CSV + JSON artifacts. Ships named
//! parameter presets for the bundled experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use synthlat::bloch::{self, CellRange, StripeGeometry};
use synthlat::dynamics::{self, EvolveParams, SourceTerm};
use synthlat::model::{Boundary, CouplingPattern, ExcitationSpec, InteractionSpec, LatticeSpec};
use synthlat::oracle;
use synthlat::spectra::{self, classify_stripe_mode};
use synthlat::synth::SyntheticOperator;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure classes mapped onto process exit codes: config errors exit 2,
/// numerical failures exit 3, I/O problems exit 1.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Config(msg.into()))
}

// ---------------------------------------------------------------------------
// Run configuration (the on-disk JSON schema)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bands,
    Stripe,
    Evolve,
    Classify,
    OracleCheck,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternConfig {
    Uniform { g: f64 },
    Alternating { g1: f64, g2: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionConfig {
    pub u: f64,
    pub range: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConfig {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub pattern: PatternConfig,
    #[serde(default)]
    pub interaction: Option<InteractionConfig>,
    pub cell_min: i64,
    pub cell_max: i64,
    pub boundary: BoundaryConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationConfig {
    Axis,
    Diagonal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeConfig {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub translation: TranslationConfig,
    /// One window per transverse coordinate (N - 1 of them).
    pub transverse: Vec<RangeConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcitationConfig {
    /// site -> boson count; keys are raw site indices.
    pub occupancy: BTreeMap<i64, u32>,
    pub delta_e: f64,
    pub t0: f64,
    pub tau_sq: f64,
    #[serde(default = "default_eta0")]
    pub eta0: f64,
}

fn default_eta0() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub lattice: LatticeConfig,
    pub n_bosons: usize,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub excitation: Option<ExcitationConfig>,
    #[serde(default = "default_k_count")]
    pub k_count: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub sample_stride: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
}

fn default_k_count() -> usize {
    101
}
fn default_dt() -> f64 {
    0.01
}
fn default_t_end() -> f64 {
    50.0
}
fn default_stride() -> f64 {
    0.1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    fn lattice_spec(&self) -> Result<LatticeSpec, RunError> {
        let pattern = match self.lattice.pattern {
            PatternConfig::Uniform { g } => CouplingPattern::Uniform { g },
            PatternConfig::Alternating { g1, g2 } => CouplingPattern::Alternating { g1, g2 },
        };
        let interaction = match &self.lattice.interaction {
            Some(i) => InteractionSpec::new(i.u, i.range),
            None => InteractionSpec::NONE,
        };
        let boundary = match self.lattice.boundary {
            BoundaryConfig::Open => Boundary::Open,
            BoundaryConfig::Periodic => Boundary::Periodic,
        };
        LatticeSpec::new(
            pattern,
            interaction,
            self.lattice.cell_min,
            self.lattice.cell_max,
            boundary,
        )
        .map_err(|e| RunError::Config(e.to_string()))
    }

    fn geometry(&self, spec: &LatticeSpec) -> Result<StripeGeometry, RunError> {
        let Some(geom) = &self.geometry else {
            return config_err("missing field `geometry` (required by this mode)");
        };
        if geom.transverse.len() + 1 != self.n_bosons {
            return config_err(format!(
                "geometry has {} transverse windows but n_bosons = {}",
                geom.transverse.len(),
                self.n_bosons
            ));
        }
        let mut transverse = Vec::with_capacity(geom.transverse.len());
        for r in &geom.transverse {
            if r.lo > r.hi {
                return config_err(format!("empty transverse window [{}, {}]", r.lo, r.hi));
            }
            transverse.push(CellRange::new(r.lo, r.hi));
        }
        let build = match geom.translation {
            TranslationConfig::Axis => {
                StripeGeometry::axis(spec.pattern, spec.interaction, transverse)
            }
            TranslationConfig::Diagonal => {
                StripeGeometry::diagonal(spec.pattern, spec.interaction, transverse)
            }
        };
        build.map_err(|e| RunError::Config(e.to_string()))
    }

    fn excitation(&self) -> Result<ExcitationSpec, RunError> {
        let Some(exc) = &self.excitation else {
            return config_err("missing field `excitation` (required by this mode)");
        };
        let tau_ok = exc.tau_sq.is_finite() && exc.tau_sq > 0.0;
        if !tau_ok {
            return config_err("excitation.tau_sq must be positive");
        }
        let mut spec = ExcitationSpec::new(
            exc.occupancy.iter().map(|(&s, &c)| (s, c)),
            exc.delta_e,
            exc.t0,
            exc.tau_sq,
        );
        spec.eta0 = exc.eta0;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), RunError> {
        if self.n_bosons == 0 {
            return config_err("n_bosons must be at least 1");
        }
        match self.mode {
            Mode::Bands | Mode::Stripe => {
                if self.k_count < 2 {
                    return config_err("k_count must be at least 2 for band sweeps");
                }
            }
            Mode::Classify => {
                if self.k_count < 1 {
                    return config_err("k_count must be at least 1");
                }
            }
            Mode::Evolve | Mode::OracleCheck => {
                let times_ok =
                    self.dt.is_finite() && self.dt > 0.0 && self.t_end.is_finite() && self.t_end > 0.0;
                if !times_ok {
                    return config_err("dt and t_end must be positive");
                }
                let mut seen = std::collections::BTreeSet::new();
                for (i, &t) in self.snapshot_times.iter().enumerate() {
                    if !(0.0..=self.t_end).contains(&t) {
                        return config_err(format!("snapshot time {t} outside [0, t_end]"));
                    }
                    if !seen.insert((t / self.dt).round() as i64) {
                        return config_err(format!("duplicate snapshot time {t}"));
                    }
                    if i > 0 && t <= self.snapshot_times[i - 1] {
                        return config_err("snapshot_times must be ascending".to_string());
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Deterministic formatting
// ---------------------------------------------------------------------------

/// 12 significant digits, scientific notation, locale-independent.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct MetaNorms {
    final_norm_before_normalization: f64,
    norm_after_normalization: f64,
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    norms: Option<MetaNorms>,
}

fn write_meta(dir: &Path, config: &RunConfig, norms: Option<MetaNorms>) -> Result<(), RunError> {
    let meta = Meta {
        tool: "synthlat",
        version: VERSION,
        config,
        norms,
    };
    let body = serde_json::to_string_pretty(&meta).expect("serializable") + "\n";
    write_file(dir, "meta.json", &body)
}

fn numerical(e: impl std::fmt::Display) -> RunError {
    RunError::Numerical(e.to_string())
}

fn dynamics_err(e: dynamics::DynamicsError) -> RunError {
    use dynamics::DynamicsError::*;
    match e {
        // Parameter problems the user can fix in the config.
        UnstableStep { .. } | HorizonTooShort { .. } | BadParams(_) | Model(_) => {
            RunError::Config(e.to_string())
        }
        NotHermitian => RunError::Numerical(e.to_string()),
    }
}

fn oracle_err(e: oracle::OracleError) -> RunError {
    use oracle::OracleError::*;
    match e {
        DimensionCap { .. } | UnknownExcitation => RunError::Config(e.to_string()),
        GridMismatch => RunError::Numerical(e.to_string()),
        Dynamics(inner) => dynamics_err(inner),
    }
}

/// Execute one run; returns the list of files written.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    config.validate()?;
    let spec = config.lattice_spec()?;
    let dir = config.output_dir.clone();
    let mut written = Vec::new();

    match config.mode {
        Mode::Bands => {
            let body = bulk_bands_csv(config, &spec)?;
            write_file(&dir, "bands.csv", &body)?;
            written.push(dir.join("bands.csv"));
            write_meta(&dir, config, None)?;
        }
        Mode::Stripe => {
            let geom = config.geometry(&spec)?;
            let bands = geom
                .projected_bands(config.k_count, false)
                .map_err(numerical)?;
            let body = stripe_bands_csv(&bands);
            write_file(&dir, "bands.csv", &body)?;
            written.push(dir.join("bands.csv"));
            write_meta(&dir, config, None)?;
        }
        Mode::Classify => {
            let geom = config.geometry(&spec)?;
            let bands = geom
                .projected_bands(config.k_count, true)
                .map_err(numerical)?;
            let body = stripe_bands_csv(&bands);
            write_file(&dir, "bands.csv", &body)?;
            written.push(dir.join("bands.csv"));
            let modes = modes_csv(&geom, &bands);
            write_file(&dir, "modes.csv", &modes)?;
            written.push(dir.join("modes.csv"));
            write_meta(&dir, config, None)?;
        }
        Mode::Evolve => {
            let exc = config.excitation()?;
            let op = SyntheticOperator::build(&spec, config.n_bosons)
                .map_err(|e| RunError::Config(e.to_string()))?;
            let source =
                SourceTerm::new(exc, &spec, config.n_bosons).map_err(dynamics_err)?;
            let params = EvolveParams::new(config.t_end, config.dt)
                .with_snapshots(config.snapshot_times.clone());
            let params = EvolveParams {
                sample_stride: config.sample_stride,
                ..params
            };
            let result = dynamics::evolve(&op, &source, &params).map_err(dynamics_err)?;

            let body = evolution_csv(&result);
            write_file(&dir, "evolution.csv", &body)?;
            written.push(dir.join("evolution.csv"));

            for (requested, (_, field)) in config.snapshot_times.iter().zip(&result.snapshots) {
                let name = format!("snapshot_{requested}.csv");
                let body = snapshot_csv(field, result.final_norm);
                write_file(&dir, &name, &body)?;
                written.push(dir.join(name));
            }
            write_meta(
                &dir,
                config,
                Some(MetaNorms {
                    final_norm_before_normalization: result.final_norm,
                    norm_after_normalization: if result.final_norm > 0.0 { 1.0 } else { 0.0 },
                }),
            )?;
        }
        Mode::OracleCheck => {
            let exc = config.excitation()?;
            let body = oracle_check_csv(config, &spec, &exc)?;
            write_file(&dir, "oracle.csv", &body.0)?;
            written.push(dir.join("oracle.csv"));
            write_meta(&dir, config, None)?;
            if !body.1 {
                return Err(RunError::Numerical(
                    "oracle comparison exceeded tolerance (see oracle.csv)".into(),
                ));
            }
        }
    }
    written.push(dir.join("meta.json"));
    Ok(written)
}

fn bulk_bands_csv(config: &RunConfig, spec: &LatticeSpec) -> Result<String, RunError> {
    let n = config.n_bosons;
    let k_axis = bloch::k_grid(config.k_count);
    let header: Vec<&str> = match n {
        1 => vec!["k"],
        2 => vec!["k_m", "k_n"],
        3 => vec!["k_m", "k_n", "k_p"],
        _ => return config_err("bands mode supports 1 to 3 bosons"),
    };
    let mut out = String::new();
    writeln!(out, "{},band_index,energy", header.join(",")).unwrap();

    let bands_at = |k: &[f64]| -> Vec<f64> {
        match spec.pattern {
            CouplingPattern::Uniform { g } => vec![bloch::analytic_band_tb(k, g)],
            CouplingPattern::Alternating { g1, g2 } => match k.len() {
                1 => bloch::ssh1d_bands(k[0], g1, g2).to_vec(),
                2 => bloch::analytic_band_ssh2d(k[0], k[1], g1, g2).to_vec(),
                _ => Vec::new(),
            },
        }
    };
    if matches!(spec.pattern, CouplingPattern::Alternating { .. }) && n == 3 {
        return config_err("bands mode supports alternating chains up to 2 bosons");
    }

    let mut k = vec![0.0f64; n];
    let mut idx = vec![0usize; n];
    loop {
        for (a, &i) in idx.iter().enumerate() {
            k[a] = k_axis[i];
        }
        for (b, e) in bands_at(&k).iter().enumerate() {
            let coords: Vec<String> = k.iter().map(|&x| fmt12(x)).collect();
            writeln!(out, "{},{},{}", coords.join(","), b, fmt12(*e)).unwrap();
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < k_axis.len() {
                break;
            }
            idx[axis] = 0;
        }
    }
}

fn stripe_bands_csv(bands: &bloch::BandStructure) -> String {
    let mut out = String::from("k_j,band_index,energy\n");
    for (ki, &k) in bands.k_grid.iter().enumerate() {
        for (b, &e) in bands.energies[ki].iter().enumerate() {
            writeln!(out, "{},{},{}", fmt12(k), b, fmt12(e)).unwrap();
        }
    }
    out
}

fn modes_csv(geom: &StripeGeometry, bands: &bloch::BandStructure) -> String {
    let mut out = String::from("k_j,band_index,category,parity,localization\n");
    let reflection = geom.exchange_reflection().ok();
    for (ki, &k) in bands.k_grid.iter().enumerate() {
        let pairs = bands.pairs_at(ki).expect("classify keeps eigenvectors");
        // Rotate degenerate subspaces into parity eigenvectors first, so
        // exactly degenerate pairs do not report as mixed.
        let labeled: Vec<(spectra::EigenPair, spectra::Parity)> = match &reflection {
            Some(refl) => spectra::resolve_parity(&pairs, refl, k, spectra::DEGENERACY_TOL),
            None => pairs
                .into_iter()
                .map(|p| (p, spectra::Parity::Mixed))
                .collect(),
        };
        for (b, (pair, parity)) in labeled.iter().enumerate() {
            let label = classify_stripe_mode(pair, geom, k);
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt12(k),
                b,
                label.category.as_str(),
                parity.as_str(),
                fmt12(label.localization)
            )
            .unwrap();
        }
    }
    out
}

fn evolution_csv(result: &dynamics::EvolutionResult) -> String {
    let mut out = String::from("t,site,boson_number\n");
    for (i, &t) in result.times.iter().enumerate() {
        for (&site, &n) in result.sites.iter().zip(&result.boson_numbers[i]) {
            writeln!(out, "{},{},{}", fmt12(t), site, fmt12(n)).unwrap();
        }
    }
    out
}

fn snapshot_csv(field: &synthlat::AmplitudeField, final_norm: f64) -> String {
    let n = field.n_bosons();
    let mut out = String::new();
    let header: Vec<String> = (1..=n).map(|i| format!("lambda_{i}")).collect();
    writeln!(out, "{},probability", header.join(",")).unwrap();
    let scale = if final_norm > 0.0 {
        1.0 / (final_norm * final_norm)
    } else {
        1.0
    };
    for (tuple, p) in dynamics::excitation_probability_map(field) {
        let coords: Vec<String> = tuple.lambdas().iter().map(|s| s.to_string()).collect();
        writeln!(out, "{},{}", coords.join(","), fmt12(p * scale)).unwrap();
    }
    out
}

fn oracle_check_csv(
    config: &RunConfig,
    spec: &LatticeSpec,
    exc: &ExcitationSpec,
) -> Result<(String, bool), RunError> {
    const SPECTRUM_TOL: f64 = 1e-9;
    const TRAJECTORY_TOL: f64 = 1e-7;

    let n = config.n_bosons as u32;
    let fock = oracle::build_fock_hamiltonian(spec, n, None).map_err(oracle_err)?;
    let op = SyntheticOperator::build(spec, config.n_bosons)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (_, sym) = op.symmetric_sector_matrix();
    let sym_eigs: Vec<f64> = spectra::hermitian_eig_real(&sym)
        .map_err(numerical)?
        .iter()
        .map(|p| p.energy)
        .collect();
    let fock_eigs = fock.spectrum();
    let spectrum_dev = sym_eigs
        .iter()
        .zip(&fock_eigs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let params = EvolveParams {
        sample_stride: config.sample_stride,
        ..EvolveParams::new(config.t_end, config.dt)
    };
    let snaps =
        oracle::synthetic_snapshots(spec, config.n_bosons, exc, &params).map_err(dynamics_err)?;
    let traj = oracle::evolve_fock(&fock, exc, &params).map_err(oracle_err)?;
    let trajectory_dev =
        oracle::compare_trajectories(&snaps, &traj, &fock.basis).map_err(oracle_err)?;

    let ok = spectrum_dev <= SPECTRUM_TOL && trajectory_dev < TRAJECTORY_TOL;
    let mut out = String::from("metric,value\n");
    writeln!(out, "fock_dimension,{}", fock.dim()).unwrap();
    writeln!(out, "spectrum_deviation,{}", fmt12(spectrum_dev)).unwrap();
    writeln!(out, "spectrum_tolerance,{}", fmt12(SPECTRUM_TOL)).unwrap();
    writeln!(out, "trajectory_deviation,{}", fmt12(trajectory_dev)).unwrap();
    writeln!(out, "trajectory_tolerance,{}", fmt12(TRAJECTORY_TOL)).unwrap();
    writeln!(out, "pass,{}", ok).unwrap();
    Ok((out, ok))
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn(PathBuf) -> RunConfig,
}

fn lattice(pattern: PatternConfig, u: f64, range: u32) -> LatticeConfig {
    LatticeConfig {
        pattern,
        interaction: if u != 0.0 {
            Some(InteractionConfig { u, range })
        } else {
            None
        },
        cell_min: -15,
        cell_max: 15,
        boundary: BoundaryConfig::Open,
    }
}

fn ssh(g1: f64, g2: f64) -> PatternConfig {
    PatternConfig::Alternating { g1, g2 }
}

fn pulse(occupancy: &[(i64, u32)], delta_e: f64) -> ExcitationConfig {
    ExcitationConfig {
        occupancy: occupancy.iter().copied().collect(),
        delta_e,
        t0: 10.0,
        tau_sq: 10.0,
        eta0: 1.0,
    }
}

fn stripe_axis(window: (i64, i64)) -> GeometryConfig {
    GeometryConfig {
        translation: TranslationConfig::Axis,
        transverse: vec![RangeConfig {
            lo: window.0,
            hi: window.1,
        }],
    }
}

fn stripe_diagonal(windows: &[(i64, i64)]) -> GeometryConfig {
    GeometryConfig {
        translation: TranslationConfig::Diagonal,
        transverse: windows
            .iter()
            .map(|&(lo, hi)| RangeConfig { lo, hi })
            .collect(),
    }
}

fn base(mode: Mode, lattice: LatticeConfig, n_bosons: usize, out: PathBuf) -> RunConfig {
    RunConfig {
        mode,
        lattice,
        n_bosons,
        geometry: None,
        excitation: None,
        k_count: default_k_count(),
        dt: default_dt(),
        t_end: default_t_end(),
        sample_stride: default_stride(),
        snapshot_times: Vec::new(),
        output_dir: out,
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1c",
        summary: "two-boson tight-binding band surface, g = 1",
        build: |out| base(Mode::Bands, lattice(PatternConfig::Uniform { g: 1.0 }, 0.0, 0), 2, out),
    },
    Preset {
        name: "fig2c",
        summary: "two-boson SSH band surface, g1 = 3g, g2 = g",
        build: |out| base(Mode::Bands, lattice(ssh(3.0, 1.0), 0.0, 0), 2, out),
    },
    Preset {
        name: "fig3a",
        summary: "axis stripe bands, trivial phase (g1 = 3g, g2 = g), -15 <= n <= 15",
        build: |out| {
            let mut c = base(Mode::Stripe, lattice(ssh(3.0, 1.0), 0.0, 0), 2, out);
            c.geometry = Some(stripe_axis((-15, 15)));
            c.k_count = 201;
            c
        },
    },
    Preset {
        name: "fig3b",
        summary: "axis stripe bands, nontrivial phase (g1 = g, g2 = 3g), -15 <= n <= 15",
        build: |out| {
            let mut c = base(Mode::Stripe, lattice(ssh(1.0, 3.0), 0.0, 0), 2, out);
            c.geometry = Some(stripe_axis((-15, 15)));
            c.k_count = 201;
            c
        },
    },
    Preset {
        name: "fig4a",
        summary: "excite C_0 and D_15, g1 = g, g2 = 3g, dE = 3.16g, t0 = 10/g, tau^2 = 10/g^2",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(1.0, 3.0), 0.0, 0), 2, out);
            c.excitation = Some(pulse(&[(0, 1), (31, 1)], 3.16));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig4c",
        summary: "excite two bosons on C_0, g1 = g, g2 = 3g, dE = 0",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(1.0, 3.0), 0.0, 0), 2, out);
            c.excitation = Some(pulse(&[(0, 2)], 0.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig4e",
        summary: "excite C_0 and D_15, trivial phase (g1 = 3g, g2 = g), dE = 0",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(3.0, 1.0), 0.0, 0), 2, out);
            c.excitation = Some(pulse(&[(0, 1), (31, 1)], 0.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig5b",
        summary: "diagonal stripe bands, U = 2g, R = 6, trivial phase (3g, g), -15 <= l <= 15",
        build: |out| {
            let mut c = base(Mode::Stripe, lattice(ssh(3.0, 1.0), 2.0, 6), 2, out);
            c.geometry = Some(stripe_diagonal(&[(-15, 15)]));
            c.k_count = 201;
            c
        },
    },
    Preset {
        name: "fig5c",
        summary: "diagonal stripe bands, U = 2g, R = 6, nontrivial phase (g, 3g), -15 <= l <= 15",
        build: |out| {
            let mut c = base(Mode::Stripe, lattice(ssh(1.0, 3.0), 2.0, 6), 2, out);
            c.geometry = Some(stripe_diagonal(&[(-15, 15)]));
            c.k_count = 201;
            c
        },
    },
    Preset {
        name: "fig7a",
        summary: "excite C_0 and D_6, U = 2g, R = 6, g1 = g, g2 = 3g, dE = g",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(1.0, 3.0), 2.0, 6), 2, out);
            c.excitation = Some(pulse(&[(0, 1), (13, 1)], 1.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig7b",
        summary: "excite C_0 and D_6, U = 2g, R = 6, trivial phase (3g, g), dE = g",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(3.0, 1.0), 2.0, 6), 2, out);
            c.excitation = Some(pulse(&[(0, 1), (13, 1)], 1.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig7c",
        summary: "excite two bosons on C_0, U = 2g, R = 6, g1 = g, g2 = 3g, dE = g",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(1.0, 3.0), 2.0, 6), 2, out);
            c.excitation = Some(pulse(&[(0, 2)], 1.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig7d",
        summary: "excite C_0 and D_6, U = 0, g1 = g, g2 = 3g, dE = 0",
        build: |out| {
            let mut c = base(Mode::Evolve, lattice(ssh(1.0, 3.0), 0.0, 0), 2, out);
            c.excitation = Some(pulse(&[(0, 1), (13, 1)], 0.0));
            c.snapshot_times = vec![40.0];
            c
        },
    },
    Preset {
        name: "fig9a",
        summary: "three-boson diagonal stripe at k_j = 0, U = 12g, R = 6, -15 <= l1, l2 <= 15",
        build: |out| {
            let mut c = base(
                Mode::Classify,
                lattice(PatternConfig::Uniform { g: 1.0 }, 12.0, 6),
                3,
                out,
            );
            c.geometry = Some(stripe_diagonal(&[(-15, 15), (-15, 15)]));
            c.k_count = 1;
            c
        },
    },
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn list_presets() -> String {
    let mut out = String::new();
    for p in PRESETS {
        writeln!(out, "{:8}  {}", p.name, p.summary).unwrap();
    }
    out
}
