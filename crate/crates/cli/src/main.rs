//! Command-line front end: pointwise curvature queries, identity
//! verification suites and collapse sweeps over the example catalog or
//! user-supplied config files.
//!
//! Exit codes: 0 all-pass, 1 residual failure, 2 hypothesis-unmet,
//! 3 config error.

mod config;
mod expr;
mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subcurv::catalog::{self, CatalogEntry, CatalogObject};
use subcurv::curvature::scalar_curvature;
use subcurv::fd::{DifferentiationConfig, StencilOrder};
use subcurv::flow::verify_lie_derivative_fiber_volume;
use subcurv::identity::{
    standard_test_functions, verify_base_derivative_identities, verify_laplacian_split,
    verify_main_equality, verify_measure_hypothesis, verify_oneill_identity, verify_theorem2_2,
    DEFAULT_HYPOTHESIS_TOL, DEFAULT_IDENTITY_TOL, DEFAULT_LIE_TOL, DELTA_N_IDENTITY_TOL,
};
use subcurv::report::{IdentityId, IdentityReport, SweepRow, SweepTable};
use subcurv::sample::sample_box;
use subcurv::weighted::{modified_scalar_q, modified_scalar_report, WeightedManifold};
use subcurv::{Error as CoreError, KKSubmersion};

use config::CustomExample;
use output::{OutputFormat, VerifyRow};

const EXIT_RESIDUAL: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Config(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::HypothesisUnmet(_)) => EXIT_HYPOTHESIS,
            CliError::Core(
                CoreError::UnknownExample(_)
                | CoreError::InvalidParameter(_)
                | CoreError::InvalidChart(_),
            ) => EXIT_CONFIG,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Core(_) => EXIT_RESIDUAL,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "subcurv",
    version,
    about = "Curvature of weighted manifolds and Riemannian submersions: \
             pointwise queries, identity verification, collapse sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modified scalar curvatures at sampled or given points.
    Curvature(CurvatureArgs),
    /// Run identity verifiers over a submersion example.
    Verify(VerifyArgs),
    /// Sweep a collapse family and tabulate curvatures and residuals.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Catalog example id.
    #[arg(long)]
    example: Option<String>,
    /// Example parameter, repeatable: --param eps=0.5
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Declarative config file defining the example and settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of pseudo-random sample points.
    #[arg(long)]
    points: Option<usize>,
    /// Seed for the sample set (reports are bit-reproducible per seed).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Identity tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative finite-difference step.
    #[arg(long)]
    step: Option<f64>,
    /// Relative step for nested differentiation of derived fields.
    #[arg(long)]
    nested_step: Option<f64>,
    /// Stencil order, 2 or 4.
    #[arg(long)]
    order: Option<u32>,
    /// Quadrature nodes per fiber/torus axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dimension parameter q for R_q (omit for R_inf only).
    #[arg(long)]
    q: Option<f64>,
    /// Explicit evaluation point, comma-separated coordinates; repeatable.
    #[arg(long = "point", value_name = "C1,C2,...")]
    point: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum IdentityChoice {
    Oneill,
    LaplacianSplit,
    BaseDerivatives,
    MeasureHypothesis,
    MainEquality,
    #[value(name = "theorem2-2")]
    Theorem22,
    LieFiberVolume,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which identity to verify.
    #[arg(long, value_enum, default_value_t = IdentityChoice::All)]
    identity: IdentityChoice,
    /// Number of base points for fiber-integral identities.
    #[arg(long, default_value_t = 5)]
    base_points: usize,
    /// Fiberwise-constancy threshold certifying the transport hypothesis.
    #[arg(long, default_value_t = DEFAULT_HYPOTHESIS_TOL)]
    hypothesis_tol: f64,
    /// Flow time step for the Lie-derivative check.
    #[arg(long, default_value_t = 1e-2)]
    t_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyChoice {
    Berger,
    Product,
    Warped,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Collapse family to sweep.
    #[arg(long, value_enum)]
    family: FamilyChoice,
    /// Parameter values, comma-separated (defaults per family).
    #[arg(long)]
    values: Option<String>,
    /// Number of base points per row.
    #[arg(long, default_value_t = 4)]
    base_points: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Curvature(args) => cmd_curvature(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

// ---------------------------------------------------------------------
// example resolution
// ---------------------------------------------------------------------

enum Resolved {
    Weighted {
        id: String,
        manifold: WeightedManifold,
        region: Vec<(f64, f64)>,
    },
    Submersion {
        id: String,
        submersion: KKSubmersion,
        base_region: Vec<(f64, f64)>,
        expect_hypothesis_failure: bool,
    },
    Family {
        entry: CatalogEntry,
    },
}

/// 10% inset from non-periodic boundaries; periodic axes sampled fully.
fn default_region(chart: &subcurv::ChartDomain) -> Vec<(f64, f64)> {
    chart
        .bounds()
        .iter()
        .zip(chart.periodic())
        .map(|(&(lo, hi), &periodic)| {
            if periodic {
                (lo, hi)
            } else {
                let inset = 0.1 * (hi - lo);
                (lo + inset, hi - inset)
            }
        })
        .collect()
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for kv in params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--param expects K=V, got `{kv}`")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| CliError::Config(format!("--param {k}: `{v}` is not a number")))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

struct RunSettings {
    cfg: DifferentiationConfig,
    grid: usize,
    format: OutputFormat,
    out: Option<PathBuf>,
}

fn resolve(
    common: &CommonArgs,
    default_format: OutputFormat,
) -> Result<(Resolved, RunSettings), CliError> {
    let mut settings = config::ConfigSettings::default();
    let mut custom = None;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        let parsed = config::load(&text).map_err(|e| CliError::Config(e.to_string()))?;
        custom = parsed.example;
        settings = parsed.settings;
    }

    let mut cfg = DifferentiationConfig::default();
    if let Some(step) = common.step.or(settings.step) {
        cfg.step = step;
    }
    if let Some(nested) = common.nested_step.or(settings.nested_step) {
        cfg.nested_step = nested;
    }
    if let Some(order) = common.order.or(settings.stencil_order) {
        cfg.stencil_order = StencilOrder::from_u32(order)?;
    }
    cfg.validate()?;

    let format = match common.format {
        Some(f) => f,
        None => match settings.format.as_deref() {
            Some("human") => OutputFormat::Human,
            Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "[output] format: unknown format `{other}`"
                )))
            }
            None => default_format,
        },
    };
    let out = common
        .out
        .clone()
        .or_else(|| settings.out_path.as_ref().map(PathBuf::from));
    let run = RunSettings {
        cfg,
        grid: common.grid.or(settings.grid).unwrap_or(64),
        format,
        out,
    };

    let resolved = match (&common.example, custom) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either --example or a [example] config section, not both".into(),
            ))
        }
        (None, Some(CustomExample::Weighted(w))) => {
            let region = default_region(w.metric.domain());
            Resolved::Weighted {
                id: "custom".into(),
                manifold: w,
                region,
            }
        }
        (None, Some(CustomExample::Submersion(s))) => {
            let base_region = default_region(s.base_chart());
            Resolved::Submersion {
                id: "custom".into(),
                submersion: s,
                base_region,
                expect_hypothesis_failure: false,
            }
        }
        (Some(id), None) => {
            let params = parse_params(&common.params)?;
            let entry = catalog::build(id, &params)?;
            match entry.object.clone() {
                CatalogObject::Weighted(manifold) => Resolved::Weighted {
                    id: entry.id.clone(),
                    manifold,
                    region: entry.sampling_region.clone(),
                },
                CatalogObject::Submersion(submersion) => Resolved::Submersion {
                    id: entry.id.clone(),
                    submersion,
                    base_region: entry.sampling_region.clone(),
                    expect_hypothesis_failure: entry.expect_hypothesis_failure,
                },
                CatalogObject::Family(_) => Resolved::Family { entry },
            }
        }
        (None, None) => {
            return Err(CliError::Config(format!(
                "no example given; use --example <id> (one of: {}) or --config <file>",
                catalog::known_ids().join(", ")
            )))
        }
    };
    Ok((resolved, run))
}

// ---------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------

fn parse_points(args: &[String], dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    args.iter()
        .map(|spec| {
            let coords: Result<Vec<f64>, _> =
                spec.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let coords =
                coords.map_err(|_| CliError::Config(format!("--point `{spec}`: not numbers")))?;
            if coords.len() != dim {
                return Err(CliError::Config(format!(
                    "--point `{spec}`: expected {dim} coordinates, got {}",
                    coords.len()
                )));
            }
            Ok(coords)
        })
        .collect()
}

fn cmd_curvature(args: CurvatureArgs) -> Result<u8, CliError> {
    let (resolved, run) = resolve(&args.common, OutputFormat::Human)?;
    let (id, manifold, region) = match resolved {
        Resolved::Weighted {
            id,
            manifold,
            region,
        } => (id, manifold, region),
        Resolved::Submersion {
            id,
            submersion,
            base_region,
            ..
        } => {
            let mut region = base_region;
            region.extend_from_slice(submersion.fiber_chart().bounds());
            (id, submersion.total_weighted(), region)
        }
        Resolved::Family { .. } => {
            return Err(CliError::Config(
                "curvature needs a point example; use `sweep` for families".into(),
            ))
        }
    };

    let dim = manifold.metric.domain().dim();
    let points = if args.point.is_empty() {
        sample_box(&region, args.common.points.unwrap_or(5), args.common.seed)
    } else {
        parse_points(&args.point, dim)?
    };

    let mut rows = Vec::with_capacity(points.len());
    for x in &points {
        rows.push(modified_scalar_report(&manifold, args.q, x, &run.cfg)?);
    }

    let bytes = match run.format {
        OutputFormat::Human => output::curvature_human(&id, &rows),
        OutputFormat::Json => output::json_lines(&rows),
        OutputFormat::Csv => output::curvature_csv(&rows),
    };
    output::write_bytes(run.out.as_deref(), &bytes)?;
    Ok(0)
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

struct VerifyCtx<'a> {
    s: &'a KKSubmersion,
    id: String,
    expect_fail: bool,
    cfg: DifferentiationConfig,
    grid: Vec<usize>,
    tol_override: Option<f64>,
    hypothesis_tol: f64,
    t_step: f64,
    total_points: Vec<Vec<f64>>,
    base_points: Vec<Vec<f64>>,
    rows: Vec<VerifyRow>,
}

impl VerifyCtx<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }

    fn push(&mut self, rep: &IdentityReport) {
        self.rows.push(VerifyRow::from_report(&self.id, rep));
    }

    fn push_skipped(&mut self, identity: IdentityId, reason: &str) {
        self.rows.push(
            VerifyRow {
                example: self.id.clone(),
                identity: identity.as_str().to_string(),
                samples: 0,
                max_abs_residual: f64::NAN,
                tolerance: f64::NAN,
                passed: false,
                suite_pass: true,
                status: String::new(),
                notes: String::new(),
            }
            .with_status(true, reason),
        );
    }

    /// Runs a hypothesis-gated verifier, translating the expected failure
    /// of flagged catalog entries into a skip instead of an error.
    fn gated<F>(&mut self, identity: IdentityId, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Self) -> Result<(), CoreError>,
    {
        match f(self) {
            Ok(()) => Ok(()),
            Err(CoreError::HypothesisUnmet(msg)) if self.expect_fail => {
                self.push_skipped(identity, &format!("skipped: {msg} (expected here)"));
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let (resolved, run) = resolve(&args.common, OutputFormat::Human)?;
    let (id, s, base_region, expect_fail) = match resolved {
        Resolved::Submersion {
            id,
            submersion,
            base_region,
            expect_hypothesis_failure,
        } => (id, submersion, base_region, expect_hypothesis_failure),
        _ => {
            return Err(CliError::Config(
                "verify requires a submersion example".into(),
            ))
        }
    };

    let mut total_region = base_region.clone();
    total_region.extend_from_slice(s.fiber_chart().bounds());
    let total_points = sample_box(
        &total_region,
        args.common.points.unwrap_or(25),
        args.common.seed,
    );
    let base_points = sample_box(&base_region, args.base_points, args.common.seed ^ 0x5eed);

    let mut ctx = VerifyCtx {
        s: &s,
        id,
        expect_fail,
        cfg: run.cfg,
        grid: vec![run.grid; s.fiber_dim()],
        tol_override: args.common.tol,
        hypothesis_tol: args.hypothesis_tol,
        t_step: args.t_step,
        total_points,
        base_points,
        rows: Vec::new(),
    };

    use IdentityChoice as Ic;
    let selected = |choice: Ic| args.identity == choice || args.identity == Ic::All;

    if selected(Ic::Oneill) {
        let rep = verify_oneill_identity(
            ctx.s,
            &ctx.total_points,
            &ctx.cfg,
            ctx.tol(DELTA_N_IDENTITY_TOL),
        )?;
        ctx.push(&rep);
    }

    if selected(Ic::LaplacianSplit) {
        for f in standard_test_functions(ctx.s) {
            let reps = verify_laplacian_split(
                ctx.s,
                &f,
                &ctx.total_points,
                &ctx.cfg,
                ctx.tol(DEFAULT_IDENTITY_TOL),
            )?;
            ctx.push(&reps.split);
            ctx.push(&reps.pythagoras);
        }
    }

    if selected(Ic::BaseDerivatives) {
        for b in ctx.base_points.clone() {
            let reps = verify_base_derivative_identities(
                ctx.s,
                &b,
                &ctx.grid.clone(),
                &ctx.cfg,
                ctx.tol(DELTA_N_IDENTITY_TOL),
                ctx.hypothesis_tol,
            )?;
            ctx.push(&reps.directional);
            ctx.push(&reps.laplacian);
            if reps.hypothesis_met {
                ctx.push(&reps.gradient_norm);
            } else {
                let row = VerifyRow::from_report(&ctx.id, &reps.gradient_norm).with_status(
                    true,
                    "informational: transport hypothesis unmet, gap reported not asserted",
                );
                ctx.rows.push(row);
            }
        }
    }

    if selected(Ic::MeasureHypothesis) {
        let rep = verify_measure_hypothesis(
            ctx.s,
            &ctx.base_points,
            &ctx.grid,
            &ctx.cfg,
            ctx.hypothesis_tol,
        )?;
        if ctx.expect_fail {
            let suite_pass = !rep.passed;
            let status = if suite_pass {
                "expected-failure pass (hypothesis fails as documented)"
            } else {
                "UNEXPECTED: hypothesis held on an example documented to violate it"
            };
            let row = VerifyRow::from_report(&ctx.id, &rep).with_status(suite_pass, status);
            ctx.rows.push(row);
        } else {
            ctx.push(&rep);
        }
    }

    if selected(Ic::MainEquality) {
        ctx.gated(IdentityId::MainEquality, |ctx| {
            let mut residuals = Vec::new();
            let mut points = Vec::new();
            let tol = ctx.tol(DEFAULT_IDENTITY_TOL);
            for b in &ctx.base_points {
                let rep =
                    verify_main_equality(ctx.s, b, &ctx.grid, &ctx.cfg, tol, ctx.hypothesis_tol)?;
                residuals.push(rep.residual);
                points.push(b.clone());
            }
            let rep = IdentityReport::from_residuals(
                IdentityId::MainEquality,
                points,
                residuals,
                tol,
                "phi^B R^B_inf vs fiber integral of (R^M_inf - R^F_inf + |A|^2 + |T|^2) phi^M",
            );
            ctx.push(&rep);
            Ok(())
        })?;
    }

    if selected(Ic::Theorem22) {
        ctx.gated(IdentityId::Theorem22, |ctx| {
            let rep = verify_theorem2_2(
                ctx.s,
                &ctx.base_points,
                &ctx.grid,
                &ctx.cfg,
                ctx.tol(DEFAULT_IDENTITY_TOL),
                1e-8,
                ctx.hypothesis_tol,
            )?;
            ctx.push(&rep.report);
            ctx.push(&rep.cauchy_schwarz);
            Ok(())
        })?;
    }

    if selected(Ic::LieFiberVolume) {
        let mut residuals = Vec::new();
        let mut points = Vec::new();
        let tol = ctx.tol(DEFAULT_LIE_TOL);
        for b in ctx.base_points.clone() {
            let frame = ctx.s.base_orthonormal_frame(&b)?;
            for dir in &frame {
                let rep = verify_lie_derivative_fiber_volume(
                    ctx.s,
                    &b,
                    dir.as_slice(),
                    &ctx.grid,
                    &ctx.cfg,
                    ctx.t_step,
                    tol,
                )?;
                residuals.push(rep.max_abs_residual);
                points.push(b.clone());
            }
        }
        let rep = IdentityReport::from_residuals(
            IdentityId::LieFiberVolume,
            points,
            residuals,
            tol,
            "flow derivative of fiber volume vs -(X, N) dvol_F, per base frame direction",
        );
        ctx.push(&rep);
    }

    let rows = ctx.rows;
    let bytes = match run.format {
        OutputFormat::Human => output::verify_human(&rows),
        OutputFormat::Json => output::json_lines(&rows),
        OutputFormat::Csv => output::verify_csv(&rows),
    };
    output::write_bytes(run.out.as_deref(), &bytes)?;

    if rows.iter().all(|r| r.suite_pass) {
        Ok(0)
    } else {
        Ok(EXIT_RESIDUAL)
    }
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> Result<u8, CliError> {
    let family_id = match args.family {
        FamilyChoice::Berger => "berger_family",
        FamilyChoice::Product => "product_family",
        FamilyChoice::Warped => "warped_family",
    };
    let default_values = match args.family {
        FamilyChoice::Berger | FamilyChoice::Product => "1,0.5,0.25,0.1",
        FamilyChoice::Warped => "0,0.5",
    };

    let mut common = args.common;
    if common.example.is_some() {
        return Err(CliError::Config(
            "sweep selects its example via --family; drop --example".into(),
        ));
    }
    common.example = Some(family_id.to_string());
    let (resolved, run) = resolve(&common, OutputFormat::Csv)?;
    let Resolved::Family { entry } = resolved else {
        return Err(CliError::Config(format!(
            "`{family_id}` is not a collapse family"
        )));
    };
    let family = entry.as_family().expect("family entry");

    let values: Vec<f64> = args
        .values
        .as_deref()
        .unwrap_or(default_values)
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("--values: `{v}` is not a number")))
        })
        .collect::<Result<_, _>>()?;

    let tol = common.tol.unwrap_or(DELTA_N_IDENTITY_TOL);
    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let s = family.at(value)?;
        let mut total_region = entry.sampling_region.clone();
        total_region.extend_from_slice(s.fiber_chart().bounds());
        let total_points = sample_box(&total_region, common.points.unwrap_or(5), common.seed);
        let base_points = sample_box(
            &entry.sampling_region,
            args.base_points,
            common.seed ^ 0x5eed,
        );
        rows.push(sweep_row(
            &s,
            value,
            &total_points,
            &base_points,
            &vec![run.grid; s.fiber_dim()],
            &run.cfg,
            tol,
        )?);
    }
    rows.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let table = SweepTable {
        family: family_id.to_string(),
        rows,
    };

    let bytes = match run.format {
        OutputFormat::Human => output::sweep_human(&table),
        OutputFormat::Json => output::json_lines(&table.rows),
        OutputFormat::Csv => output::sweep_csv(&table),
    };
    output::write_bytes(run.out.as_deref(), &bytes)?;

    if table.rows.iter().any(|r| r.flagged) {
        Ok(EXIT_RESIDUAL)
    } else {
        Ok(0)
    }
}

fn sweep_row(
    s: &KKSubmersion,
    epsilon: f64,
    total_points: &[Vec<f64>],
    base_points: &[Vec<f64>],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    tol: f64,
) -> Result<SweepRow, CliError> {
    let total = s.total_metric_field();
    let base = s.base_metric_field();

    // R_M extremes over the fibers of the sampled base points, so the
    // lower bound r = r_m_min and the base curvature refer to the same
    // base sample set (min over a fiber <= fiber average <= R^B_q there)
    let fiber_nodes: Vec<Vec<f64>> = subcurv::quad::PeriodicGrid::uniform(s.fiber_chart(), 8)?
        .nodes()
        .collect();
    let mut r_m_min = f64::INFINITY;
    let mut r_m_max = f64::NEG_INFINITY;
    for b in base_points {
        for y in &fiber_nodes {
            let r = scalar_curvature(&total, &s.join(b, y), cfg)?;
            r_m_min = r_m_min.min(r);
            r_m_max = r_m_max.max(r);
        }
    }

    let base_w = s.base_weighted(grid);
    let q = s.fiber_dim() as f64;
    let mut r_b = f64::INFINITY;
    let mut r_b_q = f64::INFINITY;
    for b in base_points {
        r_b = r_b.min(scalar_curvature(&base, b, cfg)?);
        r_b_q = r_b_q.min(modified_scalar_q(&base_w, q, b, cfg)?);
    }

    let oneill = verify_oneill_identity(s, total_points, cfg, tol)?;
    let thm22 = verify_theorem2_2(s, base_points, grid, cfg, tol, 1e-8, DEFAULT_HYPOTHESIS_TOL)?;
    let max_residual = oneill
        .max_abs_residual
        .max(thm22.report.max_abs_residual)
        .max(thm22.cauchy_schwarz.max_abs_residual);

    // desk-scale collapse check: the sampled lower curvature bound of the
    // total space must stay below the base modified curvature (fibers in
    // the catalog have R_F <= 0, so this follows from the q = dim F bound)
    let margin = r_b_q - r_m_min;
    let flagged = max_residual > tol || margin < -tol;

    Ok(SweepRow {
        epsilon,
        r_m_min,
        r_m_max,
        r_b,
        r_b_q,
        margin,
        max_residual,
        flagged,
    })
}
