//! Declarative config files: sectioned key-value text defining a custom
//! example plus differentiation, quadrature and output settings.
//!
//! ```text
//! [example]
//! kind = weighted
//! dim = 2
//! bounds = 0:1, 0:1
//! periodic = true, true
//! metric = 1, 0; 0, 1
//! phi = exp(cos(2*pi*x1))
//!
//! [differentiation]
//! step = 1e-4
//! nested_step = 1e-3
//! stencil_order = 4
//!
//! [quadrature]
//! grid = 64
//!
//! [output]
//! format = csv
//! path = out.csv
//! ```
//!
//! Matrix-valued keys list entries row-major, `,` between entries and `;`
//! between rows; every entry is an expression over the coordinates
//! (`x1..xn` on the base or chart, additionally `y1..yq` on the fiber).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use subcurv::{ChartDomain, DensityField, KKSubmersion, MetricField, WeightedManifold};

use crate::expr::{parse as parse_expr, Expr};

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "config line {}, field `{}`: {}",
            self.line, self.field, self.message
        )
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.into(),
        message: message.into(),
    }
}

/// One `key = value` with its source line, grouped per section.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(p) => &raw_line[..p],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, "<section>", "missing closing `]`"))?
                    .trim()
                    .to_string();
                if !matches!(
                    name.as_str(),
                    "example" | "differentiation" | "quadrature" | "output"
                ) {
                    return Err(err(
                        line_no,
                        &name,
                        "unknown section (expected [example], [differentiation], \
                         [quadrature] or [output])",
                    ));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(line_no, line, "expected `key = value`"));
            };
            let section = current
                .clone()
                .ok_or_else(|| err(line_no, key.trim(), "key appears before any [section]"))?;
            let prev = sections
                .get_mut(&section)
                .expect("section exists")
                .insert(key.trim().to_string(), (line_no, value.trim().to_string()));
            if prev.is_some() {
                return Err(err(line_no, key.trim(), "duplicate key in section"));
            }
        }
        Ok(Self { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn require(&self, section: &str, key: &str) -> Result<&(usize, String), ConfigError> {
        self.get(section, key).ok_or_else(|| {
            err(
                0,
                key,
                format!("missing required key `{key}` in [{section}]"),
            )
        })
    }
}

fn parse_f64(line: usize, field: &str, text: &str) -> Result<f64, ConfigError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| err(line, field, format!("not a number: `{text}`")))
}

fn parse_usize(line: usize, field: &str, text: &str) -> Result<usize, ConfigError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| err(line, field, format!("not a positive integer: `{text}`")))
}

fn parse_bounds(line: usize, field: &str, text: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    text.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| err(line, field, format!("expected `lo:hi`, got `{part}`")))?;
            Ok((parse_f64(line, field, lo)?, parse_f64(line, field, hi)?))
        })
        .collect()
}

fn parse_bools(line: usize, field: &str, text: &str) -> Result<Vec<bool>, ConfigError> {
    text.split(',')
        .map(|part| match part.trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(err(
                line,
                field,
                format!("expected true/false, got `{other}`"),
            )),
        })
        .collect()
}

/// Parses a `rows x cols` matrix of expressions.
fn parse_matrix_exprs(
    line: usize,
    field: &str,
    text: &str,
    rows: usize,
    cols: usize,
    vars: &[&str],
) -> Result<Vec<Expr>, ConfigError> {
    let row_texts: Vec<&str> = text.split(';').collect();
    if row_texts.len() != rows {
        return Err(err(
            line,
            field,
            format!(
                "expected {rows} rows separated by `;`, got {}",
                row_texts.len()
            ),
        ));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for row in row_texts {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != cols {
            return Err(err(
                line,
                field,
                format!("expected {cols} entries per row, got {}", entries.len()),
            ));
        }
        for entry in entries {
            out.push(
                parse_expr(entry, vars)
                    .map_err(|e| err(line, field, format!("in `{}`: {e}", entry.trim())))?,
            );
        }
    }
    Ok(out)
}

fn var_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

/// A user-supplied example constructed from a config file.
pub enum CustomExample {
    Weighted(WeightedManifold),
    Submersion(KKSubmersion),
}

/// Differentiation, quadrature and output settings a config file may
/// override.
#[derive(Debug, Default, Clone)]
pub struct ConfigSettings {
    pub step: Option<f64>,
    pub nested_step: Option<f64>,
    pub stencil_order: Option<u32>,
    pub grid: Option<usize>,
    pub format: Option<String>,
    pub out_path: Option<String>,
}

pub struct ParsedConfig {
    pub example: Option<CustomExample>,
    pub settings: ConfigSettings,
}

pub fn load(text: &str) -> Result<ParsedConfig, ConfigError> {
    let raw = RawConfig::parse(text)?;
    let example = if raw.has_section("example") {
        Some(build_example(&raw)?)
    } else {
        None
    };

    let mut settings = ConfigSettings::default();
    if let Some((line, v)) = raw.get("differentiation", "step") {
        settings.step = Some(parse_f64(*line, "step", v)?);
    }
    if let Some((line, v)) = raw.get("differentiation", "nested_step") {
        settings.nested_step = Some(parse_f64(*line, "nested_step", v)?);
    }
    if let Some((line, v)) = raw.get("differentiation", "stencil_order") {
        settings.stencil_order = Some(parse_usize(*line, "stencil_order", v)? as u32);
    }
    if let Some((line, v)) = raw.get("quadrature", "grid") {
        settings.grid = Some(parse_usize(*line, "grid", v)?);
    }
    if let Some((_, v)) = raw.get("output", "format") {
        settings.format = Some(v.clone());
    }
    if let Some((_, v)) = raw.get("output", "path") {
        settings.out_path = Some(v.clone());
    }
    Ok(ParsedConfig { example, settings })
}

fn build_example(raw: &RawConfig) -> Result<CustomExample, ConfigError> {
    let (kind_line, kind) = raw.require("example", "kind")?;
    match kind.as_str() {
        "weighted" | "manifold" => build_weighted(raw),
        "submersion" => build_submersion(raw),
        other => Err(err(
            *kind_line,
            "kind",
            format!("unknown kind `{other}` (expected weighted or submersion)"),
        )),
    }
}

fn build_weighted(raw: &RawConfig) -> Result<CustomExample, ConfigError> {
    let (line, v) = raw.require("example", "dim")?;
    let dim = parse_usize(*line, "dim", v)?;
    let (line, v) = raw.require("example", "bounds")?;
    let bounds = parse_bounds(*line, "bounds", v)?;
    let (line, v) = raw.require("example", "periodic")?;
    let periodic = parse_bools(*line, "periodic", v)?;
    if bounds.len() != dim || periodic.len() != dim {
        return Err(err(
            *line,
            "periodic",
            format!("bounds and periodic must list {dim} axes"),
        ));
    }
    let chart =
        ChartDomain::new(bounds, periodic).map_err(|e| err(*line, "bounds", e.to_string()))?;

    let names = var_names("x", dim);
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let (line, v) = raw.require("example", "metric")?;
    let metric_exprs = parse_matrix_exprs(*line, "metric", v, dim, dim, &name_refs)?;
    let metric = MetricField::new(chart.clone(), move |x: &[f64]| {
        DMatrix::from_fn(dim, dim, |i, j| metric_exprs[i * dim + j].eval(x))
    });

    let phi = match raw.get("example", "phi") {
        Some((line, v)) => {
            let e = parse_expr(v, &name_refs).map_err(|pe| err(*line, "phi", pe.to_string()))?;
            DensityField::new(chart, move |x: &[f64]| e.eval(x))
        }
        None => DensityField::constant_one(chart),
    };
    Ok(CustomExample::Weighted(WeightedManifold::new(metric, phi)))
}

fn build_submersion(raw: &RawConfig) -> Result<CustomExample, ConfigError> {
    let (line, v) = raw.require("example", "base_dim")?;
    let n = parse_usize(*line, "base_dim", v)?;
    let (line, v) = raw.require("example", "fiber_dim")?;
    let q = parse_usize(*line, "fiber_dim", v)?;

    let (line, v) = raw.require("example", "base_bounds")?;
    let base_bounds = parse_bounds(*line, "base_bounds", v)?;
    let (line, v) = raw.require("example", "base_periodic")?;
    let base_periodic = parse_bools(*line, "base_periodic", v)?;
    let base = ChartDomain::new(base_bounds, base_periodic)
        .map_err(|e| err(*line, "base_bounds", e.to_string()))?;

    let (line, v) = raw.require("example", "fiber_bounds")?;
    let fiber_bounds = parse_bounds(*line, "fiber_bounds", v)?;
    let fiber = ChartDomain::new(fiber_bounds, vec![true; q])
        .map_err(|e| err(*line, "fiber_bounds", e.to_string()))?;

    let base_names = var_names("x", n);
    let base_refs: Vec<&str> = base_names.iter().map(|s| s.as_str()).collect();
    let mut all_names = base_names.clone();
    all_names.extend(var_names("y", q));
    let all_refs: Vec<&str> = all_names.iter().map(|s| s.as_str()).collect();

    let (line, v) = raw.require("example", "g_base")?;
    let gb_exprs = parse_matrix_exprs(*line, "g_base", v, n, n, &base_refs)?;
    let (line, v) = raw.require("example", "g_fiber")?;
    let gf_exprs = parse_matrix_exprs(*line, "g_fiber", v, q, q, &all_refs)?;
    let (line, v) = raw.require("example", "connection")?;
    let conn_exprs = parse_matrix_exprs(*line, "connection", v, q, n, &all_refs)?;

    let join = move |x: &[f64], y: &[f64]| {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        p
    };
    let gb = move |x: &[f64]| DMatrix::from_fn(n, n, |i, j| gb_exprs[i * n + j].eval(x));
    let gf = move |x: &[f64], y: &[f64]| {
        let p = join(x, y);
        DMatrix::from_fn(q, q, |i, j| gf_exprs[i * q + j].eval(&p))
    };
    let conn = move |x: &[f64], y: &[f64]| {
        let p = join(x, y);
        DMatrix::from_fn(q, n, |i, j| conn_exprs[i * n + j].eval(&p))
    };

    let s = KKSubmersion::new(base, fiber, gb, gf, conn)
        .map_err(|e| err(0, "example", e.to_string()))?;
    let s = match raw.get("example", "phi") {
        Some((line, v)) => {
            let e = parse_expr(v, &all_refs).map_err(|pe| err(*line, "phi", pe.to_string()))?;
            s.with_density(move |x: &[f64], y: &[f64]| {
                let p = join(x, y);
                e.eval(&p)
            })
        }
        None => s,
    };
    Ok(CustomExample::Submersion(s))
}
