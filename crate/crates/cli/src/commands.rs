//! Subcommand implementations. Each returns the artifact text that goes to
//! stdout (and, when `--out` is given, atomically to a file).

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use nucleon_core::approx_operator::TrialInput;
use nucleon_core::exponents::ExponentTuple;
use nucleon_core::grid::{GridFunction, TensorGrid};
use nucleon_core::harmonic_oscillator::{
    nuclearity_criterion, trace_f, HermiteSystem, SpectralFunction,
};
use nucleon_core::json::{
    FunctionDoc, GridDoc, GridFunctionDoc, LatticeDoc, PartitionDoc, RepDoc,
    SimpleFunctionDoc, TfDoc,
};
use nucleon_core::mixed_norm::{mixed_norm, seq_mixed_norm};
use nucleon_core::nuclear_ops::{
    discretize, lidskii_check, nuclear_bound, schatten_quasinorm, NystromMode,
};
use nucleon_core::stft_gabor::{
    equivalence_ratio, gabor_coeffs, modulation_norm, stft, symmetric_axis,
    wiener_amalgam_norm, TfPlan, Window, WindowNormalization,
};
use nucleon_core::weights::{SeparableWeight, Weight};

use crate::io;

/// A failed run: message plus the exit code class (2 = validation,
/// 3 = numerical guard).
pub struct CmdError {
    pub message: String,
    pub code: i32,
}

impl CmdError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<nucleon_core::Error> for CmdError {
    fn from(e: nucleon_core::Error) -> Self {
        Self {
            code: if e.is_numerical_guard() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<String> for CmdError {
    fn from(message: String) -> Self {
        CmdError::validation(message)
    }
}

type CmdResult = Result<String, CmdError>;

pub fn parse_exponents(spec: &str) -> Result<ExponentTuple, CmdError> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CmdError::validation(format!("exponent `{tok}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    Ok(ExponentTuple::new(&values)?)
}

/// Weight grammar: `const:<c>` | `poly:<s>` | `freq:<s>`.
pub fn parse_weight(spec: &str, n_axes: usize) -> Result<SeparableWeight, CmdError> {
    let (tag, value) = spec
        .split_once(':')
        .ok_or_else(|| CmdError::validation(format!("weight `{spec}` is not tag:value")))?;
    let v: f64 = value
        .parse()
        .map_err(|_| CmdError::validation(format!("weight parameter `{value}` is not a number")))?;
    match tag {
        "const" => {
            let w = SeparableWeight::new(vec![
                nucleon_core::weights::AxisWeight::Constant(v);
                n_axes
            ])?;
            Ok(w)
        }
        "poly" => Ok(SeparableWeight::polynomial(n_axes, v)?),
        "freq" => {
            if n_axes % 2 != 0 {
                return Err(CmdError::validation(
                    "freq weights need an even number of axes",
                ));
            }
            Ok(SeparableWeight::modulation(n_axes / 2, v)?)
        }
        other => Err(CmdError::validation(format!(
            "unknown weight tag `{other}` (expected const, poly or freq)"
        ))),
    }
}

/// Spectral-function grammar: `exp:<t>` | `power:-<N>` | `table:<path.csv>`.
pub fn parse_spectral(spec: &str) -> Result<SpectralFunction, CmdError> {
    let (tag, value) = spec
        .split_once(':')
        .ok_or_else(|| CmdError::validation(format!("--F `{spec}` is not tag:value")))?;
    match tag {
        "exp" => {
            let t: f64 = value.parse().map_err(|_| {
                CmdError::validation(format!("heat parameter `{value}` is not a number"))
            })?;
            Ok(SpectralFunction::exp_neg(t)?)
        }
        "power" => {
            let n: i64 = value.parse().map_err(|_| {
                CmdError::validation(format!("power exponent `{value}` is not an integer"))
            })?;
            if n >= 0 {
                return Err(CmdError::validation(
                    "power exponents must be negative, as in power:-2",
                ));
            }
            Ok(SpectralFunction::power_neg((-n) as u32)?)
        }
        "table" => {
            let mut reader = csv::Reader::from_path(value)
                .map_err(|e| CmdError::validation(format!("cannot read table {value}: {e}")))?;
            let mut pairs = Vec::new();
            for record in reader.records() {
                let record =
                    record.map_err(|e| CmdError::validation(format!("bad table row: {e}")))?;
                if record.len() != 2 {
                    return Err(CmdError::validation(
                        "spectral table rows must be lambda,value",
                    ));
                }
                let l: f64 = record[0].trim().parse().map_err(|_| {
                    CmdError::validation(format!("table lambda `{}` is not a number", &record[0]))
                })?;
                let v: f64 = record[1].trim().parse().map_err(|_| {
                    CmdError::validation(format!("table value `{}` is not a number", &record[1]))
                })?;
                pairs.push((l, v));
            }
            Ok(SpectralFunction::table(pairs)?)
        }
        other => Err(CmdError::validation(format!(
            "unknown spectral tag `{other}` (expected exp, power or table)"
        ))),
    }
}

fn load_function(path: &Path) -> Result<(GridFunction, TensorGrid), CmdError> {
    let doc: FunctionDoc = io::parse_json(path)?;
    Ok(match doc {
        FunctionDoc::Grid(d) => d.to_parts()?,
        FunctionDoc::Simple(d) => {
            let (sf, grid) = d.to_parts()?;
            (sf.to_grid_function(&grid)?, grid)
        }
    })
}

fn load_window(spec: &str, fallback_grid: &TensorGrid) -> Result<Window, CmdError> {
    if spec == "gaussian" {
        return Ok(Window::gaussian(fallback_grid.clone())?);
    }
    let doc: GridFunctionDoc = io::parse_json(Path::new(spec))?;
    let (values, grid) = doc.to_parts()?;
    Ok(Window::custom(grid, values, WindowNormalization::Raw)?)
}

fn json_pretty<T: Serialize>(value: &T) -> CmdResult {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CmdError::validation(format!("serialization failed: {e}")))
}

pub fn norm(input: &Path, exponents: &str, weight: &str) -> CmdResult {
    let tuple = parse_exponents(exponents)?;
    let doc: FunctionDoc = io::parse_json(input)?;
    let (f, grid) = match doc {
        FunctionDoc::Grid(d) => d.to_parts()?,
        FunctionDoc::Simple(d) => {
            let (sf, grid) = d.to_parts()?;
            (sf.to_grid_function(&grid)?, grid)
        }
    };
    let w = parse_weight(weight, grid.dim())?;
    let value = mixed_norm(&f, &tuple, &Weight::Separable(w.clone()), &grid)?;
    io::csv_table(
        &["exponents", "weight", "value"],
        &[vec![tuple.to_string(), w.tag(), io::fmt17(value)]],
    )
    .map_err(CmdError::validation)
}

pub fn seq_norm(input: &Path, p: f64, q: f64) -> CmdResult {
    let doc: LatticeDoc = io::parse_json(input)?;
    let lattice = doc.to_lattice()?;
    let value = seq_mixed_norm(&lattice, p, q)?;
    io::csv_table(
        &["p", "q", "weight", "value"],
        &[vec![
            io::fmt17(p),
            io::fmt17(q),
            lattice.weight_tag().to_string(),
            io::fmt17(value),
        ]],
    )
    .map_err(CmdError::validation)
}

#[allow(clippy::too_many_arguments)]
pub fn stft_cmd(
    input: &Path,
    window: &str,
    x_extent: f64,
    x_step: f64,
    xi_extent: f64,
    xi_step: f64,
) -> CmdResult {
    let (f, grid) = load_function(input)?;
    let g = load_window(window, &grid)?;
    let x_axis = symmetric_axis(x_extent, x_step)?;
    let xi_axis = symmetric_axis(xi_extent, xi_step)?;
    let tf = stft(&f, &grid, &g, &x_axis, &xi_axis)?;
    json_pretty(&TfDoc::from_tf(&tf))
}

#[allow(clippy::too_many_arguments)]
pub fn mod_norm(
    input: &Path,
    window: &str,
    p: f64,
    q: f64,
    s: f64,
    x_extent: f64,
    x_step: f64,
    xi_extent: f64,
    xi_step: f64,
) -> CmdResult {
    let (f, grid) = load_function(input)?;
    let g = load_window(window, &grid)?;
    let w = SeparableWeight::modulation(1, s)?;
    let plan = TfPlan {
        x_extent,
        x_step,
        xi_extent,
        xi_step,
    };
    let value = modulation_norm(&f, &grid, &g, p, q, &w, &plan)?;
    io::csv_table(
        &["p", "q", "s", "value"],
        &[vec![io::fmt17(p), io::fmt17(q), io::fmt17(s), io::fmt17(value)]],
    )
    .map_err(CmdError::validation)
}

#[allow(clippy::too_many_arguments)]
pub fn wiener_norm(
    input: &Path,
    window: &str,
    p: f64,
    q: f64,
    s: f64,
    x_extent: f64,
    x_step: f64,
    xi_extent: f64,
    xi_step: f64,
    freq_extent: f64,
    freq_step: f64,
) -> CmdResult {
    let (f, grid) = load_function(input)?;
    let g = load_window(window, &grid)?;
    let w = SeparableWeight::modulation(1, s)?;
    let plan = TfPlan {
        x_extent,
        x_step,
        xi_extent,
        xi_step,
    };
    let value = wiener_amalgam_norm(&f, &grid, &g, p, q, &w, &plan, freq_extent, freq_step)?;
    io::csv_table(
        &["p", "q", "s", "value"],
        &[vec![io::fmt17(p), io::fmt17(q), io::fmt17(s), io::fmt17(value)]],
    )
    .map_err(CmdError::validation)
}

#[allow(clippy::too_many_arguments)]
pub fn gabor(
    input: &Path,
    window: &str,
    alpha: f64,
    beta: f64,
    kmax: i64,
    lmax: i64,
    weight: &str,
) -> CmdResult {
    let (f, grid) = load_function(input)?;
    let g = load_window(window, &grid)?;
    let w = parse_weight(weight, 2)?;
    let lattice = gabor_coeffs(&f, &grid, &g, alpha, beta, kmax, lmax, &w)?;
    json_pretty(&LatticeDoc::from_lattice(&lattice))
}

#[derive(Serialize)]
struct EquivalenceOut {
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    ratio: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn equivalence(
    input: &Path,
    window: &str,
    p: f64,
    q: f64,
    weight: &str,
    alpha: f64,
    beta: f64,
    kmax: i64,
    lmax: i64,
    x_extent: f64,
    x_step: f64,
    xi_extent: f64,
    xi_step: f64,
) -> CmdResult {
    let (f, grid) = load_function(input)?;
    let g = load_window(window, &grid)?;
    let w = parse_weight(weight, 2)?;
    let plan = TfPlan {
        x_extent,
        x_step,
        xi_extent,
        xi_step,
    };
    let ratio = equivalence_ratio(&f, &grid, &g, p, q, &w, alpha, beta, kmax, lmax, &plan)?;
    json_pretty(&EquivalenceOut {
        p,
        q,
        alpha,
        beta,
        ratio,
    })
}

#[derive(Serialize)]
struct ApproxCertificate {
    max_ratio: f64,
    argmax_trial: u64,
    argmax_input_digest: String,
    projection_residual: f64,
    trials: u64,
    skipped: u64,
    seed: u64,
}

pub fn approx(partition: &Path, exponents: &str, trials: u64, seed: u64) -> CmdResult {
    let tuple = parse_exponents(exponents)?;
    let doc: PartitionDoc = io::parse_json(partition)?;
    let (part, grid) = doc.to_parts()?;
    let w = part.weight()?;
    let report = nucleon_core::approx_operator::contraction_certificate(
        &part, &tuple, &w, &grid, trials, seed,
    )?;
    let digest = match &report.argmax_input {
        None => String::new(),
        Some(TrialInput::Grid(f)) => {
            let doc = FunctionDoc::Grid(GridFunctionDoc::from_parts(f, &grid));
            sha256_json(&doc)?
        }
        Some(TrialInput::Simple(f)) => {
            let doc = FunctionDoc::Simple(SimpleFunctionDoc::from_parts(f, &grid));
            sha256_json(&doc)?
        }
    };
    let residual =
        nucleon_core::approx_operator::projection_residual(&part, &tuple, &w, &grid, seed)?;
    json_pretty(&ApproxCertificate {
        max_ratio: report.max_ratio,
        argmax_trial: report.argmax_trial,
        argmax_input_digest: digest,
        projection_residual: residual,
        trials,
        skipped: report.skipped,
        seed,
    })
}

fn sha256_json<T: Serialize>(value: &T) -> Result<String, CmdError> {
    let text = serde_json::to_string(value)
        .map_err(|e| CmdError::validation(format!("serialization failed: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Serialize)]
struct NuclearTraceOut {
    trace_re: f64,
    trace_im: f64,
    eigensum_re: f64,
    eigensum_im: f64,
    rel_error: f64,
    nuclear_bound: f64,
    schatten_r: f64,
    r: f64,
}

fn load_rep(
    rep: &Path,
    grid: &Path,
) -> Result<nucleon_core::nuclear_ops::NuclearRep, CmdError> {
    let grid_doc: GridDoc = io::parse_json(grid)?;
    let grid = grid_doc.to_grid()?;
    let rep_doc: RepDoc = io::parse_json(rep)?;
    Ok(rep_doc.to_rep(&grid)?)
}

pub fn nuclear_trace(rep: &Path, grid: &Path, r: f64, symmetric: bool) -> CmdResult {
    let rep = load_rep(rep, grid)?;
    let mode = if symmetric {
        NystromMode::Symmetric
    } else {
        NystromMode::ColumnWeights
    };
    let report = lidskii_check(&rep, mode)?;
    let bound = nuclear_bound(&rep, r)?;
    let op = discretize(&rep, mode)?;
    let schatten = schatten_quasinorm(&op, r)?;
    json_pretty(&NuclearTraceOut {
        trace_re: report.trace.re,
        trace_im: report.trace.im,
        eigensum_re: report.eigensum.re,
        eigensum_im: report.eigensum.im,
        rel_error: report.rel_error,
        nuclear_bound: bound,
        schatten_r: schatten,
        r,
    })
}

#[derive(Serialize)]
struct LidskiiOut {
    trace_re: f64,
    trace_im: f64,
    eigensum_re: f64,
    eigensum_im: f64,
    rel_error: f64,
    r: f64,
    r_within_lidskii_hypothesis: bool,
}

pub fn lidskii(rep: &Path, grid: &Path, symmetric: bool) -> CmdResult {
    let rep = load_rep(rep, grid)?;
    let mode = if symmetric {
        NystromMode::Symmetric
    } else {
        NystromMode::ColumnWeights
    };
    let report = lidskii_check(&rep, mode)?;
    json_pretty(&LidskiiOut {
        trace_re: report.trace.re,
        trace_im: report.trace.im,
        eigensum_re: report.eigensum.re,
        eigensum_im: report.eigensum.im,
        rel_error: report.rel_error,
        r: report.r,
        r_within_lidskii_hypothesis: report.r_within_lidskii_hypothesis,
    })
}

#[derive(Serialize)]
struct SchattenOut {
    r: f64,
    value: f64,
}

pub fn schatten(rep: &Path, grid: &Path, r: f64, symmetric: bool) -> CmdResult {
    let rep = load_rep(rep, grid)?;
    let mode = if symmetric {
        NystromMode::Symmetric
    } else {
        NystromMode::ColumnWeights
    };
    let op = discretize(&rep, mode)?;
    let value = schatten_quasinorm(&op, r)?;
    json_pretty(&SchattenOut { r, value })
}

pub fn hosc_trace(f_spec: &str, d: usize, k: usize) -> CmdResult {
    let f = parse_spectral(f_spec)?;
    let report = trace_f(&f, d, k)?;
    io::csv_table(
        &["f", "d", "k", "value", "tail_bound", "terms"],
        &[vec![
            f.tag(),
            d.to_string(),
            k.to_string(),
            io::fmt17(report.value),
            report.tail_bound.map(io::fmt17).unwrap_or_default(),
            report.terms.to_string(),
        ]],
    )
    .map_err(CmdError::validation)
}

#[allow(clippy::too_many_arguments)]
pub fn hosc_nuclearity(
    f_spec: &str,
    r: f64,
    s: f64,
    p: f64,
    q: f64,
    k: usize,
    tf_extent: Option<f64>,
    tf_step: Option<f64>,
) -> CmdResult {
    let f = parse_spectral(f_spec)?;
    let system = HermiteSystem::new(1, k)?;
    let window = Window::gaussian(system.grid().clone())?;
    let lambda_max = (2 * k + 1) as f64;
    let extent = tf_extent.unwrap_or(((2.0 * lambda_max).sqrt() + 4.0).ceil());
    let step = tf_step.unwrap_or(0.25);
    let plan = TfPlan::square(extent, step);
    let table = nuclearity_criterion(&f, r, s, p, q, &system, &window, k + 1, &plan)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut prev_term: Option<f64> = None;
    for row in &table.rows {
        let ratio = match prev_term {
            Some(t) if t > 0.0 => io::fmt17(row.term / t),
            _ => String::new(),
        };
        rows.push(vec![
            row.j.to_string(),
            io::fmt17(row.lambda),
            io::fmt17(row.norm_primal),
            io::fmt17(row.norm_dual),
            io::fmt17(row.term),
            io::fmt17(row.partial),
            ratio,
        ]);
        prev_term = Some(row.term);
    }
    io::csv_table(
        &[
            "j",
            "lambda",
            "norm_primal",
            "norm_dual",
            "term",
            "partial_sum",
            "term_ratio",
        ],
        &rows,
    )
    .map_err(CmdError::validation)
}
