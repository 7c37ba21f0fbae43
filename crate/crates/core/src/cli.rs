//! The `graff` command-line tool.
//!
//! Flats travel as one-line JSON documents
//! `{"n": 2, "k": 1, "A": [[1, 0]], "b": [0, 1]}` with basis vectors as rows
//! of `A`. Point clouds are CSV files, one point per row, with an optional
//! header. Every command prints one value or one JSON document per line.
//!
//! Exit codes: 0 on success, 2 for malformed input or usage, 3 when a
//! well-posed request has no answer (`NotSeparable`, `SingularPair`,
//! `NotAFlat`).

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coords::{make_flat, AffineFlat};
use crate::error::GraffError;
use crate::fitting::{
    eiv_line, fit_flat, linear_regression, svm_hyperplane, LabeledCloud, PointCloud,
};
use crate::invariants::{
    betti, dim_gr, dim_graff, dim_psi_minus, dim_psi_plus, dim_schubert_affine, homotopy_group,
    relative_volume, volume_gr, volume_graff, Ambient,
};
use crate::metric::{
    delta_distance, distance, evaluate_geodesic, geodesic, infinite_metric,
    principal_decomposition, DistanceKind,
};
use crate::probability::{
    sample_uniform, LangevinGaussianParams, LangevinGaussianSampler, LangevinParams,
    LangevinSampler, MhConfig, RandomStream,
};
use crate::tolerance::set_default_tolerance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Draws per shard in `graff sample`; shard `s` uses the stream derived from `(seed, s)`.
pub const SAMPLE_SHARD_SIZE: usize = 256;

#[derive(Debug, Parser)]
#[command(
    name = "graff",
    version,
    about = "Affine subspaces as points of the affine Grassmannian"
)]
struct Cli {
    /// Numerical tolerance for rank and membership tests [default: 1e-10, or GRAFF_TOL]
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a coordinate matrix of a flat
    Convert {
        /// Flat document, or - for standard input
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Distance between two flats
    Distance {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(long, default_value = "grassmann")]
        kind: DistanceKind,
        /// Use the metric on flats of all dimensions
        #[arg(long)]
        infinite: bool,
        /// Also print the affine principal angles on a second line
        #[arg(long)]
        verbose: bool,
    },
    /// Points on the minimizing geodesic from f1 (t = 0) to f2 (t = 1)
    Geodesic {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(
            long = "t",
            required = true,
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        t: Vec<f64>,
    },
    /// Dimensions, volumes and topological invariants
    Invariant {
        #[command(subcommand)]
        what: Invariant,
    },
    /// Random flats
    Sample(SampleArgs),
    /// Fit a flat to a point cloud
    Fit {
        /// CSV file, or - for standard input
        cloud: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Dimension of the fitted flat (method flat)
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Stiefel,
    Projection,
    ProjectionAffine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Space {
    Graff,
    Gr,
}

#[derive(Debug, Subcommand)]
enum Invariant {
    /// dim Graff(k, n), or dim Gr(k, n) with --space gr
    Dim {
        k: usize,
        n: usize,
        #[arg(long, value_enum, default_value = "graff")]
        space: Space,
    },
    /// Dimension of the affine Schubert variety of a flag d1 < d2 < ... < dk
    SchubertDim {
        #[arg(required = true)]
        flag: Vec<usize>,
    },
    /// dim of the l-flats containing a k-flat in R^n
    PsiPlus { k: usize, l: usize, n: usize },
    /// dim of the k-flats contained in an l-flat in R^n
    PsiMinus { k: usize, l: usize, n: usize },
    /// Vol Gr(k, n), or Vol Graff(k, n) with --space graff
    Volume {
        k: usize,
        n: usize,
        #[arg(long, value_enum, default_value = "gr")]
        space: Space,
    },
    /// Relative volume of the affine Schubert varieties Ψ±(k, l, n)
    RelativeVolume { k: usize, l: usize, n: usize },
    /// i-th Betti number of Graff(k, n) for n large
    Betti { k: usize, i: usize },
    /// Homotopy group π_r(Graff(k, n)); n may be "inf"
    Homotopy { k: usize, n: String, r: usize },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Distribution {
    Uniform,
    Langevin,
    LangevinGaussian,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long = "dist", value_enum)]
    dist: Distribution,
    /// JSON parameter file
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Flat,
    Regression,
    Eiv,
    Svm,
}

/// One flat as exchanged on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatDocument {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthogonal: Option<bool>,
}

impl FlatDocument {
    pub fn from_flat(flat: &AffineFlat) -> Self {
        let basis = flat.basis();
        FlatDocument {
            n: flat.ambient_dim(),
            k: flat.dim(),
            a: basis
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
            b: flat.offset().iter().copied().collect(),
            orthogonal: Some(true),
        }
    }

    pub fn to_flat(&self) -> Result<AffineFlat, CliError> {
        if self.b.len() != self.n {
            return Err(CliError::input(
                "DimensionError",
                format!("b has {} entries, expected n = {}", self.b.len(), self.n),
            ));
        }
        if self.a.len() != self.k {
            return Err(CliError::input(
                "DimensionError",
                format!("A has {} rows, expected k = {}", self.a.len(), self.k),
            ));
        }
        if let Some(row) = self.a.iter().find(|r| r.len() != self.n) {
            return Err(CliError::input(
                "DimensionError",
                format!(
                    "a row of A has {} entries, expected n = {}",
                    row.len(),
                    self.n
                ),
            ));
        }
        if self.n == 0 {
            return Err(CliError::input("DimensionError", "n must be positive"));
        }
        let mut basis = DMatrix::zeros(self.n, self.k);
        for (j, row) in self.a.iter().enumerate() {
            for (i, &x) in row.iter().enumerate() {
                basis[(i, j)] = x;
            }
        }
        let offset = DVector::from_column_slice(&self.b);
        let flat = if self.orthogonal == Some(true) {
            AffineFlat::from_orthogonal(basis, offset)
        } else {
            make_flat(&basis, &offset)
        };
        Ok(flat?)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("finite document")
    }
}

/// A failed command: the error name, a message and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub name: &'static str,
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn input(name: &'static str, message: impl Into<String>) -> Self {
        CliError {
            name,
            message: message.into(),
            code: EXIT_INPUT,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.name, self.message)
    }
}

impl From<GraffError> for CliError {
    fn from(e: GraffError) -> Self {
        let code = if e.is_domain_error() {
            EXIT_DOMAIN
        } else {
            EXIT_INPUT
        };
        let full = e.to_string();
        let prefix = format!("{}: ", e.name());
        let message = full
            .strip_prefix(&prefix)
            .map(str::to_owned)
            .unwrap_or(full);
        CliError {
            name: e.name(),
            message,
            code,
        }
    }
}

/// Shortest decimal that reads back to the same double; `inf`, `-inf`, `NaN` otherwise.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:?}");
        s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
    } else {
        format!("{x}")
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn read_source(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::input("IoError", format!("standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path)
            .map_err(|e| CliError::input("IoError", format!("{}: {e}", path.display())))
    }
}

pub fn read_flat_document(path: &Path) -> Result<AffineFlat, CliError> {
    let text = read_source(path)?;
    let doc: FlatDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::input("ParseError", format!("{}: {e}", path.display())))?;
    doc.to_flat()
}

/// Parsed CSV: coordinates, and the last column when it holds labels.
struct Table {
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = read_source(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::input("ParseError", format!("{}: {e}", path.display())))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if index == 0 => continue,
            Err(e) => {
                return Err(CliError::input(
                    "ParseError",
                    format!("{}: line {}: {e}", path.display(), index + 1),
                ))
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::input(
            "ParseError",
            format!("{}: no data rows", path.display()),
        ));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(CliError::input(
            "DimensionError",
            format!("{}: rows differ in length", path.display()),
        ));
    }
    Ok(Table { rows })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleParams {
    k: usize,
    n: Option<usize>,
    #[serde(rename = "S")]
    s: Option<Vec<Vec<f64>>>,
    sigma2: Option<f64>,
    step_size: Option<f64>,
    burn_in: Option<usize>,
    thin: Option<usize>,
}

impl SampleParams {
    fn s_matrix(&self) -> Result<DMatrix<f64>, CliError> {
        let rows = self
            .s
            .as_ref()
            .ok_or_else(|| CliError::input("ParseError", "parameter S is required"))?;
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(CliError::input(
                "DimensionError",
                "S must be a nonempty square matrix",
            ));
        }
        Ok(DMatrix::from_row_iterator(
            m,
            m,
            rows.iter().flatten().copied(),
        ))
    }

    fn mh_config(&self) -> MhConfig {
        let d = MhConfig::default();
        MhConfig {
            step_size: self.step_size.unwrap_or(d.step_size),
            burn_in: self.burn_in.unwrap_or(d.burn_in),
            thin: self.thin.unwrap_or(d.thin),
        }
    }
}

enum Sampler {
    Uniform { k: usize, n: usize },
    Langevin(LangevinParams, MhConfig),
    LangevinGaussian(LangevinGaussianParams, MhConfig),
}

impl Sampler {
    fn draw_shard(
        &self,
        rng: &mut RandomStream,
        count: usize,
    ) -> Result<Vec<AffineFlat>, GraffError> {
        match self {
            Sampler::Uniform { k, n } => (0..count).map(|_| sample_uniform(*k, *n, rng)).collect(),
            Sampler::Langevin(params, config) => {
                let mut chain = LangevinSampler::new(params, *config, rng)?;
                (0..count).map(|_| chain.next_sample(rng)).collect()
            }
            Sampler::LangevinGaussian(params, config) => {
                let mut chain = LangevinGaussianSampler::new(params, *config, rng)?;
                (0..count).map(|_| chain.next_sample(rng)).collect()
            }
        }
    }
}

fn build_sampler(dist: Distribution, params: &SampleParams) -> Result<Sampler, CliError> {
    Ok(match dist {
        Distribution::Uniform => {
            let n = params
                .n
                .ok_or_else(|| CliError::input("ParseError", "parameter n is required"))?;
            if params.k >= n {
                return Err(CliError::input(
                    "DimensionError",
                    format!("Graff(k, n) needs k < n, got ({}, {n})", params.k),
                ));
            }
            Sampler::Uniform { k: params.k, n }
        }
        Distribution::Langevin => Sampler::Langevin(
            LangevinParams::new(params.s_matrix()?, params.k)?,
            params.mh_config(),
        ),
        Distribution::LangevinGaussian => {
            let sigma2 = params
                .sigma2
                .ok_or_else(|| CliError::input("ParseError", "parameter sigma2 is required"))?;
            Sampler::LangevinGaussian(
                LangevinGaussianParams::new(params.s_matrix()?, sigma2, params.k)?,
                params.mh_config(),
            )
        }
    })
}

fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_source(&args.params)?;
    let params: SampleParams = serde_json::from_str(&text)
        .map_err(|e| CliError::input("ParseError", format!("{}: {e}", args.params.display())))?;
    let sampler = build_sampler(args.dist, &params)?;

    let shard_sizes: Vec<usize> = (0..args.count.div_ceil(SAMPLE_SHARD_SIZE))
        .map(|s| SAMPLE_SHARD_SIZE.min(args.count - s * SAMPLE_SHARD_SIZE))
        .collect();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(shard_sizes.len())
        .max(1);
    let mut results: Vec<Option<Result<Vec<AffineFlat>, GraffError>>> =
        vec![None; shard_sizes.len()];
    std::thread::scope(|scope| {
        let sampler = &sampler;
        let shard_sizes = &shard_sizes;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..shard_sizes.len())
                        .step_by(workers)
                        .map(|s| {
                            let mut rng = RandomStream::derived(args.seed, s as u64);
                            (s, sampler.draw_shard(&mut rng, shard_sizes[s]))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (s, r) in handle.join().expect("sampling worker panicked") {
                results[s] = Some(r);
            }
        }
    });
    for shard in results {
        for flat in shard.expect("every shard is drawn")? {
            emit(out, FlatDocument::from_flat(&flat).to_line())?;
        }
    }
    Ok(())
}

fn emit(out: &mut dyn Write, line: impl Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::input("IoError", e.to_string()))
}

fn emit_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    emit(out, value)
}

fn cmd_convert(input: &Path, to: Target, out: &mut dyn Write) -> Result<(), CliError> {
    let flat = read_flat_document(input)?;
    let value = match to {
        Target::Stiefel => serde_json::json!(matrix_rows(flat.stiefel_coords().matrix())),
        Target::Projection => serde_json::json!(matrix_rows(flat.projection_coords().matrix())),
        Target::ProjectionAffine => {
            let pair = flat.projection_affine_coords();
            serde_json::json!({
                "P": matrix_rows(&pair.projection),
                "b": pair.offset.iter().copied().collect::<Vec<f64>>(),
            })
        }
    };
    emit_json(out, &value)
}

fn cmd_distance(
    f1: &Path,
    f2: &Path,
    kind: DistanceKind,
    infinite: bool,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let f = read_flat_document(f1)?;
    let g = read_flat_document(f2)?;
    let value = if infinite {
        infinite_metric(&f, &g, kind)?
    } else if f.dim() == g.dim() {
        distance(&f, &g, kind)?
    } else {
        delta_distance(&f, &g, kind)?
    };
    emit(out, format_float(value))?;
    if verbose {
        let angles = principal_decomposition(&f, &g)?.thetas;
        emit(
            out,
            angles
                .iter()
                .map(|&x| format_float(x))
                .collect::<Vec<_>>()
                .join(" "),
        )?;
    }
    Ok(())
}

fn cmd_geodesic(f1: &Path, f2: &Path, ts: &[f64], out: &mut dyn Write) -> Result<(), CliError> {
    let f = read_flat_document(f1)?;
    let g = read_flat_document(f2)?;
    if let Some(t) = ts.iter().find(|t| !t.is_finite()) {
        return Err(CliError::input(
            "InvalidParameter",
            format!("t must be finite, got {t}"),
        ));
    }
    let curve = geodesic(&f, &g)?;
    for &t in ts {
        emit(
            out,
            FlatDocument::from_flat(&evaluate_geodesic(&curve, t)?).to_line(),
        )?;
    }
    Ok(())
}

fn parse_ambient(n: &str) -> Result<Ambient, CliError> {
    match n.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(Ambient::Infinite),
        other => other.parse().map(Ambient::Finite).map_err(|_| {
            CliError::input(
                "ParseError",
                format!("n must be a nonnegative integer or inf, got {n:?}"),
            )
        }),
    }
}

fn cmd_invariant(what: &Invariant, out: &mut dyn Write) -> Result<(), CliError> {
    let line = match *what {
        Invariant::Dim {
            k,
            n,
            space: Space::Graff,
        } => dim_graff(k, n)?.to_string(),
        Invariant::Dim {
            k,
            n,
            space: Space::Gr,
        } => dim_gr(k, n)?.to_string(),
        Invariant::SchubertDim { ref flag } => dim_schubert_affine(flag)?.to_string(),
        Invariant::PsiPlus { k, l, n } => dim_psi_plus(k, l, n)?.to_string(),
        Invariant::PsiMinus { k, l, n } => dim_psi_minus(k, l, n)?.to_string(),
        Invariant::Volume {
            k,
            n,
            space: Space::Gr,
        } => format_float(volume_gr(k, n)?),
        Invariant::Volume {
            k,
            n,
            space: Space::Graff,
        } => format_float(volume_graff(k, n)?),
        Invariant::RelativeVolume { k, l, n } => format_float(relative_volume(k, l, n)?),
        Invariant::Betti { k, i } => betti(k, i).to_string(),
        Invariant::Homotopy { k, ref n, r } => homotopy_group(k, parse_ambient(n)?, r).to_string(),
    };
    emit(out, line)
}

fn cmd_fit(
    cloud: &Path,
    method: Method,
    k: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let table = read_table(cloud)?;
    let width = table.rows[0].len();
    match method {
        Method::Flat | Method::Eiv => {
            let points = PointCloud::from_rows(&table.rows)?;
            let flat = match method {
                Method::Eiv => eiv_line(&points)?,
                _ => {
                    let k = k.ok_or_else(|| {
                        CliError::input("UsageError", "--k is required for --method flat")
                    })?;
                    fit_flat(&points, k)?
                }
            };
            emit(out, FlatDocument::from_flat(&flat).to_line())
        }
        Method::Regression => {
            if width < 2 {
                return Err(CliError::input(
                    "DimensionError",
                    "regression needs at least one predictor and a response column",
                ));
            }
            let p = width - 1;
            let design = DMatrix::from_fn(table.rows.len(), p, |i, j| table.rows[i][j]);
            let response = DVector::from_fn(table.rows.len(), |i, _| table.rows[i][p]);
            let fit = linear_regression(&design, &response)?;
            emit(out, FlatDocument::from_flat(&fit.flat).to_line())?;
            emit_json(
                out,
                &serde_json::json!({
                    "coefficients": fit.coefficients.iter().copied().collect::<Vec<f64>>(),
                    "intercept": fit.intercept,
                }),
            )
        }
        Method::Svm => {
            if width < 2 {
                return Err(CliError::input(
                    "DimensionError",
                    "svm needs at least one coordinate and a label column",
                ));
            }
            let mut points = Vec::with_capacity(table.rows.len());
            let mut labels = Vec::with_capacity(table.rows.len());
            for row in &table.rows {
                let y = row[width - 1];
                if y != 1.0 && y != -1.0 {
                    return Err(CliError::input(
                        "InvalidParameter",
                        format!("labels must be -1 or 1, found {y}"),
                    ));
                }
                labels.push(y as i8);
                points.push(row[..width - 1].to_vec());
            }
            let data = LabeledCloud::new(PointCloud::from_rows(&points)?, labels)?;
            let fit = svm_hyperplane(&data)?;
            emit(out, FlatDocument::from_flat(&fit.flat).to_line())?;
            emit_json(
                out,
                &serde_json::json!({
                    "w": fit.w.iter().copied().collect::<Vec<f64>>(),
                    "beta": fit.beta,
                }),
            )
        }
    }
}

fn apply_tolerance(flag: Option<f64>) -> Result<(), CliError> {
    let (value, source) = match flag {
        Some(t) => (t, "--tol".to_string()),
        None => match std::env::var("GRAFF_TOL") {
            Ok(s) => (
                s.trim().parse::<f64>().map_err(|_| {
                    CliError::input("ParseError", format!("GRAFF_TOL is not a number: {s:?}"))
                })?,
                "GRAFF_TOL".to_string(),
            ),
            Err(_) => return Ok(()),
        },
    };
    if set_default_tolerance(value) {
        Ok(())
    } else {
        Err(CliError::input(
            "InvalidParameter",
            format!("{source} must be positive and finite, got {value}"),
        ))
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    apply_tolerance(cli.tol)?;
    match cli.command {
        Command::Convert { input, to } => cmd_convert(&input, to, out),
        Command::Distance {
            f1,
            f2,
            kind,
            infinite,
            verbose,
        } => cmd_distance(&f1, &f2, kind, infinite, verbose, out),
        Command::Geodesic { f1, f2, t } => cmd_geodesic(&f1, &f2, &t, out),
        Command::Invariant { what } => cmd_invariant(&what, out),
        Command::Sample(args) => cmd_sample(&args, out),
        Command::Fit { cloud, method, k } => cmd_fit(&cloud, method, k, out),
    }
}

/// Run the tool on `args` (including the program name) and return the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut buffer = Vec::new();
    match dispatch(cli, &mut buffer) {
        Ok(()) => {
            if out.write_all(&buffer).and_then(|_| out.flush()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}

/// Run on the process arguments with standard streams.
pub fn run() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
