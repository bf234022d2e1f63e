//! Command-line front end: argument parsing, table and report emission.
//!
//! Exit codes: 0 when every requested check passes, 1 when a verification fails
//! or a computation cannot finish, 2 on a usage or parameter error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::coherent::{gaussian_density, kernel_k, overlap, projector_reconstruct, RadialSpec};
use crate::error::{Error, Result};
use crate::fock::Truncation;
use crate::hermite::{poly_eval, FamilyKind, PolyFamily};
use crate::qkernel::DeformationParams;
use crate::quantize::{prob_density, quantize_angle, quantize_general, quantize_monomial, quantize_radial, trajectory, FourierSpec, QuantizeSpec};
use crate::report::{csv_field, fmt_f64, Suite};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qosc", version, about = "Numerics and identity checks for the (q; l, λ)-deformed Heisenberg algebra")]
pub struct Cli {
    /// Deformation parameter q (0 < q < 1 or q > 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Scale l² of the commutator
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lsq: Option<f64>,
    /// Shift λ of the commutator exponent
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Fock-space truncation dimension
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Output format (tables default to csv, reports to json)
    #[arg(long, global = true, value_enum)]
    pub out: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized spot-check selection
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Symbol {
    /// g(|z|²) = |z|^(2·power), diagonal
    Radial,
    /// the angle arg z ∈ [0, 2π), Fourier series cut at the dimension
    Angle,
    /// z^mu zbar^nu, closed form
    Monomial,
    /// z^mu zbar^nu by two-dimensional quadrature
    GeneralSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Weight {
    /// rotation-invariant Gaussian analogue 1/𝒩(|z|²)
    Gaussian,
    /// |n><m| rebuilt from coherent-state projectors
    Projector,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
pub enum Command {
    /// Deformed Hermite polynomials from the three-term recursion
    /// h_{n+1} = 2x h_n − β_n h_{n−1}, h_0 = 1; one row per (x, degree).
    HermiteTable {
        /// pos-sub, mom-sub (q<1) or pos-super, mom-super (q>1)
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        /// lo:hi:step
        #[arg(long, default_value = "-2:2:0.5", allow_hyphen_values = true)]
        grid: String,
    },
    /// Coherent-state overlap <z1|z2> = 𝒩(z̄1 z2)/√(𝒩(|z1|²)𝒩(|z2|²)).
    CsOverlap {
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        /// one or more second arguments
        #[arg(long, required = true, num_args = 1.., allow_hyphen_values = true)]
        z2: Vec<String>,
    },
    /// Reproducing kernel K(z, ζ) = <ζ|z> w(|ζ|²) on a square grid of z.
    KernelGrid {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        zeta: String,
        /// lo:hi:step for both Re z and Im z; points outside the domain are skipped
        #[arg(long, default_value = "-1:1:0.25", allow_hyphen_values = true)]
        grid: String,
    },
    /// Diagonal-representation coefficients ρ(n, m) = ∫ φ(z) |z><z| dμ.
    Density {
        #[arg(long, value_enum, default_value_t = Weight::Gaussian)]
        weight: Weight,
        /// row of the projector |n><m|
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// column of the projector |n><m|
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
    /// Traces in the Gaussian-analogue state: closed forms vs spectral sums
    /// Σ ρ(n,n) λ_n, integrals of normal symbols, Kerr and position expectations.
    Traces,
    /// Anti-Wick (coherent-state) quantization A_f = ∫ f(z) |z><z| dμ as a matrix.
    Quantize {
        #[arg(long = "f", value_enum)]
        symbol: Symbol,
        /// power of z
        #[arg(long, default_value_t = 0)]
        mu: usize,
        /// power of z̄
        #[arg(long, default_value_t = 0)]
        nu: usize,
        /// exponent of |z|² for the radial symbol
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        power: f64,
    },
    /// Coherent-state time evolution ž(t) under H = a†a, with the optional
    /// probability density |<z|e^{−iHt}|z0>|² at a fixed point.
    Evolve {
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// point z at which to add the density column
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Hopf structure on the truncated tensor products: coassociativity, counit,
    /// antipode and the α-commutator identities (default dim 8, at most 32).
    HopfVerify {
        /// free constant of the antipode
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c13: f64,
    },
    /// The full invariant suite, at one parameter point if --q/--lsq/--lambda
    /// are given, else on q ∈ {0.5, 2}, l² = 1, λ ∈ {0, 1}; plus seeded spot checks.
    Verify {
        /// number of randomized spot checks per point
        #[arg(long, default_value_t = 16)]
        spot: usize,
    },
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// None selects the default grid (verify only).
    pub params: Option<DeformationParams>,
    pub dim: usize,
    pub command: Command,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let explicit = cli.q.is_some() || cli.lsq.is_some() || cli.lambda.is_some();
        let params = if explicit || !matches!(cli.command, Command::Verify { .. }) {
            Some(DeformationParams::new(cli.q.unwrap_or(0.5), cli.lsq.unwrap_or(1.0), cli.lambda.unwrap_or(0.0))?)
        } else {
            None
        };
        let default_dim = match cli.command {
            Command::HopfVerify { .. } => 8,
            _ => 64,
        };
        let dim = cli.dim.unwrap_or(default_dim);
        if dim == 0 {
            return Err(Error::Parameter("--dim must be positive".into()));
        }
        let report = matches!(cli.command, Command::Traces | Command::HopfVerify { .. } | Command::Verify { .. });
        let format = cli.out.unwrap_or(if report { Format::Json } else { Format::Csv });
        Ok(Self { params, dim, command: cli.command, format, output: cli.output, seed: cli.seed })
    }

    fn params(&self) -> DeformationParams {
        self.params.expect("parameters are resolved for every command but verify")
    }
}

/// Parses a complex number written as `a`, `bi`, `a+bi`, `a-bi` or `a,b`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parameter(format!("cannot read '{s}' as a complex number (use a+bi)"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    if let Some((a, b)) = t.split_once(',') {
        return Ok(Complex64::new(num(a)?, num(b)?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(x),
    };
    match split {
        Some(k) => Ok(Complex64::new(num(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// `lo:hi:step` to the points lo, lo+step, …, hi.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parameter(format!("cannot read '{s}' as a grid (use lo:hi:step with step > 0 and lo <= hi)"));
    let parts: Vec<f64> = s.split(':').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::Parameter(format!("grid '{s}' has more than a million points")));
    }
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => csv_field(s),
        }
    }
}

/// A rectangular table with named columns; complex values occupy two columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    fn render(&self, f: Format) -> String {
        match f {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn matrix_table(m: &nalgebra::DMatrix<Complex64>) -> Table {
    let mut t = Table::new(&["row", "col", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            t.rows.push(vec![Cell::Int(i), Cell::Int(j), Cell::Num(v.re), Cell::Num(v.im)]);
        }
    }
    t
}

/// What a command produced: a data table, or a check report deciding the exit code.
pub enum Output {
    Table(Table),
    Report(Suite),
}

impl Output {
    pub fn render(&self, f: Format) -> String {
        match (self, f) {
            (Output::Table(t), f) => t.render(f),
            (Output::Report(s), Format::Csv) => s.to_csv(),
            (Output::Report(s), Format::Json) => s.to_json() + "\n",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Output::Report(s) if !s.all_pass() => EXIT_FAILED,
            _ => EXIT_OK,
        }
    }
}

/// Runs a validated configuration and returns its output.
pub fn execute(cfg: &RunConfig) -> Result<Output> {
    let dim = cfg.dim;
    match &cfg.command {
        Command::HermiteTable { family, nmax, grid } => {
            let p = cfg.params();
            let fam = PolyFamily::new(FamilyKind::parse(family)?, p)?;
            let mut t = Table::new(&["family", "q", "lsq", "lambda", "x", "degree", "value"]);
            for x in parse_grid(grid)? {
                for (n, v) in poly_eval(&fam, x, *nmax).values.into_iter().enumerate() {
                    t.rows.push(vec![
                        Cell::Text(family.clone()),
                        Cell::Num(p.q()),
                        Cell::Num(p.lsq()),
                        Cell::Num(p.lambda()),
                        Cell::Num(x),
                        Cell::Int(n),
                        Cell::Num(v),
                    ]);
                }
            }
            Ok(Output::Table(t))
        }
        Command::CsOverlap { z1, z2 } => {
            let p = cfg.params();
            let a = parse_complex(z1)?;
            let mut t = Table::new(&["z1_re", "z1_im", "z2_re", "z2_im", "re", "im"]);
            for s in z2 {
                let b = parse_complex(s)?;
                let v = overlap(&p, a, b)?;
                t.rows.push([a.re, a.im, b.re, b.im, v.re, v.im].into_iter().map(Cell::Num).collect());
            }
            Ok(Output::Table(t))
        }
        Command::KernelGrid { zeta, grid } => {
            let p = cfg.params();
            let zeta = parse_complex(zeta)?;
            p.require_domain(zeta.norm_sqr())?;
            let axis = parse_grid(grid)?;
            let mut t = Table::new(&["z_re", "z_im", "zeta_re", "zeta_im", "re", "im"]);
            for &x in &axis {
                for &y in &axis {
                    let z = Complex64::new(x, y);
                    if !p.in_domain(z.norm_sqr()) {
                        continue;
                    }
                    let k = kernel_k(&p, z, zeta)?.value;
                    t.rows.push([x, y, zeta.re, zeta.im, k.re, k.im].into_iter().map(Cell::Num).collect());
                }
            }
            Ok(Output::Table(t))
        }
        Command::Density { weight, n, m } => {
            let p = cfg.params();
            let trunc = Truncation::new(dim)?;
            let rho = match weight {
                Weight::Gaussian => gaussian_density(&p, trunc, &RadialSpec::default())?.rho,
                Weight::Projector => {
                    if *n >= dim || *m >= dim {
                        return Err(Error::Truncation { needed: n.max(m) + 1, dim });
                    }
                    projector_reconstruct(&p, *n, *m, trunc)?
                }
            };
            Ok(Output::Table(matrix_table(&rho)))
        }
        Command::Traces => Ok(Output::Report(verify::traces(&cfg.params(), dim))),
        Command::Quantize { symbol, mu, nu, power } => {
            let p = cfg.params();
            let trunc = Truncation::new(dim)?;
            let spec = QuantizeSpec::default();
            let op = match symbol {
                Symbol::Monomial => quantize_monomial(&p, *mu, *nu, trunc)?,
                Symbol::GeneralSpec => {
                    let (mu, nu) = (*mu as i32, *nu as i32);
                    let growth = ((mu + nu) as usize).div_ceil(2) + 2;
                    quantize_general(&p, |z| z.powi(mu) * z.conj().powi(nu), trunc, &QuantizeSpec { growth, ..spec })?
                }
                Symbol::Radial => {
                    let growth = power.max(0.0).ceil() as usize + 2;
                    quantize_radial(&p, |x| x.powf(*power), trunc, &QuantizeSpec { growth, ..spec })?
                }
                Symbol::Angle => quantize_angle(&p, &FourierSpec::angle(dim), trunc, &spec.radial)?,
            };
            Ok(Output::Table(matrix_table(&op.matrix)))
        }
        Command::Evolve { z0, tmax, steps, at } => {
            let p = cfg.params();
            let z0 = parse_complex(z0)?;
            if !(tmax.is_finite() && *tmax >= 0.0) {
                return Err(Error::Parameter("--tmax must be finite and non-negative".into()));
            }
            let at = at.as_deref().map(parse_complex).transpose()?;
            let mut cols = vec!["t", "re", "im"];
            if at.is_some() {
                cols.push("density");
            }
            let mut t = Table::new(&cols);
            for pt in trajectory(&p, z0, *tmax, *steps)? {
                let mut row = vec![Cell::Num(pt.t), Cell::Num(pt.value.re), Cell::Num(pt.value.im)];
                if let Some(z) = at {
                    row.push(Cell::Num(prob_density(&p, z0, z, pt.t)?));
                }
                t.rows.push(row);
            }
            Ok(Output::Table(t))
        }
        Command::HopfVerify { c13 } => {
            let p = cfg.params();
            if !(2..=crate::hopf::MAX_TENSOR_DIM).contains(&dim) {
                return Err(Error::Parameter(format!("hopf-verify needs 2 <= --dim <= {}", crate::hopf::MAX_TENSOR_DIM)));
            }
            Ok(Output::Report(verify::hopf_axioms(&p, dim, *c13)))
        }
        Command::Verify { spot } => {
            let points = match cfg.params {
                Some(p) => vec![p],
                None => verify::default_grid(),
            };
            let mut s = verify::run(&points, dim);
            for (k, p) in points.iter().enumerate() {
                s.extend(verify::spot_checks(p, cfg.seed.wrapping_add(k as u64), *spot));
            }
            Ok(Output::Report(s))
        }
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Parameter(_) | Error::Regime { .. } | Error::Domain(_) | Error::Support(_) | Error::Truncation { .. })
}

/// Parses `argv` (program name first), runs the command and writes its output.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage(&e) { EXIT_USAGE } else { EXIT_FAILED };
        }
    };
    let text = out.render(cfg.format);
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_FAILED;
    }
    out.exit_code()
}
