//! `gkz`: command-line front end for hypergeometric systems of monomial curves.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gkz_core::gamma::{gamma_series, generic_exponents, modified_exponent, singular_exponents};
use gkz_core::gevrey::{dimension_table, gevrey_index_estimate, polynomial_solution, slope_report, Diagonal};
use gkz_core::lattice::DEFAULT_TERM_CAP;
use gkz_core::restriction::{
    b_function, ext1_gevrey_bound, ext1_generator, ext1_generator_slice, ext1_recurrence_solve, ext1_verify,
    homogenize, restrict_decomposition,
};
use gkz_core::series::verify_annihilation;
use gkz_core::system::default_degree_bound;
use gkz_core::{
    build_system, CurveMatrix, Family, GevreyOrder, GkzError, HypergeometricSystem, Rational, RationalVector,
    RestrictionLocus, TruncatedSeries, TruncationFrontier,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gkz", version, about = "Series solutions, Gevrey data and restrictions of GKZ systems for monomial curves")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent vectors of the Γ-series basis.
    Exponents {
        #[command(flatten)]
        system: SystemArgs,
        /// Which exponents to list.
        #[arg(long, value_enum, default_value_t = Point::Singular)]
        point: Point,
    },
    /// Truncated Γ-series of one exponent.
    Series {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        exponent: ExponentArgs,
        #[command(flatten)]
        frontier: FrontierArgs,
    },
    /// Applies every generator of the system to a Γ-series.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        exponent: ExponentArgs,
        #[command(flatten)]
        frontier: FrontierArgs,
    },
    /// Estimates the Gevrey index of a Γ-series along one variable.
    GevreyIndex {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        exponent: ExponentArgs,
        #[command(flatten)]
        frontier: FrontierArgs,
        /// Variable, 1-based (default: the last).
        #[arg(long)]
        var: Option<usize>,
        /// Read coefficients along multiples of this lattice vector instead
        /// of taking the largest coefficient per degree.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ray: Option<Vec<i64>>,
        /// Minimum number of diagonal terms.
        #[arg(long, default_value_t = 30)]
        min_terms: usize,
    },
    /// Slopes along the coordinate hyperplanes.
    Slopes {
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Dimensions of the solution complexes at points of x_n = 0.
    Dims {
        #[command(flatten)]
        system: SystemArgs,
        /// Gevrey order: a rational s >= 1 or "inf".
        #[arg(long = "s")]
        s: String,
    },
    /// Decomposes the restriction to a coordinate subspace.
    Restrict {
        #[command(flatten)]
        system: SystemArgs,
        /// Subspace (default: x0 for homogenized matrices, else the leading variables).
        #[arg(long, value_enum)]
        locus: Option<Locus>,
    },
    /// Homogenizes A to (1 A) with its operators Q_i.
    Homogenize {
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// b-function of (1 ka kb) for the weight (1, 0, 0).
    Bfunction {
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Ext^1 data: the recurrence solution at (epsilon, 0) for plane curves,
    /// the exceptional generator for smooth curves.
    SolveExt1 {
        #[command(flatten)]
        system: SystemArgs,
        /// x1-coordinate of the point on x2 = 0 (plane curves).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        epsilon: String,
        /// Right-hand side (plane curves).
        #[arg(long, value_enum, default_value_t = Rhs::Delta)]
        rhs: Rhs,
        /// Gevrey order for the bound (default b/a).
        #[arg(long = "s")]
        s: Option<String>,
        /// Total degree up to which P(h) = f and E_p(h) = 0 are checked.
        #[arg(long, default_value_t = 40)]
        frontier: u64,
    },
    /// The polynomial solution for beta in NA.
    Polysol {
        #[command(flatten)]
        system: SystemArgs,
    },
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix entries, comma separated, e.g. 2,3 or 1,2,5.
    #[arg(short = 'A', value_delimiter = ',', required = true)]
    a: Vec<u64>,
    /// Treat a leading 1 as the homogenizing column: -A 1,3,4,5 is (1 A) for A = (3 4 5).
    #[arg(long)]
    homogenized: bool,
}

impl MatrixArgs {
    fn matrix(&self) -> Result<CurveMatrix, GkzError> {
        if self.homogenized {
            match self.a.split_first() {
                Some((1, rest)) => CurveMatrix::homogenized(rest),
                _ => Err(GkzError::invalid("--homogenized needs a leading 1")),
            }
        } else {
            CurveMatrix::new(self.a.clone())
        }
    }
}

#[derive(Args)]
struct SystemArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// The parameter beta, an exact rational such as 1 or 7/2.
    #[arg(short = 'b', allow_hyphen_values = true, required = true)]
    beta: String,
    /// Degree bound for the lattice binomials of general matrices (default 2 max A).
    #[arg(long)]
    degree_bound: Option<u64>,
}

impl SystemArgs {
    fn beta(&self) -> Result<Rational, GkzError> {
        self.beta.parse()
    }

    fn system(&self) -> Result<HypergeometricSystem, GkzError> {
        let m = self.matrix.matrix()?;
        let bound = self.degree_bound.unwrap_or_else(|| default_degree_bound(&m));
        build_system(&m, &self.beta()?, bound)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Point {
    Singular,
    Generic,
    Modified,
}

#[derive(Args)]
struct ExponentArgs {
    /// Exponent family.
    #[arg(long, value_enum, default_value_t = Point::Singular)]
    point: Point,
    /// Position within the family.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Explicit exponent, comma separated; overrides --point.
    #[arg(long = "v", value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<String>>,
}

#[derive(Args)]
struct FrontierArgs {
    /// Truncation bound on the weighted degree of the offsets.
    #[arg(long, default_value_t = 40)]
    frontier: u64,
    /// Frontier weights, comma separated (default all 1).
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u64>>,
}

impl FrontierArgs {
    fn frontier(&self, n: usize) -> Result<TruncationFrontier, GkzError> {
        match &self.weights {
            Some(w) => TruncationFrontier::new(w.clone(), self.frontier),
            None => Ok(TruncationFrontier::uniform(n, self.frontier)),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Locus {
    Leading,
    X0,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rhs {
    /// f = 1 in degree 0, zero elsewhere.
    Delta,
    /// f_{k+am} = 1/(m+1).
    Harmonic,
}

enum Failure {
    Gkz(GkzError),
    Env(String),
}

impl From<GkzError> for Failure {
    fn from(e: GkzError) -> Self {
        Failure::Gkz(e)
    }
}

fn term_cap() -> Result<usize, Failure> {
    match std::env::var("GKZ_TERM_CAP") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Env(format!("GKZ_TERM_CAP must be a natural number, got {s:?}"))),
        Err(_) => Ok(DEFAULT_TERM_CAP),
    }
}

fn exponent_list(system: &HypergeometricSystem, point: Point) -> Result<Vec<RationalVector>, GkzError> {
    Ok(match point {
        Point::Singular => singular_exponents(system)?.into_iter().map(|e| e.v).collect(),
        Point::Generic => generic_exponents(system)?.into_iter().map(|e| e.v).collect(),
        Point::Modified => modified_exponent(system)?.into_iter().map(|(_, e)| e.v).collect(),
    })
}

fn chosen_exponent(system: &HypergeometricSystem, args: &ExponentArgs) -> Result<RationalVector, GkzError> {
    if let Some(v) = &args.v {
        let parts: Vec<&str> = v.iter().map(String::as_str).collect();
        return RationalVector::parse(&parts);
    }
    let list = exponent_list(system, args.point)?;
    let len = list.len();
    list.into_iter()
        .nth(args.index)
        .ok_or_else(|| GkzError::invalid(format!("exponent index {} out of range ({len} available)", args.index)))
}

/// Γ-series in the variables of the system; general matrices are expanded
/// in the homogenized variables their exponents live in.
fn series_for(
    system: &HypergeometricSystem,
    args: &ExponentArgs,
    frontier: &FrontierArgs,
) -> Result<(HypergeometricSystem, TruncatedSeries), Failure> {
    let v = chosen_exponent(system, args)?;
    let sys = if v.dim() == system.n() + 1 && matches!(system.matrix.family(), Family::General) {
        let h = CurveMatrix::homogenized(system.matrix.entries())?;
        build_system(&h, &system.beta, default_degree_bound(&h))?
    } else {
        system.clone()
    };
    let f = gamma_series(&v, &sys, &frontier.frontier(sys.n())?, term_cap()?)?;
    Ok((sys, f))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<(Value, Option<String>), Failure> {
    let report = match &cli.command {
        Command::Exponents { system, point } => to_value(&exponent_list(&system.system()?, *point)?),
        Command::Series { system, exponent, frontier } => to_value(&series_for(&system.system()?, exponent, frontier)?.1),
        Command::Verify { system, exponent, frontier } => {
            let (sys, f) = series_for(&system.system()?, exponent, frontier)?;
            let reports = verify_annihilation(&sys.operators(), &f)?;
            json!({
                "annihilated": reports.iter().all(|r| r.is_zero()),
                "terms": f.len(),
                "reports": reports,
            })
        }
        Command::GevreyIndex {
            system,
            exponent,
            frontier,
            var,
            ray,
            min_terms,
        } => {
            let (sys, f) = series_for(&system.system()?, exponent, frontier)?;
            let var = match var {
                Some(0) => return Err(GkzError::invalid("--var is 1-based").into()),
                Some(i) => i - 1,
                None => sys.n() - 1,
            };
            let diagonal = ray.clone().map_or(Diagonal::MaxPerDegree, Diagonal::Ray);
            to_value(&gevrey_index_estimate(&f, var, *min_terms, &diagonal)?)
        }
        Command::Slopes { matrix } => to_value(&slope_report(&matrix.matrix()?)),
        Command::Dims { system, s } => {
            let order: GevreyOrder = s.parse()?;
            let table = dimension_table(&system.matrix.matrix()?, &system.beta()?, &order)?;
            let text = table.render_text();
            return Ok((to_value(&table), Some(text)));
        }
        Command::Restrict { system, locus } => {
            let m = system.matrix.matrix()?;
            let locus = match locus {
                Some(Locus::Leading) => RestrictionLocus::LeadingVariables,
                Some(Locus::X0) => RestrictionLocus::HomogenizingVariable,
                None => RestrictionLocus::default_for(&m),
            };
            to_value(&restrict_decomposition(&m, &system.beta()?, locus)?)
        }
        Command::Homogenize { matrix } => {
            let h = homogenize(&matrix.matrix()?)?;
            json!({
                "aprime": h.aprime.entries(),
                "q_ops": h.q_ops.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "deltas": h.deltas,
                "rhos": h.rhos,
            })
        }
        Command::Bfunction { matrix } => to_value(&b_function(&matrix.matrix()?)?),
        Command::SolveExt1 {
            system,
            epsilon,
            rhs,
            s,
            frontier,
        } => solve_ext1(system, epsilon, *rhs, s.as_deref(), *frontier)?,
        Command::Polysol { system } => to_value(&polynomial_solution(&system.matrix.matrix()?, &system.beta()?)?),
    };
    Ok((report, None))
}

fn solve_ext1(system: &SystemArgs, epsilon: &str, rhs: Rhs, s: Option<&str>, frontier: u64) -> Result<Value, Failure> {
    let m = system.matrix.matrix()?;
    let beta = system.beta()?;
    match m.family() {
        Family::Plane => {
            let (a, b) = (m.a(0), m.a(1));
            let eps: Rational = epsilon.parse()?;
            let s: Rational = match s {
                Some(s) => s.parse()?,
                None => Rational::new(b as i64, a as i64),
            };
            let bound = frontier + a.max(b);
            let len = (bound / a + 1) as usize;
            let f: Vec<Vec<Rational>> = (0..a)
                .map(|k| {
                    (0..len)
                        .map(|mm| match rhs {
                            Rhs::Delta => Rational::from(u64::from(k == 0 && mm == 0)),
                            Rhs::Harmonic => Rational::new(1, mm as i64 + 1),
                        })
                        .collect()
                })
                .collect();
            let h = ext1_recurrence_solve(&m, &eps, &beta, &f, None)?;
            let verification = ext1_verify(&m, &eps, &beta, &f, &h, bound)?;
            let gevrey_bound = ext1_gevrey_bound(&m, &beta, &s, &f, &h)?;
            Ok(json!({
                "h": h,
                "verification": verification,
                "holds": verification.holds(),
                "gevrey_bound": gevrey_bound,
            }))
        }
        Family::Smooth => Ok(json!({
            "generator": ext1_generator(&m, &beta)?,
            "slice": ext1_generator_slice(&m, &beta)?,
        })),
        _ => Err(GkzError::Unsupported(format!("solve-ext1 needs a plane or smooth curve, got {m}")).into()),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(v: &Value, path: &str, out: &mut Vec<(String, String)>) {
    match v {
        Value::Array(items) => {
            let scalars: Option<Vec<String>> = items.iter().map(scalar).collect();
            match scalars {
                Some(s) if !s.is_empty() || path.is_empty() => out.push((path.to_string(), s.join(" "))),
                Some(_) => out.push((path.to_string(), "[]".into())),
                None => {
                    for (i, item) in items.iter().enumerate() {
                        flatten(item, &format!("{path}[{i}]"), out);
                    }
                }
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(item, &p, out);
            }
        }
        other => out.push((path.to_string(), scalar(other).expect("scalar"))),
    }
}

/// Aligned `path  value` lines carrying the same values as the JSON report.
fn render_text(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, "", &mut rows);
    let width = rows.iter().map(|(p, _)| p.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (p, val) in rows {
        let line = if width == 0 { val } else { format!("{p:<width$}  {val}") };
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, text)) => {
            match cli.output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&report).expect("valid JSON")),
                Output::Text => print!("{}", text.unwrap_or_else(|| render_text(&report))),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Env(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Gkz(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                GkzError::ResourceLimit { .. } => 3,
                GkzError::InvariantViolation(_) => 1,
                _ => 2,
            })
        }
    }
}
