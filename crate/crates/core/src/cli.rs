//! Command-line front end.
//!
//! Exit codes: 0 success or pass, 1 property violation, 2 input error,
//! 3 Laurent violation during mutation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::pattern::{d_matrix_of, g_matrix_of, Budget, ExploredPattern, VarId};
use crate::seed::{join, ExchangeMatrix, Seed};
use crate::semifield::TropMonomial;
use crate::verify::{self, ClusterFamily, ExpansionTable, Memoized, VerificationReport};
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LAURENT: i32 = 3;

/// Seed definition file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "Y")]
    pub y: Coefficients,
    #[serde(default)]
    pub names: Option<Names>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    Marker(String),
    Exponents(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Names {
    #[serde(default)]
    pub x: Vec<String>,
    #[serde(default)]
    pub y: Vec<String>,
}

impl SeedFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("seed file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The root seed described by the file.
    pub fn seed(&self) -> Result<Seed> {
        Error::check_len(self.n, self.b.len())?;
        let matrix = ExchangeMatrix::new(self.b.clone())?;
        let coeffs = match &self.y {
            Coefficients::Marker(s) if s == "principal" => {
                if let Some(m) = self.m {
                    Error::check_len(self.n, m)?;
                }
                (0..self.n)
                    .map(|i| TropMonomial::generator(self.n, i))
                    .collect()
            }
            Coefficients::Marker(s) => {
                return Err(Error::Parse(format!(
                    "Y must be exponent vectors or \"principal\", got {s:?}"
                )))
            }
            Coefficients::Exponents(rows) => {
                Error::check_len(self.n, rows.len())?;
                let m = self.m.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
                for r in rows {
                    Error::check_len(m, r.len())?;
                }
                rows.iter().map(|r| TropMonomial::new(r.clone())).collect()
            }
        };
        let seed = Seed::root(matrix, coeffs)?;
        if let Some(names) = &self.names {
            if !names.x.is_empty() {
                Error::check_len(self.n, names.x.len())?;
            }
            if !names.y.is_empty() {
                Error::check_len(seed.coeff_rank(), names.y.len())?;
            }
        }
        Ok(seed)
    }
}

#[derive(Debug, Parser)]
#[command(name = "glp", version, about = "Exact cluster-pattern engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a seed file; print the symmetrizer and acyclicity.
    Check { seed: PathBuf },
    /// Print the seed reached along a word.
    Mutate {
        seed: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Explore the exchange tree; print the pattern dump and a closure report.
    Explore {
        seed: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Also write root-relative expansions in table format.
        #[arg(long)]
        expansions: Option<PathBuf>,
    },
    /// D-matrix of the cluster at `--at` relative to `--ref`.
    Dvec(MatrixArgs),
    /// G-matrix of the cluster at `--at` relative to `--ref`.
    Gvec(MatrixArgs),
    /// Check a property on an explored region or an imported table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 20_000)]
    max_vertices: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_depth: self.depth,
            max_vertices: self.max_vertices,
        }
    }
}

#[derive(Debug, Args)]
struct MatrixArgs {
    seed: PathBuf,
    #[arg(long)]
    at: String,
    #[arg(long = "ref", default_value = "-")]
    reference: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PropertyArg {
    Positive,
    DPositive,
    ProperLaurent,
    LinIndep,
    GInjective,
    GUnimodular,
    GComposition,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Seed file, or an expansion table with `--table`.
    input: PathBuf,
    property: PropertyArg,
    /// Read `input` as an expansion table instead of a seed file.
    #[arg(long)]
    table: bool,
    /// Total degree bound for monomial properties.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Reference vertex; properties over all references ignore it.
    #[arg(long = "ref", default_value = "-")]
    reference: String,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Also write the report summary as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Parses a 1-based, comma-separated word within rank `n`.
fn parse_word(s: &str, n: usize) -> Result<Word> {
    let w: Word = s.parse()?;
    w.check_rank(n)?;
    Ok(w)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LaurentViolation { .. } => EXIT_LAURENT,
        _ => EXIT_INPUT,
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Parallel work is capped by `GLP_THREADS` when set.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let threads = std::env::var("GLP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0);
    let mut buf: Vec<u8> = Vec::new();
    let result = match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &mut buf)),
            Err(e) => Err(Error::Invalid(format!("thread pool: {e}"))),
        },
        None => execute(&cli.command, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Invalid(format!("write failed: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Check { seed } => {
            let file = SeedFile::load(seed)?;
            let s = file.seed()?;
            let m = s.matrix();
            write(
                out,
                &format!(
                    "n\t{}\nm\t{}\nsymmetrizer\t({})\nacyclic\t{}\n",
                    s.rank(),
                    s.coeff_rank(),
                    join(m.symmetrizer()),
                    m.is_acyclic()
                ),
            )?;
        }
        Command::Mutate { seed, word } => {
            let s = SeedFile::load(seed)?.seed()?;
            let w = parse_word(word, s.rank())?;
            write(out, &s.mutate_along(&w)?.to_text())?;
        }
        Command::Explore {
            seed,
            budget,
            expansions,
        } => {
            let s = SeedFile::load(seed)?.seed()?;
            let p = ExploredPattern::explore(s, budget.budget())?;
            write(out, &p.dump_tsv()?)?;
            let r = p.finite_type_report();
            let state = if r.closed { "closed" } else { "truncated" };
            write(
                out,
                &format!(
                    "{state}, clusters={}, variables={}\n",
                    r.cluster_count, r.variable_count
                ),
            )?;
            if let Some(path) = expansions {
                write_file(path, &ExpansionTable::from_family(&p, &[])?.to_text())?;
            }
        }
        Command::Dvec(args) | Command::Gvec(args) => {
            let s = SeedFile::load(&args.seed)?.seed()?;
            let at = parse_word(&args.at, s.rank())?;
            let reference = parse_word(&args.reference, s.rank())?;
            let base = s.mutate_along(&reference)?.as_root();
            let cluster = base
                .mutate_along(&reference.path_to(&at))?
                .cluster()
                .to_vec();
            let matrix: IntMatrix = if matches!(command, Command::Dvec(_)) {
                d_matrix_of(&at, &reference, &cluster)?.matrix
            } else {
                g_matrix_of(&at, &reference, &cluster)?.matrix
            };
            let mut text = format!("at\t{at}\nref\t{reference}\nmatrix\t{matrix}\n");
            for j in 0..matrix.cols() {
                text.push_str(&format!("column\t{}\t{}\n", j + 1, join(&matrix.column(j))));
            }
            write(out, &text)?;
        }
        Command::Verify(args) => return verify_command(args, out),
    }
    Ok(EXIT_OK)
}

fn verify_command(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = if args.table {
        let text = fs::read_to_string(&args.input)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.input.display())))?;
        let table = ExpansionTable::from_text(&text)?;
        run_property(&table, args)?
    } else {
        let s = SeedFile::load(&args.input)?.seed()?;
        let p = ExploredPattern::explore(s, args.budget.budget())?;
        run_property(&Memoized::new(&p), args)?
    };
    write(out, &report.to_tsv())?;
    if let Some(path) = &args.json {
        write_file(path, &(report.to_json() + "\n"))?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn run_property(family: &impl ClusterFamily, args: &VerifyArgs) -> Result<VerificationReport> {
    let n = family.rank();
    let t0 = parse_word(&args.reference, n)?;
    if !family.labels().contains(&t0) {
        return Err(Error::NotExplored(t0));
    }
    let labels = family.labels();
    let monomials = || verify::cluster_monomials(labels, n, args.degree);
    Ok(match args.property {
        PropertyArg::Positive => verify::check_positive(family, &verify::all_pairs(family))?,
        PropertyArg::DPositive => {
            let vars: Vec<VarId> = (0..family.registry().len()).collect();
            verify::check_d_positive(family, &vars, labels)?
        }
        PropertyArg::ProperLaurent => {
            verify::check_proper_laurent(family, &t0, &monomials())?.with_degree(args.degree)
        }
        PropertyArg::LinIndep => {
            verify::check_linear_independence(family, &t0, &monomials())?.with_degree(args.degree)
        }
        PropertyArg::GInjective => {
            verify::check_g_injective(family, &t0, &monomials())?.with_degree(args.degree)
        }
        PropertyArg::GUnimodular => verify::check_g_unimodular(family, &t0)?,
        PropertyArg::GComposition => {
            let t0 = &t0;
            let triples: Vec<(Word, Word, Word)> = labels
                .iter()
                .flat_map(|t| {
                    labels
                        .iter()
                        .map(move |t1| (t0.clone(), t.clone(), t1.clone()))
                })
                .collect();
            verify::check_g_composition(family, &triples)?
        }
    })
}
