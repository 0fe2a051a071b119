//! The `stpcs` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::basis::{basis_up_to, orthonormal_basis};
use crate::bibd::{
    aocm, bibd_check, horizontal_expand, incidence_matrix, make_embedding, ocm, vertical_expand, vertical_expand_star,
    BooleanMatrix, SignMatrix,
};
use crate::error::{Result, StpError};
use crate::exec::SearchConfig;
use crate::io::{load_matrix, load_signal, save_matrix, signal_csv, to_csv, MatrixKind};
use crate::matrix::{DenseMatrix, Side};
use crate::metrics::{class_metrics, report, MetricsOptions, RipOptions};
use crate::pipeline::{compress, recover_signal_with, RecoveryOptions, Solver, SparsityMode, SparsitySpec};
use crate::random;
use crate::signal_space::project_side;
use crate::worked_examples::{default_golden_dir, regenerate, run_all};

#[derive(Parser, Debug)]
#[command(name = "stpcs", version, about = "Semi-tensor product compressed sensing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a matrix.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Expand a matrix vertically or horizontally.
    #[command(subcommand)]
    Expand(ExpandCommand),
    /// Coherence, Welch bound, spark, sparsity bound and optional RIP constant.
    Metrics(MetricsArgs),
    /// List basis elements, or their orthonormalization.
    Basis(BasisArgs),
    /// Project a signal onto a smaller dimension.
    Project(ProjectArgs),
    /// Compress a signal with the semi-tensor product.
    Compress(CompressArgs),
    /// Recover a sparse signal from its measurement.
    Recover(RecoverArgs),
    /// Regenerate the reference examples and compare them with the golden files.
    PaperExamples(ExamplesArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Expansion {
    None,
    Vertical,
    Star,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RandomKind {
    Real,
    Integer,
    Sign,
    Boolean,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output path (`.json` selects JSON); standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Incidence matrix of the (α, α, α−1, α−1, α−2) design, optionally expanded.
    Bibd {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        alpha: u32,
        #[arg(long, value_enum, default_value = "none")]
        expansion: Expansion,
        #[command(flatten)]
        out: Output,
    },
    /// Orthogonal sign matrix with t rows.
    Ocm {
        #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
        t: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Almost orthogonal sign matrix with t rows.
    Aocm {
        #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
        t: u32,
        #[command(flatten)]
        out: Output,
    },
    /// The α × α incidence matrix.
    Incidence {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        alpha: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Seeded random matrix.
    Random {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "real")]
        kind: RandomKind,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExpandCommand {
    /// Greedy vertical expansion of an incidence matrix.
    Vertical {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Pairwise (star) vertical expansion for α columns.
    Star {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        alpha: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Replace the 1s of each column of H by the rows of B.
    Horizontal {
        #[arg(short = 'H', long = "hv")]
        hv: PathBuf,
        #[arg(short = 'B', long = "embedding")]
        embedding: PathBuf,
        /// Distinct positive column weights applied to the sign matrix B.
        #[arg(long, value_delimiter = ',')]
        diag: Option<Vec<f64>>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Evaluate the class atom under this lift instead of the matrix itself.
    #[arg(long)]
    pub side: Option<Side>,
    /// Also certify the RIP constant of this order.
    #[arg(long)]
    pub rip_k: Option<usize>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct BasisArgs {
    /// Largest dimension included.
    #[arg(short, long)]
    pub m: usize,
    #[arg(long)]
    pub orthonormal: bool,
    #[arg(long, default_value = "right")]
    pub side: Side,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[arg(short, long)]
    pub x: PathBuf,
    #[arg(short, long)]
    pub n: usize,
    #[arg(long, default_value = "left")]
    pub side: Side,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    #[arg(short = 'A', long = "matrix")]
    pub matrix: PathBuf,
    #[arg(short, long)]
    pub x: PathBuf,
    #[arg(long, default_value = "left")]
    pub side: Side,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Blockwise,
    Global,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Exhaustive,
    Omp,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    #[arg(short = 'A', long = "matrix")]
    pub matrix: PathBuf,
    #[arg(short, long)]
    pub y: PathBuf,
    /// Nonzeros allowed per block (or in total with `--mode global`).
    #[arg(short, long)]
    pub k: usize,
    /// Length of the signal; defaults to the smallest length that fits y.
    #[arg(short, long)]
    pub p: Option<usize>,
    #[arg(long, default_value = "left")]
    pub side: Side,
    #[arg(long, value_enum, default_value = "blockwise")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub solver: SolverArg,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Directory holding the golden files.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Also write the regenerated matrices here as CSV.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| StpError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_matrix(
    out: &Output,
    m: &DenseMatrix,
    kind: MatrixKind,
    name: &str,
    provenance: serde_json::Value,
) -> Result<()> {
    match &out.output {
        Some(path) => save_matrix(path, m, kind, name, provenance),
        None => emit(out, &to_csv(m, kind)?),
    }
}

fn emit_json(out: &Output, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| StpError::Io(e.to_string()))?;
    emit(out, &(text + "\n"))
}

fn alpha_of(v: u32) -> usize {
    v as usize
}

fn gen(cmd: &GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Bibd { alpha, expansion, out } => {
            let alpha = alpha_of(*alpha);
            let h = incidence_matrix(alpha)?;
            bibd_check(&h)?;
            let (m, name) = match expansion {
                Expansion::None => (h, "incidence"),
                Expansion::Vertical => (vertical_expand(&h)?, "vertical expansion"),
                Expansion::Star => (vertical_expand_star(alpha)?, "star expansion"),
            };
            emit_matrix(
                out,
                m.matrix(),
                MatrixKind::Boolean,
                name,
                json!({"command": "gen bibd", "alpha": alpha, "expansion": format!("{expansion:?}").to_lowercase()}),
            )
        }
        GenCommand::Ocm { t, out } => {
            let m = ocm(*t as usize)?;
            emit_matrix(
                out,
                m.matrix(),
                MatrixKind::Sign,
                "ocm",
                json!({"command": "gen ocm", "t": t}),
            )
        }
        GenCommand::Aocm { t, out } => {
            let m = aocm(*t as usize)?;
            emit_matrix(
                out,
                m.matrix(),
                MatrixKind::Sign,
                "aocm",
                json!({"command": "gen aocm", "t": t}),
            )
        }
        GenCommand::Incidence { alpha, out } => {
            let m = incidence_matrix(alpha_of(*alpha))?;
            emit_matrix(
                out,
                m.matrix(),
                MatrixKind::Boolean,
                "incidence",
                json!({"command": "gen incidence", "alpha": alpha}),
            )
        }
        GenCommand::Random {
            rows,
            cols,
            seed,
            kind,
            out,
        } => {
            if *rows == 0 || *cols == 0 {
                return Err(StpError::BadShape("random matrix needs positive rows and cols".into()));
            }
            let mut r = random::rng(*seed);
            let (m, k) = match kind {
                RandomKind::Real => (random::uniform_matrix(&mut r, *rows, *cols), MatrixKind::Real),
                RandomKind::Integer => (random::integer_matrix(&mut r, *rows, *cols, -3, 3), MatrixKind::Real),
                RandomKind::Sign => (random::sign_matrix(&mut r, *rows, *cols), MatrixKind::Sign),
                RandomKind::Boolean => (random::boolean_matrix(&mut r, *rows, *cols), MatrixKind::Boolean),
            };
            emit_matrix(
                out,
                &m,
                k,
                "random",
                json!({"command": "gen random", "rows": rows, "cols": cols, "seed": seed, "kind": format!("{kind:?}").to_lowercase()}),
            )
        }
    }
}

fn expand(cmd: &ExpandCommand) -> Result<()> {
    match cmd {
        ExpandCommand::Vertical { input, out } => {
            let h = BooleanMatrix::new(load_matrix(input)?.0)?;
            let hv = vertical_expand(&h)?;
            emit_matrix(
                out,
                hv.matrix(),
                MatrixKind::Boolean,
                "vertical expansion",
                json!({"command": "expand vertical", "input": input}),
            )
        }
        ExpandCommand::Star { alpha, out } => {
            let h = vertical_expand_star(alpha_of(*alpha))?;
            emit_matrix(
                out,
                h.matrix(),
                MatrixKind::Boolean,
                "star expansion",
                json!({"command": "expand star", "alpha": alpha}),
            )
        }
        ExpandCommand::Horizontal {
            hv,
            embedding,
            diag,
            out,
        } => {
            let h = BooleanMatrix::new(load_matrix(hv)?.0)?;
            let (b, _) = load_matrix(embedding)?;
            let phi = match diag {
                Some(d) => horizontal_expand(&h, &make_embedding(SignMatrix::new(b)?, d)?)?,
                None => horizontal_expand(&h, &b)?,
            };
            emit_matrix(
                out,
                &phi,
                MatrixKind::Real,
                "horizontal expansion",
                json!({"command": "expand horizontal", "hv": hv, "embedding": embedding, "diag": diag}),
            )
        }
    }
}

fn metrics(args: &MetricsArgs) -> Result<()> {
    let (a, _) = load_matrix(&args.input)?;
    let opts = MetricsOptions {
        rip_k: args.rip_k,
        rip: RipOptions {
            normalize: true,
            search: SearchConfig::from_env(),
        },
    };
    let rep = match args.side {
        Some(side) => class_metrics(&a, side, &opts)?,
        None => report(&a, &opts)?,
    };
    emit_json(
        &args.out,
        &serde_json::to_value(&rep).map_err(|e| StpError::Io(e.to_string()))?,
    )
}

fn basis(args: &BasisArgs) -> Result<()> {
    if args.m == 0 {
        return Err(StpError::BadShape("basis bound must be positive".into()));
    }
    let elements = basis_up_to(args.m);
    let value = if args.orthonormal {
        let ob = orthonormal_basis(args.m, args.side)?;
        json!({
            "side": args.side.as_str(),
            "elements": elements.iter().zip(&ob.elements).map(|(d, e)| json!({
                "source": d.label(),
                "vector": e.as_slice(),
            })).collect::<Vec<_>>(),
        })
    } else {
        json!({
            "elements": elements.iter().map(|d| json!({"n": d.n, "j": d.j, "label": d.label()})).collect::<Vec<_>>(),
        })
    };
    emit_json(&args.out, &value)
}

fn project(args: &ProjectArgs) -> Result<()> {
    if args.n == 0 {
        return Err(StpError::BadShape("target dimension must be positive".into()));
    }
    let x = load_signal(&args.x)?;
    emit(&args.out, &signal_csv(&project_side(&x, args.n, args.side))?)
}

fn compress_cmd(args: &CompressArgs) -> Result<()> {
    let (a, _) = load_matrix(&args.matrix)?;
    let x = load_signal(&args.x)?;
    emit(&args.out, &signal_csv(&compress(&a, &x, args.side))?)
}

fn recover_cmd(args: &RecoverArgs) -> Result<()> {
    let (a, _) = load_matrix(&args.matrix)?;
    let y = load_signal(&args.y)?;
    let (m, n) = a.shape();
    if y.dim() % m != 0 {
        return Err(StpError::BadShape(format!(
            "measurement length {} is not a multiple of {m} rows",
            y.dim()
        )));
    }
    let p = args.p.unwrap_or(n * (y.dim() / m));
    let mode = match args.mode {
        ModeArg::Blockwise => SparsityMode::Blockwise,
        ModeArg::Global => SparsityMode::Global,
    };
    let spec = SparsitySpec::new(n, args.k, mode)?;
    let opts = RecoveryOptions {
        solver: match args.solver {
            SolverArg::Exhaustive => Solver::Exhaustive,
            SolverArg::Omp => Solver::Omp,
        },
        search: SearchConfig::from_env(),
    };
    let x = recover_signal_with(&a, p, &y, &spec, args.side, &opts)?;
    emit(&args.out, &signal_csv(&x)?)
}

fn examples(args: &ExamplesArgs) -> Result<bool> {
    let dir = args.golden.clone().unwrap_or_else(default_golden_dir);
    if let Some(target) = &args.write {
        std::fs::create_dir_all(target)?;
        for (name, m, kind) in regenerate()? {
            save_matrix(
                &target.join(format!("{name}.csv")),
                &m,
                kind,
                name,
                serde_json::Value::Null,
            )?;
        }
    }
    let checks = run_all(&dir)?;
    let mut stdout = std::io::stdout().lock();
    for c in &checks {
        writeln!(
            stdout,
            "{} {}: {}",
            if c.ok { "ok      " } else { "MISMATCH" },
            c.name,
            c.detail
        )?;
    }
    let failed = checks.iter().filter(|c| !c.ok).count();
    writeln!(stdout, "{} of {} examples match", checks.len() - failed, checks.len())?;
    Ok(failed == 0)
}

/// Runs one command. `Ok(false)` signals a completed run whose comparison
/// failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(c) => gen(c).map(|_| true),
        Command::Expand(c) => expand(c).map(|_| true),
        Command::Metrics(a) => metrics(a).map(|_| true),
        Command::Basis(a) => basis(a).map(|_| true),
        Command::Project(a) => project(a).map(|_| true),
        Command::Compress(a) => compress_cmd(a).map(|_| true),
        Command::Recover(a) => recover_cmd(a).map(|_| true),
        Command::PaperExamples(a) => examples(a),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code: 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
    }
}
