//! Command-line front end. Reports are JSON on stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse or usage error, 3 violated
//! precondition.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::{parse_rational, Field, FieldElement, Matrix};
use crate::error::{Error, Side};
use crate::io::{
    matrix_json, parse_family, parse_representation, render_report, representation_json,
};
use crate::parabolic::{build_neighbors, BlockStructure, FundamentalSequence};
use crate::quotient::{separation_experiment, Projector};
use crate::reptheory::{cr_split, is_nonparabolic, semisimplify, Representation};
use crate::symspace::{check_symmetry_at_min, minimize_displacement, DEFAULT_BUDGET};
use crate::tree::{
    ball_size, product_tree_counterexample, translation_length, vertex_displacement, Ball,
    TreeVertex,
};

#[derive(Parser, Debug)]
#[command(
    name = "crlocal",
    version,
    about = "Complete reducibility and displacement for GL_n representations"
)]
pub struct Cli {
    /// Seed for probe vectors and randomized searches, in hexadecimal.
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0x5EED")]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Irreducibility, complete reducibility and semisimplification of a representation.
    Analyze(InputArgs),
    /// Composition series, Levi part and semisimplification.
    Semisimplify(InputArgs),
    /// Pairwise separation of a family in the cr quotient.
    Separate(SeparateArgs),
    /// Minimize the displacement function of a real representation.
    Minimize(MinimizeArgs),
    /// Ball sizes and translation lengths in the Bruhat-Tits tree.
    Tree(TreeArgs),
    /// Build the degeneration between a lower and an upper block-triangular representation.
    Degenerate(DegenerateArgs),
    /// Reproduce the product-of-trees counter-example.
    Counterexample(CounterexampleArgs),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SeparateArgs {
    /// A representation, a JSON list of them, or {"family": [...]}.
    #[arg(long)]
    pub input: PathBuf,
    /// Further members appended to the family.
    #[arg(long)]
    pub input2: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
    /// p-adic 2×2 representation; defaults to {a: diag(1/p, p)}.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DegenerateArgs {
    /// Lower block-triangular representation.
    #[arg(long)]
    pub input: PathBuf,
    /// Upper block-triangular representation with the same Levi part.
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub imax: usize,
    /// Block sizes such as "1,2"; inferred as the finest common structure when omitted.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub p: u64,
    /// Rational with negative p-adic valuation, e.g. 1/5.
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value_t = 12)]
    pub imax: usize,
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    u64::from_str_radix(digits, 16).map_err(|e| format!("invalid hexadecimal seed {s:?}: {e}"))
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Lib(Error::Parse(_)) => 2,
            CliError::Lib(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => format!("io error: {m}"),
            CliError::Lib(e) => format!("{}: {e}", e.code()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Representation, CliError> {
    parse_representation(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())).into(),
        other => other.into(),
    })
}

/// Parses `args` (including the program name) and runs one job.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let _ = writeln!(out, "{}", render_report(report));
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Analyze(a) => analyze(&load(&a.input)?, seed),
        Command::Semisimplify(a) => semisimplification(&load(&a.input)?, seed),
        Command::Separate(a) => {
            let mut family = parse_family(&read(&a.input)?)?;
            if let Some(p) = &a.input2 {
                family.extend(parse_family(&read(p)?)?);
            }
            let projector = Projector {
                seed,
                budget: a.budget,
                with_lambda: true,
            };
            let m = separation_experiment(&family, &projector)?;
            Ok(json!({ "command": "separate", "size": family.len(), "separation": m }))
        }
        Command::Minimize(a) => minimize(&load(&a.input)?, a.budget, seed),
        Command::Tree(a) => tree(a),
        Command::Degenerate(a) => degenerate(a),
        Command::Counterexample(a) => {
            let t = parse_rational(&a.t)?;
            let r = product_tree_counterexample(a.p, &t, a.imax, a.radius)?;
            Ok(
                json!({ "command": "counterexample", "all_verified": r.all_verified(), "report": r }),
            )
        }
    }
}

fn analyze(rho: &Representation, seed: u64) -> Result<Value, CliError> {
    let verdict = is_nonparabolic(rho, seed);
    let split = cr_split(rho, seed);
    let ss = semisimplify(rho, seed);
    Ok(json!({
        "command": "analyze",
        "field": rho.field(),
        "n": rho.dim(),
        "nonparabolic": verdict.nonparabolic,
        "irreducibility_witness": verdict.witness.map(|w| format!("{w:?}")),
        "invariant_subspace": verdict.certificate.as_ref().map(|c| json!({
            "basis_change": matrix_json(&c.basis_change),
            "block_sizes": c.block_sizes,
            "source": verdict.source.map(|s| format!("{s:?}")),
        })),
        "cr": split.is_some(),
        "cr_blocks": split.map(|s| s.block_sizes),
        "composition_blocks": ss.flag.block_sizes,
        "ss": representation_json(&ss.rho_ss),
    }))
}

fn semisimplification(rho: &Representation, seed: u64) -> Result<Value, CliError> {
    let ss = semisimplify(rho, seed);
    Ok(json!({
        "command": "semisimplify",
        "block_sizes": ss.flag.block_sizes,
        "basis_change": matrix_json(&ss.flag.basis_change),
        "levi": representation_json(&ss.levi),
        "ss": representation_json(&ss.rho_ss),
    }))
}

fn minimize(rho: &Representation, budget: usize, seed: u64) -> Result<Value, CliError> {
    let r = minimize_displacement(rho, budget)?;
    let symmetric = if r.attained() {
        Some(check_symmetry_at_min(rho, &r, seed)?)
    } else {
        None
    };
    let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect()
    };
    Ok(json!({
        "command": "minimize",
        "lambda": r.lambda_est,
        "status": r.status,
        "minimizer": r.minimizer.as_ref().map(|x| rows(x.matrix())),
        "iterations": r.iterations,
        "gradient_norm": r.gradient_norm,
        "newton_step": r.newton_step,
        "escapes": r.escapes,
        "symmetric_at_min": symmetric,
        "trace": r.trace,
    }))
}

fn tree(a: &TreeArgs) -> Result<Value, CliError> {
    let field = Field::Padic { p: a.p };
    field.validate()?;
    let rho = match &a.input {
        Some(path) => load(path)?,
        None => Representation::from_pairs(
            field,
            [(
                "a",
                Matrix::diagonal(
                    field,
                    &[
                        FieldElement::from_ratio(field, 1, a.p as i64),
                        FieldElement::from_i64(field, a.p as i64),
                    ],
                ),
            )],
        )?,
    };
    if rho.field() != field {
        return Err(Error::FieldMismatch(field, rho.field()).into());
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(2, rho.dim()).into());
    }
    let ball = Ball::around(&TreeVertex::origin(a.p), a.radius);
    let mut gens = serde_json::Map::new();
    for (name, g) in rho.generators() {
        let (ell, witness) = translation_length(g, a.radius)?;
        let (next, _) = translation_length(g, a.radius + 1)?;
        gens.insert(
            name.to_string(),
            json!({
                "displacement_at_origin": vertex_displacement(g, &TreeVertex::origin(a.p))?,
                "translation_length": ell,
                "translation_length_next_radius": next,
                "stable": ell == next,
                "witness": witness.map(|w| matrix_json(w.basis())),
            }),
        );
    }
    Ok(json!({
        "command": "tree",
        "p": a.p,
        "radius": a.radius,
        "ball_size": ball.len(),
        "ball_size_formula": ball_size(a.p, a.radius),
        "generators": gens,
    }))
}

/// Finest composition for which every generator of `lower` is block lower
/// triangular and every generator of `upper` is block upper triangular.
pub fn infer_blocks(lower: &Representation, upper: &Representation) -> BlockStructure {
    let n = lower.dim();
    let mut sizes = Vec::new();
    let mut start = 0;
    for k in 1..n {
        let split = BlockStructure::new(vec![k, n - k]).expect("positive sizes");
        let ok = lower
            .matrices()
            .all(|m| split.is_block_triangular(m, Side::Lower))
            && upper
                .matrices()
                .all(|m| split.is_block_triangular(m, Side::Upper));
        if ok {
            sizes.push(k - start);
            start = k;
        }
    }
    sizes.push(n - start);
    BlockStructure::new(sizes).expect("positive sizes")
}

fn degenerate(a: &DegenerateArgs) -> Result<Value, CliError> {
    let lower = load(&a.input)?;
    let upper = load(&a.input2)?;
    lower.same_shape(&upper)?;
    let blocks = match &a.blocks {
        Some(s) => BlockStructure::new(s.clone())?,
        None => infer_blocks(&lower, &upper),
    };
    if blocks.n() != lower.dim() {
        return Err(Error::DimensionMismatch(lower.dim(), blocks.n()).into());
    }
    let seq = FundamentalSequence::default_for(lower.field(), blocks.clone());
    let trace = build_neighbors(&lower, &upper, &seq, a.imax)?;
    Ok(json!({
        "command": "degenerate",
        "blocks": blocks.sizes(),
        "base": seq.scalars().iter().map(FieldElement::encode).collect::<Vec<_>>(),
        "verified": trace.verified(),
        "levi": representation_json(&trace.r),
        "trace": trace,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reptheory::DEFAULT_SEED;

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0x5EED"), Ok(DEFAULT_SEED));
        assert_eq!(parse_seed("ff"), Ok(255));
        assert!(parse_seed("zz").is_err());
    }

    #[test]
    fn block_inference() {
        let f = Field::Padic { p: 5 };
        let lo = Representation::from_pairs(
            f,
            [(
                "a",
                Matrix::from_i64(f, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 2]]),
            )],
        )
        .unwrap();
        let hi = Representation::from_pairs(
            f,
            [(
                "a",
                Matrix::from_i64(f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]),
            )],
        )
        .unwrap();
        assert_eq!(infer_blocks(&lo, &hi).sizes(), &[1, 1, 1]);
        let lo = Representation::from_pairs(
            f,
            [(
                "a",
                Matrix::from_i64(f, &[&[1, 2, 0], &[1, 1, 0], &[3, 0, 2]]),
            )],
        )
        .unwrap();
        let hi = Representation::from_pairs(
            f,
            [(
                "a",
                Matrix::from_i64(f, &[&[1, 2, 4], &[1, 1, 0], &[0, 0, 2]]),
            )],
        )
        .unwrap();
        assert_eq!(infer_blocks(&lo, &hi).sizes(), &[2, 1]);
    }
}
