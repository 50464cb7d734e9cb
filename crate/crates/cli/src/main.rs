use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use trigmv::alpha::DEFAULT_SEED;
use trigmv::harness::{self, BenchCase, BenchMethod, FunctionPair, GeneratorSpec};
use trigmv::io::{self as tio, AnyBlock, AnyOperator};
use trigmv::kernel::ActionOptions;
use trigmv::operator::{ActsOn, MatrixOperator};
use trigmv::params::{select_parameters, shift, ParameterChoice};
use trigmv::theta::{agreeing_digits, tables_module_source, M_MAX};
use trigmv::trig::{all_four_action, cos_sin_action, cosh_sinh_action, expmv_multi, ActionStats, TrigFn};
use trigmv::{BlockVector, Scalar, ThetaTable, Tolerance};

#[derive(Parser)]
#[command(name = "trigmv", version, about = "Actions of cos, sin, cosh, sinh and exp of a matrix on vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute f(tA)B for one or more functions.
    Compute(ComputeArgs),
    /// Show the degree, scaling and predicted cost without running the kernel.
    Params(ComputeArgs),
    /// Compare the paired kernel with the baselines and emit one record per run.
    Bench(BenchArgs),
    /// Write a generated test matrix (and its right-hand side).
    Gen(GenArgs),
    /// Regenerate the θ tables from the backward error series.
    ThetaGen(ThetaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct Common {
    /// backward error tolerance: half, single, double or a number in (0, 1)
    #[arg(long, default_value = "double", value_parser = parse_tol)]
    tol: Tolerance,
    /// seed of the norm estimator
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeArgs {
    /// comma-separated subset of cos, sin, cosh, sinh, exp
    #[arg(long = "fn", default_value = "cos,sin")]
    functions: String,
    /// time value(s), comma-separated
    #[arg(long, default_value = "1", value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<f64>,
    /// Matrix Market file
    #[arg(long, conflicts_with = "gen")]
    matrix: Option<PathBuf>,
    /// generated matrix, e.g. laplace2d:31
    #[arg(long)]
    gen: Option<GeneratorSpec>,
    /// right-hand side block (CSV, whitespace text or Matrix Market array)
    #[arg(long)]
    rhs: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    /// generated matrices, repeatable
    #[arg(long = "gen")]
    gens: Vec<GeneratorSpec>,
    /// Matrix Market files, repeatable; missing files are skipped
    #[arg(long = "matrix")]
    matrices: Vec<PathBuf>,
    /// right-hand side for the Matrix Market inputs
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// cos,sin or cosh,sinh
    #[arg(long = "fn", default_value = "cos,sin")]
    functions: String,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_value = "trig,trig_expmv,trig_block")]
    method: Vec<BenchMethod>,
    /// run the generated problems of the large-matrix experiments with their time values
    #[arg(long)]
    large: bool,
    /// run cases concurrently (timings then advisory)
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GenArgs {
    spec: GeneratorSpec,
    /// Matrix Market output (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// write the canonical right-hand side as CSV
    #[arg(long)]
    rhs_out: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    /// a single tolerance; all three built-in ones when omitted
    #[arg(long, value_parser = parse_tol)]
    tol: Option<Tolerance>,
    /// emit the Rust source of the shipped tables module
    #[arg(long, conflicts_with = "check")]
    rust: bool,
    /// compare with the shipped tables and fail below 6 agreeing digits
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = M_MAX)]
    m_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> std::result::Result<Tolerance, String> {
    Tolerance::parse(s).map_err(|e| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn options(common: &Common) -> ActionOptions {
    let mut o = ActionOptions::default();
    o.selection.estimator.seed = common.seed;
    o
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Compute(a) => compute(&a),
        Command::Params(a) => params(&a),
        Command::Bench(a) => bench(&a),
        Command::Gen(a) => gen(&a),
        Command::ThetaGen(a) => theta_gen(&a),
    }
}

fn parse_functions(s: &str) -> Result<Vec<TrigFn>> {
    let mut out: Vec<TrigFn> = Vec::new();
    for f in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let f: TrigFn = f.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        bail!("no functions requested");
    }
    Ok(out)
}

fn load_problem(matrix: Option<&Path>, gen: Option<&GeneratorSpec>, rhs: Option<&Path>) -> Result<(AnyOperator, AnyBlock)> {
    let (op, default_rhs) = match (matrix, gen) {
        (Some(p), _) => {
            let op = tio::read_matrix_market(p).with_context(|| format!("reading {}", p.display()))?;
            let b = default_rhs_for(p, op.n());
            (op, b)
        }
        (None, Some(spec)) => {
            let g = spec.generate()?;
            (AnyOperator::Real(g.op), AnyBlock::Real(g.rhs))
        }
        (None, None) => bail!("give --matrix or --gen"),
    };
    let b = match rhs {
        Some(p) => tio::read_block(p).with_context(|| format!("reading {}", p.display()))?,
        None => default_rhs,
    };
    if b.nrows() != op.n() {
        bail!("right-hand side has {} rows, matrix is {}x{}", b.nrows(), op.n(), op.n());
    }
    Ok((op, b))
}

/// Right-hand sides used with the collection matrices; `cos(i)` otherwise.
fn default_rhs_for(path: &Path, n: usize) -> AnyBlock {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    let v = if stem.contains("orani676") {
        vec![1.0; n]
    } else if stem.contains("bcspwr10") {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v[n - 1] = 1.0;
        v
    } else {
        harness::generators::cos_index(n)
    };
    AnyBlock::Real(BlockVector::from_vec(v).expect("nonempty matrix"))
}

struct Labeled {
    name: String,
    values: BlockVector<Complex64>,
}

fn compute_generic<S, T>(
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    fns: &[TrigFn],
    ts: &[f64],
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<(Vec<Labeled>, Vec<ActionStats>)>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T> + ActsOn<Complex64>,
{
    let trig = fns.iter().any(|f| matches!(f, TrigFn::Cos | TrigFn::Sin));
    let hyp = fns.iter().any(|f| matches!(f, TrigFn::Cosh | TrigFn::Sinh));
    let multi_t = ts.len() > 1;
    let label = |f: TrigFn, t: f64| if multi_t { format!("{f}@{t}") } else { f.to_string() };
    let mut parts: Vec<(TrigFn, f64, BlockVector<Complex64>)> = Vec::new();
    let mut stats = Vec::new();
    for &t in ts {
        if trig && hyp {
            let r = all_four_action(a, b, t, table, opts)?;
            parts.extend([
                (TrigFn::Cos, t, r.cos),
                (TrigFn::Sin, t, r.sin),
                (TrigFn::Cosh, t, r.cosh),
                (TrigFn::Sinh, t, r.sinh),
            ]);
            stats.push(r.stats);
        } else if trig {
            let r = cos_sin_action(a, b, t, table, opts)?;
            parts.extend([(TrigFn::Cos, t, r.first.to_complex()), (TrigFn::Sin, t, r.second.to_complex())]);
            stats.push(r.stats);
        } else if hyp {
            let r = cosh_sinh_action(a, b, t, table, opts)?;
            parts.extend([(TrigFn::Cosh, t, r.first.to_complex()), (TrigFn::Sinh, t, r.second.to_complex())]);
            stats.push(r.stats);
        }
    }
    if fns.contains(&TrigFn::Exp) {
        let tau: Vec<Complex64> = ts.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        let copies: Vec<&BlockVector<T>> = ts.iter().map(|_| b).collect();
        let (f, st) = expmv_multi(a, &BlockVector::hcat(&copies)?, &tau, table, opts)?;
        for (k, &t) in ts.iter().enumerate() {
            parts.push((TrigFn::Exp, t, f.panel(k).to_complex()));
        }
        stats.push(st);
    }
    let mut out = Vec::new();
    for &t in ts {
        for &f in fns {
            if let Some((_, _, v)) = parts.iter().find(|(g, s, _)| *g == f && *s == t) {
                out.push(Labeled {
                    name: label(f, t),
                    values: v.clone(),
                });
            }
        }
    }
    Ok((out, stats))
}

fn compute(args: &ComputeArgs) -> Result<()> {
    let fns = parse_functions(&args.functions)?;
    let (op, b) = load_problem(args.matrix.as_deref(), args.gen.as_ref(), args.rhs.as_deref())?;
    let table = ThetaTable::for_tolerance(args.common.tol)?;
    let opts = options(&args.common);
    let (outputs, stats) = match (&op, &b) {
        (AnyOperator::Real(a), AnyBlock::Real(v)) => compute_generic(a, v, &fns, &args.t, &table, &opts)?,
        (AnyOperator::Real(a), AnyBlock::Complex(v)) => compute_generic(a, v, &fns, &args.t, &table, &opts)?,
        (AnyOperator::Complex(a), v) => compute_generic(a, &v.to_complex(), &fns, &args.t, &table, &opts)?,
    };
    let real = !op.is_complex() && matches!(b, AnyBlock::Real(_));
    let total = ActionStats::merge(&stats);
    eprintln!(
        "mv={} mv_estimate={} m_star={} s={} path={}",
        total.total_mv(),
        total.estimation_mv,
        total.m_star,
        total.s,
        total.path.name()
    );
    for w in &total.warnings {
        eprintln!("warning: {w}");
    }
    let mut w = output(args.common.out.as_deref())?;
    match args.common.format {
        Format::Csv => {
            let q = b.to_complex().ncols();
            let header: Vec<String> = outputs
                .iter()
                .flat_map(|o| (0..q).map(move |j| if q == 1 { o.name.clone() } else { format!("{}[{j}]", o.name) }))
                .collect();
            let blocks: Vec<&BlockVector<Complex64>> = outputs.iter().map(|o| &o.values).collect();
            let all = BlockVector::hcat(&blocks)?;
            if real {
                tio::write_block_csv(&all.re(), Some(&header), &mut w)?;
            } else {
                tio::write_block_csv(&all, Some(&header), &mut w)?;
            }
        }
        Format::Jsonl => {
            for o in &outputs {
                for j in 0..o.values.ncols() {
                    let col = o.values.column(j);
                    let mut rec = json!({
                        "function": o.name,
                        "column": j,
                        "re": col.iter().map(|z| z.re).collect::<Vec<_>>(),
                    });
                    if !real {
                        rec["im"] = json!(col.iter().map(|z| z.im).collect::<Vec<_>>());
                    }
                    writeln!(w, "{rec}")?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Coupler width and products per column for a request.
fn coupler_shape(fns: &[TrigFn], ts: usize, op_complex: bool, rhs_complex: bool, q: usize) -> (usize, usize) {
    let trig = fns.iter().any(|f| matches!(f, TrigFn::Cos | TrigFn::Sin));
    let hyp = fns.iter().any(|f| matches!(f, TrigFn::Cosh | TrigFn::Sinh));
    let (slots, complex_block) = if trig && hyp {
        (4, true)
    } else if trig || hyp {
        (2, rhs_complex || (trig && op_complex))
    } else {
        (ts, rhs_complex)
    };
    let per_column = if complex_block && !op_complex { 2 } else { 1 };
    (slots * q, per_column)
}

fn params(args: &ComputeArgs) -> Result<()> {
    let fns = parse_functions(&args.functions)?;
    let (op, b) = load_problem(args.matrix.as_deref(), args.gen.as_ref(), args.rhs.as_deref())?;
    let table = ThetaTable::for_tolerance(args.common.tol)?;
    let opts = options(&args.common);
    let t = args.t.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    let ts = if fns.iter().all(|f| *f == TrigFn::Exp) { args.t.len() } else { 1 };
    let q = b.to_complex().ncols();
    let (width, per_column) = coupler_shape(&fns, ts, op.is_complex(), matches!(b, AnyBlock::Complex(_)), q);
    let choice: ParameterChoice = match &op {
        AnyOperator::Real(a) => select_parameters(shift(a)?.0, t, width, &table, &opts.selection)?,
        AnyOperator::Complex(a) => select_parameters(shift(a)?.0, t, width, &table, &opts.selection)?,
    };
    let predicted = choice.cost_mv * width * per_column;
    let mut w = output(args.common.out.as_deref())?;
    match args.common.format {
        Format::Csv => {
            writeln!(w, "m_star,s,mu_re,mu_im,path,scaled_norm,width,predicted_mv,mv_estimate")?;
            writeln!(
                w,
                "{},{},{:e},{:e},{},{:e},{},{},{}",
                choice.m_star,
                choice.s,
                choice.mu.re,
                choice.mu.im,
                choice.path.name(),
                choice.scaled_norm,
                width,
                predicted,
                choice.estimation_mv()
            )?;
        }
        Format::Jsonl => {
            let rec = json!({
                "m_star": choice.m_star,
                "s": choice.s,
                "mu_re": choice.mu.re,
                "mu_im": choice.mu.im,
                "path": choice.path.name(),
                "scaled_norm": choice.scaled_norm,
                "width": width,
                "predicted_mv": predicted,
                "mv_estimate": choice.estimation_mv(),
                "alpha": choice.alpha.d.iter().map(|(p, d)| json!({"p": p, "d": d})).collect::<Vec<_>>(),
                "warnings": choice.warnings,
            });
            writeln!(w, "{rec}")?;
        }
    }
    for warning in &choice.warnings {
        eprintln!("warning: {warning}");
    }
    w.flush()?;
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let mut cases: Vec<(BenchCase, FunctionPair, f64)> = Vec::new();
    if args.large {
        for (spec, pair, t) in harness::large_cases() {
            cases.push((BenchCase::generated(&spec)?, pair, t));
        }
    }
    let pair: FunctionPair = args.functions.parse()?;
    for spec in &args.gens {
        cases.push((BenchCase::generated(spec)?, pair, args.t));
    }
    for path in &args.matrices {
        if !path.exists() {
            eprintln!("note: skipping {} (file not found; collection matrices are not bundled)", path.display());
            continue;
        }
        let (op, b) = load_problem(Some(path), None, args.rhs.as_deref())?;
        let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
        cases.push((BenchCase::from_parts(label, op, b)?, pair, args.t));
    }
    if cases.is_empty() {
        bail!("nothing to run: give --gen, --matrix or --large");
    }
    let records = harness::bench(&cases, &args.method, args.common.tol, &options(&args.common), args.parallel);
    let w = output(args.common.out.as_deref())?;
    let mut failed = 0;
    match args.common.format {
        Format::Csv => {
            let mut cw = csv::Writer::from_writer(w);
            for r in records {
                match r {
                    Ok(rec) => cw.serialize(&rec)?,
                    Err(e) => {
                        failed += 1;
                        eprintln!("error: {e}");
                    }
                }
            }
            cw.flush()?;
        }
        Format::Jsonl => {
            let mut w = w;
            for r in records {
                match r {
                    Ok(rec) => writeln!(w, "{}", serde_json::to_string(&rec)?)?,
                    Err(e) => {
                        failed += 1;
                        eprintln!("error: {e}");
                    }
                }
            }
            w.flush()?;
        }
    }
    if failed > 0 {
        bail!("{failed} benchmark run(s) failed");
    }
    Ok(())
}

fn gen(args: &GenArgs) -> Result<()> {
    let g = args.spec.generate()?;
    let mut w = output(args.out.as_deref())?;
    tio::write_matrix_market(&g.op, &mut w)?;
    w.flush()?;
    if let Some(p) = &args.rhs_out {
        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        tio::write_block_csv(&g.rhs, None, f)?;
    }
    Ok(())
}

fn theta_gen(args: &ThetaArgs) -> Result<()> {
    let tols: Vec<Tolerance> = match args.tol {
        Some(t) => vec![t],
        None => Tolerance::BUILTIN.to_vec(),
    };
    let tables: Vec<ThetaTable> = tols
        .iter()
        .map(|t| ThetaTable::generate(t.value(), args.m_max))
        .collect::<trigmv::Result<_>>()?;
    let mut w = output(args.out.as_deref())?;
    if args.check {
        let mut worst = f64::INFINITY;
        for (tol, table) in tols.iter().zip(&tables) {
            let shipped = ThetaTable::for_tolerance(*tol)?;
            for (m, (a, b)) in table.values().iter().zip(shipped.values()).enumerate() {
                let d = agreeing_digits(*a, *b);
                worst = worst.min(d);
                writeln!(w, "{},{},{:.16e},{:.16e},{:.2}", tol.name(), m + 1, a, b, d)?;
            }
        }
        w.flush()?;
        if worst < 6.0 {
            bail!("regenerated tables agree to only {worst:.2} digits");
        }
        return Ok(());
    }
    if args.rust {
        if tables.len() != 3 {
            bail!("--rust emits all three built-in tables; drop --tol");
        }
        write!(w, "{}", tables_module_source(&tables[0], &tables[1], &tables[2]))?;
    } else {
        for t in &tables {
            write!(w, "{}", t.to_text())?;
        }
    }
    w.flush()?;
    Ok(())
}
