//! `horopack` command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use horopack::catalog::load_catalog;
use horopack::density::{self, DensityReport};
use horopack::reference::ReferenceData;
use horopack::verify::{self, Tolerances, VerifyOptions};
use horopack::{Catalog, Error, Scalar, DEFAULT_PRECISION, MIN_PRECISION};

use render::{Document, Format};

#[derive(Parser)]
#[command(
    name = "horopack",
    version,
    about = "Optimal horoball packing densities of hyperbolic Coxeter simplex tilings"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Working precision in bits (at least 64)
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    format: Format,

    /// Simplex catalog (JSON); the bundled catalog when omitted
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,

    /// Significant digits for numeric fields
    #[arg(long, global = true, default_value_t = 30)]
    digits: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog entries
    List,
    /// Compute density reports
    Compute {
        /// Witt symbol, e.g. S6bar
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        witt: Option<String>,
        /// Every catalog entry
        #[arg(long)]
        all: bool,
    },
    /// Run the verification suites
    Verify {
        /// Monte Carlo samples per simplex (0 skips the suite)
        #[arg(long, default_value_t = 0)]
        mc_samples: u64,
        /// Monte Carlo seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Best density per dimension against the simplicial upper bound
    Table1,
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Context {
    catalog: Catalog,
    catalog_hash: String,
    precision: u32,
    digits: usize,
    format: Format,
}

impl Context {
    fn load(args: &GlobalArgs) -> Result<Self, Failure> {
        if args.precision < MIN_PRECISION {
            return Err(Failure::Input(format!("--precision must be at least {MIN_PRECISION} bits")));
        }
        if args.digits == 0 {
            return Err(Failure::Input("--digits must be positive".into()));
        }
        let source = match &args.catalog {
            None => Catalog::bundled_source().to_string(),
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
        };
        let catalog = load_catalog(&source)?;
        let catalog_hash = format!("{:x}", Sha256::digest(source.as_bytes()));
        Ok(Context { catalog, catalog_hash, precision: args.precision, digits: args.digits, format: args.format })
    }

    fn document(&self, title: &str, columns: Vec<&'static str>) -> Document {
        let metadata = vec![
            ("tool".to_string(), format!("horopack {}", env!("CARGO_PKG_VERSION"))),
            ("precision".to_string(), format!("{} bits", self.precision)),
            ("catalog sha256".to_string(), self.catalog_hash.clone()),
        ];
        Document::new(title, metadata, columns)
    }

    fn num(&self, x: &Scalar) -> Value {
        Value::String(x.to_digits(self.digits))
    }

    fn emit(&self, doc: &Document) {
        print!("{}", doc.render(self.format));
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("rows are built from json objects"),
    }
}

fn cmd_list(ctx: &Context) -> Result<(), Failure> {
    let mut doc = ctx.document("catalog", vec!["witt", "schlafli", "dimension", "ideal_vertices", "volume"]);
    for def in ctx.catalog.iter() {
        doc.push(object(json!({
            "witt": def.witt_symbol,
            "schlafli": def.schlafli_notation.clone().unwrap_or_default(),
            "dimension": def.dimension,
            "ideal_vertices": def.ideal_vertices.len(),
            "volume": def.volume.to_string(),
        })));
    }
    ctx.emit(&doc);
    Ok(())
}

fn report_row(ctx: &Context, r: &DensityReport) -> Map<String, Value> {
    let pieces: Vec<Value> = r
        .pieces
        .iter()
        .map(|p| json!({"cusp": format!("A{}", p.cusp_index), "s": ctx.num(&p.s), "volume": ctx.num(&p.piece_volume)}))
        .collect();
    let weights: Vec<Value> = r.weights.iter().map(|w| ctx.num(w)).collect();
    let (closed_form, rel_error, matched) = match &r.closed_form {
        Some(m) => (Value::String(m.expr.to_string()), Value::String(m.rel_error.to_digits(3)), json!(m.matched)),
        None => (Value::Null, Value::Null, Value::Null),
    };
    let transition = match &r.transition_extremes {
        Some((a, b)) => json!([ctx.num(a), ctx.num(b)]),
        None => Value::Null,
    };
    object(json!({
        "witt": r.witt_symbol,
        "dimension": r.dimension,
        "density": ctx.num(&r.density),
        "closed_form": closed_form,
        "relative_error": rel_error,
        "closed_form_match": matched,
        "simplex_volume": ctx.num(&r.simplex_volume),
        "pieces": pieces,
        "weights": weights,
        "transition_endpoints": transition,
    }))
}

fn cmd_compute(ctx: &Context, witt: Option<&str>, all: bool) -> Result<(), Failure> {
    let defs: Vec<_> = if all {
        ctx.catalog.iter().collect()
    } else {
        vec![ctx.catalog.get(witt.expect("clap requires a witt symbol"))?]
    };
    let refs = ReferenceData::bundled();
    let tol = Tolerances::for_precision(ctx.precision).value;
    let mut doc = ctx.document(
        "density",
        vec![
            "witt",
            "dimension",
            "density",
            "closed_form",
            "relative_error",
            "closed_form_match",
            "simplex_volume",
            "pieces",
            "weights",
            "transition_endpoints",
        ],
    );
    for def in defs {
        let geom = def.evaluate(ctx.precision)?;
        let mut report = density::density_report(&geom)?;
        if let Some(r) = refs.simplex(&def.witt_symbol) {
            report.match_closed_form(&r.density, &tol)?;
        }
        doc.push(report_row(ctx, &report));
    }
    ctx.emit(&doc);
    Ok(())
}

fn cmd_verify(ctx: &Context, mc_samples: u64, seed: u64) -> Result<(), Failure> {
    let mut opts = VerifyOptions::new(ctx.precision);
    opts.mc_samples = mc_samples;
    opts.seed = seed;
    let suites = verify::run_all(&ctx.catalog, &ReferenceData::bundled(), &opts);
    let failures: usize = suites.iter().map(|s| s.failures().count()).sum();
    let total: usize = suites.iter().map(|s| s.checks.len()).sum();

    let columns = vec!["suite", "subject", "item", "expected", "actual", "pass"];
    let mut doc = ctx.document("verification", columns);
    for s in &suites {
        // Markdown lists failures only; the machine formats list every check.
        let shown: Vec<_> = match ctx.format {
            Format::Markdown => s.failures().collect(),
            _ => s.checks.iter().collect(),
        };
        for c in shown {
            doc.push(object(json!({
                "suite": s.name,
                "subject": c.subject,
                "item": c.item,
                "expected": c.expected,
                "actual": c.actual,
                "pass": c.pass,
            })));
        }
    }
    for s in &suites {
        let state = if s.passed() { "PASS" } else { "FAIL" };
        doc.notes.push(format!("{state} {} ({} checks, {} failed)", s.name, s.checks.len(), s.failures().count()));
    }
    doc.notes.push(if failures == 0 {
        format!("all {total} checks passed")
    } else {
        format!("{failures} of {total} checks failed")
    });
    ctx.emit(&doc);
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_table1(ctx: &Context) -> Result<(), Failure> {
    let rows = verify::bound_table(&ctx.catalog, &ReferenceData::bundled(), ctx.precision)?;
    let mut doc = ctx.document(
        "best density per dimension",
        vec!["n", "closed_form", "value", "printed_value", "attained_by", "upper_bound", "gap", "printed_gap"],
    );
    for r in &rows {
        let form = match &r.closed_form {
            Some(e) => e.to_string(),
            None => "simplicial density series".to_string(),
        };
        doc.push(object(json!({
            "n": r.n,
            "closed_form": form,
            "value": ctx.num(&r.value),
            "printed_value": r.printed_value,
            "attained_by": r.attained_by,
            "upper_bound": r.printed_upper,
            "gap": ctx.num(&r.gap),
            "printed_gap": r.printed_gap,
        })));
    }
    doc.notes.push("upper_bound is a literature constant; gap = upper_bound - value is recomputed.".into());
    ctx.emit(&doc);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Context::load(&cli.global)?;
    match cli.command {
        Command::List => cmd_list(&ctx),
        Command::Compute { witt, all } => cmd_compute(&ctx, witt.as_deref(), all),
        Command::Verify { mc_samples, seed } => cmd_verify(&ctx, mc_samples, seed),
        Command::Table1 => cmd_table1(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
