//! `endoquant`: batch front end for the star-product library.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use endoquant::coefficients::{c_triangular, e_weight};
use endoquant::config::{emit_section, Config, ConfigError};
use endoquant::geometry::chart::default_accuracy;
use endoquant::geometry::Chart;
use endoquant::graphs::{enumerate, Family};
use endoquant::starprod::{check_headroom, section_degree, verify_suite, GraphProduct, Oracle, SuiteOptions};
use endoquant::tensors::{c_from_graphs, e_from_calabi, CBounds, EBounds, IndexedTensor, TensorContext};

#[derive(Parser)]
#[command(name = "endoquant", version, about = "Exact star products on endomorphism bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug, clap::Args)]
struct Common {
    /// Chart configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// ν-order; defaults to the config's `run.order`, then `order`.
    #[arg(long)]
    order: Option<i32>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Graph classes with |Aut|, c and E-weight.
    Graphs {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        max_degree: Option<i32>,
    },
    /// Tables of C^{L̄K} and E_{KL̄} per ν-order.
    Tensor {
        #[command(flatten)]
        common: Common,
        /// Largest index rank |K|, |L| listed.
        #[arg(long)]
        max_degree: Option<i32>,
    },
    /// Product of the config's sections `f` and `g`.
    Mul {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
    },
    /// Checks every identity of the product; exit status 1 on a failure.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Random inputs per identity.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Graph,
    Oracle,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("input error: {0}")]
    Input(String),
    #[error("cannot write {0}: {1}")]
    Write(String, std::io::Error),
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

/// The config with its chart rebuilt for `order` when that differs.
fn load(common: &Common) -> Result<(Config, i32), CliError> {
    let mut cfg = Config::load(&common.config)?;
    let order = common.order.or(cfg.run.order).unwrap_or(cfg.chart.data.order);
    if order < 0 {
        return Err(input(format!("order must be nonnegative, got {order}")));
    }
    if order > cfg.chart.data.order {
        let mut data = cfg.chart.data.clone();
        data.order = order;
        data.jet_accuracy = data.jet_accuracy.max(default_accuracy(order));
        let b = (2 * order + 2) as u32;
        data.calabi_bidegree = (data.calabi_bidegree.0.max(b), data.calabi_bidegree.1.max(b));
        cfg.chart = Chart::new(data).map_err(input)?;
    }
    Ok((cfg, order))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Write(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn graphs(cfg: &Config, order: i32, family: Option<FamilyArg>, max_degree: Option<i32>) -> Result<String, CliError> {
    let family = match family {
        Some(f) => f,
        None => match cfg.run.family.as_deref() {
            None | Some("M") => FamilyArg::M,
            Some("N") => FamilyArg::N,
            Some(o) => return Err(input(format!("unknown graph family '{o}'"))),
        },
    };
    let fam = match family {
        FamilyArg::M => Family::M,
        FamilyArg::N => Family::N,
    };
    let max = max_degree.or(cfg.run.max_degree).unwrap_or(order);
    let mut text = String::from("# nu_degree\taut\tc\te_weight\tgraph\n");
    for class in enumerate(max, fam) {
        let e = e_weight(&class).map(|w| w.to_string()).unwrap_or_else(|_| "-".into());
        let c = c_triangular(&class.graph);
        let _ = writeln!(text, "{}\t{}\t{c}\t{e}\t{}", class.nu_degree, class.aut_order, class.graph);
    }
    Ok(text)
}

fn tensor_table(name: &str, t: &IndexedTensor, text: &mut String) {
    for ((a, b), v) in t.iter() {
        for (s, x) in v.iter() {
            for i in 0..x.dim() {
                for j in 0..x.dim() {
                    let e = x.entry(i, j);
                    if !e.is_zero() {
                        let _ = writeln!(text, "{name}\tnu^{s}\t{a:?}\t{b:?}\t({i},{j})\t{e}");
                    }
                }
            }
        }
    }
}

fn tensor(cfg: &Config, order: i32, max_degree: Option<i32>) -> Result<String, CliError> {
    let rank = max_degree.or(cfg.run.max_degree).unwrap_or(order).max(0) as u32;
    let ctx = TensorContext::for_degree(&cfg.chart, order).map_err(input)?;
    let c = c_from_graphs(&ctx, &CBounds { max_order: order, max_l: Some(rank), max_k: Some(rank) }).map_err(input)?;
    let e = e_from_calabi(&cfg.chart, &EBounds { max_k: rank, max_l: rank, max_order: order }).map_err(input)?;
    let mut text = String::from("# tensor\torder\tfirst\tsecond\tentry\tvalue\n");
    tensor_table("C", &c, &mut text);
    tensor_table("E", &e, &mut text);
    Ok(text)
}

fn mul(cfg: &Config, order: i32, route: Option<RouteArg>) -> Result<String, CliError> {
    let route = match route {
        Some(r) => r,
        None => match cfg.run.route.as_deref() {
            None | Some("graph") => RouteArg::Graph,
            Some("oracle") => RouteArg::Oracle,
            Some(o) => return Err(input(format!("unknown route '{o}'"))),
        },
    };
    let get = |n: &str| cfg.sections.get(n).ok_or_else(|| input(format!("config has no section '{n}'")));
    let (f, g) = (get("f")?, get("g")?);
    let degree = section_degree(f).max(section_degree(g));
    check_headroom(&cfg.chart, order, degree).map_err(input)?;
    let p = match route {
        RouteArg::Graph => GraphProduct::new(&cfg.chart, order).and_then(|r| r.mul(f, g)),
        RouteArg::Oracle => Oracle::new(&cfg.chart, order).and_then(|r| r.mul(f, g)),
    }
    .map_err(input)?;
    // Only degrees fixed by every route are printed.
    let cap = cfg.chart.accuracy() - 2 * order - degree as i32;
    Ok(emit_section("product", &p.map_same(|x| x.cap(cap)), order))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Graphs { common, family, max_degree } => {
            let (cfg, order) = load(&common)?;
            write_out(&common.out, &graphs(&cfg, order, family, max_degree)?)?;
        }
        Command::Tensor { common, max_degree } => {
            let (cfg, order) = load(&common)?;
            write_out(&common.out, &tensor(&cfg, order, max_degree)?)?;
        }
        Command::Mul { common, route } => {
            let (cfg, order) = load(&common)?;
            write_out(&common.out, &mul(&cfg, order, route)?)?;
        }
        Command::Verify { common, seed, cases } => {
            let (cfg, order) = load(&common)?;
            let mut opts = SuiteOptions::new(seed.or(cfg.run.seed).unwrap_or(0), order);
            opts.cases = cases.or(cfg.run.cases).unwrap_or(opts.cases);
            let report = verify_suite(&cfg.chart, &opts).map_err(input)?;
            print!("{report}");
            if let Some(p) = &common.out {
                write_json(p, &report.to_json())?;
            }
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn write_json(p: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(p, text).map_err(|e| CliError::Write(p.display().to_string(), e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
