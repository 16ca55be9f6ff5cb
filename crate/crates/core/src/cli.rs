//! Command-line interface: a thin dispatcher over the library modules.
//!
//! Exit codes: 0 success, 2 invalid input (including I/O and parse
//! failures), 3 bound violation detected, 4 resource refusal (desk bound
//! exceeded). The DAISY_NODE_LIMIT environment variable overrides the
//! default solver node limit; the --node-limit flag overrides both.

use crate::constructions::{
    blowup, complete_multipartite, fano_complement, iterated_fano, layered_transversal,
    parity_family, BlowupSpec, Partition,
};
use crate::cube::{
    enumerate_middle_subcubes, enumerate_subcubes, is_transversal, max_points_in_some_dcube,
    min_subcube_transversal, td_evidence_table, transversal_daisy_correspondence,
};
use crate::daisy::{find_daisy, DaisyPattern};
use crate::error::{Error, Result};
use crate::family::{binomial, SetFamily};
use crate::io::{
    read_family_auto, read_vertex_set, write_family_json, write_family_text, write_vertex_set,
};
use crate::products::{enumerate_copies, power, star_product, UniformHypergraph};
use crate::report::{
    ex_table, verify_bounds, write_csv, write_json, DensityRecord, ExProblem, Rat,
};
use crate::solver::{
    solve_max_avoiding, ConstraintSystem, SolveStatus, SolverConfig, DEFAULT_NODE_LIMIT,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "daisies",
    version,
    about = "Daisy-free families, hypercube transversals, and exact extremal numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Solver node limit (default 10^9; DAISY_NODE_LIMIT also applies).
    #[arg(long, global = true)]
    node_limit: Option<u64>,

    /// Solver worker threads; results are identical for any count.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Orbital branching at the search root.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::Off)]
    symmetry: Toggle,

    /// Reserved: the solver already runs without randomness; this is the
    /// only mode.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct PatternArgs {
    /// Daisy pattern "r,s,t" (e.g. 3,4,2).
    #[arg(long, conflicts_with = "daisy")]
    pattern: Option<String>,

    /// Plain daisy shorthand: r means the pattern r,4,2.
    #[arg(long)]
    daisy: Option<usize>,
}

impl PatternArgs {
    fn resolve(&self) -> Result<DaisyPattern> {
        match (&self.pattern, self.daisy) {
            (Some(text), None) => DaisyPattern::parse(text),
            (None, Some(r)) => DaisyPattern::plain(r),
            _ => Err(Error::invalid(
                "exactly one of --pattern r,s,t or --daisy r is required".to_string(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact ex(n, F) for a daisy pattern or a forbidden hypergraph file.
    Ex {
        #[command(flatten)]
        pattern: PatternArgs,

        /// Forbidden hypergraph as a family file (generic-copy route).
        #[arg(long, conflicts_with_all = ["pattern", "daisy"])]
        forbidden: Option<PathBuf>,

        #[arg(long)]
        n: usize,

        /// Also write the attaining family to this path (text format).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Emit one of the explicit families.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Check a family file for daisy-freeness.
    Check {
        #[command(flatten)]
        pattern: PatternArgs,

        /// Family file (text or JSON).
        #[arg(long)]
        input: PathBuf,
    },
    /// Hypercube transversal computations.
    Cube {
        #[command(subcommand)]
        what: CubeCmd,
    },
    /// Star products and powers of hypergraphs.
    Product {
        #[command(subcommand)]
        what: ProductCmd,
    },
    /// Evidence tables with bound verification.
    Report {
        #[command(subcommand)]
        what: ReportCmd,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// The 28 non-line triples on 7 points.
    FanoComplement,
    /// The iterated construction on 7^k points.
    IteratedFano {
        #[arg(long)]
        k: usize,
    },
    /// Complete r-partite r-graph on near-equal classes.
    Multipartite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
    /// Parity-constrained family over k near-equal classes.
    Parity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Every (d+1)-st layer of Q_n, starting at the offset.
    Layers {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        offset: usize,
    },
    /// Blow-up of a 3-uniform base family file over k near-equal classes.
    Blowup {
        /// Base family file (allowed class-triples).
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CubeCmd {
    /// Exact minimum d-subcube transversal of Q_n.
    Transversal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Only middle d-cubes (d even, n even).
        #[arg(long)]
        middle: bool,
        /// Restrict the transversal to middle-layer vertices.
        #[arg(long, requires = "middle")]
        middle_layer_only: bool,
    },
    /// Maximum points of a vertex-set file inside any d-cube.
    JtCheck {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        input: PathBuf,
    },
    /// t_d evidence table over n = d..n_max.
    TdTable {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Verify a vertex-set file against all d-subcubes.
    CheckTransversal {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        input: PathBuf,
        /// Check middle d-cubes only.
        #[arg(long)]
        middle: bool,
    },
}

#[derive(Subcommand)]
enum ProductCmd {
    /// Star product of two family files.
    Star {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// d-fold star power of a family file.
    Power {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// ex(n, F) table with closed-form bound verification.
    Daisy {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
    },
    /// Middle-cube transversal vs daisy-free correspondence at one n.
    Correspondence {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn node_limit(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("DAISY_NODE_LIMIT")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_NODE_LIMIT)
}

fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn read_family_file(path: &Path) -> Result<SetFamily> {
    read_family_auto(&fs::read(path)?)
}

fn emit_family(family: &SetFamily, format: Format, output: &Option<PathBuf>) -> Result<()> {
    let mut buffer = Vec::new();
    match format {
        Format::Json => write_family_json(family, &mut buffer)?,
        Format::Text => write_family_text(family, &mut buffer)?,
        Format::Csv => {
            return Err(Error::invalid(
                "family files have no CSV form; use text or json".to_string(),
            ))
        }
    }
    emit(output, &buffer)
}

fn emit_records(
    records: &[DensityRecord],
    format: Format,
    output: &Option<PathBuf>,
    text_extra: &str,
) -> Result<()> {
    let mut buffer = Vec::new();
    match format {
        Format::Json => write_json(records, &mut buffer)?,
        Format::Csv => write_csv(records, &mut buffer)?,
        Format::Text => {
            for r in records {
                let marker = if r.is_exact { "=" } else { ">=" };
                writeln!(
                    buffer,
                    "{} n={}: value {} {} ratio {} ({})",
                    r.problem,
                    r.n,
                    marker,
                    r.value,
                    r.ratio,
                    crate::report::decimal6(r.ratio)
                )?;
            }
            buffer.extend_from_slice(text_extra.as_bytes());
        }
    }
    emit(output, &buffer)
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = SolverConfig {
        node_limit: node_limit(cli.node_limit),
        workers: cli.workers.max(1),
        symmetry: cli.symmetry == Toggle::On,
        orbits: None,
    };
    match cli.command {
        Command::Ex {
            pattern,
            forbidden,
            n,
            witness,
        } => {
            let problem = match forbidden {
                Some(path) => {
                    ExProblem::forbidden(UniformHypergraph::new(read_family_file(&path)?))
                }
                None => ExProblem::Daisy(pattern.resolve()?),
            };
            let system = match &problem {
                ExProblem::Daisy(p) => crate::solver::build_daisy_constraints(n, p)?,
                ExProblem::Forbidden { hypergraph, .. } => enumerate_copies(hypergraph, n)?,
            };
            attach_orbits(&mut cfg, &system);
            let solved = solve_max_avoiding(&system, &cfg)?;
            let record = DensityRecord {
                problem: problem.id(),
                n,
                value: solved.objective,
                is_exact: solved.status == SolveStatus::Exact,
                ratio: Rat::new(solved.objective, binomial(n, problem.uniformity())),
                bounds: match &problem {
                    ExProblem::Daisy(p) => crate::report::closed_form_bounds(p, n)?,
                    ExProblem::Forbidden { .. } => Vec::new(),
                },
            };
            if let Some(path) = witness {
                let family = SetFamily::from_ranks(
                    n,
                    problem.uniformity(),
                    solved.witness.iter().map(|&i| i as u64),
                )?;
                let mut buffer = Vec::new();
                write_family_text(&family, &mut buffer)?;
                fs::write(path, buffer)?;
            }
            let extra = format!(
                "nodes={} wall={:.3}s\n",
                solved.nodes_explored, solved.wall_time
            );
            emit_records(&[record], cli.format, &cli.output, &extra)
        }
        Command::Construct { what } => {
            let (family, vertex_set): (Option<SetFamily>, Option<crate::cube::CubeVertexSet>) =
                match what {
                    ConstructCmd::FanoComplement => (Some(fano_complement()), None),
                    ConstructCmd::IteratedFano { k } => (Some(iterated_fano(k)?), None),
                    ConstructCmd::Multipartite { n, r } => {
                        (Some(complete_multipartite(n, r)?), None)
                    }
                    ConstructCmd::Parity { n, k, r, delta } => {
                        (Some(parity_family(n, k, r, delta)?), None)
                    }
                    ConstructCmd::Layers { n, d, offset } => {
                        (None, Some(layered_transversal(n, d, offset)?))
                    }
                    ConstructCmd::Blowup { base, n } => {
                        let base = read_family_file(&base)?;
                        let k = base.n();
                        let spec = BlowupSpec::new(base, Partition::even_split(n, k)?)?;
                        (Some(blowup(&spec)?), None)
                    }
                };
            match (family, vertex_set) {
                (Some(f), None) => emit_family(&f, cli.format, &cli.output),
                (None, Some(vs)) => {
                    if cli.format != Format::Text {
                        return Err(Error::invalid(
                            "vertex sets use the text format only".to_string(),
                        ));
                    }
                    let mut buffer = Vec::new();
                    write_vertex_set(&vs, &mut buffer)?;
                    emit(&cli.output, &buffer)
                }
                _ => unreachable!(),
            }
        }
        Command::Check { pattern, input } => {
            let pattern = pattern.resolve()?;
            let family = read_family_file(&input)?;
            let witness = find_daisy(&family, &pattern)?;
            let buffer = match cli.format {
                Format::Json => {
                    let value = match &witness {
                        Some(inst) => serde_json::json!({
                            "pattern": pattern.to_string(),
                            "daisy_free": false,
                            "stem": inst.stem(),
                            "free": inst.free(),
                            "petals": inst.petals(),
                        }),
                        None => serde_json::json!({
                            "pattern": pattern.to_string(),
                            "daisy_free": true,
                        }),
                    };
                    format!("{}\n", serde_json::to_string_pretty(&value)?)
                }
                _ => match &witness {
                    Some(inst) => format!(
                        "{pattern}: daisy found with stem {:?} and free set {:?}\n",
                        inst.stem(),
                        inst.free()
                    ),
                    None => format!("{pattern}: daisy-free\n"),
                },
            };
            emit(&cli.output, buffer.as_bytes())
        }
        Command::Cube { what } => run_cube(what, cli.format, &cli.output, cfg),
        Command::Product { what } => {
            let product = match what {
                ProductCmd::Star { f, g } => {
                    let f = UniformHypergraph::new(read_family_file(&f)?);
                    let g = UniformHypergraph::new(read_family_file(&g)?);
                    star_product(&f, &g)?
                }
                ProductCmd::Power { f, d } => {
                    let f = UniformHypergraph::new(read_family_file(&f)?);
                    power(&f, d)?
                }
            };
            emit_family(product.edges(), cli.format, &cli.output)
        }
        Command::Report { what } => match what {
            ReportCmd::Daisy {
                pattern,
                n_from,
                n_to,
            } => {
                let problem = ExProblem::Daisy(pattern.resolve()?);
                let table = ex_table(&problem, n_from, n_to, &cfg)?;
                let check = verify_bounds(&table.records)?;
                let extra = format!(
                    "exact ratios nonincreasing: {}\nbounds checked: {} comparisons, no violations\nskipped rows: {:?}\n",
                    table.exact_ratios_nonincreasing, check.comparisons, table.skipped
                );
                emit_records(&table.records, cli.format, &cli.output, &extra)
            }
            ReportCmd::Correspondence { n, dim } => {
                let report = transversal_daisy_correspondence(n, dim, &cfg)?;
                let buffer = match cli.format {
                    Format::Json => {
                        let value = serde_json::json!({
                            "n": report.n,
                            "dim": report.dim,
                            "pattern": report.pattern.to_string(),
                            "pairs": report.pairs,
                            "slices_match": report.slices_match,
                            "scanned_sets": report.scanned_sets,
                            "scan_holds": report.scan_holds,
                            "min_transversal": report.min_transversal,
                            "ex_value": report.ex_value,
                            "layer_size": report.layer_size,
                            "sum_matches": report.sum_matches,
                        });
                        format!("{}\n", serde_json::to_string_pretty(&value)?)
                    }
                    _ => format!(
                        "Q_{} middle {}-cubes <-> {}: {} pairs, slices match: {}\n\
                         min transversal {} + ex {} = {} (layer {}): {}\n\
                         exhaustive scan: {}\n",
                        report.n,
                        report.dim,
                        report.pattern,
                        report.pairs,
                        report.slices_match,
                        report.min_transversal,
                        report.ex_value,
                        report.min_transversal + report.ex_value,
                        report.layer_size,
                        report.sum_matches,
                        match (report.scanned_sets, report.scan_holds) {
                            (Some(total), Some(ok)) => format!("{total} sets, holds: {ok}"),
                            _ => "skipped (layer too large)".to_string(),
                        }
                    ),
                };
                emit(&cli.output, buffer.as_bytes())
            }
        },
    }
}

fn attach_orbits(cfg: &mut SolverConfig, system: &ConstraintSystem) {
    if cfg.symmetry {
        cfg.orbits = Some(system.single_orbit());
    }
}

fn run_cube(
    what: CubeCmd,
    format: Format,
    output: &Option<PathBuf>,
    cfg: SolverConfig,
) -> Result<()> {
    match what {
        CubeCmd::Transversal {
            n,
            d,
            middle,
            middle_layer_only,
        } => {
            let report = min_subcube_transversal(n, d, middle, middle_layer_only, &cfg)?;
            let denominator = report.item_count as u64;
            let buffer = match format {
                Format::Json => {
                    let vertices: Vec<String> =
                        report.vertices.iter().map(|&v| bitstring(v, n)).collect();
                    let value = serde_json::json!({
                        "n": report.n,
                        "d": report.dim,
                        "middle": report.middle_only,
                        "middle_layer_only": report.restricted_to_middle_layer,
                        "cubes": report.cube_count,
                        "items": report.item_count,
                        "objective": report.search.objective,
                        "exact": report.search.status == SolveStatus::Exact,
                        "nodes": report.search.nodes_explored,
                        "density": format!("{}", Rat::new(report.search.objective, denominator)),
                        "vertices": vertices,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&value)?)
                }
                _ => {
                    let mut text = format!(
                        "Q_{n} {}{d}-cubes: {} cubes over {} items\nminimum transversal {} {} (density {})\n",
                        if report.middle_only { "middle " } else { "" },
                        report.cube_count,
                        report.item_count,
                        if report.search.status == SolveStatus::Exact {
                            "="
                        } else {
                            "<="
                        },
                        report.search.objective,
                        Rat::new(report.search.objective, denominator),
                    );
                    for &v in &report.vertices {
                        text.push_str(&bitstring(v, n));
                        text.push('\n');
                    }
                    text
                }
            };
            emit(output, buffer.as_bytes())
        }
        CubeCmd::JtCheck { d, input } => {
            let vs = read_vertex_set(&fs::read(input)?[..])?;
            let (count, cube) = max_points_in_some_dcube(&vs, d)?;
            let reference = binomial(d, d / 2);
            let buffer = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "d": d,
                        "max_points": count,
                        "witness": cube.to_string(),
                        "layered_reference": reference,
                    }))?
                ),
                _ => format!(
                    "max points in a {d}-cube: {count} (witness {cube}); layered family reference binom({d},{}) = {reference}\n",
                    d / 2
                ),
            };
            emit(output, buffer.as_bytes())
        }
        CubeCmd::TdTable { d, n_max } => {
            let table = td_evidence_table(d, d.max(1), n_max, &cfg)?;
            verify_bounds(&table.records)?;
            let extra = format!(
                "skipped rows: {:?}\nACS row Q_{}: minimum {:?} vs ceil(log2 {d}) = {} -> {:?}\n",
                table.skipped,
                d + 2,
                table.acs_minimum,
                table.acs_threshold,
                table.acs_ok
            );
            match format {
                Format::Json => {
                    let mut rows = Vec::new();
                    write_json(&table.records, &mut rows)?;
                    let rows: serde_json::Value = serde_json::from_slice(&rows)?;
                    let value = serde_json::json!({
                        "d": d,
                        "rows": rows,
                        "skipped": table.skipped,
                        "acs_minimum": table.acs_minimum,
                        "acs_threshold": table.acs_threshold,
                        "acs_ok": table.acs_ok,
                    });
                    emit(
                        output,
                        format!("{}\n", serde_json::to_string_pretty(&value)?).as_bytes(),
                    )
                }
                Format::Csv => {
                    let mut buffer = Vec::new();
                    write_csv(&table.records, &mut buffer)?;
                    emit(output, &buffer)
                }
                Format::Text => emit_records(&table.records, format, output, &extra),
            }
        }
        CubeCmd::CheckTransversal { d, input, middle } => {
            let vs = read_vertex_set(&fs::read(input)?[..])?;
            let cubes = if middle {
                enumerate_middle_subcubes(vs.n(), d)?
            } else {
                enumerate_subcubes(vs.n(), d)?
            };
            let check = is_transversal(&vs, &cubes)?;
            let buffer = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "d": d,
                        "middle": middle,
                        "cubes": cubes.len(),
                        "is_transversal": check.is_transversal,
                        "first_missed": check.first_missed.map(|c| c.to_string()),
                    }))?
                ),
                _ => match check.first_missed {
                    Some(cube) => format!("not a transversal: missed {cube}\n"),
                    None => format!("transversal of all {} cubes\n", cubes.len()),
                },
            };
            emit(output, buffer.as_bytes())
        }
    }
}

fn bitstring(v: u64, n: usize) -> String {
    (0..n)
        .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}
