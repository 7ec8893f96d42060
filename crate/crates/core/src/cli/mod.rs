//! Command-line front end. Every analytic and simulation operation is
//! reachable as a subcommand, with table/CSV/JSON rendering.

pub mod output;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cache::model::{
    self, CacheGeometry, WorkingSetQuery,
};
use crate::cache::sim::{simulate_random_fill, SimConfig};
use crate::cache::trace::{simulate_trace, AddressStream, PageMapping, Scenario};
use crate::error::{Error, Result};
use crate::switch::{
    self, rational_to_f64, SweepMode, SwitchGeometry,
};
use output::{Cell, OutputFormat, Report};

fn positive_u64() -> clap::builder::RangedU64ValueParser {
    clap::value_parser!(u64).range(1..)
}

#[derive(Parser, Debug)]
#[command(
    name = "collstats",
    version,
    about = "Collision statistics for set-associative caches and oversubscribed switch ports"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,

    /// Significant digits for probabilities / decimals for fixed-point.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,

    /// Also write the rendered output to this file (same bytes as stdout).
    #[arg(long, global = true, value_name = "FILE")]
    out_file: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Set-associative cache analysis and simulation.
    #[command(subcommand)]
    Cache(CacheCommand),
    /// Oversubscribed switch-port analysis and simulation.
    #[command(subcommand)]
    Net(NetCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProbabilityMethod {
    /// Generating-function route (polynomial time; the default).
    Gf,
    /// Literal occupancy-vector sum (small instances only).
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceScenario {
    Sequential,
    Strided,
    MultiArray,
    Random,
    Paged,
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// Expected stored count and stored fraction under random fill to capacity.
    Expected {
        #[arg(long, value_parser = positive_u64())]
        sets: u64,
        #[arg(long, value_parser = positive_u64())]
        assoc: u64,
        /// Optional consistency check; must equal sets * assoc.
        #[arg(long)]
        capacity: Option<u64>,
    },
    /// Probability that a random working set causes no set to overflow.
    NoConflict {
        #[arg(long, value_parser = positive_u64())]
        sets: u64,
        #[arg(long, value_parser = positive_u64())]
        assoc: u64,
        #[arg(long)]
        addresses: u64,
        #[arg(long, value_enum, default_value_t = ProbabilityMethod::Gf)]
        method: ProbabilityMethod,
    },
    /// Expected stored counts for a 1000-line cache across associativities.
    #[command(name = "table-1000")]
    Table1000,
    /// No-conflict probabilities for a 4-way, 4000-line cache across
    /// working-set sizes.
    TableWorksets,
    /// Monte Carlo random-fill experiment.
    Simulate {
        #[arg(long, value_parser = positive_u64())]
        sets: u64,
        #[arg(long, value_parser = positive_u64())]
        assoc: u64,
        #[arg(long)]
        addresses: u64,
        #[arg(long, value_parser = positive_u64())]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Trace-driven LRU simulation of a structured access pattern.
    Trace {
        #[arg(long, value_enum)]
        scenario: TraceScenario,
        #[arg(long, value_parser = positive_u64())]
        sets: u64,
        #[arg(long, value_parser = positive_u64())]
        assoc: u64,
        /// Per-stream length; defaults to the cache capacity.
        #[arg(long)]
        length: Option<u64>,
        /// Stride between the two interleaved streams; defaults to capacity.
        #[arg(long)]
        stride: Option<u64>,
        /// Number of interleaved arrays (multi-array scenario).
        #[arg(long, default_value_t = 4)]
        arrays: u64,
        /// Mutual array offset; defaults to capacity (fully conflicting).
        #[arg(long)]
        offset: Option<u64>,
        /// Address span for the random scenario; defaults to 2x capacity.
        #[arg(long)]
        span: Option<u64>,
        /// Physical frame count for the paged scenario; defaults to a span
        /// of 2x capacity.
        #[arg(long)]
        pages: Option<u64>,
        #[arg(long, default_value_t = 64, value_parser = positive_u64())]
        page_size: u64,
        #[arg(long, default_value_t = 1, value_parser = positive_u64())]
        line_bytes: u64,
        #[arg(long, default_value_t = 2, value_parser = positive_u64())]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepModeArg {
    OneWay,
    TwoWay,
}

#[derive(Subcommand, Debug)]
enum NetCommand {
    /// Exact no-collision probability for k messages through n destinations.
    Prob {
        #[arg(long = "in", value_parser = positive_u64())]
        inbound: u64,
        #[arg(long = "out", value_parser = positive_u64())]
        outbound: u64,
    },
    /// Brute-force enumeration of all destination subsets.
    Enumerate {
        #[arg(long = "in", value_parser = positive_u64())]
        inbound: u64,
        #[arg(long = "out", value_parser = positive_u64())]
        outbound: u64,
    },
    /// Monte Carlo traffic experiment.
    Simulate {
        #[arg(long = "in", value_parser = positive_u64())]
        inbound: u64,
        #[arg(long = "out", value_parser = positive_u64())]
        outbound: u64,
        #[arg(long, value_parser = positive_u64())]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// No-collision probability rows over a range of port counts.
    Sweep {
        #[arg(long, value_enum)]
        mode: SweepModeArg,
        #[arg(long)]
        k_min: u64,
        #[arg(long)]
        k_max: u64,
    },
}

/// Parse and execute. Exit status 0 on success, 2 on usage errors, 1 on
/// domain errors.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            if code == 0 {
                print!("{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    let report = match execute(&cli.command) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let rendered = report.render(cli.format, cli.digits as usize);
    print!("{rendered}");
    if let Some(path) = &cli.out_file {
        if let Err(e) = std::fs::File::create(path).and_then(|mut f| f.write_all(rendered.as_bytes())) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    0
}

fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::Cache(c) => execute_cache(c),
        Command::Net(c) => execute_net(c),
    }
}

fn cache_geometry(sets: u64, assoc: u64) -> Result<CacheGeometry> {
    CacheGeometry::new(sets, assoc)
}

fn execute_cache(command: &CacheCommand) -> Result<Report> {
    match command {
        CacheCommand::Expected { sets, assoc, capacity } => {
            let geom = cache_geometry(*sets, *assoc)?;
            if let Some(cap) = capacity {
                if *cap != geom.capacity() {
                    return Err(Error::InvalidArgument(format!(
                        "--capacity {cap} does not equal sets * assoc = {}",
                        geom.capacity()
                    )));
                }
            }
            let stored = model::expected_stored::<f64>(&geom);
            let fraction = model::expected_fraction::<f64>(*assoc, *sets)?;
            Ok(Report {
                inputs: vec![
                    ("sets".into(), json!(sets)),
                    ("assoc".into(), json!(assoc)),
                ],
                columns: vec![
                    "sets".into(),
                    "assoc".into(),
                    "capacity".into(),
                    "expected_stored".into(),
                    "expected_fraction".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(*sets),
                    Cell::UInt(*assoc),
                    Cell::UInt(geom.capacity()),
                    Cell::Real(stored),
                    Cell::Real(fraction),
                ]],
                seed: None,
            })
        }
        CacheCommand::NoConflict { sets, assoc, addresses, method } => {
            let geom = cache_geometry(*sets, *assoc)?;
            let query = WorkingSetQuery { addresses: *addresses };
            let (name, p) = match method {
                ProbabilityMethod::Gf => ("gf", model::no_conflict_probability::<f64>(&geom, &query)),
                ProbabilityMethod::Direct => {
                    ("direct", model::no_conflict_probability_direct::<f64>(&geom, &query)?)
                }
            };
            Ok(Report {
                inputs: vec![
                    ("sets".into(), json!(sets)),
                    ("assoc".into(), json!(assoc)),
                    ("addresses".into(), json!(addresses)),
                    ("method".into(), json!(name)),
                ],
                columns: vec![
                    "sets".into(),
                    "assoc".into(),
                    "addresses".into(),
                    "method".into(),
                    "no_conflict_probability".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(*sets),
                    Cell::UInt(*assoc),
                    Cell::UInt(*addresses),
                    Cell::Text(name.into()),
                    Cell::LogProb(p.ln()),
                ]],
                seed: None,
            })
        }
        CacheCommand::Table1000 => {
            let mut rows = Vec::new();
            for k in [1u64, 2, 3, 4, 10, 50, 100] {
                let geom = cache_geometry(1000 / k, k)?;
                let stored = model::expected_stored::<f64>(&geom);
                rows.push(vec![
                    Cell::UInt(k),
                    Cell::UInt(geom.sets()),
                    Cell::Real(stored),
                    Cell::UInt(stored as u64),
                ]);
            }
            Ok(Report {
                inputs: vec![("capacity".into(), json!(1000))],
                columns: vec![
                    "associativity".into(),
                    "sets".into(),
                    "expected_stored".into(),
                    "expected_working_set_size".into(),
                ],
                rows,
                seed: None,
            })
        }
        CacheCommand::TableWorksets => {
            let geom = cache_geometry(1000, 4)?;
            let mut rows = Vec::new();
            for a in [100u64, 200, 500, 1000, 2000] {
                let p = model::no_conflict_probability::<f64>(&geom, &WorkingSetQuery { addresses: a });
                rows.push(vec![Cell::UInt(a), Cell::LogProb(p.ln())]);
            }
            Ok(Report {
                inputs: vec![
                    ("sets".into(), json!(1000)),
                    ("assoc".into(), json!(4)),
                ],
                columns: vec!["working_set_size".into(), "no_conflict_probability".into()],
                rows,
                seed: None,
            })
        }
        CacheCommand::Simulate { sets, assoc, addresses, trials, seed } => {
            let config = SimConfig {
                trials: *trials,
                seed: *seed,
                geometry: cache_geometry(*sets, *assoc)?,
            };
            let report = simulate_random_fill(&config, *addresses);
            let hist = trim_histogram(&report.occupancy_histogram);
            Ok(Report {
                inputs: vec![
                    ("sets".into(), json!(sets)),
                    ("assoc".into(), json!(assoc)),
                    ("addresses".into(), json!(addresses)),
                    ("trials".into(), json!(trials)),
                ],
                columns: vec![
                    "trials".into(),
                    "mean_stored".into(),
                    "mean_stored_std_error".into(),
                    "no_conflict_frequency".into(),
                    "no_conflict_std_error".into(),
                    "occupancy_histogram".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(report.trials),
                    Cell::Real(report.mean_stored),
                    Cell::Sci(report.mean_stored_std_error),
                    Cell::Sci(report.no_conflict_frequency),
                    Cell::Sci(report.no_conflict_std_error),
                    Cell::Text(hist),
                ]],
                seed: Some(report.seed),
            })
        }
        CacheCommand::Trace {
            scenario,
            sets,
            assoc,
            length,
            stride,
            arrays,
            offset,
            span,
            pages,
            page_size,
            line_bytes,
            reps,
            seed,
        } => {
            let geom = cache_geometry(*sets, *assoc)?;
            let capacity_units = geom.capacity() * line_bytes;
            let length = length.unwrap_or(geom.capacity());
            let make_stream = |scenario| AddressStream {
                scenario,
                length,
                repetitions: *reps,
                line_bytes: *line_bytes,
            };
            let mut inputs = vec![
                ("scenario".into(), json!(format!("{scenario:?}").to_lowercase())),
                ("sets".into(), json!(sets)),
                ("assoc".into(), json!(assoc)),
                ("reps".into(), json!(reps)),
                ("line_bytes".into(), json!(line_bytes)),
            ];
            let runs: Vec<(String, crate::cache::trace::TraceReport)> = match scenario {
                TraceScenario::Sequential => {
                    vec![("-".into(), simulate_trace(&geom, &make_stream(Scenario::Sequential))?)]
                }
                TraceScenario::Strided => {
                    let stride = stride.unwrap_or(capacity_units);
                    inputs.push(("stride".into(), json!(stride)));
                    vec![("-".into(), simulate_trace(&geom, &make_stream(Scenario::Strided { stride }))?)]
                }
                TraceScenario::MultiArray => {
                    let offset = offset.unwrap_or(capacity_units);
                    inputs.push(("arrays".into(), json!(arrays)));
                    inputs.push(("offset".into(), json!(offset)));
                    let scenario = Scenario::MultiArray {
                        array_count: *arrays,
                        conflicting_offset: offset,
                    };
                    vec![("-".into(), simulate_trace(&geom, &make_stream(scenario))?)]
                }
                TraceScenario::Random => {
                    let span = span.unwrap_or(2 * capacity_units);
                    inputs.push(("span".into(), json!(span)));
                    let scenario = Scenario::UniformRandom { span, seed: *seed };
                    vec![("-".into(), simulate_trace(&geom, &make_stream(scenario))?)]
                }
                TraceScenario::Paged => {
                    let pages = pages.unwrap_or((2 * capacity_units).div_ceil(*page_size));
                    inputs.push(("pages".into(), json!(pages)));
                    inputs.push(("page_size".into(), json!(page_size)));
                    let paged = |mapping| {
                        make_stream(Scenario::Paged {
                            page_count: pages,
                            page_size: *page_size,
                            mapping,
                        })
                    };
                    vec![
                        ("identity".into(), simulate_trace(&geom, &paged(PageMapping::Identity))?),
                        (
                            "permuted".into(),
                            simulate_trace(&geom, &paged(PageMapping::Permuted { seed: *seed }))?,
                        ),
                    ]
                }
            };
            let mut rows = Vec::new();
            for (mapping, trace) in &runs {
                for (phase, stats) in [
                    ("total", trace.total),
                    ("first_pass", trace.first_pass),
                    ("steady", trace.steady),
                ] {
                    rows.push(vec![
                        Cell::Text(mapping.clone()),
                        Cell::Text(phase.into()),
                        Cell::UInt(stats.accesses),
                        Cell::UInt(stats.hits),
                        Cell::UInt(stats.misses),
                        Cell::Real(stats.hit_rate()),
                    ]);
                }
            }
            let needs_seed = matches!(scenario, TraceScenario::Random | TraceScenario::Paged);
            Ok(Report {
                inputs,
                columns: vec![
                    "mapping".into(),
                    "phase".into(),
                    "accesses".into(),
                    "hits".into(),
                    "misses".into(),
                    "hit_rate".into(),
                ],
                rows,
                seed: needs_seed.then_some(*seed),
            })
        }
    }
}

fn execute_net(command: &NetCommand) -> Result<Report> {
    match command {
        NetCommand::Prob { inbound, outbound } => {
            let geom = SwitchGeometry::new(*inbound, *outbound)?;
            let p = switch::no_collision_probability(&geom);
            Ok(Report {
                inputs: vec![
                    ("in".into(), json!(inbound)),
                    ("out".into(), json!(outbound)),
                ],
                columns: vec![
                    "inbound".into(),
                    "outbound".into(),
                    "total_ports".into(),
                    "exact".into(),
                    "no_collision_probability".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(*inbound),
                    Cell::UInt(*outbound),
                    Cell::UInt(geom.total_ports()),
                    Cell::Text(p.to_string()),
                    Cell::Sci(rational_to_f64(&p)),
                ]],
                seed: None,
            })
        }
        NetCommand::Enumerate { inbound, outbound } => {
            let geom = SwitchGeometry::new(*inbound, *outbound)?;
            let (favorable, total) = switch::enumerate_exact(&geom)?;
            Ok(Report {
                inputs: vec![
                    ("in".into(), json!(inbound)),
                    ("out".into(), json!(outbound)),
                ],
                columns: vec![
                    "inbound".into(),
                    "outbound".into(),
                    "favorable".into(),
                    "total".into(),
                    "no_collision_probability".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(*inbound),
                    Cell::UInt(*outbound),
                    Cell::UInt(favorable),
                    Cell::UInt(total),
                    Cell::Sci(favorable as f64 / total as f64),
                ]],
                seed: None,
            })
        }
        NetCommand::Simulate { inbound, outbound, trials, seed } => {
            let geom = SwitchGeometry::new(*inbound, *outbound)?;
            let report = switch::simulate_traffic(&geom, *trials, *seed);
            Ok(Report {
                inputs: vec![
                    ("in".into(), json!(inbound)),
                    ("out".into(), json!(outbound)),
                    ("trials".into(), json!(trials)),
                ],
                columns: vec![
                    "trials".into(),
                    "no_collision_frequency".into(),
                    "no_collision_std_error".into(),
                    "collision_histogram".into(),
                ],
                rows: vec![vec![
                    Cell::UInt(report.trials),
                    Cell::Sci(report.no_collision_frequency),
                    Cell::Sci(report.no_collision_std_error),
                    Cell::Text(trim_histogram(&report.collision_histogram)),
                ]],
                seed: Some(report.seed),
            })
        }
        NetCommand::Sweep { mode, k_min, k_max } => {
            let sweep_mode = match mode {
                SweepModeArg::OneWay => SweepMode::OneWay,
                SweepModeArg::TwoWay => SweepMode::TwoWay,
            };
            let rows = switch::sweep_oversubscription(sweep_mode, *k_min, *k_max)?;
            let mode_name = match mode {
                SweepModeArg::OneWay => "one-way",
                SweepModeArg::TwoWay => "two-way",
            };
            Ok(Report {
                inputs: vec![
                    ("mode".into(), json!(mode_name)),
                    ("k_min".into(), json!(k_min)),
                    ("k_max".into(), json!(k_max)),
                ],
                columns: vec![
                    "k".into(),
                    "exact".into(),
                    "no_collision_probability".into(),
                ],
                rows: rows
                    .into_iter()
                    .map(|(k, p)| {
                        vec![
                            Cell::UInt(k),
                            Cell::Text(p.to_string()),
                            Cell::Sci(rational_to_f64(&p)),
                        ]
                    })
                    .collect(),
                seed: None,
            })
        }
    }
}

/// Histogram as a space-separated count list, trailing zeros trimmed.
fn trim_histogram(histogram: &[u64]) -> String {
    let end = histogram.iter().rposition(|&c| c != 0).map_or(1, |p| p + 1);
    histogram[..end]
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_trimming() {
        assert_eq!(trim_histogram(&[0, 3, 5, 0, 0]), "0 3 5");
        assert_eq!(trim_histogram(&[0]), "0");
        assert_eq!(trim_histogram(&[7]), "7");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["collstats", "cache", "bogus"]), 2);
        assert_eq!(run(["collstats", "cache", "expected", "--sets", "0", "--assoc", "1"]), 2);
    }

    #[test]
    fn domain_errors_exit_1() {
        // inbound > 2 * outbound violates the port model.
        assert_eq!(run(["collstats", "net", "prob", "--in", "9", "--out", "4"]), 1);
    }
}
