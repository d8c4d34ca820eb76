use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mixdih_core::calculus::{build_h, build_p, build_toy, TOY_DIM};
use mixdih_core::graphs::{gamma_graph, line_graph, normal_quotient, sigma_graph, sigma_orbits, SimpleGraph};
use mixdih_core::morphisms::{automorphism_order, extend, parse_map};
use mixdih_core::pcgroup::{PcPresentation, Subgroup};
use mixdih_core::report::{verify_full, verify_toy, Built, Check, Options, VerificationReport, DEFAULT_SEED};
use mixdih_core::search::{run_search, stab_subgroup, SearchConfig, SearchLevel, DEFAULT_MAX_SURVIVORS};
use mixdih_core::Error;

const EXIT_BUDGET: u8 = 64;
const EXIT_IO: u8 = 65;

#[derive(Parser)]
#[command(name = "mixdih", version, about = "Mixed dihedral 2-groups: build, verify, search")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "DF_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    H56,
    P59,
    Toy2,
}

impl Target {
    fn label(self) -> &'static str {
        match self {
            Target::H56 => "h56",
            Target::P59 => "p59",
            Target::Toy2 => "toy2",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Gamma,
    Sigma,
    LineSigma,
    Quotient,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a consistent pc presentation.
    Build {
        #[arg(value_enum)]
        target: Target,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the named check suite and write a JSON report.
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check this presentation file first (consistency, then equality with the built one).
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Descend through index-2 subgroups of P looking for a regular subgroup.
    Search {
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_SURVIVORS)]
        max_survivors: usize,
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Export a toy graph as adjacency text.
    Graph {
        #[arg(value_enum)]
        kind: GraphKind,
        #[arg(long)]
        emit_graph: Option<PathBuf>,
    },
    /// Try to extend a generator map file to an automorphism of H.
    Maps {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "h56")]
        target: Target,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Parse(_) => EXIT_IO,
        Error::BudgetExceeded { .. } | Error::ClosureBudgetExceeded(_) => EXIT_BUDGET,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_for(&e))
}

fn presentation(target: Target) -> mixdih_core::Result<PcPresentation> {
    Ok(match target {
        Target::H56 => build_h()?.group.pc,
        Target::P59 => build_p(&build_h()?)?.pc,
        Target::Toy2 => build_toy(TOY_DIM)?.pc,
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> mixdih_core::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_build(target: Target, out: &Path) -> mixdih_core::Result<()> {
    let pc = presentation(target)?;
    pc.ensure_consistent()?;
    let mut w = BufWriter::new(File::create(out)?);
    pc.write_to(&mut w)?;
    w.flush()?;
    eprintln!("wrote {} (n = {})", out.display(), pc.len());
    Ok(())
}

fn file_checks(target: Target, path: &Path) -> mixdih_core::Result<Vec<Check>> {
    let built = presentation(target)?;
    let read = PcPresentation::read_from(BufReader::new(File::open(path)?), Some(built.names().to_vec()))?;
    let violations = read.consistency_check();
    let consistent = violations.is_empty();
    let mut checks = vec![Check {
        name: "presentation_file_consistency".into(),
        passed: consistent,
        expected: "0 violations".into(),
        actual: match violations.first() {
            None => "0 violations".into(),
            Some(v) => format!("{} violations, first {v}", violations.len()),
        },
        claim: "the supplied presentation is consistent".into(),
    }];
    if consistent {
        checks.push(Check {
            name: "presentation_file_matches".into(),
            passed: read == built,
            expected: "identical to the built presentation".into(),
            actual: if read == built { "identical" } else { "differs" }.into(),
            claim: "the supplied presentation is the built group".into(),
        });
    }
    Ok(checks)
}

fn cmd_verify(target: Target, file: Option<&Path>, opts: &Options) -> mixdih_core::Result<VerificationReport> {
    let pre = match file {
        Some(p) => file_checks(target, p)?,
        None => Vec::new(),
    };
    if pre.iter().any(|c| !c.passed) {
        return Ok(VerificationReport {
            engine_version: mixdih_core::report::ENGINE_VERSION.into(),
            target: target.label().into(),
            seed: opts.seed,
            failed: pre.iter().filter(|c| !c.passed).count(),
            checks: pre,
            timings: Default::default(),
        });
    }
    let mut report = match target {
        Target::Toy2 => verify_toy(&build_toy(TOY_DIM)?, opts),
        _ => verify_full(&Built::new()?, target.label(), opts),
    };
    if !pre.is_empty() {
        report.checks.splice(0..0, pre);
    }
    Ok(report)
}

fn cmd_search(resume: Option<&Path>, config: &SearchConfig, report: Option<&Path>) -> mixdih_core::Result<bool> {
    let h = build_h()?;
    let p = build_p(&h)?;
    let stab = stab_subgroup(&p, &h);
    let start = match resume {
        Some(path) => Some(SearchLevel::read_checkpoint(&p.pc, &stab, BufReader::new(File::open(path)?))?),
        None => None,
    };
    let result = run_search(&p.pc, &stab, config, start)?;
    for l in &result.levels {
        eprintln!(
            "depth {}: meet {} candidates {} survivors {}",
            l.depth, l.required_meet, l.candidates, l.survivors
        );
    }
    eprintln!("verdict: {}", result.verdict);
    write_json(&result, report)?;
    Ok(!result.regular_subgroup_exists)
}

fn cmd_graph(kind: GraphKind, out: Option<&Path>) -> mixdih_core::Result<()> {
    let toy = build_toy(TOY_DIM)?;
    let graph: SimpleGraph = match kind {
        GraphKind::Gamma => gamma_graph(&toy)?,
        GraphKind::Sigma => sigma_graph(&toy)?.graph,
        GraphKind::LineSigma => line_graph(&sigma_graph(&toy)?.graph)?,
        GraphKind::Quotient => {
            let sigma = sigma_graph(&toy)?;
            let derived = Subgroup::full(&toy.pc).derived(&toy.pc);
            let (q, cover) = normal_quotient(&sigma.graph, &sigma_orbits(&toy, &sigma, &derived));
            eprintln!("cover: {cover}");
            q
        }
    };
    match out {
        Some(p) => graph.write_adjacency(BufWriter::new(File::create(p)?))?,
        None => graph.write_adjacency(std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_maps(file: &Path, target: Target) -> mixdih_core::Result<bool> {
    let group = match target {
        Target::Toy2 => build_toy(TOY_DIM)?,
        _ => build_h()?.group,
    };
    let label = file.file_stem().map_or("map".into(), |s| s.to_string_lossy().into_owned());
    let map = parse_map(&group, &label, BufReader::new(File::open(file)?))?;
    match extend(&group, &map) {
        Ok(f) => {
            let order = automorphism_order(&group, &f, 1 << 16);
            println!(
                "{label}: automorphism of order {}",
                order.map_or("> 65536".into(), |k| k.to_string())
            );
            Ok(true)
        }
        Err(e @ (Error::NotHomomorphism { .. } | Error::NotBijective { .. })) => {
            println!("{label}: {e}");
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Build { target, out } => match cmd_build(target, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Cmd::Verify {
            target,
            report,
            presentation,
            seed,
            samples,
        } => {
            let opts = Options {
                seed,
                assoc_samples: samples,
                search: SearchConfig {
                    threads: cli.threads,
                    ..SearchConfig::default()
                },
            };
            let result = cmd_verify(target, presentation.as_deref(), &opts)
                .and_then(|r| write_json(&r, report.as_deref()).map(|()| r));
            match result {
                Ok(r) => {
                    for c in &r.checks {
                        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.actual);
                    }
                    ExitCode::from(r.failed.min(63) as u8)
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Search {
            resume,
            max_survivors,
            checkpoint_dir,
            report,
        } => {
            let config = SearchConfig {
                max_survivors,
                threads: cli.threads,
                checkpoint_dir,
            };
            match cmd_search(resume.as_deref(), &config, report.as_deref()) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => fail(e),
            }
        }
        Cmd::Graph { kind, emit_graph } => match cmd_graph(kind, emit_graph.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Cmd::Maps { file, target } => match cmd_maps(&file, target) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => fail(e),
        },
    }
}
