//! Library side of the `tropsec` binary: argument types, command handlers,
//! run manifests, SVG rendering and the reproduction targets.

pub mod args;
pub mod error;
pub mod manifest;
pub mod render;
pub mod reproduce;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use tropsec::bounds::evaluate;
use tropsec::codes::{
    code_from_parity_check, grassmann_code_bound, greedy_constant_weight_code, rook_bound, veronese_corner_bound,
    veronese_corner_witness, CodeSpec,
};
use tropsec::oracle::{stable_dim, terracini_dim};
use tropsec::rational::parse_rational;
use tropsec::search::{anneal, brute_force, pairwise_midpoints, perturb_witness, SearchParams};
use tropsec::{GramForm, PointConfig, Problem, Witness};

use args::{CandidateSet, Cli, CodesCommand, Command, EvalArgs, SearchArgs, Target};
use error::{CliError, CliResult};
use manifest::RunManifest;

/// What a handler produced: the primary output, an optional one-line
/// summary for the terminal, the files it read, and a deferred failure that
/// is reported only after the output has been written.
struct Output {
    body: String,
    summary: Option<String>,
    inputs: Vec<PathBuf>,
    failure: Option<CliError>,
}

impl Output {
    fn json<T: Serialize>(value: &T, inputs: Vec<PathBuf>) -> CliResult<Self> {
        Ok(Output {
            body: to_json(value)?,
            summary: None,
            inputs,
            failure: None,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Semantic(format!("serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Execute a parsed command line. `invocation` is recorded in the manifest.
pub fn run(cli: &Cli, invocation: &str) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let out = pool.install(|| dispatch(cli))?;

    match &cli.output {
        Some(path) => {
            write_file(path, &out.body)?;
            let manifest = RunManifest::new(invocation, &out.inputs, cli.seed, &[path.as_path()])?;
            write_file(&RunManifest::path_for(path), &to_json(&manifest)?)?;
            if let Some(s) = &out.summary {
                println!("{s}");
            }
        }
        None => {
            print!("{}", out.body);
            if let Some(s) = &out.summary {
                eprintln!("{s}");
            }
        }
    }
    match out.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Generate(family) => {
            let config = family.config()?;
            let mut out = Output::json(&config, vec![])?;
            out.summary = Some(format!("sets: {}, ambient_dim: {}", config.len(), config.ambient_dim()));
            Ok(out)
        }
        Command::Eval(args) => eval(args),
        Command::Search(args) => search(args, cli.seed),
        Command::Codes { command } => codes(command),
        Command::Oracle(args) => {
            let desc = args.family.descriptor()?;
            let report = match args.prime {
                Some(p) => terracini_dim(&desc, args.k, p, args.trials, cli.seed)?,
                None => stable_dim(&desc, args.k, args.trials, cli.seed)?,
            };
            let mut out = Output::json(&report, vec![])?;
            out.summary = Some(format!("{desc}: dim {}C = {}", args.k, report.reported_dim));
            Ok(out)
        }
        Command::Reproduce(args) => {
            let report = match args.target {
                Target::BinaryForms => reproduce::binary_forms(args.dmax.unwrap_or(12), cli.seed, args.trials)?,
                Target::VeroneseM3 => reproduce::veronese_m3(args.dmax.unwrap_or(8), cli.seed, args.trials)?,
                Target::SegreP16 => reproduce::segre_p1_6(cli.seed, args.trials)?,
                Target::CodeBounds => reproduce::code_bounds(cli.seed, args.trials)?,
            };
            let mut out = Output::json(&report, vec![])?;
            let table = report.table();
            if !report.passed {
                out.failure = Some(CliError::Mismatch(table.clone()));
            } else {
                out.summary = Some(table.trim_end().to_string());
            }
            Ok(out)
        }
        Command::Render(args) => {
            let config: PointConfig = read_json(&args.config)?;
            let witness: Witness = read_json(&args.witness)?;
            let mut inputs = vec![args.config.clone(), args.witness.clone()];
            let g = match &args.gram {
                Some(p) => {
                    inputs.push(p.clone());
                    Some(read_json::<GramForm>(p)?)
                }
                None => None,
            };
            if !config.all_singletons() {
                return Err(CliError::Semantic("render needs a configuration of single points".into()));
            }
            let result = evaluate(Problem::Voronoi, &config, &witness, g.as_ref())?;
            Ok(Output {
                body: render::render_svg(&config, &witness, &result)?,
                summary: None,
                inputs,
                failure: None,
            })
        }
    }
}

fn load_gram(path: &Option<PathBuf>, inputs: &mut Vec<PathBuf>) -> CliResult<Option<GramForm>> {
    path.as_ref()
        .map(|p| {
            inputs.push(p.clone());
            read_json(p)
        })
        .transpose()
}

fn eval(args: &EvalArgs) -> CliResult<Output> {
    let config: PointConfig = read_json(&args.config)?;
    let mut witness: Witness = read_json(&args.witness)?;
    let mut inputs = vec![args.config.clone(), args.witness.clone()];
    let g = load_gram(&args.gram, &mut inputs)?;
    let problem = Problem::from(args.problem);
    if g.is_some() && problem != Problem::Voronoi {
        return Err(CliError::Usage("--gram applies to the voronoi problem only".into()));
    }
    if args.perturb {
        if problem != Problem::Voronoi {
            return Err(CliError::Usage("--perturb applies to the voronoi problem only".into()));
        }
        let std = GramForm::standard(config.ambient_dim());
        witness = perturb_witness(&witness, &config, g.as_ref().unwrap_or(&std))?;
    }
    let mut result = evaluate(problem, &config, &witness, g.as_ref())?;
    if args.minima {
        result = result.with_minima(&config, &witness)?;
    }
    let mut out = Output::json(&result, inputs)?;
    out.summary = Some(format!("total: {}", result.total));
    Ok(out)
}

fn search(args: &SearchArgs, seed: u64) -> CliResult<Output> {
    let config: PointConfig = read_json(&args.config)?;
    let mut inputs = vec![args.config.clone()];
    let g = load_gram(&args.gram, &mut inputs)?;
    let problem = Problem::from(args.problem);
    let outcome = if args.brute_force {
        let points = config.all_points();
        let candidates = match args.candidates {
            CandidateSet::Points => {
                let mut p = points;
                p.sort();
                p.dedup();
                p
            }
            CandidateSet::Midpoints => pairwise_midpoints(&points),
        };
        brute_force(&config, args.k, problem, &candidates, g.as_ref(), args.budget)?
    } else {
        let defaults = SearchParams::default();
        let rational = |s: &Option<String>, fallback| match s {
            Some(s) => parse_rational(s).map_err(CliError::from),
            None => Ok(fallback),
        };
        let params = SearchParams {
            seed,
            restarts: args.restarts.unwrap_or(defaults.restarts),
            steps: args.steps.unwrap_or(defaults.steps),
            initial_step_size: rational(&args.step_size, defaults.initial_step_size.clone())?,
            cooling: rational(&args.cooling, defaults.cooling.clone())?,
            candidate_grid_denominator: args.den.unwrap_or(defaults.candidate_grid_denominator),
        };
        let seeds = args
            .seed_witnesses
            .iter()
            .map(|p| {
                inputs.push(p.clone());
                read_json::<Witness>(p)
            })
            .collect::<CliResult<Vec<_>>>()?;
        anneal(&config, args.k, problem, &params, &seeds, g.as_ref())?
    };
    let mut out = Output::json(&outcome, inputs)?;
    out.summary = Some(format!("best total: {}", outcome.total()));
    Ok(out)
}

#[derive(Serialize)]
struct CodeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<CodeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    bound: usize,
}

fn parse_row(row: &str) -> CliResult<Vec<usize>> {
    row.trim()
        .chars()
        .map(|c| {
            c.to_digit(36)
                .map(|v| v as usize)
                .ok_or_else(|| CliError::Usage(format!("bad symbol {c:?} in parity-check row {row:?}")))
        })
        .collect()
}

fn codes(command: &CodesCommand) -> CliResult<Output> {
    let (report, inputs) = match command {
        CodesCommand::Parity { h, q } => {
            let rows = h.iter().map(|r| parse_row(r)).collect::<CliResult<Vec<_>>>()?;
            let code = code_from_parity_check(&rows, *q)?;
            let bound = rook_bound(&code);
            (CodeReport { code: Some(code), witness: None, bound }, vec![])
        }
        CodesCommand::Rook { code } => {
            let c: CodeSpec = read_json(code)?;
            (CodeReport { bound: rook_bound(&c), code: Some(c), witness: None }, vec![code.clone()])
        }
        CodesCommand::Grassmann { code } => {
            let c: CodeSpec = read_json(code)?;
            (
                CodeReport { bound: grassmann_code_bound(&c)?, code: Some(c), witness: None },
                vec![code.clone()],
            )
        }
        CodesCommand::Corner { corners, m, d } => (
            CodeReport {
                code: None,
                witness: Some(veronese_corner_witness(corners, *m, *d)?),
                bound: veronese_corner_bound(corners, *m, *d)?,
            },
            vec![],
        ),
        CodesCommand::Greedy { m, d, min_dist } => {
            let code = greedy_constant_weight_code(*m, *d, *min_dist)?;
            let bound = grassmann_code_bound(&code)?;
            (CodeReport { code: Some(code), witness: None, bound }, vec![])
        }
    };
    let mut out = Output::json(&report, inputs)?;
    out.summary = Some(format!("bound: {}", report.bound));
    Ok(out)
}
