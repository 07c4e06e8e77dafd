use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use orbitforge_cli::commands::{run_command, Settings};
use orbitforge_cli::scenarios::{find, SCENARIOS};
use orbitforge_cli::{load_scenario_config, read_json, CliError, CliResult, Output};

#[derive(Parser)]
#[command(name = "orbitforge", version, about = "Arc invariants, Chow numbers and birational descendants")]
struct Cli {
    /// JSON input (payload for a command, scenario configuration for `scenario run`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quadrature tolerance, or sample tolerance for descendants.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Initial radial quadrature grid (angular is twice this).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Report the contribution of each quadrature chart (`chow`).
    #[arg(long, global = true)]
    charts: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "ORBITFORGE_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split an arc as L·t^A·R and report its weighted flag.
    Factorize,
    /// Pole order, norm and ψ of an arc acting on a form, plus the flat limit.
    Nu,
    /// Flat limit of a form under a one-parameter subgroup.
    Limit1ps,
    /// Stability of binary forms by subgroup search and by root multiplicities.
    BinaryStability,
    /// Chow number of a parametrized cycle.
    Chow,
    /// Scan Ch(e^{sA}Z, A) over s and check it is nondecreasing.
    Monotone,
    /// Compare the pole order of an arc with the moment-map pairing of its limit.
    Lemma1,
    /// Upper bound for Ψ of a cycle over a set of probe endomorphisms.
    PsiBound,
    /// Futaki sequence of a test configuration.
    FutakiSeq,
    /// Order of vanishing of a section along the component B.
    Vanishing,
    /// Vanishing-order filtration of degree-p sections.
    Filtration,
    /// Descendants of a degenerating plane curve at each power p.
    Descend,
    /// Compare a descendant of a descendant with the direct descendant.
    ComposeCheck,
    /// Web prefix with admissibility, Ψ bounds and the bracket.
    Web,
    /// Built-in scenarios with golden values.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Run a built-in scenario by name, or the one named in --config.
    Run { name: Option<String> },
    /// List the built-in scenarios.
    List,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Factorize => "factorize",
            Command::Nu => "nu",
            Command::Limit1ps => "limit1ps",
            Command::BinaryStability => "binary-stability",
            Command::Chow => "chow",
            Command::Monotone => "monotone",
            Command::Lemma1 => "lemma1",
            Command::PsiBound => "psi-bound",
            Command::FutakiSeq => "futaki-seq",
            Command::Vanishing => "vanishing",
            Command::Filtration => "filtration",
            Command::Descend => "descend",
            Command::ComposeCheck => "compose-check",
            Command::Web => "web",
            Command::Scenario(_) => "scenario",
        }
    }
}

fn execute(cli: Cli) -> CliResult<Option<(Output, PathBuf)>> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut settings = Settings { seed: cli.seed.unwrap_or(0), tol: cli.tol, grid: cli.grid, charts: cli.charts, quadrature: None };
    match &cli.command {
        Command::Scenario(ScenarioCmd::List) => {
            for s in SCENARIOS {
                println!("{:<26} {}", s.name, s.description);
            }
            Ok(None)
        }
        Command::Scenario(ScenarioCmd::Run { name }) => {
            let cfg = cli.config.as_deref().map(load_scenario_config).transpose()?;
            let name = match (name, &cfg) {
                (Some(n), _) => n.clone(),
                (None, Some(c)) => c.scenario.clone(),
                (None, None) => return Err(CliError::Config("scenario run needs a name or --config".into())),
            };
            let scenario = find(&name)?;
            let mut input = Value::Null;
            if let Some(c) = cfg {
                if c.scenario != name {
                    return Err(CliError::Config(format!("config is for scenario {:?}, not {name:?}", c.scenario)));
                }
                settings.seed = cli.seed.or(c.seed).unwrap_or(0);
                settings.quadrature = c.quadrature;
                input = c.input;
                if cli.out.is_none() {
                    if let Some(o) = c.out {
                        return Ok(Some((scenario.run(&settings, &input)?, o)));
                    }
                }
            }
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&name));
            Ok(Some((scenario.run(&settings, &input)?, out)))
        }
        cmd => {
            let path = cli.config.as_deref().ok_or_else(|| CliError::Config(format!("{} needs --config <path>", cmd.name())))?;
            let payload = read_json(path)?;
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(cmd.name()));
            Ok(Some((run_command(cmd.name(), &payload, &settings)?, out)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some((output, dir))) => {
            if let Err(e) = output.write(&dir) {
                eprintln!("error: {}", CliError::from(e));
                return ExitCode::from(1);
            }
            for c in &output.report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("wrote {}", dir.join("report.json").display());
            if output.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
