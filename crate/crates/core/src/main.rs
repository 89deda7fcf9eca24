use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heavytail_ldp::experiments::{
    dump_scenario_paths, limit_constant, run_scenario, Report, ScenarioConfig, SuiteConfig,
};
use heavytail_ldp::jump_opt::optimal_jump_path;
use heavytail_ldp::{Error, Result};

#[derive(Parser)]
#[command(name = "heavytail-ldp", version, about = "Heavy-tailed sample-path large deviations experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write sample paths of the configured model as CSV files.
    Simulate(Common),
    /// Print the scenario's limit constant as JSON.
    EstimateC(Common),
    /// Print the optimal jump path through the configured corridor as JSON.
    Corridor(Common),
    /// Run one scenario and write report.json and ratios.csv.
    Run(Common),
    /// Run a suite (or a single scenario) and fail on any band violation.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario or suite TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `samples_per_n` (and the path count for `simulate`, the
    /// sample size for `estimate-c`).
    #[arg(long)]
    samples: Option<u64>,
    /// Also write sample paths under `<out>/paths`.
    #[arg(long)]
    dump_paths: bool,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        self.apply(&mut cfg);
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.samples_per_n = n;
        }
    }

    fn out_dir(&self, cfg: &ScenarioConfig) -> PathBuf {
        match &self.out {
            Some(o) => o.clone(),
            None => PathBuf::from(&cfg.output_dir),
        }
    }
}

fn print_summary(r: &Report, dir: &Path) {
    println!("{}: {} ({})", r.scenario, if r.pass { "PASS" } else { "FAIL" }, dir.display());
    for c in &r.checks {
        println!("  [{}] {} = {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.value);
    }
    for w in &r.warnings {
        eprintln!("  warning: {w}");
    }
}

fn run_one(cfg: &ScenarioConfig, dir: &Path, dump: bool) -> Result<Report> {
    let report = run_scenario(cfg)?;
    report.write(dir)?;
    if dump {
        dump_scenario_paths(cfg, &dir.join("paths"))?;
    }
    print_summary(&report, dir);
    Ok(report)
}

fn is_suite(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(table.contains_key("configs"))
}

/// Returns whether every band passed.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Simulate(c) => {
            let mut cfg = c.load()?;
            if let Some(n) = c.samples {
                cfg.dump_paths = n as usize;
            }
            if cfg.n_list.is_empty() {
                return Err(Error::Config("simulate needs a nonempty n_list".into()));
            }
            let dir = c.out_dir(&cfg).join("paths");
            dump_scenario_paths(&cfg, &dir)?;
            println!("{}", dir.display());
            Ok(true)
        }
        Command::EstimateC(c) => {
            let mut cfg = ScenarioConfig::load(&c.config)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            if let Some(n) = c.samples {
                cfg.limit_samples = n;
            }
            println!("{}", serde_json::to_string_pretty(&limit_constant(&cfg)?)?);
            Ok(true)
        }
        Command::Corridor(c) => {
            let cfg = c.load()?;
            let result = optimal_jump_path(&cfg.corridor()?)?;
            println!("{}", serde_json::to_string_pretty(&result.to_json())?);
            Ok(true)
        }
        Command::Run(c) => {
            let cfg = c.load()?;
            run_one(&cfg, &c.out_dir(&cfg), c.dump_paths)?;
            Ok(true)
        }
        Command::Verify(c) => {
            let configs = if is_suite(&c.config)? {
                SuiteConfig::load(&c.config)?
            } else {
                vec![ScenarioConfig::load(&c.config)?]
            };
            let mut all = true;
            for mut cfg in configs {
                c.apply(&mut cfg);
                let dir = match &c.out {
                    Some(o) => o.join(cfg.scenario.name()),
                    None => PathBuf::from(&cfg.output_dir),
                };
                all &= run_one(&cfg, &dir, c.dump_paths)?.pass;
            }
            println!("verify: {}", if all { "PASS" } else { "FAIL" });
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
