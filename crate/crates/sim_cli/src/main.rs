use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use sim_cli::scenario::from_toml_str;
use sim_cli::setup::build_mesh;
use sim_cli::sweep::write_property_table;
use sim_cli::{monte_carlo, parse_scenario, property_sweep, run_case, CliError, PropsFile};

/// Coupled deformation, conduction and phase-field fracture of CNT composites.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Effective properties over a volume-fraction × aspect-ratio grid.
    Props(Common),
    /// Single scenario run.
    Run {
        #[command(flatten)]
        common: Common,
        /// Seed for sampled features; overrides the scenario.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Seeded replicates of a scenario with random features.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Replicate count; overrides the scenario.
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Generate the mesh only and export it.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn mkdir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })
}

fn execute(verb: Verb) -> Result<i32, CliError> {
    match verb {
        Verb::Props(c) => {
            let src = fs::read_to_string(&c.scenario).map_err(|e| CliError::Io { path: c.scenario.clone(), source: e })?;
            let file: PropsFile = from_toml_str(&src)?;
            let spec = match file.material.resolve()? {
                sim_cli::scenario::MaterialSource::Composite(s) => s,
                sim_cli::scenario::MaterialSource::Isotropic(_) => return Err(CliError::invalid("material", "property sweeps need a composite material")),
            };
            let table = property_sweep(&spec, &file.sweep.volume_fractions, &file.sweep.aspect_ratios)?;
            mkdir(&c.out)?;
            write_property_table(&c.out.join("properties.csv"), &table)?;
            info!("trends: {:?}", table.flags);
            Ok(0)
        }
        Verb::Run { common: c, seed } => {
            let s = parse_scenario(&c.scenario)?;
            let summary = run_case(&s, seed.unwrap_or(s.seed), Some(&c.out))?;
            print!("{}", sim_cli::run::summary_text(&summary));
            Ok(if summary.completed() { 0 } else { 3 })
        }
        Verb::Mc { common: c, seed, replicates } => {
            let s = parse_scenario(&c.scenario)?;
            let e = monte_carlo(&s, replicates.unwrap_or(s.replicates), seed.unwrap_or(s.seed), Some(&c.out))?;
            let failed = e.replicates.iter().filter(|r| !r.result.as_ref().is_ok_and(|s| s.completed())).count();
            println!("replicates = {}\nfailed = {failed}\nhistogram_bins = {}", e.replicates.len(), e.histogram.len());
            Ok(if failed == 0 { 0 } else { 3 })
        }
        Verb::Mesh { common: c, seed } => {
            let s = parse_scenario(&c.scenario)?;
            let (mesh, _) = build_mesh(&s, seed.unwrap_or(s.seed))?;
            mkdir(&c.out)?;
            let path = c.out.join("mesh.txt");
            let f = File::create(&path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
            fem_core::io::write_mesh(BufWriter::new(f), &mesh)?;
            println!("nodes = {}\nactive_elements = {}", mesh.n_nodes(), mesh.n_active());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let threads = match &cli.verb {
        Verb::Props(c) | Verb::Run { common: c, .. } | Verb::Mc { common: c, .. } | Verb::Mesh { common: c, .. } => c.threads,
    };
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            error!("thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.verb) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
