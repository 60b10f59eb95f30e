use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use encircle::evader::PolicyKind;
use encircle::export::{save_monte_carlo, save_summary, save_trace};
use encircle::montecarlo::{monte_carlo, MonteCarloConfig};
use encircle::scenario::{load_config, ScenarioConfig};
use encircle::simulation::Episode;
use encircle_steering::ServerConfig;
use tracing::info;
use tracing_subscriber::EnvFilter;

/// Encirclement-preserving pursuit: run episodes, Monte Carlo sweeps and the
/// live steering service.
#[derive(Parser)]
#[command(name = "encircle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write trace.csv and summary.json.
    Run {
        scenario: PathBuf,
        /// Evader policy, overriding the scenario's.
        #[arg(long, value_parser = parse_policy)]
        policy: Option<PolicyKind>,
        /// Evader speed bound, overriding the scenario's.
        #[arg(long)]
        mu: Option<f64>,
        /// Integration step, overriding the scenario's.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, short, default_value = "encircle-out")]
        output: PathBuf,
    },
    /// Random evader starts inside the pursuer hull, for each speed bound.
    Montecarlo {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated speed bounds; defaults to the scenario's.
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_policy, default_value = "closest_link")]
        policy: PolicyKind,
        #[arg(long, short, default_value = "encircle-mc")]
        output: PathBuf,
    },
    /// Serve the steering WebSocket at ws://HOST:PORT/ws.
    Serve {
        scenario: PathBuf,
        #[arg(long, default_value_t = 8090)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Simulated seconds per wall-clock second.
        #[arg(long, default_value_t = 1.0)]
        pacing: f64,
        /// State frames per second.
        #[arg(long, default_value_t = encircle_steering::server::DEFAULT_FRAME_RATE)]
        rate: f64,
    },
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse()
}

fn read_scenario(path: &Path) -> Result<ScenarioConfig> {
    load_config(path).with_context(|| format!("cannot load scenario {}", path.display()))
}

fn cmd_run(path: &Path, policy: Option<PolicyKind>, mu: Option<f64>, dt: Option<f64>, output: &Path) -> Result<bool> {
    let mut cfg = read_scenario(path)?;
    if let Some(kind) = policy {
        cfg = cfg.with_policy(kind);
    }
    if let Some(mu) = mu {
        cfg = cfg.with_mu_max(mu);
    }
    if let Some(dt) = dt {
        cfg = cfg.with_dt(dt);
    }
    anyhow::ensure!(cfg.policy.kind != PolicyKind::External, "the external policy is only available under `serve`");
    let scenario = cfg.validate()?;
    let mut evader = scenario.policy.build(scenario.seed, None);
    let mut episode = Episode::new(&scenario)?;
    let result = episode.run(evader.as_mut())?.clone();

    std::fs::create_dir_all(output).with_context(|| format!("cannot create {}", output.display()))?;
    save_trace(&episode.into_trace(), output.join("trace.csv"))?;
    save_summary(&result, output.join("summary.json"))?;

    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    let certified = result.encirclement_ok && result.bound_respected();
    println!("policy        {:?}", scenario.policy.kind);
    println!("t_capture     {}", show(result.t_capture));
    println!("captured_by   {}", result.captured_by.map_or("none".to_string(), |i| format!("p{i}")));
    println!("t_bound       {}", show(result.t_bound));
    println!("tau           {}", show(result.tau));
    println!("min_area      {:.6e}", result.min_area_seen);
    println!(
        "verdict       {}",
        match (result.encirclement_ok, result.captured, certified) {
            (false, _, _) => "encirclement violated",
            (true, false, _) => "encircled, not captured",
            (true, true, false) => "encircled, captured after the bound",
            (true, true, true) => "encircled and captured within the bound",
        }
    );
    info!(dir = %output.display(), "wrote trace.csv and summary.json");
    Ok(certified || scenario.t_bound().is_none() && result.encirclement_ok)
}

fn cmd_montecarlo(
    path: &Path,
    trials: usize,
    mu: Vec<f64>,
    seed: u64,
    policy: PolicyKind,
    output: &Path,
) -> Result<()> {
    let template = read_scenario(path)?;
    let mu_values = if mu.is_empty() { vec![template.mu_max] } else { mu };
    let stats = monte_carlo(&MonteCarloConfig { trials, template, policy, mu_values, seed })?;
    save_monte_carlo(&stats, output)?;
    for s in &stats {
        println!(
            "mu_max {:<5} captured {}/{}  mean_t {:.4}  std_t {:.4}  tau_mean {:.4}  tau_max {:.4}  encircled {}",
            s.mu_max, s.captured, s.trials, s.mean_t, s.std_t, s.tau_mean, s.tau_max, s.encirclement_ok
        );
    }
    info!(dir = %output.display(), "wrote trials.csv, histogram.csv and montecarlo.json");
    Ok(())
}

fn cmd_serve(path: &Path, host: &str, port: u16, pacing: f64, rate: f64) -> Result<()> {
    anyhow::ensure!(pacing > 0.0 && pacing.is_finite(), "pacing must be positive");
    anyhow::ensure!(rate > 0.0 && rate.is_finite(), "frame rate must be positive");
    let scenario = read_scenario(path)?.with_policy(PolicyKind::External).validate()?;
    let config = ServerConfig { scenario, frame_rate: rate, pacing };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .with_context(|| format!("cannot listen on {host}:{port}"))?;
        println!("listening on ws://{}/ws", listener.local_addr()?);
        encircle_steering::serve(listener, config, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("ENCIRCLE_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();

    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { scenario, policy, mu, dt, output } => cmd_run(&scenario, policy, mu, dt, &output),
        Command::Montecarlo { scenario, trials, mu, seed, policy, output } => {
            cmd_montecarlo(&scenario, trials, mu, seed, policy, &output).map(|()| true)
        }
        Command::Serve { scenario, port, host, pacing, rate } => {
            cmd_serve(&scenario, &host, port, pacing, rate).map(|()| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: capture certificate failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
