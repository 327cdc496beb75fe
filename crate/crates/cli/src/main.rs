//! `cubicgate` — simulate the measurement-induced weak cubic gate, its
//! resource-state engineering, the probe sweep, and the Gaussian benchmark.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::json;

use cubic_core::benchmark::{ideal_map_p2, optimize_benchmark, solve_kappa};
use cubic_core::fock::{coherent, moments_pure};
use cubic_core::gate::{run_deterministic, run_probabilistic, GateState};
use cubic_core::grid::{to_grid, GridSpec};
use cubic_core::resource::{
    carrier_g, compose_betas, cubic_coefficients, direct_resource, recipe_chi_prime, recipe_state,
    solve_triple, triple_residuals, ResourceSpec,
};
use cubic_core::sweep::run_sweep;

use cubicgate_cli::config::{parse_config, FileConfig, GateMode};
use cubicgate_cli::output::{emit_outputs, fmt12};
use cubicgate_cli::sampling::sample_outcomes;
use cubicgate_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "cubicgate", about = "Measurement-induced weak cubic nonlinearity, end to end", version)]
struct Cli {
    /// TOML configuration file; omitted means the shipped defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the cubic resource state directly and through the
    /// photon-subtraction recipe; report amplitudes, displacements, and
    /// residuals.
    Resource(ResourceArgs),
    /// Run the gate on one coherent input.
    Gate(GateArgs),
    /// Run the probe sweep and write CSV/JSON/plot outputs.
    Sweep(SweepArgs),
    /// Optimize the Gaussian benchmark for one coherent input.
    Benchmark(BenchmarkArgs),
    /// Print the two cubic factors composing the sixth-order expansion.
    Compose(ComposeArgs),
}

#[derive(Args)]
struct ResourceArgs {
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    g_gen: Option<f64>,
}

#[derive(Args)]
struct GateArgs {
    #[arg(long)]
    alpha_re: Option<f64>,
    #[arg(long)]
    alpha_im: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// deterministic | probabilistic
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    q_min: Option<f64>,
    #[arg(long)]
    q_max: Option<f64>,
    #[arg(long)]
    q_nodes: Option<usize>,
    /// Write the output density matrix (deterministic mode) as CSV.
    #[arg(long)]
    dump_density: Option<PathBuf>,
    /// Write the output wavefunction (probabilistic mode) as CSV.
    #[arg(long)]
    dump_wavefunction: Option<PathBuf>,
    /// Demonstration only: draw N homodyne outcomes from P(q).
    #[arg(long)]
    sample: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    im_alpha: Option<f64>,
    #[arg(long)]
    no_benchmark: bool,
    /// Output directory; defaults to $CUBICGATE_OUT, then ".".
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    alpha_re: Option<f64>,
    #[arg(long)]
    alpha_im: Option<f64>,
    /// Effective nonlinearity target; overrides the config value.
    #[arg(long)]
    chi_eff: Option<f64>,
    /// Fit χ_eff from a sweep manifest (JSON) instead.
    #[arg(long)]
    fit_from: Option<PathBuf>,
    /// A gate ⟨p̂′²⟩ to report the margin against.
    #[arg(long)]
    gate_p2: Option<f64>,
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long)]
    chi: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cubicgate: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = parse_config(cli.config.as_deref())?;
    match cli.command {
        Command::Resource(args) => cmd_resource(cfg, args),
        Command::Gate(args) => cmd_gate(cfg, args),
        Command::Sweep(args) => cmd_sweep(cfg, args),
        Command::Benchmark(args) => cmd_benchmark(cfg, args),
        Command::Compose(args) => cmd_compose(cfg, args),
    }
}

fn complex_pair(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn cmd_resource(mut cfg: FileConfig, args: ResourceArgs) -> CliResult<()> {
    if let Some(chi) = args.chi {
        cfg.resource.chi = chi;
    }
    if let Some(g) = args.g {
        cfg.resource.g = g;
    }
    if let Some(g_gen) = args.g_gen {
        cfg.resource.g_gen = g_gen;
    }
    let r = &cfg.resource;
    let spec = ResourceSpec::new(r.chi, r.g, r.dim)?;
    let direct = direct_resource(&spec)?;
    let amplitudes: Vec<serde_json::Value> = direct
        .state
        .amplitudes
        .iter()
        .take(8)
        .map(|a| complex_pair(*a))
        .collect();

    // Recipe at the generation squeezing, compared against the matching
    // direct construction on the carrier.
    let chi_prime = recipe_chi_prime(r.chi, r.g_gen);
    let coeffs = cubic_coefficients(chi_prime, r.g_gen)?;
    let triple = solve_triple(&coeffs);
    let residuals = triple_residuals(&coeffs, &triple);
    let (recipe, success) = recipe_state(&triple, r.g_gen, r.recipe_dim)?;
    let carrier = direct_resource(&ResourceSpec::new(r.chi, carrier_g(r.g_gen), r.recipe_dim)?)?;
    let fidelity = cubic_core::fock::fidelity(&recipe, &carrier.state)?;

    let doc = json!({
        "spec": { "chi": r.chi, "g": r.g, "dim": r.dim },
        "direct": {
            "norm": direct.norm,
            "leading_amplitudes": amplitudes,
        },
        "recipe": {
            "g_gen": r.g_gen,
            "chi_prime": chi_prime,
            "mu": coeffs.mu,
            "nu": coeffs.nu,
            "c1": coeffs.c1,
            "c2": coeffs.c2,
            "xi": triple.xi,
            "zeta": triple.zeta,
            "alpha": complex_pair(triple.alpha),
            "beta": complex_pair(triple.beta),
            "gamma": complex_pair(triple.gamma),
            "residuals": residuals,
            "success_norm_sq": success,
            "fidelity_vs_direct": fidelity,
        },
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn cmd_gate(mut cfg: FileConfig, args: GateArgs) -> CliResult<()> {
    let g = &mut cfg.gate;
    if let Some(v) = args.alpha_re {
        g.alpha_re = v;
    }
    if let Some(v) = args.alpha_im {
        g.alpha_im = v;
    }
    if let Some(v) = args.chi {
        g.chi = v;
    }
    if let Some(v) = args.g {
        g.g = v;
    }
    if let Some(v) = args.lambda {
        g.lambda = v;
    }
    if let Some(v) = args.q_min {
        g.q_min = v;
    }
    if let Some(v) = args.q_max {
        g.q_max = v;
    }
    if let Some(v) = args.q_nodes {
        g.q_nodes = v;
    }
    if let Some(m) = &args.mode {
        g.mode = match m.as_str() {
            "deterministic" => GateMode::Deterministic,
            "probabilistic" => GateMode::Probabilistic,
            other => return Err(CliError::invalid_value(format!("unknown mode `{other}`"))),
        };
    }
    let gate_cfg = cfg.gate.to_gate_config()?;
    let input = coherent(C64::new(cfg.gate.alpha_re, cfg.gate.alpha_im), gate_cfg.signal_dim)?;
    let input_moments = moments_pure(&input)?;

    let output = match cfg.gate.mode {
        GateMode::Deterministic => run_deterministic(&input, &gate_cfg)?,
        GateMode::Probabilistic => {
            let spec = ResourceSpec::new(gate_cfg.chi, gate_cfg.g, gate_cfg.signal_dim)?;
            run_probabilistic(&input, &spec, gate_cfg.grid)?
        }
    };

    if let Some(path) = &args.dump_density {
        if let GateState::Deterministic(rho) = &output.state {
            let mut text = String::new();
            for i in 0..rho.dim() {
                let row: Vec<String> = (0..rho.dim())
                    .map(|j| {
                        let z = rho.entries[[i, j]];
                        format!("{}{}{}i", fmt12(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt12(z.im.abs()))
                    })
                    .collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            std::fs::write(path, text)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    if let Some(path) = &args.dump_wavefunction {
        if let GateState::Probabilistic(state) = &output.state {
            let wf = to_grid(state, GridSpec::default())?;
            let mut text = String::from("x,re,im\n");
            for (i, s) in wf.samples.iter().enumerate() {
                text.push_str(&format!("{},{},{}\n", fmt12(wf.spec.x_at(i)), fmt12(s.re), fmt12(s.im)));
            }
            std::fs::write(path, text)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    let p_table: Vec<serde_json::Value> = output
        .records
        .iter()
        .map(|r| json!({ "q": r.q, "density": r.density, "weight": r.weight }))
        .collect();
    let samples = args.sample.map(|n| sample_outcomes(&output.records, n));

    let doc = json!({
        "mode": match cfg.gate.mode { GateMode::Deterministic => "deterministic", GateMode::Probabilistic => "probabilistic" },
        "alpha": [cfg.gate.alpha_re, cfg.gate.alpha_im],
        "chi": gate_cfg.chi,
        "g": gate_cfg.g,
        "lambda": gate_cfg.lambda,
        "input_moments": input_moments,
        "output_moments": output.report,
        "homodyne_density": p_table,
        "sampled_outcomes": samples,
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn cmd_sweep(mut cfg: FileConfig, args: SweepArgs) -> CliResult<()> {
    if let Some(v) = args.chi {
        cfg.sweep.chi = v;
    }
    if let Some(v) = args.g {
        cfg.sweep.g = v;
    }
    if let Some(v) = args.im_alpha {
        cfg.sweep.im_alpha = v;
    }
    if args.no_benchmark {
        cfg.sweep.with_benchmark = false;
    }
    let sweep_cfg = cfg.sweep.to_sweep_config(&cfg.benchmark)?;
    let outcome = run_sweep(&sweep_cfg)?;

    let out_dir = args
        .out_dir
        .or_else(|| std::env::var_os("CUBICGATE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let written = emit_outputs(&cfg, &outcome, &out_dir)?;

    let doc = json!({
        "chi_eff": outcome.chi_eff,
        "rows": outcome.rows.len(),
        "gate_seconds": outcome.gate_seconds,
        "benchmark_seconds": outcome.benchmark_seconds,
        "outputs": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn cmd_benchmark(mut cfg: FileConfig, args: BenchmarkArgs) -> CliResult<()> {
    let b = &mut cfg.benchmark;
    if let Some(v) = args.alpha_re {
        b.alpha_re = v;
    }
    if let Some(v) = args.alpha_im {
        b.alpha_im = v;
    }
    if let Some(v) = args.chi_eff {
        b.chi_eff = Some(v);
    }
    if let Some(v) = args.lambda_min {
        b.lambda_min = v;
    }
    if let Some(v) = args.lambda_max {
        b.lambda_max = v;
    }
    let chi_eff = match (b.chi_eff, &args.fit_from) {
        (Some(v), _) => v,
        (None, Some(path)) => fit_chi_eff_from_manifest(path)?,
        (None, None) => {
            return Err(CliError::invalid_value(
                "no chi_eff: set [benchmark].chi_eff, pass --chi-eff, or --fit-from a sweep manifest",
            ))
        }
    };
    let bench_cfg = cfg.benchmark.to_benchmark_config()?;
    let input = coherent(C64::new(cfg.benchmark.alpha_re, cfg.benchmark.alpha_im), bench_cfg.dim)?;
    let result = optimize_benchmark(&input, chi_eff, &bench_cfg)?;
    let ideal_p2 = ideal_map_p2(&input, chi_eff)?;
    // The κ that would put the output mean exactly on target at λ*, for
    // comparison with the estimator gain actually used.
    let kappa_mean_matched = solve_kappa(&input, result.lambda_opt, chi_eff, &bench_cfg)?;

    let doc = json!({
        "alpha": [cfg.benchmark.alpha_re, cfg.benchmark.alpha_im],
        "chi_eff": chi_eff,
        "lambda_opt": result.lambda_opt,
        "kappa_opt": result.kappa_opt,
        "kappa_mean_matched": kappa_mean_matched,
        "boundary_minimizer": result.boundary,
        "moments": result.report,
        "ideal_map_p2": ideal_p2,
        "added_noise": result.added_noise,
        "mean_bias": result.mean_bias,
        "margin_vs_gate_p2": args.gate_p2.map(|g| result.report.mean_p2 - g),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn fit_chi_eff_from_manifest(path: &PathBuf) -> CliResult<f64> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::missing_file(format!("cannot read manifest {}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid_value(format!("bad manifest {}: {e}", path.display())))?;
    let rows = doc["rows"]
        .as_array()
        .ok_or_else(|| CliError::invalid_value("manifest has no rows array"))?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let x2 = r["input_x2"].as_f64()?;
            let dp = r["mean_p"].as_f64()? - r["input_p"].as_f64()?;
            Some((x2, dp))
        })
        .collect();
    Ok(cubic_core::benchmark::estimate_chi_eff(&points)?)
}

fn cmd_compose(mut cfg: FileConfig, args: ComposeArgs) -> CliResult<()> {
    if let Some(v) = args.chi {
        cfg.compose.chi = v;
    }
    let chi = cfg.compose.chi;
    let b = compose_betas(chi)?;
    let doc = json!({
        "chi": chi,
        "beta1": complex_pair(b.beta1),
        "beta2": complex_pair(b.beta2),
        "sum": complex_pair(b.beta1 + b.beta2),
        "product": complex_pair(b.beta1 * b.beta2),
        "target": { "cubic": [0.0, chi], "sextic": [-chi * chi / 2.0, 0.0] },
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}
