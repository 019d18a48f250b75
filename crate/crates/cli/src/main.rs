//! `qapprox` command-line harness.
//!
//! Exit codes: 0 on success, 1 on invalid input or configuration, 2 when a
//! relaxation did not converge (the report is still written).

mod bench;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qapprox::gaussian::{approximate_fermion, FermionConfig, Target};
use qapprox::instance::{instance_to_json, parse_instance, Instance};
use qapprox::oracle::{
    gaussian_ascent, lambda_max_majorana, lambda_max_number_conserving, lambda_max_qubit, lambda_sep_ascent,
    lambda_sep_stabilizer, sector_lambda_max, slater_ascent, OracleReport,
};
use qapprox::rounding::{approximate_max, RoundingConfig};
use qapprox::sdp::{SdpStatus, SolverOptions};
use serde_json::json;

use report::{Envelope, Format, Outcome};

/// Largest qubit count (or mode count) for which `--oracle` diagonalizes.
const ORACLE_LIMIT: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "qapprox", version, about = "Certified largest-eigenvalue approximations for qubit and fermionic Hamiltonians")]
struct Cli {
    /// Worker threads for rounding, extraction and bench sweeps.
    #[arg(long, global = true, env = "QAPPROX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment SDP + rounding to a stabilizer product state.
    ApproxQubit(ApproxQubit),
    /// Quartic relaxation + rounding to a Gaussian or Slater state.
    ApproxFermion(ApproxFermion),
    /// Exact or brute-force reference values.
    Oracle(OracleCmd),
    /// CSV sweeps over instance families.
    #[command(subcommand)]
    Bench(bench::BenchCmd),
    /// Write an instance file.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolverOptions::default().feas_tol)]
    feas_tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().obj_tol)]
    obj_tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iter)]
    max_iter: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { feas_tol: self.feas_tol, obj_tol: self.obj_tol, max_iter: self.max_iter, ..SolverOptions::default() }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock timings (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct ApproxQubit {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = RoundingConfig::default().trials)]
    trials: usize,
    /// Truncation constant in T = max(1, c·sqrt(ln n)).
    #[arg(long, default_value_t = RoundingConfig::default().c)]
    c: f64,
    /// Also compute λ_max by dense diagonalization.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Gaussian,
    Slater,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Gaussian => Target::Gaussian,
            TargetArg::Slater => Target::Slater,
        }
    }
}

#[derive(Args, Debug)]
struct ApproxFermion {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = TargetArg::Gaussian)]
    target: TargetArg,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = FermionConfig::default().rounding_samples)]
    rounding_samples: usize,
    #[arg(long, default_value_t = FermionConfig::default().extraction_samples)]
    extraction_samples: usize,
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleMethod {
    LambdaMax,
    SepAscent,
    Stabilizer,
    GaussianAscent,
    SlaterAscent,
    Sectors,
}

#[derive(Args, Debug)]
struct OracleCmd {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OracleMethod::LambdaMax)]
    method: OracleMethod,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand, Debug)]
enum Generate {
    /// Pairing Hamiltonian on 2N modes.
    Richardson {
        #[arg(long = "N")]
        n_pairs: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random 2-local qubit Hamiltonian.
    Qubit {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.7)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Drop the one-local terms.
        #[arg(long)]
        no_linear: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random Majorana Hamiltonian.
    Fermion {
        #[arg(long)]
        n_modes: usize,
        #[arg(long, default_value_t = 0.7)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Include a quadratic part.
        #[arg(long)]
        quadratic: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random number-conserving Hamiltonian.
    Number {
        #[arg(long)]
        n_modes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("loading {}", path.display()))
}

fn status_outcome(status: SdpStatus) -> Outcome {
    if status == SdpStatus::Converged {
        Outcome::Ok
    } else {
        Outcome::NotConverged
    }
}

fn run_approx_qubit(a: &ApproxQubit) -> anyhow::Result<Outcome> {
    let inst = load(&a.input)?;
    let Instance::Qubit(h) = &inst else { bail!("approx-qubit needs a qubit instance, got {}", inst.kind()) };
    let cfg = RoundingConfig { c: a.c, trials: a.trials, seed: a.seed };
    let start = std::time::Instant::now();
    let mut rep = approximate_max(h, &cfg, &a.solver.options())?;
    if a.oracle && h.n_qubits() <= ORACLE_LIMIT {
        rep.attach_lambda_max(lambda_max_qubit(h)?.value);
    }
    let outcome = status_outcome(rep.sdp_status);
    let mut env = Envelope::new("approx-qubit", &inst, json!({ "seed": a.seed, "trials": a.trials, "c": a.c }));
    env.timing("seconds", start.elapsed().as_secs_f64());
    match a.out.format {
        Format::Json => env.write_json(serde_json::to_value(&rep)?, &a.out)?,
        Format::Csv => {
            let rows: Vec<_> = rep
                .trials
                .iter()
                .map(|t| report::TrialRow {
                    seed: a.seed,
                    trial: t.trial,
                    energy: t.energy,
                    ratio_sdp: t.energy / rep.sdp_objective,
                    ratio_lambda_max: rep.lambda_max.map(|l| t.energy / l),
                })
                .collect();
            report::write_csv(&rows, &a.out)?;
        }
    }
    Ok(outcome)
}

fn run_approx_fermion(a: &ApproxFermion) -> anyhow::Result<Outcome> {
    let inst = load(&a.input)?;
    let h = inst.majorana()?;
    let cfg = FermionConfig { rounding_samples: a.rounding_samples, extraction_samples: a.extraction_samples, seed: a.seed };
    let target: Target = a.target.into();
    let start = std::time::Instant::now();
    let mut rep = approximate_fermion(&h, target, &cfg, &a.solver.options())?;
    if a.oracle && h.n_modes() <= ORACLE_LIMIT {
        rep.attach_lambda_max(lambda_max_majorana(&h)?.value);
    }
    let outcome = status_outcome(rep.sdp_status);
    let mut env = Envelope::new(
        "approx-fermion",
        &inst,
        json!({
            "seed": a.seed,
            "target": target,
            "rounding_samples": a.rounding_samples,
            "extraction_samples": a.extraction_samples,
        }),
    );
    env.timing("seconds", start.elapsed().as_secs_f64());
    match a.out.format {
        Format::Json => env.write_json(serde_json::to_value(&rep)?, &a.out)?,
        Format::Csv => {
            let row = report::FermionRow {
                target: format!("{target:?}").to_lowercase(),
                seed: a.seed,
                n_modes: rep.n_modes,
                theta_star: rep.theta_star,
                theta_upper_bound: rep.theta_upper_bound,
                rounded_f: rep.rounded_f,
                rounded_energy: rep.rounded_energy,
                extracted_energy: rep.extracted_energy,
                lambda_max: rep.lambda_max,
                ratio_extracted_lambda_max: rep.ratio_extracted_lambda_max,
                sdp_status: format!("{:?}", rep.sdp_status).to_lowercase(),
            };
            report::write_csv(&[row], &a.out)?;
        }
    }
    Ok(outcome)
}

fn run_oracle(a: &OracleCmd) -> anyhow::Result<Outcome> {
    let inst = load(&a.input)?;
    let reports: Vec<OracleReport> = match (a.method, &inst) {
        (OracleMethod::LambdaMax, Instance::Qubit(h)) => vec![lambda_max_qubit(h)?],
        (OracleMethod::LambdaMax, Instance::Majorana(h)) => vec![lambda_max_majorana(h)?],
        (OracleMethod::LambdaMax, Instance::Number(h)) => vec![lambda_max_number_conserving(h)?],
        (OracleMethod::SepAscent, Instance::Qubit(h)) => vec![lambda_sep_ascent(h, a.restarts, a.seed)?.0],
        (OracleMethod::Stabilizer, Instance::Qubit(h)) => vec![lambda_sep_stabilizer(h)?],
        (OracleMethod::GaussianAscent, i @ (Instance::Majorana(_) | Instance::Number(_))) => {
            vec![gaussian_ascent(&i.majorana()?, a.restarts, a.seed, &[])?.0]
        }
        (OracleMethod::SlaterAscent, i @ (Instance::Majorana(_) | Instance::Number(_))) => {
            vec![slater_ascent(&i.majorana()?, a.restarts, a.seed)?.0]
        }
        (OracleMethod::Sectors, Instance::Number(h)) => {
            (0..=h.n_modes()).map(|k| sector_lambda_max(h, k)).collect::<Result<_, _>>()?
        }
        (m, i) => bail!("oracle method {m:?} does not apply to a {} instance", i.kind()),
    };
    let mut env = Envelope::new("oracle", &inst, json!({ "method": a.method.to_possible_value().map(|v| v.get_name().to_string()), "restarts": a.restarts, "seed": a.seed }));
    for r in &reports {
        env.timing(&format!("{}_seconds", r.quantity), r.runtime_seconds);
    }
    match a.out.format {
        Format::Json => {
            let body: Vec<_> = reports.iter().map(report::oracle_body).collect();
            let body = if body.len() == 1 { body.into_iter().next().expect("one report") } else { json!(body) };
            env.write_json(body, &a.out)?;
        }
        Format::Csv => {
            let rows: Vec<_> = reports.iter().map(report::OracleRow::from).collect();
            report::write_csv(&rows, &a.out)?;
        }
    }
    Ok(Outcome::Ok)
}

fn run_generate(g: &Generate) -> anyhow::Result<Outcome> {
    use qapprox::rng;
    let (inst, output) = match g {
        Generate::Richardson { n_pairs, output } => (Instance::Number(qapprox::fermion::richardson(*n_pairs)?), output),
        Generate::Qubit { n, density, seed, no_linear, output } => {
            let mut r = rng::seeded(*seed);
            let h = if *no_linear {
                qapprox::qubit::random_quadratic_instance(*n, *density, &mut r)
            } else {
                qapprox::qubit::random_instance(*n, *density, &mut r)
            };
            (Instance::Qubit(h), output)
        }
        Generate::Fermion { n_modes, density, seed, quadratic, output } => {
            let h = qapprox::fermion::random_majorana_hamiltonian(*n_modes, *density, *quadratic, &mut rng::seeded(*seed))?;
            (Instance::Majorana(h), output)
        }
        Generate::Number { n_modes, seed, output } => {
            (Instance::Number(qapprox::fermion::random_number_conserving(*n_modes, &mut rng::seeded(*seed))?), output)
        }
    };
    report::emit(&(instance_to_json(&inst) + "\n"), output.as_deref())?;
    Ok(Outcome::Ok)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    match &cli.command {
        Command::ApproxQubit(a) => run_approx_qubit(a),
        Command::ApproxFermion(a) => run_approx_fermion(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Bench(b) => bench::run(b),
        Command::Generate(g) => run_generate(g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: relaxation did not converge; bounds in the report are still valid");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
