//! Benchmark sweeps. Instance `k` of a sweep is drawn from stream `k + 1`
//! of `--seed`; its randomized pipeline runs with seed `seed + k`. Rows
//! are emitted in instance order regardless of the thread count.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use qapprox::fermion::{covariance_of, paired_gaussian_state, richardson, richardson_lambda_max, to_majorana, wick_energy};
use qapprox::oracle::{lambda_max_number_conserving, lambda_max_qubit, lambda_sep_ascent, lambda_sep_stabilizer, slater_ascent};
use qapprox::qubit::{random_instance, random_quadratic_instance};
use qapprox::rng;
use qapprox::rounding::{approximate_max, lieb_certificate, matching_round, LiebMode, RoundingConfig, MAX_EXHAUSTIVE_QUBITS};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::report::{emit, write_csv, Format, Outcome, SCHEMA_VERSION};
use crate::{OutputArgs, SolverArgs};

#[derive(Subcommand, Debug)]
pub enum BenchCmd {
    /// Pairing Hamiltonians: exact λ_max, paired Gaussian and Slater bound.
    Richardson {
        /// Pair counts, `a..b` (inclusive) or a single value.
        #[arg(long = "N", value_parser = parse_range)]
        n_pairs: RangeInclusive<usize>,
        /// Also run the Slater ascent with this many restarts per particle number.
        #[arg(long, default_value_t = 0)]
        slater_restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: BenchOutput,
    },
    /// Best stabilizer product state against λ_max on random instances
    /// without one-local terms.
    Lieb {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        density: f64,
        #[command(flatten)]
        out: BenchOutput,
    },
    /// Rounding, stabilizer and ascent values against λ_max and the SDP.
    Random {
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = RoundingConfig::default().trials)]
        trials: usize,
        #[arg(long, default_value_t = 0.7)]
        density: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: BenchOutput,
    },
    /// Random-matching rounding against its expected energy.
    Matching {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[command(flatten)]
        out: BenchOutput,
    },
}

#[derive(Args, Debug, Clone)]
pub struct BenchOutput {
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let r = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(s)?;
            v..=v
        }
    };
    if r.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(r)
}

#[derive(Serialize)]
struct RichardsonRow {
    n_pairs: usize,
    n_modes: usize,
    lambda_max: f64,
    lambda_max_formula: f64,
    paired_gaussian: f64,
    paired_ratio: f64,
    gaussian_guarantee: f64,
    slater_bound: f64,
    slater_ratio_bound: f64,
    slater_ascent: Option<f64>,
}

#[derive(Serialize)]
struct LiebRow {
    instance: usize,
    n: usize,
    lambda_max: f64,
    stabilizer_energy: f64,
    ratio: f64,
    certified: bool,
}

#[derive(Serialize)]
struct MethodRow {
    instance: usize,
    n: usize,
    method: &'static str,
    value: f64,
    lambda_max: f64,
    ratio_lambda_max: f64,
    sdp_upper_bound: f64,
}

#[derive(Serialize)]
struct MatchingRow {
    instance: usize,
    n: usize,
    trials: usize,
    best_energy: f64,
    mean_energy: f64,
    mean_standard_error: f64,
    expected_energy: f64,
    coupling_one_norm: f64,
    lambda_max: f64,
}

fn write_rows<T: Serialize>(name: &str, config: serde_json::Value, rows: &[T], out: &BenchOutput) -> anyhow::Result<()> {
    let args = OutputArgs { output: out.output.clone(), format: out.format, timing: false };
    match out.format {
        Format::Csv => write_csv(rows, &args),
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": format!("bench {name}"),
                "config": config,
                "rows": rows,
            });
            emit(&(serde_json::to_string_pretty(&doc)? + "\n"), out.output.as_deref())
        }
    }
}

fn richardson_row(n_pairs: usize, restarts: usize, seed: u64) -> anyhow::Result<RichardsonRow> {
    let h = richardson(n_pairs)?;
    let lambda_max = lambda_max_number_conserving(&h)?.value;
    let m = to_majorana(&h)?;
    let paired = wick_energy(&m, &covariance_of(&paired_gaussian_state(n_pairs)?))?;
    let slater_ascent = if restarts > 0 { Some(slater_ascent(&m, restarts, seed)?.0.value) } else { None };
    let n_modes = 2 * n_pairs;
    Ok(RichardsonRow {
        n_pairs,
        n_modes,
        lambda_max,
        lambda_max_formula: richardson_lambda_max(n_pairs),
        paired_gaussian: paired,
        paired_ratio: paired / lambda_max,
        gaussian_guarantee: 1.0 - 6.0 / n_modes as f64,
        slater_bound: n_pairs as f64,
        slater_ratio_bound: n_pairs as f64 / lambda_max,
        slater_ascent,
    })
}

pub fn run(cmd: &BenchCmd) -> anyhow::Result<Outcome> {
    let mut outcome = Outcome::Ok;
    match cmd {
        BenchCmd::Richardson { n_pairs, slater_restarts, seed, out } => {
            if *n_pairs.end() > 6 {
                bail!("richardson sweep supports N <= 6 (dense diagonalization)");
            }
            let rows = n_pairs
                .clone()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&n| richardson_row(n, *slater_restarts, *seed).with_context(|| format!("N = {n}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            write_rows("richardson", json!({ "slater_restarts": slater_restarts, "seed": seed }), &rows, out)?;
        }
        BenchCmd::Lieb { n, instances, seed, density, out } => {
            let mode = if *n <= MAX_EXHAUSTIVE_QUBITS {
                LiebMode::Exhaustive
            } else {
                LiebMode::Sampled { trials: 4096, seed: *seed }
            };
            let rows = (0..*instances)
                .into_par_iter()
                .map(|k| -> anyhow::Result<LiebRow> {
                    let h = random_quadratic_instance(*n, *density, &mut rng::stream(*seed, k as u64 + 1));
                    let cert = lieb_certificate(&h, mode)?;
                    Ok(LiebRow {
                        instance: k,
                        n: *n,
                        lambda_max: cert.lambda_max,
                        stabilizer_energy: cert.energy,
                        ratio: cert.energy / cert.lambda_max,
                        certified: cert.certified,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            if let Some(min) = rows.iter().map(|r| r.ratio).reduce(f64::min) {
                eprintln!("min ratio {min:.6} over {} instances (guarantee 1/9 = {:.6})", rows.len(), 1.0 / 9.0);
            }
            write_rows("lieb", json!({ "n": n, "instances": instances, "seed": seed, "density": density }), &rows, out)?;
        }
        BenchCmd::Random { n, instances, seed, trials, density, solver, out } => {
            let jobs: Vec<(usize, usize)> = n.clone().flat_map(|m| std::iter::repeat_n(m, *instances)).enumerate().collect();
            let opts = solver.options();
            let per_instance = jobs
                .par_iter()
                .map(|&(k, m)| -> anyhow::Result<(Vec<MethodRow>, bool)> {
                    let h = random_instance(m, *density, &mut rng::stream(*seed, k as u64 + 1));
                    let lam = lambda_max_qubit(&h)?.value;
                    let cfg = RoundingConfig { trials: *trials, seed: seed.wrapping_add(k as u64), ..RoundingConfig::default() };
                    let rep = approximate_max(&h, &cfg, &opts)?;
                    let converged = rep.sdp_status == qapprox::sdp::SdpStatus::Converged;
                    let mut values = vec![("rounding", rep.best_energy)];
                    if m <= MAX_EXHAUSTIVE_QUBITS {
                        values.push(("stabilizer", lambda_sep_stabilizer(&h)?.value));
                    }
                    values.push(("sep_ascent", lambda_sep_ascent(&h, 20, seed.wrapping_add(k as u64))?.0.value));
                    values.push(("lambda_max", lam));
                    values.push(("sdp", rep.sdp_objective));
                    let rows = values
                        .into_iter()
                        .map(|(method, value)| MethodRow {
                            instance: k,
                            n: m,
                            method,
                            value,
                            lambda_max: lam,
                            ratio_lambda_max: value / lam,
                            sdp_upper_bound: rep.sdp_upper_bound,
                        })
                        .collect();
                    Ok((rows, converged))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            if per_instance.iter().any(|(_, c)| !c) {
                outcome = Outcome::NotConverged;
            }
            let rows: Vec<MethodRow> = per_instance.into_iter().flat_map(|(r, _)| r).collect();
            write_rows(
                "random",
                json!({ "n": [n.start(), n.end()], "instances": instances, "seed": seed, "trials": trials, "density": density }),
                &rows,
                out,
            )?;
        }
        BenchCmd::Matching { n, instances, trials, seed, density, out } => {
            let rows = (0..*instances)
                .into_par_iter()
                .map(|k| -> anyhow::Result<MatchingRow> {
                    let h = random_quadratic_instance(*n, *density, &mut rng::stream(*seed, k as u64 + 1));
                    let rep = matching_round(&h, *trials, &mut rng::seeded(seed.wrapping_add(k as u64)))?;
                    Ok(MatchingRow {
                        instance: k,
                        n: *n,
                        trials: *trials,
                        best_energy: rep.best_energy,
                        mean_energy: rep.mean_energy,
                        mean_standard_error: rep.mean_standard_error,
                        expected_energy: rep.expected_energy,
                        coupling_one_norm: h.coupling_one_norm(),
                        lambda_max: lambda_max_qubit(&h)?.value,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            write_rows(
                "matching",
                json!({ "n": n, "instances": instances, "trials": trials, "seed": seed, "density": density }),
                &rows,
                out,
            )?;
        }
    }
    Ok(outcome)
}
