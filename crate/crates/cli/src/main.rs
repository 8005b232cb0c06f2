//! `toleq`: verify tolerant equilibria, remap witnesses, solve the
//! Prisoner's Dilemma fixed point and sweep cooperation statistics.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use toleq::dilemmas::{
    cooperation_rate, cooperation_threshold, relative_threshold, relative_to_absolute, will_cooperate,
    BeliefLaw, DilemmaSpec, Disposition, RelativeType, RelativeTypeDistribution,
};
use toleq::equilibrium::verify_tolerant_equilibrium;
use toleq::io::{self, RateRow, ToleranceLaw};
use toleq::pd_tolerant::{
    comparative_statics_sweep, fixed_point_curve, solve_discrete, solve_symmetric, DiscreteOutcome,
    PdPayoffs, SweepParameter,
};
use toleq::tolerance::{dominance_remap, DiscreteToleranceDist, TypeStrategyMap};
use toleq::DEFAULT_EPS;

#[derive(Parser)]
#[command(name = "toleq", version, about = "Tolerance-based equilibria of finite games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a mixed profile is a tolerant equilibrium.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        pi: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Carry a type-strategy map over to a dominating distribution.
    Remap {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long = "pi-prime")]
        pi_prime: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the symmetric Prisoner's Dilemma fixed point.
    PdSolve {
        #[command(flatten)]
        payoffs: PayoffArgs,
        #[arg(long)]
        cdf: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write the two sides of the fixed-point equation as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        curve_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cooperation threshold of a social dilemma.
    Threshold {
        /// Inline JSON such as '{"kind":"pd","b":5,"c":2}' or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        beta: Option<f64>,
        /// Relative tolerances to classify (disposition C).
        #[arg(long = "t-rel", num_args = 1.., allow_negative_numbers = true)]
        t_rel: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    #[command(subcommand)]
    Sweep(Sweep),
}

#[derive(Subcommand)]
enum Sweep {
    /// Cooperation rate of a dilemma as one parameter varies.
    Rate {
        #[arg(long)]
        spec: String,
        /// Field of the spec to vary, e.g. b, c, rho, n, l.
        #[arg(long)]
        param: String,
        #[command(flatten)]
        range: RangeArgs,
        /// Fix every belief at this value instead of drawing it uniformly.
        #[arg(long)]
        beta: Option<f64>,
        /// Probability of the cooperative disposition.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric fixed points as one payoff or the CDF location varies.
    Alpha {
        #[command(flatten)]
        payoffs: PayoffArgs,
        #[arg(long)]
        cdf: PathBuf,
        /// One of a, b, c, d, dc, dd, shift.
        #[arg(long)]
        param: SweepParameter,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PayoffArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 11)]
    steps: usize,
}

impl RangeArgs {
    fn values(&self) -> anyhow::Result<Vec<f64>> {
        match self.steps {
            0 => Err(anyhow!("--steps must be positive")),
            1 => Ok(vec![self.from]),
            n => Ok((0..n)
                .map(|k| self.from + (self.to - self.from) * k as f64 / (n - 1) as f64)
                .collect()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "structured-object")]
    Json,
}

/// Affirmative or negative outcome of a command that ran to completion.
enum Outcome {
    Yes,
    No,
}

fn epsilon() -> anyhow::Result<f64> {
    match std::env::var("TOLEQ_EPSNUM") {
        Ok(s) => {
            let eps: f64 = s.trim().parse().with_context(|| format!("TOLEQ_EPSNUM='{s}'"))?;
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(anyhow!("TOLEQ_EPSNUM must be a non-negative number"));
            }
            Ok(eps)
        }
        Err(_) => Ok(DEFAULT_EPS),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_spec(arg: &str) -> anyhow::Result<DilemmaSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    let spec: DilemmaSpec = serde_json::from_str(&text).context("dilemma spec")?;
    spec.validate()?;
    Ok(spec)
}

fn json_line(value: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(value).expect("serializable"))
}

fn verify(game: &Path, profile: &Path, pi: &Path, format: Format, eps: f64) -> anyhow::Result<Outcome> {
    let game = io::parse_game(&read(game)?).context("game file")?;
    let profile = io::parse_profile(&read(profile)?, &game, eps).context("profile file")?;
    let pi = io::parse_pi(&read(pi)?, game.num_players(), eps).context("tolerance file")?;
    let verdict = verify_tolerant_equilibrium(&game, &profile, &pi, eps)?;
    let text = match format {
        Format::Json => json_line(&io::verdict_to_value(&verdict)),
        _ => {
            let mut s = String::new();
            match (verdict.witness(), verdict.violation()) {
                (Some(witness), _) => {
                    s.push_str("EQUILIBRIUM\n");
                    for (p, g) in witness.iter().enumerate() {
                        for (t, m) in g.atoms().iter().zip(g.strategies()) {
                            s.push_str(&format!("player {p} type {t}: {:?}\n", m.probs()));
                        }
                    }
                }
                (None, Some(v)) => {
                    s.push_str("NOT AN EQUILIBRIUM\n");
                    s.push_str(&format!("player: {}\n", v.player));
                    match v.kind {
                        toleq::equilibrium::ViolationKind::Threshold => {
                            s.push_str(&format!("violated threshold: {}\n", v.threshold));
                        }
                        toleq::equilibrium::ViolationKind::UntoleratedStrategy { strategy, regret } => {
                            s.push_str(&format!(
                                "untolerated strategy: {strategy} (regret {regret}, largest tolerance {})\n",
                                v.threshold
                            ));
                        }
                    }
                    s.push_str(&format!("excess: {}\n", v.excess));
                }
                (None, None) => unreachable!("verdict carries a witness or a violation"),
            }
            s
        }
    };
    emit(None, &text)?;
    Ok(if verdict.is_equilibrium() { Outcome::Yes } else { Outcome::No })
}

/// Checks the remapped map before it is written: every strategy used at a
/// type must be used by the original map at some type no larger, and both
/// maps must induce the same mixture.
fn check_remap(
    lo: &DiscreteToleranceDist,
    hi: &DiscreteToleranceDist,
    g: &TypeStrategyMap,
    g2: &TypeStrategyMap,
    eps: f64,
) -> anyhow::Result<()> {
    for (t2, s2) in g2.atoms().iter().zip(g2.strategies()) {
        for k in s2.support() {
            let covered = g
                .atoms()
                .iter()
                .zip(g.strategies())
                .any(|(t, s)| *t <= *t2 + eps && s.probs()[k] > 0.0);
            if !covered {
                return Err(anyhow!("remapped type {t2} uses strategy {k} not available below it"));
            }
        }
    }
    for (k, (a, b)) in g.mixture(lo).iter().zip(g2.mixture(hi)).enumerate() {
        if (a - b).abs() > 1e-9 {
            return Err(anyhow!("remapped mixture puts {b} on strategy {k}, original {a}"));
        }
    }
    Ok(())
}

fn remap(pi: &Path, pi_prime: &Path, g: &Path, out: Option<&Path>, eps: f64) -> anyhow::Result<Outcome> {
    let lo = io::parse_distribution(&read(pi)?, eps).context("--pi")?;
    let lo = lo.as_discrete().context("--pi")?.clone();
    let hi = io::parse_distribution(&read(pi_prime)?, eps).context("--pi-prime")?;
    let hi = hi.as_discrete().context("--pi-prime")?.clone();
    let g = io::parse_type_map(&read(g)?, &lo, eps).context("--g")?;
    if !hi.dominates(&lo, eps) {
        eprintln!("--pi-prime does not stochastically dominate --pi");
        return Ok(Outcome::No);
    }
    let g2 = dominance_remap(&lo, &hi, &g, eps)?;
    check_remap(&lo, &hi, &g, &g2, eps)?;
    let mut text = io::type_map_to_json(&g2);
    text.push('\n');
    emit(out, &text)?;
    Ok(Outcome::Yes)
}

fn payoffs(args: &PayoffArgs) -> anyhow::Result<PdPayoffs> {
    Ok(PdPayoffs::new(args.a, args.b, args.c, args.d)?)
}

fn fmt_alphas(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

#[allow(clippy::too_many_arguments)]
fn pd_solve(
    args: &PayoffArgs,
    cdf: &Path,
    grid: usize,
    tol: f64,
    out: Option<&Path>,
    curve_points: usize,
    format: Format,
    eps: f64,
) -> anyhow::Result<Outcome> {
    let p = payoffs(args)?;
    let law = io::parse_distribution(&read(cdf)?, eps).context("--cdf")?;
    match law {
        ToleranceLaw::Continuous(cdf) => {
            let report = solve_symmetric(&p, &cdf, grid, tol, eps)?;
            if let Some(path) = out {
                emit(Some(path), &io::curve_csv(&fixed_point_curve(&p, &cdf, curve_points)))?;
            }
            let text = match format {
                Format::Json => json_line(&io::report_to_value(&report)),
                _ => {
                    let mut s = format!(
                        "delta_c: {}\ndelta_d: {}\nclassification: {}\nhas_zero_root: {}\n",
                        p.delta_c(),
                        p.delta_d(),
                        if report.uniqueness_certified { "unique" } else { "possibly-multiple" },
                        report.has_zero_root
                    );
                    for r in &report.roots {
                        s.push_str(&format!(
                            "alpha_star: {} bracket: [{}, {}] residual: {:e}{}\n",
                            r.alpha,
                            r.bracket.0,
                            r.bracket.1,
                            r.residual,
                            if r.marginal { " marginal" } else { "" }
                        ));
                    }
                    s
                }
            };
            emit(None, &text)?;
            Ok(Outcome::Yes)
        }
        ToleranceLaw::Discrete(pi) => {
            if let Some(path) = out {
                let n = curve_points.max(2) - 1;
                let rows: Vec<(f64, f64, f64)> = (0..=n)
                    .map(|k| {
                        let alpha = k as f64 / n as f64;
                        let gap = alpha * p.delta_c() + (1.0 - alpha) * p.delta_d();
                        (alpha, 1.0 - alpha, pi.cdf_strict(gap - eps))
                    })
                    .collect();
                emit(Some(path), &io::curve_csv(&rows))?;
            }
            let outcome = solve_discrete(&p, &pi, eps);
            let text = match (&outcome, format) {
                (DiscreteOutcome::NonExistence, Format::Json) => {
                    json_line(&json!({ "outcome": "non-existence", "solutions": [] }))
                }
                (DiscreteOutcome::Solutions(v), Format::Json) => {
                    json_line(&json!({ "outcome": "solutions", "solutions": v }))
                }
                (DiscreteOutcome::NonExistence, _) => "NON-EXISTENCE\n".to_string(),
                (DiscreteOutcome::Solutions(v), _) => format!("alpha_star: {}\n", fmt_alphas(v)),
            };
            emit(None, &text)?;
            Ok(match outcome {
                DiscreteOutcome::NonExistence => Outcome::No,
                DiscreteOutcome::Solutions(_) => Outcome::Yes,
            })
        }
    }
}

fn threshold(spec: &str, beta: Option<f64>, t_rel: &[f64], format: Format, eps: f64) -> anyhow::Result<Outcome> {
    let spec = load_spec(spec)?;
    let abs = cooperation_threshold(&spec, beta)?;
    let rel = relative_threshold(&spec, beta.unwrap_or(0.0))?;
    let mut verdicts = Vec::new();
    for &t in t_rel {
        let ty = RelativeType::new(t, beta.unwrap_or(0.0), Disposition::Cooperate)?;
        verdicts.push((t, relative_to_absolute(&spec, t)?, will_cooperate(&spec, &ty, eps)?));
    }
    let text = match format {
        Format::Json => json_line(&json!({
            "threshold": abs,
            "relative_threshold": rel,
            "types": verdicts.iter().map(|(t, a, c)| json!({
                "t_rel": t, "tolerance": a, "cooperates": c
            })).collect::<Vec<_>>(),
        })),
        _ => {
            let mut s = format!("threshold: {abs}\nrelative_threshold: {rel}\n");
            for (t, a, c) in &verdicts {
                s.push_str(&format!(
                    "t_rel {t} (tolerance {a}): {}\n",
                    if *c { "cooperate" } else { "defect" }
                ));
            }
            s
        }
    };
    emit(None, &text)?;
    Ok(Outcome::Yes)
}

/// Copy of `spec` with field `param` set to `value`.
fn with_param(spec: &DilemmaSpec, param: &str, value: f64) -> anyhow::Result<DilemmaSpec> {
    let mut v = serde_json::to_value(spec)?;
    let key = param.to_ascii_lowercase();
    let obj = v.as_object_mut().expect("specs serialize to objects");
    if key == "kind" || !obj.contains_key(&key) {
        return Err(anyhow!("'{param}' is not a parameter of this dilemma"));
    }
    let integral = obj[&key].is_i64() || obj[&key].is_u64();
    obj[&key] = if integral {
        if value.fract() != 0.0 {
            return Err(anyhow!("'{param}' takes integer values, got {value}"));
        }
        json!(value as i64)
    } else {
        json!(value)
    };
    let out: DilemmaSpec = serde_json::from_value(v)?;
    out.validate()?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn sweep_rate(
    spec: &str,
    param: &str,
    range: &RangeArgs,
    beta: Option<f64>,
    q: f64,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
    eps: f64,
) -> anyhow::Result<Outcome> {
    let base = load_spec(spec)?;
    let dist = RelativeTypeDistribution::new(q, beta.map_or(BeliefLaw::Uniform, BeliefLaw::Fixed))?;
    let mut rows = Vec::new();
    for value in range.values()? {
        let s = with_param(&base, param, value)?;
        let est = cooperation_rate(&s, &dist, samples, seed, eps)?;
        rows.push(RateRow {
            value,
            exact_rate: est.exact,
            mc_rate: est.mc,
            mc_stderr: est.mc_stderr,
        });
    }
    emit(out, &io::rate_csv(param, &rows))?;
    Ok(Outcome::Yes)
}

#[allow(clippy::too_many_arguments)]
fn sweep_alpha(
    args: &PayoffArgs,
    cdf: &Path,
    param: SweepParameter,
    range: &RangeArgs,
    grid: usize,
    tol: f64,
    out: Option<&Path>,
    eps: f64,
) -> anyhow::Result<Outcome> {
    let p = payoffs(args)?;
    let law = io::parse_distribution(&read(cdf)?, eps).context("--cdf")?;
    let cdf = law.as_continuous()?;
    let rows = comparative_statics_sweep(&p, cdf, param, &range.values()?, grid, tol, eps)?;
    emit(out, &io::sweep_csv(&rows))?;
    Ok(Outcome::Yes)
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let eps = epsilon()?;
    match cli.command {
        Command::Verify {
            game,
            profile,
            pi,
            format,
        } => verify(&game, &profile, &pi, format, eps),
        Command::Remap { pi, pi_prime, g, out } => remap(&pi, &pi_prime, &g, out.as_deref(), eps),
        Command::PdSolve {
            payoffs,
            cdf,
            grid,
            tol,
            out,
            curve_points,
            format,
        } => pd_solve(&payoffs, &cdf, grid, tol, out.as_deref(), curve_points, format, eps),
        Command::Threshold {
            spec,
            beta,
            t_rel,
            format,
        } => threshold(&spec, beta, &t_rel, format, eps),
        Command::Sweep(Sweep::Rate {
            spec,
            param,
            range,
            beta,
            q,
            samples,
            seed,
            out,
        }) => sweep_rate(&spec, &param, &range, beta, q, samples, seed, out.as_deref(), eps),
        Command::Sweep(Sweep::Alpha {
            payoffs,
            cdf,
            param,
            range,
            grid,
            tol,
            out,
        }) => sweep_alpha(&payoffs, &cdf, param, &range, grid, tol, out.as_deref(), eps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
