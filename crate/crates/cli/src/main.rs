//! `hecke`: command-line driver for the density-bound engines.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hecke_core::bounds::{self, BoundRequest, Pattern, RequestError};
use hecke_core::empirics::{self, EigenvalueDataset};
use hecke_core::moments::{self, Hypothesis};
use hecke_core::poly::{Poly, PolyLiteral};
use hecke_core::rational::{self, Decimal, Rational};
use hecke_core::region::Region;
use hecke_core::repro::{self, Simulation};
use hecke_core::search::{self, SearchConfig, SearchError};

#[derive(Parser)]
#[command(name = "hecke", version, about = "Certified density bounds for Hecke eigenvalues")]
struct Cli {
    /// JSON file overriding the subcommand's defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result as JSON to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute every published constant and compare.
    Reproduce(ReproduceArgs),
    /// Certify one density bound.
    Bound(BoundArgs),
    /// Search for a better witness polynomial.
    Search(SearchArgs),
    /// Sample Sato-Tate eigenvalues and measure statistics.
    Simulate(SimulateArgs),
    /// Build large-coefficient witnesses from a dataset.
    Omega(OmegaArgs),
    /// Asymptotic mean of a polynomial.
    Moments(MomentsArgs),
}

#[derive(Args)]
struct ReproduceArgs {
    /// Also run a Monte Carlo check with this many samples.
    #[arg(long)]
    simulate: Option<usize>,
    /// RNG seed for the Monte Carlo check.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundArgs {
    /// Bound-request JSON file.
    request: Option<PathBuf>,
    /// positive_part, complement or shifted_square.
    #[arg(long)]
    pattern: Option<String>,
    /// Polynomial literal, inline or as a file path.
    #[arg(long)]
    witness: Option<String>,
    /// `a,b` for `a ≤ |t| ≤ b`, or `[a,b];[c,d]` for explicit pieces.
    #[arg(long)]
    region: Option<String>,
    /// horizon, ramanujan or sato-tate.
    #[arg(long)]
    hyp: Option<String>,
    /// Replace the certified mean with this value.
    #[arg(long = "mean")]
    mean_override: Option<String>,
    /// Replace the certified supremum with this value.
    #[arg(long = "sup")]
    sup_override: Option<String>,
    /// Replace the certified infimum with this value.
    #[arg(long = "inf")]
    inf_override: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    /// Start witness, inline or as a file path.
    #[arg(long)]
    start: Option<String>,
    /// `a,b` for `a ≤ |t| ≤ b`, or `[a,b];[c,d]` for explicit pieces.
    #[arg(long)]
    region: Option<String>,
    /// horizon, ramanujan or sato-tate.
    #[arg(long)]
    hyp: Option<String>,
    /// positive_part or shifted_square.
    #[arg(long)]
    pattern: Option<String>,
    /// Largest witness degree (even, at most 8).
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Objective evaluations per restart.
    #[arg(long)]
    budget: Option<usize>,
    /// Number of perturbed restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// RNG seed for restart perturbations.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of primes to sample.
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Region whose empirical density is reported.
    #[arg(long)]
    density: Option<String>,
    /// Empirical moments `k` to report.
    #[arg(long, value_delimiter = ',')]
    moment: Vec<u32>,
    /// Export the sample as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct OmegaArgs {
    /// Window parameters `x`; each window is `(x, 2x]`.
    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    /// Lower edge `δ` for qualifying eigenvalues.
    #[arg(long)]
    delta: Option<f64>,
    /// Report primes with `|a(p)| > exp(c0·log p / log log p)` as direct witnesses.
    #[arg(long)]
    c0_cap: Option<f64>,
    /// Dataset CSV; without it a Sato-Tate sample is drawn.
    #[arg(long)]
    data: Option<PathBuf>,
    /// RNG seed for the sample.
    #[arg(long)]
    seed: Option<u64>,
    /// Apply `a ↦ a² − 1` first.
    #[arg(long)]
    sym2: bool,
}

#[derive(Args)]
struct MomentsArgs {
    /// Polynomial literal, inline or as a file path.
    #[arg(long)]
    poly: Option<String>,
    /// horizon, ramanujan or sato-tate.
    #[arg(long)]
    hyp: Option<String>,
}

enum Failure {
    Usage(String),
    Precondition(String),
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch => 1,
            Failure::Usage(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn precondition(e: impl Display) -> Failure {
    Failure::Precondition(e.to_string())
}

type Outcome = Result<(), Failure>;

struct Ctx {
    config: Option<serde_json::Value>,
    out: Option<PathBuf>,
    json: bool,
}

impl Ctx {
    fn config<T: DeserializeOwned + Default>(&self) -> Result<T, Failure> {
        match &self.config {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("config: {e}"))),
            None => Ok(T::default()),
        }
    }

    fn emit<T: Serialize>(&self, value: &T, text: &str) -> Outcome {
        let json = serde_json::to_string_pretty(value).map_err(precondition)?;
        if let Some(path) = &self.out {
            fs::write(path, format!("{json}\n")).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        }
        let body = if self.json { &json } else { text };
        match writeln!(io::stdout().lock(), "{body}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(usage(format!("stdout: {e}"))),
            _ => Ok(()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Inline JSON when it looks like an object, else a file path.
fn poly_arg(s: &str) -> Result<Poly, Failure> {
    let text = if s.trim_start().starts_with('{') { s.to_string() } else { read_text(Path::new(s))? };
    PolyLiteral::parse(&text).map_err(|e| usage(format!("polynomial: {e}")))
}

fn hyp_arg(s: &str) -> Result<Hypothesis, Failure> {
    s.parse().map_err(usage)
}

fn region_arg(s: &str) -> Result<Region, Failure> {
    Region::parse_cli(s).map_err(|e| usage(format!("region: {e}")))
}

fn pattern_arg(s: &str) -> Result<Pattern, Failure> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| usage(format!("unknown pattern {s:?}; expected positive_part, complement or shifted_square")))
}

fn rational_arg(s: &str) -> Result<Rational, Failure> {
    rational::parse(s).map_err(usage)
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("{flag} is required")))
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ReproduceConfig {
    simulate: Option<usize>,
    seed: Option<u64>,
}

fn cmd_reproduce(ctx: &Ctx, a: ReproduceArgs) -> Outcome {
    let cfg: ReproduceConfig = ctx.config()?;
    let n = a.simulate.or(cfg.simulate);
    let seed = a.seed.or(cfg.seed);
    let sim = match n {
        Some(n) => Some(Simulation { n, seed: require(seed, "--seed")? }),
        None => None,
    };
    let report = repro::reproduce(sim);
    ctx.emit(&report, &report.to_string())?;
    if report.mismatches() > 0 {
        return Err(Failure::Mismatch);
    }
    Ok(())
}

fn cmd_bound(ctx: &Ctx, a: BoundArgs) -> Outcome {
    let from_file = match &a.request {
        Some(p) => Some(read_text(p)?),
        None => ctx.config.as_ref().map(|v| v.to_string()),
    };
    let mut req = match from_file {
        Some(text) => Some(serde_json::from_str::<BoundRequest>(&text).map_err(|e| usage(format!("request: {e}")))?),
        None => None,
    };
    let witness = match &a.witness {
        Some(w) => Some(poly_arg(w)?),
        None => None,
    };
    let region = match &a.region {
        Some(r) => Some(region_arg(r)?),
        None => None,
    };
    let hyp = match &a.hyp {
        Some(h) => Some(hyp_arg(h)?),
        None => None,
    };
    let pattern = match &a.pattern {
        Some(p) => Some(pattern_arg(p)?),
        None => None,
    };
    let req = match req.take() {
        Some(mut r) => {
            if let Some(w) = witness {
                r.witness = PolyLiteral::monomial(&w);
            }
            r.region = region.unwrap_or(r.region);
            r.hypothesis = hyp.unwrap_or(r.hypothesis);
            r.pattern = pattern.unwrap_or(r.pattern);
            r
        }
        None => BoundRequest {
            witness: PolyLiteral::monomial(&require(witness, "--witness")?),
            region: require(region, "--region")?,
            hypothesis: require(hyp, "--hyp")?,
            pattern: require(pattern, "--pattern")?,
            overrides: None,
        },
    };
    let mut req = req;
    let mut ov = req.overrides.clone().unwrap_or_default();
    if let Some(v) = &a.mean_override {
        ov.mean = Some(rational_arg(v)?);
    }
    if let Some(v) = &a.sup_override {
        ov.sup = Some(rational_arg(v)?);
    }
    if let Some(v) = &a.inf_override {
        ov.inf = Some(rational_arg(v)?);
    }
    req.overrides = (!ov.is_empty()).then_some(ov);
    let b = bounds::run_request(&req).map_err(|e| match e {
        RequestError::Witness(m) => usage(m),
        RequestError::Bound(e) => precondition(e),
    })?;
    let mut text = format!(
        "{}\n  pattern     {}\n  hypothesis  {}\n  region      {}\n  enclosure   [{}, {}]",
        Decimal(&b.bound, 6),
        b.pattern,
        b.hypothesis,
        b.region,
        Decimal(&b.value.lo, 10),
        Decimal(&b.value.hi, 10)
    );
    for c in &b.constants {
        let prov = serde_json::to_value(c.provenance).map_err(precondition)?;
        let prov = prov.as_str().unwrap_or_default().to_string();
        if c.lo == c.hi {
            text += &format!("\n  {:<11} {} ({prov})", c.name, c.lo);
        } else {
            text += &format!("\n  {:<11} [{}, {}] ({prov})", c.name, Decimal(&c.lo, 10), Decimal(&c.hi, 10));
        }
    }
    ctx.emit(&b, &text)
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SearchFile {
    start: Option<PolyLiteral>,
    region: Option<Region>,
    hypothesis: Option<Hypothesis>,
    pattern: Option<Pattern>,
    degree_cap: Option<usize>,
    budget: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    r#box: Option<Vec<(f64, f64)>>,
    perturbation: Option<f64>,
}

fn cmd_search(ctx: &Ctx, a: SearchArgs) -> Outcome {
    let f: SearchFile = ctx.config()?;
    let start = match (&a.start, f.start) {
        (Some(s), _) => poly_arg(s)?,
        (None, Some(lit)) => lit.to_poly().map_err(usage)?,
        (None, None) => return Err(usage("--start is required")),
    };
    let region = match &a.region {
        Some(r) => region_arg(r)?,
        None => require(f.region, "--region")?,
    };
    let h = match &a.hyp {
        Some(h) => hyp_arg(h)?,
        None => f.hypothesis.unwrap_or(Hypothesis::Horizon),
    };
    let pattern = match &a.pattern {
        Some(p) => pattern_arg(p)?,
        None => f.pattern.unwrap_or(Pattern::PositivePart),
    };
    let d = SearchConfig::default();
    let cfg = SearchConfig {
        degree_cap: a.degree_cap.or(f.degree_cap).unwrap_or(d.degree_cap),
        budget: a.budget.or(f.budget).unwrap_or(d.budget),
        restarts: a.restarts.or(f.restarts).unwrap_or(d.restarts),
        seed: require(a.seed.or(f.seed), "--seed")?,
        r#box: f.r#box,
        perturbation: f.perturbation.unwrap_or(d.perturbation),
    };
    let r = search::improve_bound(&start, &region, h, pattern, &cfg).map_err(|e| match e {
        SearchError::Config(m) => usage(m),
        other => precondition(other),
    })?;
    let lit = serde_json::to_string(&PolyLiteral::monomial(&r.best_witness)).map_err(precondition)?;
    let text = format!(
        "start bound  {}\nbest bound   {}\nimproved     {}\nverified     {}\nsurrogate    {:.10}\nwitness      {lit}",
        Decimal(&r.start_bound.bound, 10),
        Decimal(&r.best_bound.bound, 10),
        r.improved,
        r.verified,
        r.surrogate_objective,
    );
    ctx.emit(&r, &text)
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimulateConfig {
    n: Option<usize>,
    seed: Option<u64>,
    density: Option<String>,
    moments: Vec<u32>,
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateReport {
    n: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<empirics::DensityEstimate>,
    moments: Vec<empirics::scans::MomentEstimate>,
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> Outcome {
    let cfg: SimulateConfig = ctx.config()?;
    let n = a.n.or(cfg.n).unwrap_or(1_000_000);
    let seed = require(a.seed.or(cfg.seed), "--seed")?;
    let region = match a.density.or(cfg.density) {
        Some(r) => Some(region_arg(&r)?),
        None => None,
    };
    let ks = if a.moment.is_empty() { cfg.moments } else { a.moment };
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    let d = empirics::sample_sato_tate(n, seed).map_err(precondition)?;
    let (lo, hi) = d.range().expect("non-empty sample");
    let density = match &region {
        Some(r) => Some(empirics::empirical_density(&d, r, lo, hi).map_err(precondition)?),
        None => None,
    };
    let moments = ks
        .iter()
        .map(|&k| empirics::empirical_moment(&d, k, lo, hi))
        .collect::<Result<Vec<_>, _>>()
        .map_err(precondition)?;
    if let Some(path) = a.csv.or(cfg.csv) {
        empirics::dataset::write_csv(&d, &path).map_err(usage)?;
    }
    let mut text = format!("n {n}, seed {seed}, primes [{lo}, {hi}]");
    if let (Some(r), Some(e)) = (&region, &density) {
        text += &format!("\ndensity of {r}: {:.6} ± {:.6} ({} of {})", e.ratio, e.std_error, e.count, e.total);
    }
    for m in &moments {
        text += &format!("\nmoment {}: {:.6} ± {:.6}", m.k, m.mean, m.std_error);
    }
    ctx.emit(&SimulateReport { n, seed, density, moments }, &text)
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OmegaConfig {
    x: Vec<u64>,
    delta: Option<f64>,
    c0_cap: Option<f64>,
    data: Option<PathBuf>,
    seed: Option<u64>,
    sym2: bool,
}

#[derive(Serialize)]
struct OmegaRow {
    witness: empirics::OmegaWitness,
    #[serde(skip_serializing_if = "Option::is_none")]
    opposite_sign: Option<empirics::SignedWitnessPair>,
}

fn cmd_omega(ctx: &Ctx, a: OmegaArgs) -> Outcome {
    let cfg: OmegaConfig = ctx.config()?;
    let xs = if a.x.is_empty() { cfg.x } else { a.x };
    let xs = if xs.is_empty() { vec![10_000, 100_000, 1_000_000] } else { xs };
    let delta = a.delta.or(cfg.delta).unwrap_or_else(empirics::omega::default_delta);
    let c0_cap = a.c0_cap.or(cfg.c0_cap);
    let data: EigenvalueDataset = match a.data.or(cfg.data) {
        Some(path) => empirics::ingest_csv(&path).map_err(usage)?,
        None => {
            let seed = require(a.seed.or(cfg.seed), "--seed")?;
            let top = xs.iter().max().copied().unwrap_or(0).saturating_mul(2);
            empirics::sample_sato_tate_up_to(top, seed).map_err(precondition)?
        }
    };
    let data = if a.sym2 || cfg.sym2 { data.sym2() } else { data };
    let mut rows = Vec::new();
    let mut text = String::from("x          T        log|a(N)|        T*log(delta)   realized_c  fourth moment");
    for &x in &xs {
        let w = empirics::omega_construct(&data, x, delta, c0_cap).map_err(precondition)?;
        let pm = empirics::omega_pm_transform(&w.primes, &data).ok();
        text += &format!(
            "\n{:<10} {:<8} {:<16.6} {:<14.6} {:<11.6} {:.4} ± {:.4}",
            x,
            w.selected_primes,
            w.log_abs_an,
            w.selected_primes as f64 * delta.ln(),
            w.realized_c,
            w.fourth_moment,
            w.fourth_moment_se
        );
        if let Some(p) = &pm {
            text += &format!(
                "\n  opposite sign via q = {}: sign {} -> {}, magnitude ok {}",
                p.q, p.m_sign, p.n_sign, p.magnitude_ok
            );
        }
        rows.push(OmegaRow { witness: w, opposite_sign: pm });
    }
    ctx.emit(&rows, &text)
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MomentsConfig {
    poly: Option<PolyLiteral>,
    hypothesis: Option<Hypothesis>,
}

fn cmd_moments(ctx: &Ctx, a: MomentsArgs) -> Outcome {
    let cfg: MomentsConfig = ctx.config()?;
    let p = match (&a.poly, cfg.poly) {
        (Some(s), _) => poly_arg(s)?,
        (None, Some(lit)) => lit.to_poly().map_err(usage)?,
        (None, None) => return Err(usage("--poly is required")),
    };
    let h = match &a.hyp {
        Some(h) => hyp_arg(h)?,
        None => require(cfg.hypothesis, "--hyp")?,
    };
    let m = moments::asymptotic_mean(&p, h).map_err(precondition)?;
    ctx.emit(&m, &m.to_string())
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(p) => Some(serde_json::from_str(&read_text(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let ctx = Ctx { config, out: cli.out, json: cli.json };
    match cli.command {
        Command::Reproduce(a) => cmd_reproduce(&ctx, a),
        Command::Bound(a) => cmd_bound(&ctx, a),
        Command::Search(a) => cmd_search(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Omega(a) => cmd_omega(&ctx, a),
        Command::Moments(a) => cmd_moments(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Precondition(m) => eprintln!("precondition failed: {m}"),
                Failure::Mismatch => eprintln!("reproduce: at least one MISMATCH"),
            }
            ExitCode::from(f.code())
        }
    }
}
