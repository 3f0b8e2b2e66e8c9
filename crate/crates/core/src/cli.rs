//! Command-line interface.
//!
//! Every run prints a short human summary. With `--out` the full result is
//! also written as JSON (the default) or CSV. JSON outputs carry the command,
//! every parameter including defaults, and the crate version, so `replay`
//! can rerun them and compare results exactly.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::empirical::{
    empirical_composed_average, empirical_distribution, ks_distance, sample_random_singular,
    EmpiricalDistribution, Histogram, MonteCarloConfig, SweepMode, SweepOptions,
};
use crate::error::{Error, Result};
use crate::moments::{growth_lower_bound, hankel_positivity, mu, nonvanishing_probability, poisson_moment};
use crate::output::{sig15, Envelope};
use crate::patterns::{count_prime_seeds, poisson_fit, seed_positions, window_counts, WindowMode};
use crate::polyfam::{composed_resultant_product, degeneracy_graph, PolyFamily, Primitivity};
use crate::singular::{base_constant, singular_series_family, singular_series_tuple};
use crate::tuples::KTuple;

/// Environment variable naming the directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "SINGSERIES_OUT_DIR";

/// Exit code for a replay whose results differ from the recorded ones.
pub const EXIT_REPLAY_MISMATCH: i32 = 8;

#[derive(Debug, Parser)]
#[command(name = "singseries", version, about = "Singular series, moment constants and prime-pattern statistics")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// Write the full result here (relative paths resolve against $SINGSERIES_OUT_DIR).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip, default)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub shards: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of tuple evaluations in a sweep.
    #[arg(long, global = true, default_value_t = 1u64 << 31)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Singular series of a k-tuple.
    SingTuple {
        /// Comma-separated positive integers.
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        /// Visit every prime instead of using the precomputed base constant.
        #[arg(long)]
        slow: bool,
    },
    /// Partial Euler product of a polynomial family.
    SingFamily {
        /// Comma-separated polynomials, e.g. "x,2*x+1".
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        /// Take irreducibility of degree >= 4 members on trust.
        #[arg(long)]
        assume_irreducible: bool,
    },
    /// Moment constant mu_k(m).
    Moment {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Exact probability that the random singular series is nonzero.
    Nonvanish {
        #[arg(long)]
        k: u32,
    },
    /// (1/h*_k) sum of S(h)^m over distinct tuples in [1, h].
    EmpiricalMoment {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        /// Evaluate every ordered tuple instead of one per class.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Histogram of S(h) over distinct tuples in [1, h].
    Distribution {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Upper histogram edge; defaults to the largest value.
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Samples of the random singular series (uses --seed).
    McSample {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        cutoff: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        hi: Option<f64>,
    },
    /// KS distance between a tuple sweep and the Monte Carlo model.
    KsCompare {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        #[arg(long, default_value_t = 1000)]
        mc_cutoff: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Composition of a family with a tuple: primitivity, degeneracy graph, resultants.
    ComposeCheck {
        #[arg(long)]
        family: String,
        #[arg(long)]
        tuple: String,
        /// Also evaluate the composed family's series at this cutoff.
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// (1/h^k) sum of S(f o h) over distinct tuples with a primitive composition.
    ComposedAverage {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 10_000)]
        cutoff: u64,
    },
    /// Count prime seeds n <= N.
    Seeds {
        #[arg(long)]
        family: String,
        #[arg(long = "N", alias = "n-max")]
        n: u64,
        /// Print the seeds themselves (at most 1000 on screen).
        #[arg(long)]
        list: bool,
    },
    /// Seed counts in windows of length lambda * delta(N, F) and a Poisson fit.
    Poisson {
        #[arg(long)]
        family: String,
        #[arg(long = "N", alias = "n-max")]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Disjoint)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
    },
    /// Leading-minor test of the Hankel matrices of mu_i(m).
    Hankel {
        #[arg(long)]
        m: u32,
        #[arg(long = "N", alias = "n-max")]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Rerun a JSON output and compare its result.
    Replay {
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Disjoint,
    Sliding,
}

impl From<ModeArg> for WindowMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Disjoint => WindowMode::Disjoint,
            ModeArg::Sliding => WindowMode::Sliding,
        }
    }
}

/// Outcome of one command.
pub struct Report {
    pub summary: String,
    pub result: Value,
    /// CSV body; scalar results fall back to `field,value` rows.
    pub csv: Option<Vec<u8>>,
}

pub fn parse_tuple(s: &str) -> Result<KTuple> {
    let entries = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']'])
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad tuple entry {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    KTuple::new(entries)
}

fn parse_family(s: &str, assume_irreducible: bool) -> Result<PolyFamily> {
    Ok(s.parse::<PolyFamily>()?.assuming_irreducible(assume_irreducible))
}

fn sweep_options(common: &Common, exhaustive: bool) -> SweepOptions {
    SweepOptions {
        shards: common.shards,
        budget: common.budget as u128,
        mode: if exhaustive {
            SweepMode::Exhaustive
        } else {
            SweepMode::Classes
        },
    }
}

fn histogram_of(d: &EmpiricalDistribution, bins: usize, hi: Option<f64>) -> Result<Histogram> {
    let top = hi.unwrap_or_else(|| d.max());
    let top = if top > 0.0 { top } else { 1.0 };
    d.histogram(&Histogram::uniform_edges(0.0, top, bins.max(1)))
}

fn distribution_json(d: &EmpiricalDistribution, h: &Histogram) -> Value {
    json!({
        "provenance": d.provenance(),
        "total": d.total(),
        "zero_count": d.zero_count(),
        "zero_mass": d.zero_mass(),
        "mean": d.mean(),
        "variance": d.variance(),
        "moments": (1..=4).map(|m| d.moment(m)).collect::<Vec<_>>(),
        "distinct_values": d.atoms().len(),
        "histogram": h,
    })
}

fn histogram_csv(h: &Histogram) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    h.write_csv(&mut buf)?;
    Ok(buf)
}

/// Execute a command without writing files.
pub fn execute(command: &Command, common: &Common) -> Result<Report> {
    let mut s = String::new();
    let report = match command {
        Command::SingTuple { tuple, cutoff, slow } => {
            let t = parse_tuple(tuple)?;
            let base = if *slow { None } else { Some(base_constant(t.k(), *cutoff)?) };
            let v = singular_series_tuple(&t, *cutoff, base.as_ref())?;
            let _ = writeln!(s, "S{:?} = {}", t.entries(), sig15(v.value));
            let _ = writeln!(s, "cutoff {}  tail log bound {} (rigorous)", v.cutoff, sig15(v.tail_log_bound));
            if v.exact_zero {
                let _ = writeln!(s, "a local factor vanishes; the series is exactly 0");
            }
            let mut r = serde_json::to_value(v)?;
            r["absolute_slack"] = json!(v.absolute_slack());
            Report { summary: s, result: r, csv: None }
        }
        Command::SingFamily {
            family,
            cutoff,
            assume_irreducible,
        } => {
            let f = parse_family(family, *assume_irreducible)?;
            if let Primitivity::NotPrimitive(v) = f.primitivity()? {
                return Err(Error::Domain(format!("family {f} is not primitive: {v}")));
            }
            let v = singular_series_family(&f, *cutoff)?;
            let _ = writeln!(s, "S({f}) = {}", sig15(v.value));
            let _ = writeln!(s, "cutoff {}  spread |P(P) - P(P/2)| = {} (heuristic)", v.cutoff, sig15(v.tail_log_bound));
            let mut r = serde_json::to_value(v)?;
            r["family"] = json!(f.to_string());
            r["peg"] = json!(f.peg());
            Report { summary: s, result: r, csv: None }
        }
        Command::Moment { k, m, cutoff } => {
            let r = mu(*k, *m, *cutoff)?;
            let g = growth_lower_bound(*k, *m)?;
            let _ = writeln!(s, "mu_{k}({m}) = {}", sig15(r.value));
            let _ = writeln!(s, "cutoff {}  tail log bound {}", r.cutoff, sig15(r.tail_log_bound));
            let _ = writeln!(s, "explicit lower bound {}", sig15(g));
            let mut v = serde_json::to_value(&r)?;
            v["growth_lower_bound"] = json!(g);
            Report { summary: s, result: v, csv: None }
        }
        Command::Nonvanish { k } => {
            let q = nonvanishing_probability(*k)?;
            let f = crate::moments::rational_to_f64(&q);
            let _ = writeln!(s, "P(Z != 0) for k = {k}: {q} = {}", sig15(f));
            Report {
                summary: s,
                result: json!({ "k": k, "exact": q.to_string(), "value": f }),
                csv: None,
            }
        }
        Command::EmpiricalMoment {
            k,
            m,
            h,
            cutoff,
            exhaustive,
        } => {
            let d = empirical_distribution(*k, *h, *cutoff, &sweep_options(common, *exhaustive))?;
            let v = d.moment(*m);
            let _ = writeln!(s, "empirical moment (k={k}, m={m}, h={h}) = {}", sig15(v));
            let _ = writeln!(s, "over {} tuples, cutoff {cutoff}", d.total());
            Report {
                summary: s,
                result: json!({ "value": v, "tuples": d.total(), "zero_mass": d.zero_mass() }),
                csv: None,
            }
        }
        Command::Distribution {
            k,
            h,
            cutoff,
            bins,
            hi,
            exhaustive,
        } => {
            let d = empirical_distribution(*k, *h, *cutoff, &sweep_options(common, *exhaustive))?;
            let hist = histogram_of(&d, *bins, *hi)?;
            let _ = writeln!(s, "{} tuples, zero mass {}, mean {}", d.total(), sig15(d.zero_mass()), sig15(d.mean()));
            Report {
                summary: s,
                result: distribution_json(&d, &hist),
                csv: Some(histogram_csv(&hist)?),
            }
        }
        Command::McSample {
            k,
            cutoff,
            samples,
            bins,
            hi,
        } => {
            let cfg = MonteCarloConfig {
                k: *k,
                cutoff: *cutoff,
                samples: *samples,
                seed: common.seed,
            };
            let d = sample_random_singular(&cfg, common.shards)?;
            let hist = histogram_of(&d, *bins, *hi)?;
            let _ = writeln!(s, "{} samples (seed {}), zero mass {}, mean {}", d.total(), cfg.seed, sig15(d.zero_mass()), sig15(d.mean()));
            Report {
                summary: s,
                result: distribution_json(&d, &hist),
                csv: Some(histogram_csv(&hist)?),
            }
        }
        Command::KsCompare {
            k,
            h,
            cutoff,
            mc_cutoff,
            samples,
        } => {
            let a = empirical_distribution(*k, *h, *cutoff, &sweep_options(common, false))?;
            let cfg = MonteCarloConfig {
                k: *k,
                cutoff: *mc_cutoff,
                samples: *samples,
                seed: common.seed,
            };
            let b = sample_random_singular(&cfg, common.shards)?;
            let d = ks_distance(&a, &b);
            let _ = writeln!(s, "KS distance = {}", sig15(d));
            let _ = writeln!(s, "sweep: zero mass {}, mean {}", sig15(a.zero_mass()), sig15(a.mean()));
            let _ = writeln!(s, "model: zero mass {}, mean {}", sig15(b.zero_mass()), sig15(b.mean()));
            Report {
                summary: s,
                result: json!({
                    "ks": d,
                    "sweep": { "total": a.total(), "zero_mass": a.zero_mass(), "mean": a.mean() },
                    "model": { "total": b.total(), "zero_mass": b.zero_mass(), "mean": b.mean() },
                }),
                csv: None,
            }
        }
        Command::ComposeCheck { family, tuple, cutoff } => {
            let f = parse_family(family, false)?;
            let t = parse_tuple(tuple)?;
            let composed = f.compose(&t)?;
            let graph = degeneracy_graph(&f, &t)?;
            let primitive = composed.distinct_member_count() == composed.m();
            let d1 = composed_resultant_product(&f, &t)?;
            let _ = writeln!(s, "f o h = {composed}");
            let _ = writeln!(s, "distinct members {} of {}; primitive composition: {primitive}", composed.distinct_member_count(), composed.m());
            let _ = writeln!(s, "degeneracy graph: {} edges, {} components ({} non-singleton)", graph.edges.len(), graph.components, graph.nonsingleton_components);
            let _ = writeln!(s, "D1 = {d1}");
            let mut r = json!({
                "composed": composed.to_string(),
                "distinct_members": composed.distinct_member_count(),
                "members": composed.m(),
                "primitive": primitive,
                "graph": graph,
                "resultant_product": d1.to_string(),
            });
            if let Some(p) = cutoff {
                if primitive {
                    let v = singular_series_family(&composed, *p)?;
                    let _ = writeln!(s, "S(f o h) = {} (spread {})", sig15(v.value), sig15(v.tail_log_bound));
                    r["singular"] = serde_json::to_value(v)?;
                }
            }
            Report { summary: s, result: r, csv: None }
        }
        Command::ComposedAverage { family, k, h, cutoff } => {
            let f = parse_family(family, false)?;
            let a = empirical_composed_average(&f, *k, *h, *cutoff, &sweep_options(common, false))?;
            let _ = writeln!(s, "(1/h^k) sum S(f o h) = {}", sig15(a.value));
            let _ = writeln!(s, "{} primitive, {} imprimitive tuples; max spread {}", a.primitive_tuples, a.imprimitive_tuples, sig15(a.max_spread));
            Report {
                summary: s,
                result: serde_json::to_value(&a)?,
                csv: None,
            }
        }
        Command::Seeds { family, n, list } => {
            let f = parse_family(family, false)?;
            let (count, seeds) = if *list {
                let v = seed_positions(&f, *n)?;
                (v.len() as u64, Some(v))
            } else {
                (count_prime_seeds(&f, *n)?, None)
            };
            let _ = writeln!(s, "pi({n}; {f}) = {count}");
            if let Some(v) = &seeds {
                let shown: Vec<String> = v.iter().take(1000).map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{}", shown.join(" "));
            }
            let csv = seeds.as_ref().map(|v| {
                let mut out = String::from("n\n");
                for x in v {
                    let _ = writeln!(out, "{x}");
                }
                out.into_bytes()
            });
            Report {
                summary: s,
                result: json!({ "family": f.to_string(), "count": count, "seeds": seeds }),
                csv,
            }
        }
        Command::Poisson {
            family,
            n,
            lambda,
            mode,
            cutoff,
        } => {
            let f = parse_family(family, false)?;
            let w = window_counts(&f, *n, *lambda, (*mode).into(), *cutoff)?;
            let fit = poisson_fit(&w)?;
            let _ = writeln!(s, "S = {}  delta = {}  L = {}  windows = {} ({:?})", sig15(w.singular), sig15(w.delta), w.window_length, w.windows, w.mode);
            if w.mode == WindowMode::Sliding {
                let _ = writeln!(s, "sliding windows overlap; counts are serially correlated");
            }
            let _ = writeln!(s, "mean {}  variance {}  (target {})", sig15(fit.mean), sig15(fit.variance), sig15(*lambda));
            let _ = writeln!(s, "TV distance {}  chi-square {} on {} dof", sig15(fit.total_variation), sig15(fit.chi_square), fit.degrees_of_freedom);
            for (r, c) in w.histogram.iter().enumerate() {
                let _ = writeln!(s, "  {r:>3} {c}");
            }
            let bridge: Vec<Value> = (1..=3)
                .map(|k| {
                    json!({
                        "k": k,
                        "empirical": w.moment(k),
                        "poisson": poisson_moment(k, *lambda).unwrap_or(f64::NAN),
                    })
                })
                .collect();
            let mut buf = Vec::new();
            w.write_csv(&mut buf)?;
            Report {
                summary: s,
                result: json!({ "windows": w, "fit": fit, "moments": bridge }),
                csv: Some(buf),
            }
        }
        Command::Hankel { m, n, cutoff } => {
            let r = hankel_positivity(*m, *n, *cutoff)?;
            let _ = writeln!(s, "Hankel test m = {m}, N = {n}: {:?}", r.verdict);
            Report {
                summary: s,
                result: serde_json::to_value(&r)?,
                csv: None,
            }
        }
        Command::Replay { .. } => {
            return Err(Error::Config("replay cannot be nested".into()));
        }
    };
    Ok(report)
}

fn flat_csv(result: &Value) -> Result<Vec<u8>> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["field", "value"])?;
    if let Value::Object(map) = result {
        for (k, v) in map {
            let text = match v {
                Value::Number(x) => x.as_f64().map(sig15).unwrap_or_else(|| x.to_string()),
                Value::String(t) => t.clone(),
                Value::Bool(b) => b.to_string(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            out.write_record([k.as_str(), &text])?;
        }
    }
    out.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_output(cli_common: &Common, command: &Command, report: &Report) -> Result<Option<PathBuf>> {
    let Some(out) = &cli_common.out else {
        return Ok(None);
    };
    let path = resolve_out(out);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let bytes = match cli_common.format {
        Format::Json => {
            let env = Envelope::new(command, cli_common, report.result.clone())?;
            let mut b = serde_json::to_vec_pretty(&env)?;
            b.push(b'\n');
            b
        }
        Format::Csv => match &report.csv {
            Some(b) => b.clone(),
            None => flat_csv(&report.result)?,
        },
    };
    std::fs::write(&path, bytes)?;
    Ok(Some(path))
}

fn replay(input: &Path, shards: Option<usize>) -> Result<(bool, String)> {
    let text = std::fs::read_to_string(input)?;
    let env: Envelope = serde_json::from_str(&text)?;
    let mut common: Common = serde_json::from_value(env.common.clone())?;
    if let Some(s) = shards {
        common.shards = s;
    }
    let command: Command = serde_json::from_value(json!({
        "command": env.command,
        "parameters": env.parameters,
    }))?;
    let report = execute(&command, &common)?;
    let same = report.result == env.result;
    let mut s = report.summary;
    let _ = writeln!(
        s,
        "replay of {}: {}",
        input.display(),
        if same { "identical results" } else { "RESULTS DIFFER" }
    );
    Ok((same, s))
}

/// Parse `args`, run, print, and return the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Replay { input } => {
            let shards = (cli.common.shards != 1).then_some(cli.common.shards);
            replay(input, shards).map(|(same, s)| {
                print!("{s}");
                if same {
                    0
                } else {
                    EXIT_REPLAY_MISMATCH
                }
            })
        }
        command => execute(command, &cli.common).and_then(|report| {
            print!("{}", report.summary);
            if let Some(p) = write_output(&cli.common, command, &report)? {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.kind().exit_code()
        }
    }
}
