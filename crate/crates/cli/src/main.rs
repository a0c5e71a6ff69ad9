mod format;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latdisc::bounds::{check_bounds, CorpusSize};
use latdisc::fixedpoint::DEFAULT_BITS;
use latdisc::lattice::build_lattice;
use latdisc::metric::{run_sweep, SweepResult};
use latdisc::parseval::prop1_enclosure_at;
use latdisc::quadratic::{geometric_grid, theorem2_residuals};
use latdisc::{
    a_constant, beck_constant_estimate, cf_of_rational, cf_of_surd, convergents, dioph_sum, lambda_constant,
    prop1_enclosure, Algo, Alpha, AlphaSpec, ContinuedFraction, Estimator, Measure, Precision, QuadraticSurd,
    SweepConfig, SweepMode, Variant, Weight,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::format::{float, opt_float, write_json};

#[derive(Parser)]
#[command(name = "latdisc", version, about = "Exact L² discrepancy of rotation lattices and related experiments")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Out::Csv, global = true)]
    out: Out,
    /// Seed for random sweeps.
    #[arg(long, default_value_t = 20240601, global = true)]
    seed: u64,
    /// Fixed-point bits for irrational α.
    #[arg(long, default_value_t = DEFAULT_BITS, global = true)]
    bits: u32,
    /// Worker threads; output does not depend on it.
    #[arg(long, env = "LATDISC_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion, optionally with convergents.
    Cf {
        #[arg(long)]
        alpha: AlphaSpec,
        /// List the first K convergents.
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Dump the points of L(α,N) or S(α,N).
    Lattice {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// Exact L² discrepancy of L(α,N) or S(α,N).
    Disc {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        prec: PrecArgs,
        #[arg(long, value_enum, default_value_t = AlgoArg::Fast)]
        algo: AlgoArg,
    },
    /// Certified enclosure of the discrepancy from the continued fraction.
    Estimate {
        #[arg(long)]
        alpha: AlphaSpec,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, conflicts_with = "unsym")]
        sym: bool,
        #[arg(long)]
        unsym: bool,
        /// Convergent index; defaults to the smallest K with q_K >= N.
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Σ_{m<=M} weight / (m²‖mα‖²).
    Dioph {
        #[arg(long)]
        alpha: AlphaSpec,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value = "quarter")]
        weight: Weight,
    },
    /// Constants and asymptotics of a quadratic irrational (P + √D)/Q.
    Quadratic {
        #[arg(long, value_parser = parse_surd)]
        surd: (i64, i64, i64),
        #[arg(long, value_enum)]
        report: Report,
        /// Smallest M of the regression grid.
        #[arg(long, default_value_t = 1_000)]
        m_lo: u64,
        #[arg(long, default_value_t = 10_000_000)]
        m_hi: u64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::S)]
        variant: VariantArg,
        #[arg(long, default_value_t = 5)]
        k_from: usize,
        #[arg(long, default_value_t = 20)]
        k_to: usize,
        /// Beck constant for the residuals; estimated when omitted.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Statistic over random rationals p/q with q <= Q.
    SweepRational {
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, value_enum, default_value_t = SweepKind::Full)]
        mode: SweepKind,
        #[arg(long = "M", required_if_eq("mode", "sample"))]
        m: Option<usize>,
        #[arg(long, default_value = "exact")]
        estimator: Estimator,
        /// Largest Kolmogorov distance to the Lévy law that passes.
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
    /// Statistic over random irrationals at fixed N.
    SweepIrrational {
        #[arg(long = "N")]
        n: u64,
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value = "lebesgue")]
        measure: Measure,
        #[arg(long, default_value = "samur_stat")]
        estimator: Estimator,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
    },
    /// Run every certified inequality on the test corpus.
    CheckBounds {
        #[arg(long, default_value = "full")]
        corpus: CorpusSize,
    },
}

#[derive(Args)]
struct SetArgs {
    #[arg(long)]
    alpha: AlphaSpec,
    #[arg(long = "N")]
    n: usize,
    /// Use S(α,N) instead of L(α,N).
    #[arg(long)]
    sym: bool,
}

#[derive(Args)]
struct PrecArgs {
    /// Keep every bit of irrational coordinates (default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Round irrational coordinates to 64 bits.
    #[arg(long)]
    float: bool,
}

impl PrecArgs {
    fn precision(&self) -> Precision {
        if self.float {
            Precision::Bits64
        } else {
            Precision::Full
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Quad,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    S,
    L,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Full,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    #[value(name = "A")]
    A,
    #[value(name = "Lambda")]
    Lambda,
    #[value(name = "c")]
    C,
    #[value(name = "theorem2")]
    Theorem2,
}

fn parse_surd(s: &str) -> Result<(i64, i64, i64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, d, q] = parts[..] else {
        return Err(format!("expected P,D,Q, got `{s}`"));
    };
    let int = |x: &str| x.parse::<i64>().map_err(|_| format!("`{x}` is not an integer"));
    Ok((int(p)?, int(d)?, int(q)?))
}

enum Failure {
    Lib(latdisc::Error),
    Invalid(String),
    Violations(usize),
    Io(io::Error),
}

impl From<latdisc::Error> for Failure {
    fn from(e: latdisc::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Res = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let res = run(&cli, &mut w).and_then(|()| w.flush().map_err(Failure::Io));
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            use latdisc::Error::*;
            match e {
                PrecisionExhausted(_) | ExpansionTooShort { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violations(n)) => {
            eprintln!("error: {n} invariant violation(s)");
            ExitCode::from(4)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli, w: &mut impl Write) -> Res {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Invalid(e.to_string()))?;
    }
    let alpha = |spec: &AlphaSpec| Alpha::from_spec(spec, cli.bits);
    match &cli.command {
        Command::Cf { alpha: spec, terms } => cf_cmd(cli, w, spec, *terms),
        Command::Lattice { set, prec } => {
            let lat = build_lattice(&alpha(&set.alpha)?, set.n, set.sym, prec.precision())?;
            match (cli.out, prec.float) {
                (Out::Csv, false) => lat.write_csv_exact(w)?,
                (Out::Csv, true) => lat.write_csv_float(w)?,
                (Out::Json, _) => {
                    let points: Vec<Value> = (0..lat.len())
                        .map(|i| {
                            let (x, y) = lat.points.point(i);
                            if prec.float {
                                json!({"x": num_f64(&x), "y": num_f64(&y)})
                            } else {
                                json!({"x": x.to_string(), "y": y.to_string()})
                            }
                        })
                        .collect();
                    write_json(
                        w,
                        &json!({"alpha": set.alpha.to_string(), "N": set.n, "sym": set.sym, "x_err": lat.x_err, "points": points}),
                    )?;
                }
            }
            Ok(())
        }
        Command::Disc { set, prec, algo } => {
            let lat = build_lattice(&alpha(&set.alpha)?, set.n, set.sym, prec.precision())?;
            let v = lat.discrepancy(match algo {
                AlgoArg::Quad => Algo::Quadratic,
                AlgoArg::Fast => Algo::Fast,
            })?;
            let (num, den) = (v.d2_squared.numer(), v.d2_squared.denom());
            match cli.out {
                Out::Csv => {
                    writeln!(w, "N,d2sq_num,d2sq_den,d2_float")?;
                    writeln!(w, "{},{num},{den},{}", set.n, float(v.d2()))?;
                }
                Out::Json => write_json(
                    w,
                    &json!({"N": set.n, "sym": set.sym, "d2sq": format!("{num}/{den}"), "d2sq_float": v.to_f64(),
                        "d2": v.d2(), "err_bound": v.err_bound}),
                )?,
            }
            Ok(())
        }
        Command::Estimate { alpha: spec, n, sym: _, unsym, k } => {
            let a = alpha(spec)?;
            let variant = if *unsym { Variant::L } else { Variant::S };
            let e = match k {
                Some(k) => prop1_enclosure_at(&a, *n, *k, variant)?,
                None => prop1_enclosure(&a, *n, variant)?,
            };
            match cli.out {
                Out::Csv => {
                    writeln!(w, "variant,N,K,lo,hi,mid,half_width")?;
                    writeln!(
                        w,
                        "{:?},{},{},{},{},{},{}",
                        e.variant,
                        e.n,
                        e.k,
                        float(e.lo),
                        float(e.hi),
                        float(e.mid()),
                        float(e.half_width())
                    )?;
                }
                Out::Json => write_json(
                    w,
                    &json!({"K": e.k, "N": e.n, "variant": format!("{:?}", e.variant), "k_alt": e.k_alt,
                        "lo": e.lo, "hi": e.hi, "lo_unclamped": e.lo_unclamped, "parts": to_value(&e.parts)}),
                )?,
            }
            Ok(())
        }
        Command::Dioph { alpha: spec, m, weight } => {
            let s = dioph_sum(&alpha(spec)?, *m, *weight)?;
            match cli.out {
                Out::Csv => {
                    writeln!(w, "M,lo,hi,mid")?;
                    writeln!(w, "{m},{},{},{}", float(s.lo), float(s.hi), float(s.mid()))?;
                }
                Out::Json => {
                    write_json(w, &json!({"M": m, "weight": to_value(weight), "lo": s.lo, "hi": s.hi, "mid": s.mid()}))?
                }
            }
            Ok(())
        }
        Command::Quadratic { surd, report, m_lo, m_hi, points, variant, k_from, k_to, c } => {
            let (p, d, q) = *surd;
            let a = alpha(&AlphaSpec::Surd { p, d, q })?;
            let grid = || geometric_grid(*m_lo, *m_hi, *points);
            match report {
                Report::A => {
                    let v = a_constant(a.cf())?;
                    let f = num_f64(&v);
                    match cli.out {
                        Out::Csv => writeln!(w, "A,A_float\n{v},{}", float(f))?,
                        Out::Json => write_json(w, &json!({"A": v.to_string(), "A_float": f}))?,
                    }
                }
                Report::Lambda => {
                    let l = lambda_constant(a.cf())?;
                    match cli.out {
                        Out::Csv => writeln!(
                            w,
                            "period_len,trace,det,eta,lambda\n{},{},{},{},{}",
                            l.matrix.period_len,
                            l.matrix.trace,
                            l.matrix.det,
                            float(l.eta),
                            float(l.lambda)
                        )?,
                        Out::Json => write_json(w, &to_value(&l))?,
                    }
                }
                Report::C => {
                    let e = beck_constant_estimate(&a, &grid())?;
                    match cli.out {
                        Out::Csv => {
                            writeln!(w, "M,sum_lo,sum_hi")?;
                            for (m, s) in &e.points {
                                writeln!(w, "{m},{},{}", float(s.lo), float(s.hi))?;
                            }
                            // the fit goes to stderr so stdout stays one table
                            eprintln!("c_hat={} stderr={}", float(e.c_hat), float(e.stderr));
                        }
                        Out::Json => write_json(w, &to_value(&e))?,
                    }
                }
                Report::Theorem2 => {
                    if k_from > k_to || *k_from == 0 {
                        return Err(Failure::Invalid("need 1 <= --k-from <= --k-to".into()));
                    }
                    let c = match c {
                        Some(c) => *c,
                        None => beck_constant_estimate(&a, &grid())?.c_hat,
                    };
                    let v = match variant {
                        VariantArg::S => Variant::S,
                        VariantArg::L => Variant::L,
                    };
                    let t = theorem2_residuals(&a, *k_from..=*k_to, v, c)?;
                    match cli.out {
                        Out::Csv => {
                            writeln!(w, "K,N,log_N,d2sq,err_bound,residual")?;
                            for r in &t.rows {
                                writeln!(
                                    w,
                                    "{},{},{},{},{},{}",
                                    r.k,
                                    r.n,
                                    float(r.log_n),
                                    float(r.d2sq),
                                    float(r.err_bound),
                                    float(r.residual)
                                )?;
                            }
                        }
                        Out::Json => write_json(w, &to_value(&t))?,
                    }
                }
            }
            Ok(())
        }
        Command::SweepRational { q, mode, m, estimator, threshold } => {
            let mode = match mode {
                SweepKind::Full => SweepMode::FareyFull { q: *q },
                SweepKind::Sample => SweepMode::FareySample { q: *q, m: m.unwrap_or_default(), seed: cli.seed },
            };
            let cfg = SweepConfig { mode, estimator: *estimator, bits: cli.bits };
            sweep_output(cli, w, &run_sweep(&cfg)?, *threshold)
        }
        Command::SweepIrrational { n, m, measure, estimator, threshold } => {
            let cfg = SweepConfig {
                mode: SweepMode::Irrational { n: *n, m: *m, seed: cli.seed, measure: *measure },
                estimator: *estimator,
                bits: cli.bits,
            };
            sweep_output(cli, w, &run_sweep(&cfg)?, *threshold)
        }
        Command::CheckBounds { corpus } => {
            let rep = check_bounds(*corpus)?;
            match cli.out {
                Out::Csv => {
                    writeln!(w, "check,count,skipped")?;
                    for (name, count) in &rep.counts {
                        writeln!(w, "{name},{count},{}", rep.skipped.get(name).copied().unwrap_or(0))?;
                    }
                }
                Out::Json => write_json(w, &to_value(&rep))?,
            }
            for v in &rep.violations {
                eprintln!("violation: {} {} {}", v.check, v.alpha, v.detail);
            }
            if rep.ok() {
                Ok(())
            } else {
                Err(Failure::Violations(rep.violations.len()))
            }
        }
    }
}

fn cf_cmd(cli: &Cli, w: &mut impl Write, spec: &AlphaSpec, terms: Option<usize>) -> Res {
    // the whole number, integer part included
    let cf: ContinuedFraction = match spec {
        AlphaSpec::Rational { p, q } => cf_of_rational(*p, *q)?,
        AlphaSpec::Surd { p, d, q } => cf_of_surd(&QuadraticSurd::normalized(*p, *d, *q)?)?,
        AlphaSpec::Rule(name) => ContinuedFraction::named(name)?,
        AlphaSpec::Bits { .. } => Alpha::from_spec(spec, cli.bits)?.cf().clone(),
    };
    let convs = match terms {
        Some(k) => Some(convergents(&cf, k)?),
        None => None,
    };
    match (cli.out, convs) {
        (Out::Csv, None) => writeln!(w, "{cf}")?,
        (Out::Csv, Some(cs)) => {
            writeln!(w, "k,a_k,p_k,q_k")?;
            for c in cs {
                let a = if c.k == 0 { cf.a0().to_string() } else { cf.quotient(c.k).unwrap_or(0).to_string() };
                writeln!(w, "{},{a},{},{}", c.k, c.p, c.q)?;
            }
        }
        (Out::Json, cs) => write_json(
            w,
            &json!({"alpha": spec.to_string(), "cf": cf.to_string(), "convergents": cs.map(|c| to_value(&c))}),
        )?,
    }
    Ok(())
}

fn sweep_output(cli: &Cli, w: &mut impl Write, r: &SweepResult, threshold: f64) -> Res {
    let summary = json!({"n": r.records.len(), "ks": r.ks, "threshold": threshold, "pass": r.ks <= threshold});
    match cli.out {
        Out::Csv => {
            writeln!(w, "id,q_or_seed,stat,estimator,enclosure_width")?;
            for rec in &r.records {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    rec.id,
                    rec.q_or_seed,
                    float(rec.stat),
                    rec.estimator,
                    opt_float(rec.enclosure_width)
                )?;
            }
            eprintln!("{}", format::json_string(&summary));
        }
        Out::Json => write_json(w, &json!({"records": to_value(&r.records), "summary": summary}))?,
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn num_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
