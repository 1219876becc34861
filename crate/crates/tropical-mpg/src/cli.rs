//! The `tropmpg` command line: solve, diagnose, certify, generate and
//! benchmark games, emitting machine-readable reports.
//!
//! Exit codes follow sysexits where sensible: `solve` maps the verdict to
//! 0 (Max wins), 1 (Min wins) or 2 (inconclusive); 64 flags a usage error,
//! 65 malformed input data, 69 an exceeded enumeration budget.

use std::fs;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde_json::Value;

use crate::condition::{
    check_certificate, condition_numbers, duality_report, oracle_to_json, CondValue,
};
use crate::game::{game_stats, generate_random_game, parse_game, serialize_game, StochasticGame};
use crate::oracle::solve_game;
use crate::shapley::{build_operator, ConjugateKind};
use crate::tropical::TropScalar;
use crate::vi::{self, NoiseMode, VIConfig, Winner};
use crate::{parse_q, Error, Q};

pub const EX_OK: i32 = 0;
pub const EX_USAGE: i32 = 64;
pub const EX_DATAERR: i32 = 65;
pub const EX_UNAVAILABLE: i32 = 69;

const USAGE: &str = "\
tropmpg - exact solver and diagnostics for stochastic mean-payoff games

USAGE:
    tropmpg <COMMAND> [INPUT] [FLAGS]

COMMANDS:
    solve      run value iteration; exit 0 = Max wins, 1 = Min wins, 2 = inconclusive
    condition  Collatz-Wielandt and condition-number report
    oracle     brute-force solution (values, saddle, ergodic constant, bias)
    duality    dual-game report: cw_bar(F*) = -cw_low(F) and corollaries
    certify    check a certificate F(z) >= mu + z   (--vector, --mu, [--dual])
    gen        emit a random game as JSON           (--n --m --q --M --W [--density] --seed)
    bench      CSV over random instances            (gen flags plus --count)

INPUT is a game JSON file; `-` reads standard input.

FLAGS:
    --mode exact|float     solve arithmetic (float = finite-precision, needs --epsilon)
    --epsilon p/q          per-step error budget for --mode float
    --max-iters N          iteration budget (default 100000)
    --perturbed            solve the perturbed rescaled operator 1 + 2muF
    --dual                 certify against the dual operator F*
    --vector v1,...,vn     certificate vector; entries rational or -inf
    --mu p/q               certificate shift
    --seed S               RNG seed (default 0)
    --out PATH             write the report to PATH instead of stdout
    --n --m --q --M --W    instance shape for gen/bench
    --density d            finite-entry density in (0,1] (default 0.8)
    --count N              number of bench instances (default 20)
";

#[derive(Clone)]
struct Flags {
    input: Option<String>,
    mode: String,
    epsilon: Option<Q>,
    max_iters: u64,
    perturbed: bool,
    dual: bool,
    vector: Option<String>,
    mu: Option<Q>,
    seed: u64,
    out: Option<String>,
    n: usize,
    m: usize,
    q: usize,
    m_den: u32,
    w: i64,
    density: f64,
    count: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            input: None,
            mode: "exact".into(),
            epsilon: None,
            max_iters: 100_000,
            perturbed: false,
            dual: false,
            vector: None,
            mu: None,
            seed: 0,
            out: None,
            n: 2,
            m: 2,
            q: 2,
            m_den: 2,
            w: 5,
            density: 0.8,
            count: 20,
        }
    }
}

enum CliError {
    Usage(String),
    Data(String),
    Budget(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn parse_flags(args: &[String]) -> Result<Flags, CliError> {
    let mut flags = Flags::default();
    let mut it = args.iter();
    let usage = |msg: &str| CliError::Usage(msg.to_string());
    while let Some(arg) = it.next() {
        let mut value_of = |name: &str| {
            it.next()
                .map(|s| s.to_string())
                .ok_or_else(|| usage(&format!("{name} needs a value")))
        };
        match arg.as_str() {
            "--mode" => {
                flags.mode = value_of("--mode")?;
                if flags.mode != "exact" && flags.mode != "float" {
                    return Err(usage("--mode must be exact or float"));
                }
            }
            "--epsilon" => {
                flags.epsilon =
                    Some(parse_q(&value_of("--epsilon")?).map_err(|e| usage(&e.to_string()))?)
            }
            "--max-iters" => {
                flags.max_iters = value_of("--max-iters")?
                    .parse()
                    .map_err(|_| usage("--max-iters needs an integer"))?
            }
            "--perturbed" => flags.perturbed = true,
            "--dual" => flags.dual = true,
            "--vector" => flags.vector = Some(value_of("--vector")?),
            "--mu" => {
                flags.mu = Some(parse_q(&value_of("--mu")?).map_err(|e| usage(&e.to_string()))?)
            }
            "--seed" => {
                flags.seed = value_of("--seed")?
                    .parse()
                    .map_err(|_| usage("--seed needs an integer"))?
            }
            "--out" => flags.out = Some(value_of("--out")?),
            "--n" => {
                flags.n = value_of("--n")?
                    .parse()
                    .map_err(|_| usage("--n needs an integer"))?
            }
            "--m" => {
                flags.m = value_of("--m")?
                    .parse()
                    .map_err(|_| usage("--m needs an integer"))?
            }
            "--q" => {
                flags.q = value_of("--q")?
                    .parse()
                    .map_err(|_| usage("--q needs an integer"))?
            }
            "--M" => {
                flags.m_den = value_of("--M")?
                    .parse()
                    .map_err(|_| usage("--M needs an integer"))?
            }
            "--W" => {
                flags.w = value_of("--W")?
                    .parse()
                    .map_err(|_| usage("--W needs an integer"))?
            }
            "--density" => {
                flags.density = value_of("--density")?
                    .parse()
                    .map_err(|_| usage("--density needs a float"))?
            }
            "--count" => {
                flags.count = value_of("--count")?
                    .parse()
                    .map_err(|_| usage("--count needs an integer"))?
            }
            other if other.starts_with("--") => {
                return Err(usage(&format!("unknown flag {other}")));
            }
            path => {
                if flags.input.replace(path.to_string()).is_some() {
                    return Err(usage("more than one input path"));
                }
            }
        }
    }
    Ok(flags)
}

fn read_game(flags: &Flags) -> Result<StochasticGame, CliError> {
    let path = flags
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing input".into()))?;
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Data(format!("stdin: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Data(format!("{path}: {e}")))?
    };
    Ok(parse_game(&text)?)
}

fn emit(flags: &Flags, out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &flags.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Data(format!("{path}: {e}"))),
        None => writeln!(out, "{}", text.trim_end_matches('\n'))
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serialization")
}

/// Entry point used by both the binary and the tests.
pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(command) = args.first() else {
        let _ = write!(err, "{USAGE}");
        return EX_USAGE;
    };
    let flags = match parse_flags(&args[1..]) {
        Ok(f) => f,
        Err(e) => return report_error(e, err),
    };
    let result = match command.as_str() {
        "solve" => cmd_solve(&flags, out),
        "condition" => cmd_condition(&flags, out),
        "oracle" => cmd_oracle(&flags, out),
        "duality" => cmd_duality(&flags, out),
        "certify" => cmd_certify(&flags, out),
        "gen" => cmd_gen(&flags, out),
        "bench" => cmd_bench(&flags, out),
        "help" | "--help" | "-h" => {
            let _ = write!(out, "{USAGE}");
            Ok(EX_OK)
        }
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(e, err),
    }
}

fn report_error(e: CliError, err: &mut dyn Write) -> i32 {
    match e {
        CliError::Usage(msg) => {
            let _ = writeln!(err, "usage error: {msg}");
            let _ = write!(err, "{USAGE}");
            EX_USAGE
        }
        CliError::Data(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EX_DATAERR
        }
        CliError::Budget(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EX_UNAVAILABLE
        }
    }
}

fn solve_config(flags: &Flags) -> Result<VIConfig, CliError> {
    if flags.mode == "float" {
        let eps = flags
            .epsilon
            .clone()
            .unwrap_or_else(|| Q::new(1.into(), (1 << 20).into()));
        Ok(VIConfig::finite(eps, NoiseMode::Round, flags.max_iters))
    } else {
        Ok(VIConfig::exact(flags.max_iters))
    }
}

fn cmd_solve(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_game(flags)?;
    let cfg = solve_config(flags)?;
    let report = if flags.perturbed {
        vi::run_perturbed_rescaled(&g, &cfg)?
    } else {
        let f = build_operator(&g)?;
        vi::run(&f, &cfg)?.with_bounds(vi::predict_bounds(&g, None)?)
    };
    emit(flags, out, &pretty(&report.to_json()))?;
    Ok(match report.winner {
        Winner::MaxWins => 0,
        Winner::MinWins => 1,
        Winner::Inconclusive => 2,
    })
}

fn cmd_condition(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_game(flags)?;
    let report = condition_numbers(&g)?;
    emit(flags, out, &pretty(&report.to_json()))?;
    Ok(EX_OK)
}

fn cmd_oracle(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_game(flags)?;
    let sol = solve_game(&g)?;
    emit(flags, out, &pretty(&oracle_to_json(&sol)))?;
    Ok(EX_OK)
}

fn cmd_duality(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_game(flags)?;
    let report = duality_report(&g)?;
    emit(flags, out, &pretty(&report.to_json()))?;
    Ok(EX_OK)
}

fn parse_trop_vector(text: &str, dim: usize) -> Result<Vec<TropScalar>, CliError> {
    let entries: Result<Vec<TropScalar>, Error> = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok == "-inf" || tok == "bot" || tok == "null" {
                Ok(TropScalar::Bottom)
            } else {
                Ok(TropScalar::Finite(parse_q(tok)?))
            }
        })
        .collect();
    let entries = entries?;
    if entries.len() != dim {
        return Err(CliError::Data(format!(
            "--vector has {} entries, the operator needs {dim}",
            entries.len()
        )));
    }
    Ok(entries)
}

fn cmd_certify(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_game(flags)?;
    let f = build_operator(&g)?;
    let f = if flags.dual {
        f.conjugate(ConjugateKind::Dual)?
    } else {
        f
    };
    let vector = flags
        .vector
        .as_deref()
        .ok_or_else(|| CliError::Usage("certify needs --vector".into()))?;
    let mu = flags
        .mu
        .clone()
        .ok_or_else(|| CliError::Usage("certify needs --mu".into()))?;
    let z = parse_trop_vector(vector, f.in_dim())?;
    let pass = check_certificate(&f, &z, &mu)?;
    let report = serde_json::json!({
        "pass": pass,
        "mu": mu.to_string(),
        "dual": flags.dual,
    });
    emit(flags, out, &pretty(&report))?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_gen(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = generate_random_game(
        flags.n,
        flags.m,
        flags.q,
        flags.m_den,
        flags.w,
        flags.density,
        flags.seed,
    )?;
    emit(flags, out, &serialize_game(&g)?)?;
    Ok(EX_OK)
}

fn cond_csv(c: &CondValue) -> String {
    match c {
        CondValue::Finite(q) => q.to_string(),
        CondValue::Infinite => "inf".into(),
    }
}

fn cmd_bench(flags: &Flags, out: &mut dyn Write) -> Result<i32, CliError> {
    let rows: Vec<Mutex<Option<Result<String, Error>>>> =
        (0..flags.count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(4)
        .min(8);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= flags.count {
                    break;
                }
                let row = bench_row(flags, idx);
                *rows[idx].lock().unwrap() = Some(row);
            });
        }
    });
    let mut text = String::from("n,m,q,M,W,k,rho,cond,N_vi,bound_nits,bound_total,elapsed_ms\n");
    for row in rows {
        let row = row.into_inner().unwrap().expect("worker filled every slot");
        text.push_str(&row?);
        text.push('\n');
    }
    emit(flags, out, &text)?;
    Ok(EX_OK)
}

fn bench_row(flags: &Flags, idx: usize) -> Result<String, Error> {
    let started = Instant::now();
    let seed = flags.seed.wrapping_add(idx as u64);
    let g = generate_random_game(
        flags.n,
        flags.m,
        flags.q,
        flags.m_den,
        flags.w,
        flags.density,
        seed,
    )?;
    let stats = game_stats(&g)?;
    let sol = solve_game(&g)?;
    let bounds = vi::predict_bounds(&g, Some(&sol))?;
    let f = build_operator(&g)?;
    let report = vi::run_exact(&f, &VIConfig::exact(flags.max_iters))?;
    let chi_stats = crate::tropical::hilbert_stats(&sol.chi)?;
    let cond = CondValue::from_cw(&chi_stats.top);
    let elapsed = started.elapsed().as_millis().to_u64().unwrap_or(u64::MAX);
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        g.n(),
        g.m(),
        g.q(),
        stats.m_den,
        stats.w,
        stats.k,
        sol.rho.as_ref().map(|q| q.to_string()).unwrap_or_default(),
        cond_csv(&cond),
        report.iterations,
        bounds
            .nits_bound
            .as_ref()
            .map(|q| q.to_string())
            .unwrap_or_default(),
        bounds.total_bound,
        elapsed,
    ))
}
