//! `ostronet` command-line front end.
//!
//! Exit statuses: 0 success, 2 malformed input, 3 computation failure,
//! 4 detected invariant violation.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ostronet::cf::number_json;
use ostronet::gaps::{self, scan_residual};
use ostronet::intervals::{
    count_hits, count_hits_brute, discrepancy_scan, level_partition, parse_point, sample_shifts,
};
use ostronet::net::{Net, NetConfig};
use ostronet::ostrowski::{self, inhom_bound_check};
use ostronet::{cf_digits, cf_until, make_interval, ConvergentTable, Error, Irrational};

const DEFAULT_SEED: u64 = 20_240_601;
/// Self-verification runs by default up to this many terms.
const AUTO_VERIFY_LIMIT: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "ostronet", version, about = "Special intervals, Ostrowski numeration and cut-and-project nets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Slope: surd:P,Q,D,R | cf:a1,..,aT | cf-periodic:pre;(period) | dec:<digits>@<bits>
    #[arg(long, global = true, default_value = "surd:-1,1,5,2")]
    alpha: String,
    /// Bits of precision for decimal renderings.
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Run the brute-force oracle beside every fast path, whatever the size.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partial quotients, convergents and remainders D_k.
    Cf {
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    #[command(subcommand)]
    Ostrowski(OstrowskiCmd),
    #[command(subcommand)]
    Gaps(GapsCmd),
    #[command(subcommand)]
    Interval(IntervalCmd),
    #[command(subcommand)]
    Scan(ScanCmd),
    #[command(subcommand)]
    Net(NetCmd),
}

#[derive(Subcommand, Debug)]
enum OstrowskiCmd {
    /// Digits of a non-negative integer, least significant first.
    Encode {
        #[arg(long)]
        n: i128,
    },
    /// Integer from comma-separated digits, least significant first.
    Decode {
        #[arg(long)]
        digits: String,
    },
    /// Digits of a point of the fundamental window.
    EncodeReal {
        /// orbit:L | lin:U,V[/DEN] | P/Q | decimal
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Also check the approximation bound for this integer.
        #[arg(long)]
        check_n: Option<i128>,
    },
}

#[derive(Subcommand, Debug)]
enum GapsCmd {
    /// Block words B_{-1}..B_i at level m.
    Blocks {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        i: isize,
    },
    /// CSV of M, n_M, M − n_M·|J(m,0)|.
    ScanResidual {
        #[arg(long)]
        m: usize,
        #[arg(long = "max-M")]
        max_m: usize,
    },
}

#[derive(Subcommand, Debug)]
enum IntervalCmd {
    /// Endpoints and length of J(m, γ).
    Info {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "0")]
        gamma: String,
    },
    /// The level-m arcs tiling J(m−1, 0), or the circle for m = 1.
    Partition {
        #[arg(long)]
        m: usize,
    },
    /// #{1 ≤ n ≤ N : nα ∈ J(m, γ)}.
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "0")]
        gamma: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ScanCmd {
    /// Maximal |count − N·|J|| over levels and orbit shifts γ = −ℓα.
    Discrepancy {
        /// `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "1..8")]
        levels: String,
        /// Comma list of shifts ℓ ≥ 0, or a count of seeded shifts.
        #[arg(long, default_value = "100")]
        gammas: String,
        #[arg(long = "max-N")]
        max_n: u64,
        /// Allowed rise of the maximum from N ≤ max-N/10 to N ≤ max-N.
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
    },
}

#[derive(Subcommand, Debug)]
enum NetCmd {
    /// Net points in the config box.
    Generate(NetArgs),
    /// Bounded-displacement map on the box.
    BdVerify(NetArgs),
    /// Sampled relative count defect at box side ρ.
    Density {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        rho: i128,
        /// Defaults to the window measure.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Partial sums of sampled defects at ρ = 2^t.
    BkSum {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long = "t-max", default_value_t = 10)]
        t_max: u32,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct NetArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config box: `lo:hi,lo:hi,…`.
    #[arg(long = "box")]
    bounds: Option<String>,
}

/// Primary output: JSON document or CSV table.
enum Output {
    Json(Value),
    Csv { table: String, summary: Option<Value> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli).and_then(|out| emit(&cli.global, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(status(&e))
        }
    }
}

fn status(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Config(_) | Error::NotIrrational(_) | Error::NotInUnitInterval => 2,
        Error::InvariantViolation(_) => 4,
        _ => 3,
    }
}

fn emit(g: &Global, out: Output) -> Result<(), Error> {
    let io_err = |e: io::Error| Error::Config(format!("cannot write output: {e}"));
    let (body, summary) = match out {
        Output::Json(v) => (pretty(&v), None),
        Output::Csv { table, summary } => (table, summary),
    };
    match &g.out {
        Some(p) => {
            fs::write(p, body).map_err(io_err)?;
            if let Some(s) = summary {
                println!("{}", pretty(&s).trim_end());
            }
        }
        None => {
            let mut so = io::stdout().lock();
            so.write_all(body.as_bytes()).map_err(io_err)?;
            if let Some(s) = summary {
                eprintln!("{}", pretty(&s).trim_end());
            }
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize
}

/// A float with its precision context.
fn float_json(x: f64) -> Value {
    json!({ "decimal": format!("{x:.15e}"), "precision": { "bits": 53 } })
}

fn alpha(g: &Global) -> Result<Irrational, Error> {
    g.alpha.parse()
}

/// Table whose denominators pass `bound`, or as deep as the slope allows.
fn table_past(a: &Irrational, bound: i128, min_depth: usize) -> Result<ConvergentTable, Error> {
    let t = match cf_until(a, bound, 4) {
        Ok(t) => t,
        Err(Error::HorizonExceeded(_)) => match a.horizon() {
            Some(h) => cf_digits(a, h)?,
            None => return Err(Error::HorizonExceeded(format!("q_k ≤ {bound}"))),
        },
        Err(e) => return Err(e),
    };
    if t.depth() < min_depth {
        return cf_digits(a, min_depth);
    }
    Ok(t)
}

fn verify_on(g: &Global, size: u64) -> bool {
    g.verify || size <= AUTO_VERIFY_LIMIT
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let g = &cli.global;
    let digits = decimal_digits(g.precision);
    match &cli.command {
        Command::Cf { depth } => {
            let t = cf_digits(&alpha(g)?, *depth)?;
            t.verify()?;
            match g.format {
                Format::Json => {
                    let mut v = t.to_json(digits)?;
                    v["schema"] = json!("ostronet.cf.v1");
                    Ok(Output::Json(v))
                }
                Format::Csv => {
                    let mut s = String::from("k,a,p,q,D\n");
                    for k in 0..=t.depth() {
                        let a = if k == 0 { String::new() } else { t.a(k).to_string() };
                        let d = t.remainder(k as isize)?.to_decimal(digits);
                        s.push_str(&format!("{k},{a},{},{},{d}\n", t.p(k as isize), t.q(k as isize)));
                    }
                    Ok(Output::Csv { table: s, summary: None })
                }
            }
        }
        Command::Ostrowski(c) => ostrowski_cmd(g, c, digits),
        Command::Gaps(c) => gaps_cmd(g, c),
        Command::Interval(c) => interval_cmd(g, c, digits),
        Command::Scan(ScanCmd::Discrepancy {
            levels,
            gammas,
            max_n,
            tolerance,
        }) => scan_cmd(g, levels, gammas, *max_n, *tolerance),
        Command::Net(c) => net_cmd(g, c),
    }
}

fn ostrowski_cmd(g: &Global, c: &OstrowskiCmd, digits: usize) -> Result<Output, Error> {
    let a = alpha(g)?;
    match c {
        OstrowskiCmd::Encode { n } => {
            let t = table_past(&a, (*n).max(1), 2)?;
            let d = ostrowski::encode_int(*n, &t)?;
            if verify_on(g, 0) && ostrowski::decode_int(&d, &t)? != *n {
                return Err(Error::InvariantViolation(format!("decode(encode({n})) ≠ {n}")));
            }
            Ok(Output::Json(json!({
                "schema": "ostronet.ostrowski.v1",
                "alpha": a.spec(),
                "n": n.to_string(),
                "depth": d.digits().len(),
                "digits": d.digits(),
            })))
        }
        OstrowskiCmd::Decode { digits: ds } => {
            let v = ds
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad digit `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let t = cf_digits(&a, v.len() + 2)?;
            let d = ostrowski::OstrowskiInt::new(v, &t)?;
            let n = ostrowski::decode_int(&d, &t)?;
            if verify_on(g, 0) && ostrowski::encode_int(n, &t)?.digits() != d.digits() {
                return Err(Error::InvariantViolation("encode(decode(c)) ≠ c".into()));
            }
            Ok(Output::Json(json!({
                "schema": "ostronet.ostrowski.v1",
                "alpha": a.spec(),
                "n": n.to_string(),
                "depth": d.digits().len(),
                "digits": d.digits(),
            })))
        }
        OstrowskiCmd::EncodeReal { beta, depth, check_n } => {
            let t = cf_digits(&a, depth + 2)?;
            let b = t.frame().value(&parse_point(beta)?)?;
            let r = ostrowski::encode_real(&b, &t, *depth)?;
            let partial = (0..=*depth)
                .map(|k| r.truncated_integer(k, &t).map(|x| x.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let mut v = json!({
                "schema": "ostronet.ostrowski-real.v1",
                "alpha": a.spec(),
                "beta": number_json(&b, digits),
                "depth": r.depth(),
                "digits": r.digits(),
                "tail_bound": number_json(r.tail_bound(), digits),
                "truncated_integers": partial,
            });
            if let Some(n) = check_n {
                let rep = inhom_bound_check(*n, &r, &t)?;
                v["bound_check"] = json!({
                    "n": n.to_string(),
                    "m": rep.m,
                    "delta": rep.delta,
                    "bound": float_json(rep.bound),
                    "actual": float_json(rep.actual),
                    "holds": rep.holds,
                });
                if !rep.holds {
                    return Err(Error::InvariantViolation(format!("approximation bound fails for n = {n}")));
                }
            }
            Ok(Output::Json(v))
        }
    }
}

fn gaps_cmd(g: &Global, c: &GapsCmd) -> Result<Output, Error> {
    let a = alpha(g)?;
    match c {
        GapsCmd::Blocks { m, i } => {
            let t = cf_digits(&a, m + (*i).max(0) as usize + 3)?;
            let bs = gaps::blocks(*m, *i, &t)?;
            let rows: Vec<Value> = bs
                .iter()
                .map(|b| {
                    json!({
                        "i": b.i,
                        "word": b.word(),
                        "s": b.s.to_string(),
                        "r": b.r.to_string(),
                        "span": b.span(*m, &t).to_string(),
                    })
                })
                .collect();
            match g.format {
                Format::Json => Ok(Output::Json(json!({
                    "schema": "ostronet.blocks.v1",
                    "alpha": a.spec(),
                    "m": m,
                    "blocks": rows,
                }))),
                Format::Csv => {
                    let mut s = String::from("i,word,s,r,span\n");
                    for b in &bs {
                        s.push_str(&format!("{},{},{},{},{}\n", b.i, b.word(), b.s, b.r, b.span(*m, &t)));
                    }
                    Ok(Output::Csv { table: s, summary: None })
                }
            }
        }
        GapsCmd::ScanResidual { m, max_m } => {
            let short = cf_digits(&a, m + 3)?;
            let span = short.q(*m as isize) + short.q(*m as isize - 1);
            let t = table_past(&a, (*max_m as i128 + 2).saturating_mul(span), m + 3)?;
            let mut s = String::from("M,n_M,residual\n");
            let worst = scan_residual(*m, &t, *max_m, |r| {
                s.push_str(&format!("{},{},{:.12e}\n", r.big_m, r.n_m, r.residual));
            })?;
            Ok(Output::Csv {
                table: s,
                summary: Some(json!({
                    "schema": "ostronet.residual.v1",
                    "alpha": a.spec(),
                    "m": m,
                    "max_M": max_m,
                    "max_abs_residual": float_json(worst),
                })),
            })
        }
    }
}

fn interval_cmd(g: &Global, c: &IntervalCmd, digits: usize) -> Result<Output, Error> {
    let a = alpha(g)?;
    match c {
        IntervalCmd::Info { m, gamma } => {
            let t = cf_digits(&a, m + 3)?;
            let j = make_interval(*m, &parse_point(gamma)?, &t)?;
            let f = t.frame();
            let length = f.value(j.length())?;
            let formula = t.special_length_formula(*m)?;
            Ok(Output::Json(json!({
                "schema": "ostronet.interval.v1",
                "alpha": a.spec(),
                "m": m,
                "gamma": gamma,
                "left": number_json(&f.value(j.left())?, digits),
                "right": number_json(&f.value(&j.right())?, digits),
                "length": number_json(&length, digits),
                "length_formula": number_json(&formula, digits),
            })))
        }
        IntervalCmd::Partition { m } => {
            let t = cf_digits(&a, m + 3)?;
            let f = t.frame();
            let arcs = level_partition(*m, &t)?;
            let rows = arcs
                .iter()
                .map(|arc| {
                    Ok(json!({
                        "left": number_json(&f.value(arc.left())?, digits),
                        "right": number_json(&f.value(&arc.right())?, digits),
                        "length": number_json(&f.value(arc.length())?, digits),
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Output::Json(json!({
                "schema": "ostronet.partition.v1",
                "alpha": a.spec(),
                "m": m,
                "arcs": rows,
            })))
        }
        IntervalCmd::Count { m, gamma, n } => {
            let t = table_past(&a, (*n as i128).saturating_mul(4).max(16), m + 4)?;
            let j = make_interval(*m, &parse_point(gamma)?, &t)?;
            let hit = count_hits(&j, *n, &t)?;
            if verify_on(g, *n) {
                let brute = count_hits_brute(&j, *n, &t)?;
                if brute != hit.count {
                    return Err(Error::InvariantViolation(format!(
                        "fast count {} ≠ direct count {brute}",
                        hit.count
                    )));
                }
            }
            let len = t.frame().to_f64(j.length());
            Ok(Output::Json(json!({
                "schema": "ostronet.count.v1",
                "alpha": a.spec(),
                "m": m,
                "gamma": gamma,
                "n": n,
                "count": hit.count,
                "method": hit.method,
                "discrepancy": float_json(hit.count as f64 - *n as f64 * len),
            })))
        }
    }
}

fn parse_levels(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Parse(format!("bad level list `{s}`"));
    let v: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if v.is_empty() || v.contains(&0) {
        return Err(bad());
    }
    Ok(v)
}

fn scan_cmd(g: &Global, levels: &str, gammas: &str, max_n: u64, tolerance: f64) -> Result<Output, Error> {
    let a = alpha(g)?;
    let levels = parse_levels(levels)?;
    let top = *levels.iter().max().expect("non-empty levels");
    let t = table_past(&a, (max_n as i128).saturating_mul(4), top + 4)?;
    let shifts: Vec<i128> = if gammas.contains(',') {
        gammas
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad shift `{x}`"))))
            .collect::<Result<_, _>>()?
    } else {
        let count: usize = gammas.trim().parse().map_err(|_| Error::Parse(format!("bad shift count `{gammas}`")))?;
        sample_shifts(g.seed, count, 1 << 20)
    };
    let rep = discrepancy_scan(&t, &levels, &shifts, max_n, tolerance)?;
    if verify_on(g, max_n) {
        for c in &rep.cells {
            let j = make_interval(c.m, &ostronet::Lin::int([0, -c.ell]), &t)?;
            let fast = count_hits(&j, max_n, &t)?.count;
            let brute = count_hits_brute(&j, max_n, &t)?;
            if fast != brute {
                return Err(Error::InvariantViolation(format!(
                    "m = {}, ℓ = {}: fast count {fast} ≠ direct count {brute}",
                    c.m, c.ell
                )));
            }
        }
    }
    let summary = json!({
        "schema": "ostronet.discrepancy.v1",
        "alpha": a.spec(),
        "levels": levels,
        "shifts": shifts.len(),
        "seed": g.seed,
        "n_max": max_n,
        "checkpoints": rep.checkpoints,
        "maxima": rep.maxima.iter().map(|&x| float_json(x)).collect::<Vec<_>>(),
        "tolerance": tolerance,
        "growth": rep.growth,
    });
    match g.format {
        Format::Json => {
            let mut v = summary;
            v["cells"] = rep
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "m": c.m,
                        "ell": c.ell.to_string(),
                        "length": float_json(c.length),
                        "maxima": c.maxima.iter().map(|&x| float_json(x)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(Output::Json(v))
        }
        Format::Csv => {
            let mut s = String::from("m,ell,length");
            for cp in &rep.checkpoints {
                s.push_str(&format!(",max_le_{cp}"));
            }
            s.push('\n');
            for c in &rep.cells {
                s.push_str(&format!("{},{},{:.15e}", c.m, c.ell, c.length));
                for x in &c.maxima {
                    s.push_str(&format!(",{x:.15e}"));
                }
                s.push('\n');
            }
            Ok(Output::Csv {
                table: s,
                summary: Some(summary),
            })
        }
    }
}

fn parse_box(s: &str) -> Result<Vec<(i128, i128)>, Error> {
    s.split(',')
        .map(|r| {
            let (a, b) = r.split_once(':').ok_or_else(|| Error::Parse(format!("bad range `{r}`")))?;
            let p = |x: &str| x.trim().parse::<i128>().map_err(|_| Error::Parse(format!("bad bound `{x}`")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

fn load_net(args: &NetArgs) -> Result<(Net, NetConfig, Option<Vec<(i128, i128)>>), Error> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg: NetConfig = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("net config: {e}")))?;
    let net = Net::new(&cfg)?;
    let bounds = match &args.bounds {
        Some(b) => Some(parse_box(b)?),
        None => cfg.bounds.clone(),
    };
    Ok((net, cfg, bounds))
}

fn require_box(b: Option<Vec<(i128, i128)>>) -> Result<Vec<(i128, i128)>, Error> {
    b.ok_or_else(|| Error::Config("no box given in the config or with --box".into()))
}

fn net_cmd(g: &Global, c: &NetCmd) -> Result<Output, Error> {
    match c {
        NetCmd::Generate(args) => {
            let (net, cfg, b) = load_net(args)?;
            let b = require_box(b)?;
            let pts = net.generate(&b)?;
            let volume: u64 = b.iter().map(|&(lo, hi)| (hi - lo + 1) as u64).product();
            if verify_on(g, volume) {
                let direct = net.count(&b)?;
                let mut brute = 0u64;
                for p in box_points(&b) {
                    brute += net.contains(&p)? as u64;
                }
                if brute != pts.len() as u64 || direct != brute {
                    return Err(Error::InvariantViolation(format!(
                        "generated {} points, direct membership gives {brute}",
                        pts.len()
                    )));
                }
            }
            match g.format {
                Format::Csv => {
                    let head: Vec<String> = (1..=net.rank()).map(|i| format!("n{i}")).collect();
                    let mut s = head.join(",");
                    s.push('\n');
                    for p in &pts {
                        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                        s.push_str(&row.join(","));
                        s.push('\n');
                    }
                    Ok(Output::Csv { table: s, summary: None })
                }
                Format::Json => Ok(Output::Json(json!({
                    "schema": "ostronet.net-points.v1",
                    "slopes": cfg.slopes,
                    "box": b.iter().map(|&(l, h)| [l.to_string(), h.to_string()]).collect::<Vec<_>>(),
                    "count": pts.len(),
                    "points": pts.iter().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }))),
            }
        }
        NetCmd::BdVerify(args) => {
            let (net, _, b) = load_net(args)?;
            let b = require_box(b)?;
            let r = net.bd_map(&b)?;
            if !r.injective {
                return Err(Error::InvariantViolation("bounded-displacement map is not injective".into()));
            }
            let mut v = serde_json::to_value(&r).expect("report serializes");
            for key in ["length", "sup_displacement", "ratio"] {
                let x = v[key].as_f64().unwrap_or(f64::NAN);
                v[key] = float_json(x);
            }
            v["bounds"] = json!(b.iter().map(|&(l, h)| [l.to_string(), h.to_string()]).collect::<Vec<_>>());
            if let Some(w) = v.get_mut("worst").and_then(|w| w.get_mut("point")) {
                let s: Vec<String> = w.as_array().into_iter().flatten().map(|x| x.to_string()).collect();
                *w = json!(s);
            }
            v["schema"] = json!("ostronet.bd-report.v1");
            Ok(Output::Json(v))
        }
        NetCmd::Density { net: args, rho, lambda, samples } => {
            let (net, _, _) = load_net(args)?;
            let l = lambda.unwrap_or_else(|| net.measure());
            let d = net.density_defect(*rho, l, *samples, g.seed)?;
            Ok(Output::Json(json!({
                "schema": "ostronet.density-defect.v1",
                "rho": d.rho.to_string(),
                "lambda": float_json(d.lambda),
                "samples": d.samples,
                "seed": d.seed,
                "max_defect": float_json(d.max_defect),
                "estimate": d.estimate,
            })))
        }
        NetCmd::BkSum { net: args, t_max, lambda, samples } => {
            let (net, _, _) = load_net(args)?;
            let l = lambda.unwrap_or_else(|| net.measure());
            let rows = net.bk_partial_sums(l, *t_max, *samples, g.seed)?;
            match g.format {
                Format::Csv => {
                    let mut s = String::from("t,defect,partial_sum\n");
                    for r in &rows {
                        s.push_str(&format!("{},{:.15e},{:.15e}\n", r.t, r.defect, r.partial_sum));
                    }
                    Ok(Output::Csv { table: s, summary: None })
                }
                Format::Json => Ok(Output::Json(json!({
                    "schema": "ostronet.bk-sum.v1",
                    "lambda": float_json(l),
                    "samples": samples,
                    "seed": g.seed,
                    "rows": rows.iter().map(|r| json!({
                        "t": r.t,
                        "defect": float_json(r.defect),
                        "partial_sum": float_json(r.partial_sum),
                    })).collect::<Vec<_>>(),
                }))),
            }
        }
    }
}

fn box_points(b: &[(i128, i128)]) -> Vec<Vec<i128>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in b {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i128>| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}
