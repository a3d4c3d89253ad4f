//! `bseq`: verify, filter and search base / normal / near-normal sequences.
//!
//! Exit status: 0 success, 1 exhaustive and empty, 2 usage or input error,
//! 3 a verified quad is invalid.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use bseq_core::equiv::dedup;
use bseq_core::numfilter::{
    refine_halves, refine_profiles, residue_halves, residue_profiles, sum_profiles, Side,
};
use bseq_core::search::{search_with, RunOptions, SearchConfig};
use bseq_core::specfilter::{parse_grid_list, PsdEvaluator, PSD_EPS};
use bseq_core::{oracle, parse_quads, verify, Kind, ResidueProfile, ResultRecord, SignSeq, SumProfile};

const EXIT_EMPTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "bseq", version, about = "Base, normal and near-normal sequence toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check quads for zero total autocorrelation and NS/NNS structure.
    Verify(VerifyArgs),
    /// List sum profiles, one per class.
    Sums(SumsArgs),
    /// List residue profiles, or halves of them.
    Profiles(ProfilesArgs),
    /// Maximum PSD over a grid, with an optional keep/reject bound.
    Psd(PsdArgs),
    /// Run the filter-then-backtrack pipeline.
    Search(SearchArgs),
    /// Canonical representative of every input class.
    Canon(CanonArgs),
    /// Brute-force enumeration at tiny n.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Input {
    /// Read from this file instead of stdin.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl Input {
    fn read(&self) -> Result<String> {
        match &self.file {
            Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
            None => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                Ok(s)
            }
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "bs")]
    kind: Kind,
    #[command(flatten)]
    input: Input,
}

#[derive(Args)]
struct SumsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kind: Kind,
}

#[derive(Args)]
struct ProfilesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kind: Kind,
    /// Modulus; ignored with --refine.
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Sum profile `a,b,c,d,a*,b*,c*,d*`.
    #[arg(long, allow_hyphen_values = true)]
    sums: String,
    /// Print only halves on this side (`ab` or `cd`).
    #[arg(long)]
    side: Option<Side>,
    /// Refine this profile line (`m,k..,r..,p..,q..`) to modulus 2m.
    #[arg(long, allow_hyphen_values = true)]
    refine: Option<String>,
}

#[derive(Args)]
struct PsdArgs {
    /// Grid list, e.g. `pi-over-100` or `l=50,l=1000`.
    #[arg(long, default_value = "pi-over-100")]
    grid: String,
    /// Keep/reject threshold for each line's summed PSD.
    #[arg(long)]
    bound: Option<f64>,
    #[command(flatten)]
    input: Input,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kind: Kind,
    /// Enumerate every class (default).
    #[arg(long, conflicts_with = "first")]
    exhaustive: bool,
    /// Stop at the first solution.
    #[arg(long)]
    first: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Tasks between checkpoints.
    #[arg(long, default_value_t = 16)]
    checkpoint_interval: usize,
    /// Stop after this many tasks (the checkpoint allows resuming).
    #[arg(long)]
    stop_after_tasks: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<u64>,
    /// PSD grid list; defaults depend on the kind.
    #[arg(long)]
    grid: Option<String>,
    /// Moduli chain, e.g. `3,6`.
    #[arg(long)]
    moduli: Option<String>,
    /// Start side (`ab` or `cd`).
    #[arg(long)]
    start_side: Option<Side>,
    /// Keep every completion instead of class representatives.
    #[arg(long)]
    no_dedup: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run certificate (JSON) here.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Append `time=` to every record.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args)]
struct CanonArgs {
    #[arg(long, default_value = "bs")]
    kind: Kind,
    #[command(flatten)]
    input: Input,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kind: Kind,
    /// Print one canonical representative per class.
    #[arg(long)]
    classes: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let res = match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a, &mut out),
        Cmd::Sums(a) => cmd_sums(a, &mut out),
        Cmd::Profiles(a) => cmd_profiles(a, &mut out),
        Cmd::Psd(a) => cmd_psd(a, &mut out),
        Cmd::Search(a) => cmd_search(a, &mut out),
        Cmd::Canon(a) => cmd_canon(a, &mut out),
        Cmd::Oracle(a) => cmd_oracle(a, &mut out),
    };
    let _ = out.flush();
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn cmd_verify(a: VerifyArgs, out: &mut impl Write) -> Result<u8> {
    let quads = parse_quads(&a.input.read()?, a.kind)?;
    if quads.is_empty() {
        bail!("no quads in input");
    }
    let mut code = 0;
    for (i, q) in quads.iter().enumerate() {
        let r = verify(q);
        let status = if r.valid { "valid" } else { "invalid" };
        write!(out, "quad {}: {}({}) {status} N(0)={}", i + 1, q.kind, q.n(), q.total_paf(0))?;
        if let Some(s) = r.first_failing_shift {
            write!(out, " first_failing_shift={s}")?;
        }
        if let Some(v) = &r.structural_violation {
            write!(out, " structure=\"{v}\"")?;
        }
        writeln!(out, " sums={}", r.sums)?;
        if !r.valid {
            code = EXIT_INVALID;
        }
    }
    Ok(code)
}

fn cmd_sums(a: SumsArgs, out: &mut impl Write) -> Result<u8> {
    if a.kind == Kind::Nns && a.n % 2 == 1 {
        bail!("NNS({}) requires even n", a.n);
    }
    let sums = sum_profiles(a.n, a.kind);
    for s in &sums {
        writeln!(out, "{s}")?;
    }
    Ok(if sums.is_empty() { EXIT_EMPTY } else { 0 })
}

fn cmd_profiles(a: ProfilesArgs, out: &mut impl Write) -> Result<u8> {
    let s: SumProfile = a.sums.parse()?;
    let lines: Vec<String> = match (&a.refine, a.side) {
        (Some(p), side) => {
            let prof: ResidueProfile = p.parse()?;
            match side {
                Some(side) => refine_halves(a.n, &prof, s, a.kind, side)?
                    .iter()
                    .map(|h| h.to_string())
                    .collect(),
                None => refine_profiles(a.n, &prof, s, a.kind)?
                    .iter()
                    .map(|p| p.to_string())
                    .collect(),
            }
        }
        (None, Some(side)) => residue_halves(a.n, a.m, s, a.kind, side)?
            .iter()
            .map(|h| h.to_string())
            .collect(),
        (None, None) => residue_profiles(a.n, a.m, s, a.kind)?
            .iter()
            .map(|p| p.to_string())
            .collect(),
    };
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    Ok(if lines.is_empty() { EXIT_EMPTY } else { 0 })
}

fn cmd_psd(a: PsdArgs, out: &mut impl Write) -> Result<u8> {
    let grids = parse_grid_list(&a.grid)?;
    if grids.is_empty() {
        bail!("empty grid list");
    }
    let text = a.input.read()?;
    let mut rows: Vec<Vec<SignSeq>> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let seqs = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<bseq_core::Result<Vec<SignSeq>>>()?;
        rows.push(seqs);
    }
    for seqs in rows {
        let max_len = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut keep = true;
        let mut parts = Vec::new();
        for g in &grids {
            let ev = PsdEvaluator::new(g.clone(), max_len);
            let mut tot = vec![0.0; g.points().len()];
            for s in &seqs {
                for (t, v) in tot.iter_mut().zip(ev.psd(s)) {
                    *t += v;
                }
            }
            let (idx, max) = tot
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::MIN), |b, (i, v)| if v > b.1 { (i, v) } else { b });
            if let Some(bound) = a.bound {
                keep &= max <= bound + PSD_EPS;
            }
            parts.push(format!("{}:max={max:.9}@theta={:.9}", g.label(), g.points()[idx]));
        }
        let verdict = match a.bound {
            Some(_) if keep => " keep",
            Some(_) => " reject",
            None => "",
        };
        writeln!(out, "{}{verdict}", parts.join(" "))?;
    }
    Ok(0)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn cmd_search(a: SearchArgs, out: &mut impl Write) -> Result<u8> {
    let mut cfg = SearchConfig::new(a.n, a.kind);
    cfg.first_solution_only = a.first;
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(g) = &a.grid {
        cfg.grids = parse_grid_list(g)?;
    }
    if let Some(m) = &a.moduli {
        cfg.moduli = m
            .split(',')
            .map(|t| t.trim().parse::<usize>().context("bad modulus"))
            .collect::<Result<_>>()?;
    }
    if let Some(s) = a.start_side {
        cfg.start_side = s;
    }
    cfg.dedup = !a.no_dedup;
    cfg.checkpoint_interval = a.checkpoint_interval;
    let opts = RunOptions {
        checkpoint: a.checkpoint.clone(),
        stop_after_tasks: a.stop_after_tasks,
        deadline: a.time_budget.map(|s| Instant::now() + Duration::from_secs(s)),
    };
    let outcome = search_with(&cfg, &opts)?;
    let stamp = a.timestamp.then(unix_now);
    let mut text = String::new();
    for f in &outcome.results {
        let mut r = f.record(cfg.dedup);
        r.timestamp = stamp;
        text.push_str(&r.to_string());
        text.push('\n');
    }
    match &a.out {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    let cert = &outcome.certificate;
    let json = cert.to_json();
    if let Some(p) = &a.certificate {
        fs::write(p, format!("{json}\n"))?;
    }
    eprintln!(
        "{}({}): {} classes, {}/{} tasks, {}",
        cert.kind,
        cert.n,
        cert.classes,
        cert.tasks_done,
        cert.tasks_total,
        if cert.exhaustive {
            "exhaustive"
        } else if cert.complete {
            "stopped at first solution"
        } else {
            "incomplete"
        }
    );
    Ok(if cert.exhaustive && outcome.results.is_empty() { EXIT_EMPTY } else { 0 })
}

fn cmd_canon(a: CanonArgs, out: &mut impl Write) -> Result<u8> {
    let quads = parse_quads(&a.input.read()?, a.kind)?;
    for q in &quads {
        let r = verify(q);
        if !r.valid {
            bail!("input quad is not valid:\n{}", q.to_text());
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<_>> = Default::default();
    for q in quads {
        groups.entry(q.n()).or_default().push(q);
    }
    let mut first = true;
    for qs in groups.values() {
        for c in dedup(qs, a.kind)? {
            if !first {
                writeln!(out)?;
            }
            first = false;
            write!(out, "{}", c.to_text())?;
        }
    }
    Ok(0)
}

fn cmd_oracle(a: OracleArgs, out: &mut impl Write) -> Result<u8> {
    let mut quads = oracle::brute(a.n, a.kind)?;
    if a.classes {
        quads = dedup(&quads, a.kind)?;
    }
    for q in &quads {
        writeln!(out, "{}", ResultRecord::new(q.clone(), a.classes, "oracle"))?;
    }
    Ok(if quads.is_empty() { EXIT_EMPTY } else { 0 })
}
