//! The filter-then-backtrack pipeline.
//!
//! 1. sum profiles, one per class;
//! 2. residue profiles at the first modulus;
//! 3. refinement along the moduli chain, projected onto the start side;
//! 4. expansion of each start-side half into sign pairs, PSD screening;
//! 5. backtracking completion of the other side.
//!
//! A task is one (sum profile, start-side half) pair. Tasks run in parallel
//! in fixed-size chunks; results are merged in task order, so the outcome
//! does not depend on the worker count or on checkpoint boundaries.

pub mod backtrack;
pub mod checkpoint;
pub mod expand;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use backtrack::{backtrack_complete, backtrack_with_budget, Budget, Completion, Mode};
pub use checkpoint::{Checkpoint, Counters, StoredResult};
pub use expand::{expand_candidates, outer_columns, CandidateStream};

use crate::equiv::{Canonicalizer, PackedQuad};
use crate::error::{Error, Result};
use crate::numfilter::columns::Side;
use crate::numfilter::residue::{
    refine_halves_multi, refine_profiles, residue_halves, residue_profiles, ProfileHalf,
    ResidueProfile,
};
use crate::numfilter::sums::sum_profiles;
use crate::quad::{Kind, SeqQuad, SumProfile};
use crate::seq::SignSeq;
use crate::specfilter::{PsdEvaluator, ThetaGrid};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub kind: Kind,
    pub start_side: Side,
    /// Each modulus doubles the previous one.
    pub moduli: Vec<usize>,
    /// PSD screening stages, applied in order.
    pub grids: Vec<ThetaGrid>,
    pub first_solution_only: bool,
    pub workers: usize,
    /// Reduce results to canonical class representatives.
    pub dedup: bool,
    /// Tasks per chunk; a checkpoint is written after every chunk.
    pub checkpoint_interval: usize,
}

impl SearchConfig {
    pub fn new(n: usize, kind: Kind) -> Self {
        SearchConfig {
            n,
            kind,
            start_side: if kind.is_structured() { Side::AB } else { Side::CD },
            moduli: match kind {
                Kind::Nns => vec![6],
                _ => vec![3, 6],
            },
            grids: ThetaGrid::defaults_for(kind.is_structured()),
            first_solution_only: false,
            workers: rayon::current_num_threads().max(1),
            dedup: true,
            checkpoint_interval: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Malformed(m));
        if self.kind.is_structured() && self.start_side != Side::AB {
            return bad(format!("{} searches start on the A,B side", self.kind));
        }
        if self.kind == Kind::Nns && self.n % 2 == 1 {
            return bad(format!("NNS({}) requires even n", self.n));
        }
        if self.n + 1 > crate::seq::PACKED_MAX_LEN {
            return bad(format!("n = {} exceeds the packed length limit", self.n));
        }
        let Some(&m0) = self.moduli.first() else {
            return bad("moduli chain is empty".into());
        };
        if m0 < 2 {
            return bad("moduli must be at least 2".into());
        }
        if self.moduli.windows(2).any(|w| w[1] != 2 * w[0]) {
            return bad("each modulus must double the previous one".into());
        }
        if self.kind == Kind::Nns && self.moduli.iter().any(|m| m % 2 == 1) {
            return bad("NNS residue profiles need even moduli".into());
        }
        if self.workers == 0 || self.checkpoint_interval == 0 {
            return bad("workers and checkpoint interval must be positive".into());
        }
        Ok(())
    }

    /// Hash of everything that affects the result set.
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            n: usize,
            kind: &'a str,
            start_side: String,
            moduli: &'a [usize],
            grids: Vec<&'a str>,
            first_solution_only: bool,
            dedup: bool,
        }
        let key = Key {
            n: self.n,
            kind: self.kind.as_str(),
            start_side: self.start_side.to_string(),
            moduli: &self.moduli,
            grids: self.grids.iter().map(|g| g.label()).collect(),
            first_solution_only: self.first_solution_only,
            dedup: self.dedup,
        };
        let json = serde_json::to_string(&key).expect("plain struct serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// One unit of parallel work.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub sum_index: usize,
    pub half_index: usize,
    pub sums: SumProfile,
    pub half: ProfileHalf,
}

/// Start-side halves at the last modulus for one sum profile.
pub fn start_halves(cfg: &SearchConfig, s: SumProfile) -> Result<Vec<ProfileHalf>> {
    let (n, kind, side) = (cfg.n, cfg.kind, cfg.start_side);
    if cfg.moduli.len() == 1 {
        return residue_halves(n, cfg.moduli[0], s, kind, side);
    }
    let mut profs: Vec<ResidueProfile> = residue_profiles(n, cfg.moduli[0], s, kind)?;
    for _ in 1..cfg.moduli.len() - 1 {
        let mut next = BTreeSet::new();
        for p in &profs {
            next.extend(refine_profiles(n, p, s, kind)?);
        }
        profs = next.into_iter().collect();
    }
    let mut groups: BTreeMap<ProfileHalf, Vec<ResidueProfile>> = BTreeMap::new();
    for p in profs {
        groups.entry(p.half(side)).or_default().push(p);
    }
    let mut out = Vec::new();
    for parents in groups.values() {
        out.extend(refine_halves_multi(n, parents, s, kind, side)?);
    }
    Ok(out)
}

/// The sum-profile list and the full task list, in execution order.
pub fn plan(cfg: &SearchConfig) -> Result<(Vec<SumProfile>, Vec<Task>)> {
    cfg.validate()?;
    let sums = sum_profiles(cfg.n, cfg.kind);
    let per_sum: Vec<Vec<ProfileHalf>> = sums
        .par_iter()
        .map(|&s| start_halves(cfg, s))
        .collect::<Result<_>>()?;
    let mut tasks = Vec::new();
    for (si, (s, halves)) in sums.iter().zip(per_sum).enumerate() {
        for (hi, half) in halves.into_iter().enumerate() {
            tasks.push(Task {
                sum_index: si,
                half_index: hi,
                sums: *s,
                half,
            });
        }
    }
    Ok((sums, tasks))
}

#[derive(Clone, Debug, Default)]
struct TaskOutcome {
    quads: Vec<SeqQuad>,
    counters: Counters,
    finished: bool,
}

struct Screens {
    stages: Vec<PsdEvaluator>,
    bound: f64,
}

impl Screens {
    fn new(cfg: &SearchConfig) -> Self {
        Screens {
            stages: cfg
                .grids
                .iter()
                .map(|g| PsdEvaluator::new(g.clone(), cfg.n + 1))
                .collect(),
            bound: (4 * cfg.n + 2) as f64,
        }
    }

    /// Index of the first stage that rejects, if any.
    fn reject_stage(&self, x: &SignSeq, y: &SignSeq) -> Option<usize> {
        self.stages.iter().position(|e| !e.keep(x, y, self.bound))
    }
}

fn run_task(cfg: &SearchConfig, screens: &Screens, task: &Task, budget: Budget) -> Result<TaskOutcome> {
    let mode = if cfg.first_solution_only { Mode::First } else { Mode::All };
    let fill = cfg.start_side.other();
    let mut out = TaskOutcome {
        counters: Counters {
            rejected_by_grid: vec![0; screens.stages.len()],
            ..Counters::default()
        },
        finished: true,
        ..TaskOutcome::default()
    };
    for (x, y) in CandidateStream::new(&task.half, cfg.n, cfg.kind)? {
        out.counters.candidates += 1;
        if let Some(stage) = screens.reject_stage(&x, &y) {
            out.counters.rejected_by_grid[stage] += 1;
            continue;
        }
        out.counters.completion_calls += 1;
        let c = backtrack_with_budget((&x, &y), cfg.n, cfg.kind, fill, mode, budget)?;
        out.counters.raw_solutions += c.quads.len() as u64;
        out.quads.extend(c.quads);
        if !c.finished {
            out.finished = false;
            return Ok(out);
        }
        if cfg.first_solution_only && !out.quads.is_empty() {
            return Ok(out);
        }
    }
    Ok(out)
}

/// A result quad with the task that first produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Found {
    pub quad: SeqQuad,
    pub sum_index: usize,
    pub half_index: usize,
}

impl Found {
    pub fn stage(&self) -> String {
        format!("s{}.h{}", self.sum_index, self.half_index)
    }

    pub fn record(&self, canonical: bool) -> crate::record::ResultRecord {
        crate::record::ResultRecord::new(self.quad.clone(), canonical, self.stage())
    }
}

/// Bookkeeping that shows which branches were explored and which were cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub kind: String,
    pub config_digest: String,
    pub sum_profiles: usize,
    pub tasks_total: usize,
    pub tasks_done: usize,
    pub candidates: u64,
    pub rejected_by_grid: Vec<(String, u64)>,
    pub completion_calls: u64,
    pub raw_solutions: u64,
    pub classes: usize,
    /// Every task ran to the end.
    pub complete: bool,
    /// Complete and not stopped at the first solution.
    pub exhaustive: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub results: Vec<Found>,
    pub certificate: Certificate,
}

/// Run-time controls that do not affect the result set of a complete run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub checkpoint: Option<PathBuf>,
    /// Stop (after checkpointing) once this many tasks are done.
    pub stop_after_tasks: Option<usize>,
    pub deadline: Option<Instant>,
}

pub(crate) fn quad_to_compact(q: &SeqQuad) -> String {
    format!("{}|{}|{}|{}", q.a, q.b, q.c, q.d)
}

pub(crate) fn quad_from_compact(s: &str, kind: Kind) -> Result<SeqQuad> {
    let parts: Vec<&str> = s.split('|').collect();
    if parts.len() != 4 {
        return Err(Error::Malformed(format!("bad stored quad {s:?}")));
    }
    SeqQuad::new(
        kind,
        parts[0].parse()?,
        parts[1].parse()?,
        parts[2].parse()?,
        parts[3].parse()?,
    )
}

struct Reducer {
    kind: Kind,
    dedup: bool,
    canon: Canonicalizer,
    /// Keyed by the packed order key; value is the earliest (sum, half).
    best: BTreeMap<[u64; 4], (PackedQuad, usize, usize)>,
}

impl Reducer {
    fn insert(&mut self, q: &SeqQuad, si: usize, hi: usize) -> Result<()> {
        let mut p = PackedQuad::from_quad(q)?;
        if self.dedup {
            p = self.canon.canonical_packed(p)?;
        }
        self.best
            .entry(p.lex_key())
            .and_modify(|e| {
                if (si, hi) < (e.1, e.2) {
                    e.1 = si;
                    e.2 = hi;
                }
            })
            .or_insert((p, si, hi));
        Ok(())
    }

    fn stored(&self) -> Vec<StoredResult> {
        self.best
            .values()
            .map(|(p, si, hi)| StoredResult {
                quad: quad_to_compact(&p.to_quad()),
                sum_index: *si,
                half_index: *hi,
            })
            .collect()
    }

    fn load(&mut self, stored: &[StoredResult]) -> Result<()> {
        for r in stored {
            let q = quad_from_compact(&r.quad, self.kind)?;
            let p = PackedQuad::from_quad(&q)?;
            self.best.insert(p.lex_key(), (p, r.sum_index, r.half_index));
        }
        Ok(())
    }

    fn found(&self) -> Vec<Found> {
        self.best
            .values()
            .map(|(p, si, hi)| Found {
                quad: p.to_quad(),
                sum_index: *si,
                half_index: *hi,
            })
            .collect()
    }
}

pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    search_with(cfg, &RunOptions::default())
}

pub fn search_with(cfg: &SearchConfig, opts: &RunOptions) -> Result<SearchOutcome> {
    cfg.validate()?;
    let digest = cfg.digest();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    let (sums, tasks) = pool.install(|| plan(cfg))?;
    let screens = Screens::new(cfg);

    let mut reducer = Reducer {
        kind: cfg.kind,
        dedup: cfg.dedup,
        canon: Canonicalizer::new(),
        best: BTreeMap::new(),
    };
    let mut counters = Counters {
        rejected_by_grid: vec![0; cfg.grids.len()],
        ..Counters::default()
    };
    let mut cursor = 0;
    let mut solved = false;

    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = Checkpoint::load(path)? {
            if cp.config_digest != digest {
                return Err(Error::Resume(format!(
                    "checkpoint was written for a different configuration ({} vs {digest})",
                    cp.config_digest
                )));
            }
            if cp.tasks_total != tasks.len() || cp.cursor > tasks.len() {
                return Err(Error::Resume("checkpoint task count does not match".into()));
            }
            reducer.load(&cp.results)?;
            counters = cp.counters;
            cursor = cp.cursor;
            solved = cp.solved;
        }
    }

    let budget = Budget {
        deadline: opts.deadline,
    };
    let mut interrupted = false;
    while cursor < tasks.len() && !solved {
        let mut end = (cursor + cfg.checkpoint_interval).min(tasks.len());
        if let Some(stop) = opts.stop_after_tasks {
            if cursor >= stop {
                break;
            }
            end = end.min(stop);
        }
        let chunk = &tasks[cursor..end];
        let outcomes: Vec<TaskOutcome> = pool.install(|| {
            chunk
                .par_iter()
                .map(|t| run_task(cfg, &screens, t, budget))
                .collect::<Result<_>>()
        })?;
        for (t, o) in chunk.iter().zip(&outcomes) {
            if !o.finished {
                interrupted = true;
                break;
            }
            counters.absorb(&o.counters);
            for q in &o.quads {
                reducer.insert(q, t.sum_index, t.half_index)?;
            }
            cursor += 1;
            if cfg.first_solution_only && !o.quads.is_empty() {
                solved = true;
                break;
            }
        }
        if let Some(path) = &opts.checkpoint {
            let results = reducer.stored();
            Checkpoint {
                version: checkpoint::CHECKPOINT_VERSION,
                config_digest: digest.clone(),
                cursor,
                candidate_offset: 0,
                tasks_total: tasks.len(),
                solved,
                counters: counters.clone(),
                results_digest: checkpoint::results_digest(&results),
                results,
            }
            .save(path)?;
        }
        if interrupted {
            break;
        }
    }

    let results = reducer.found();
    let complete = cursor == tasks.len() || solved;
    let certificate = Certificate {
        n: cfg.n,
        kind: cfg.kind.as_str().to_string(),
        config_digest: digest,
        sum_profiles: sums.len(),
        tasks_total: tasks.len(),
        tasks_done: cursor,
        candidates: counters.candidates,
        rejected_by_grid: cfg
            .grids
            .iter()
            .map(|g| g.label().to_string())
            .zip(counters.rejected_by_grid.iter().copied())
            .collect(),
        completion_calls: counters.completion_calls,
        raw_solutions: counters.raw_solutions,
        classes: results.len(),
        complete,
        exhaustive: complete && !cfg.first_solution_only,
    };
    Ok(SearchOutcome {
        results,
        certificate,
    })
}
