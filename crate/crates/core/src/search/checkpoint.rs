//! On-disk search state, written only at task boundaries.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub candidates: u64,
    /// Pairs rejected by each PSD grid, in stage order.
    pub rejected_by_grid: Vec<u64>,
    pub completion_calls: u64,
    pub raw_solutions: u64,
}

impl Counters {
    pub fn absorb(&mut self, other: &Counters) {
        self.candidates += other.candidates;
        if self.rejected_by_grid.len() < other.rejected_by_grid.len() {
            self.rejected_by_grid.resize(other.rejected_by_grid.len(), 0);
        }
        for (a, b) in self.rejected_by_grid.iter_mut().zip(&other.rejected_by_grid) {
            *a += b;
        }
        self.completion_calls += other.completion_calls;
        self.raw_solutions += other.raw_solutions;
    }
}

/// One stored result: the quad in compact text (`A|B|C|D`) and the task that
/// first produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredResult {
    pub quad: String,
    pub sum_index: usize,
    pub half_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config_digest: String,
    /// Tasks `0..cursor` are done.
    pub cursor: usize,
    /// Offset inside the candidate stream of task `cursor`; always 0 since
    /// checkpoints fall on task boundaries.
    pub candidate_offset: u64,
    pub tasks_total: usize,
    pub solved: bool,
    pub counters: Counters,
    pub results: Vec<StoredResult>,
    pub results_digest: String,
}

pub fn results_digest(results: &[StoredResult]) -> String {
    let mut h = Sha256::new();
    for r in results {
        h.update(r.quad.as_bytes());
        h.update(format!("|{}|{}\n", r.sum_index, r.half_index).as_bytes());
    }
    hex::encode(h.finalize())
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Io(format!("cannot encode checkpoint: {e}")))?;
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(json.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// `Ok(None)` for a missing or empty file (fresh start).
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        if text.trim().is_empty() {
            return Ok(None);
        }
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Resume(format!("unreadable checkpoint: {e}")))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Resume(format!(
                "checkpoint version {} is not {CHECKPOINT_VERSION}",
                cp.version
            )));
        }
        if results_digest(&cp.results) != cp.results_digest {
            return Err(Error::Resume("checkpoint results digest mismatch".into()));
        }
        Ok(Some(cp))
    }
}
