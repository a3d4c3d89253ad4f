//! Line-delimited result records.
//!
//! `n=5 kind=bs X=++-+-+ Y=+++--- Z=++-+- W=+---+ canonical=true stage=s0.h3`
//! with an optional trailing `time=<unix seconds>`. Keys always appear in
//! this order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quad::{Kind, SeqQuad};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultRecord {
    pub quad: SeqQuad,
    pub canonical: bool,
    /// Producing task, e.g. `s0.h3` for sum profile 0, start half 3.
    pub stage: String,
    pub timestamp: Option<u64>,
}

impl ResultRecord {
    pub fn new(quad: SeqQuad, canonical: bool, stage: impl Into<String>) -> Self {
        ResultRecord {
            quad,
            canonical,
            stage: stage.into(),
            timestamp: None,
        }
    }
}

impl fmt::Display for ResultRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.quad;
        write!(
            f,
            "n={} kind={} X={} Y={} Z={} W={} canonical={} stage={}",
            q.n(),
            q.kind,
            q.a,
            q.b,
            q.c,
            q.d,
            self.canonical,
            self.stage
        )?;
        if let Some(t) = self.timestamp {
            write!(f, " time={t}")?;
        }
        Ok(())
    }
}

impl FromStr for ResultRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Malformed(format!("{msg} in record {line:?}"));
        let fields: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|t| t.split_once('=').ok_or_else(|| bad("field without '='")))
            .collect::<Result<_>>()?;
        const KEYS: [&str; 8] = ["n", "kind", "X", "Y", "Z", "W", "canonical", "stage"];
        if fields.len() < KEYS.len() || fields.len() > KEYS.len() + 1 {
            return Err(bad("wrong number of fields"));
        }
        for (k, (got, _)) in KEYS.iter().zip(&fields) {
            if k != got {
                return Err(bad(&format!("expected key {k}, found {got}")));
            }
        }
        let v = |i: usize| fields[i].1;
        let n: usize = v(0).parse().map_err(|_| bad("bad n"))?;
        let kind: Kind = v(1).parse()?;
        let quad = SeqQuad::new(kind, v(2).parse()?, v(3).parse()?, v(4).parse()?, v(5).parse()?)?;
        if quad.n() != n {
            return Err(bad("n does not match the sequence lengths"));
        }
        let canonical = match v(6) {
            "true" => true,
            "false" => false,
            _ => return Err(bad("canonical must be true or false")),
        };
        let timestamp = match fields.get(8) {
            Some(("time", t)) => Some(t.parse().map_err(|_| bad("bad time"))?),
            Some(_) => return Err(bad("unexpected trailing field")),
            None => None,
        };
        Ok(ResultRecord {
            quad,
            canonical,
            stage: v(7).to_string(),
            timestamp,
        })
    }
}
