//! Plain-text policy checkpoints.
//!
//! ```text
//! pccsched-policy 1
//! shape <inputs> <hidden> <outputs>
//! seed <u64>
//! updates <u64>
//! params <count>
//! <one value per line, shortest round-trip decimal>
//! ```
//!
//! Parameters follow the flat layout of [`PolicyParams`]: `w1` (hidden x
//! inputs, row-major), `b1`, `w_pi` (outputs x hidden), `b_pi`, `w_v`, `b_v`.

use std::fmt::Write as _;
use std::path::Path;

use super::policy::Shape;
use super::PolicyParams;
use crate::{Error, Result};

const MAGIC: &str = "pccsched-policy 1";

pub fn to_text(params: &PolicyParams) -> String {
    let s = params.shape;
    let mut out = String::with_capacity(params.data.len() * 24);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "shape {} {} {}", s.inputs, s.hidden, s.outputs);
    let _ = writeln!(out, "seed {}", params.seed);
    let _ = writeln!(out, "updates {}", params.updates);
    let _ = writeln!(out, "params {}", params.data.len());
    for v in &params.data {
        let _ = writeln!(out, "{v:?}");
    }
    out
}

pub fn from_text(text: &str) -> Result<PolicyParams> {
    let bad = |m: String| Error::Checkpoint(m);
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing header line".into()));
    }
    let mut field = |key: &str| -> Result<Vec<u64>> {
        let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(bad(format!("expected `{key}`, got `{line}`")));
        }
        it.map(|t| t.parse::<u64>().map_err(|e| bad(format!("{key}: {e}")))).collect()
    };
    let shape = match field("shape")?.as_slice() {
        &[i, h, o] => Shape { inputs: i as usize, hidden: h as usize, outputs: o as usize },
        other => return Err(bad(format!("shape needs 3 values, got {}", other.len()))),
    };
    let seed = field("seed")?.first().copied().ok_or_else(|| bad("empty seed".into()))?;
    let updates = field("updates")?.first().copied().ok_or_else(|| bad("empty updates".into()))?;
    let count = field("params")?.first().copied().ok_or_else(|| bad("empty params".into()))? as usize;
    if count != shape.n_params() {
        return Err(bad(format!("shape implies {} params, header says {count}", shape.n_params())));
    }
    let data: Vec<f64> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|e| bad(format!("value `{l}`: {e}"))))
        .collect::<Result<_>>()?;
    if data.len() != count {
        return Err(bad(format!("expected {count} values, found {}", data.len())));
    }
    Ok(PolicyParams { shape, data, seed, updates })
}

pub fn save(params: &PolicyParams, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(params)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<PolicyParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text)
}
