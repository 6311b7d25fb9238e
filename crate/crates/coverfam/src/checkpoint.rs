//! Versioned text snapshot of an interrupted exact search: the generated
//! constraint set, the incumbents, and the decision prefix of the active
//! depth-first traversal. A resumed run replays the prefix and continues
//! exactly where the interrupted one stopped.

use crate::error::{Error, Result};
use crate::ground::Params;

pub const CHECKPOINT_MAGIC: &str = "coverfam-checkpoint v1";

/// Which stage of the search was interrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Proving the optimal value under the current constraint set.
    Value,
    /// Reconstructing the lexicographically least optimal witness.
    Refine,
}

impl Phase {
    fn as_str(&self) -> &'static str {
        match self {
            Phase::Value => "value",
            Phase::Refine => "refine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub params: Params,
    pub s: u32,
    pub phase: Phase,
    pub nodes_used: u64,
    /// Escape constraints generated so far, as element masks.
    pub constraints: Vec<u64>,
    /// Best constraint-satisfying family found in the interrupted solve.
    pub inner_best: Vec<u64>,
    /// Best family seen whose covering number already reaches s.
    pub best_feasible: Vec<u64>,
    /// Optimal value, present once the value phase has finished.
    pub value_proved: Option<u64>,
    /// Branch indices along the interrupted traversal, root first.
    pub path: Vec<usize>,
}

fn mask_to_line(mask: u64) -> String {
    let mut parts = Vec::new();
    let mut m = mask;
    while m != 0 {
        parts.push((m.trailing_zeros() + 1).to_string());
        m &= m - 1;
    }
    parts.join(" ")
}

pub fn serialize_checkpoint(ck: &Checkpoint) -> String {
    let mut out = String::new();
    out.push_str(CHECKPOINT_MAGIC);
    out.push('\n');
    let p = ck.params;
    out.push_str(&format!("n={} k={} t={} s={}\n", p.n, p.k, p.t, ck.s));
    out.push_str(&format!("phase={}\n", ck.phase.as_str()));
    out.push_str(&format!("nodes={}\n", ck.nodes_used));
    if let Some(v) = ck.value_proved {
        out.push_str(&format!("value-proved={v}\n"));
    }
    out.push_str(&format!("constraints={}\n", ck.constraints.len()));
    for &c in &ck.constraints {
        out.push_str(&mask_to_line(c));
        out.push('\n');
    }
    out.push_str(&format!("inner-best={}\n", ck.inner_best.len()));
    for &m in &ck.inner_best {
        out.push_str(&mask_to_line(m));
        out.push('\n');
    }
    out.push_str(&format!("best-feasible={}\n", ck.best_feasible.len()));
    for &m in &ck.best_feasible {
        out.push_str(&mask_to_line(m));
        out.push('\n');
    }
    let path: Vec<String> = ck.path.iter().map(|i| i.to_string()).collect();
    out.push_str(&format!("path={}\n", path.join(",")));
    out
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str) -> Self {
        LineReader { lines: text.lines(), line_no: 0 }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.line_no += 1;
        self.lines
            .next()
            .ok_or_else(|| Error::Parse { line: self.line_no, msg: format!("missing {what}") })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line_no, msg: msg.into() }
    }
}

fn parse_u64_field<'a>(r: &mut LineReader<'a>, key: &str) -> Result<u64> {
    let line = r.next(&format!("`{key}=` line"))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|l| l.strip_prefix('='))
        .ok_or_else(|| r.err(format!("expected `{key}=<int>`, got `{line}`")))?;
    rest.parse::<u64>().map_err(|_| r.err(format!("`{rest}` is not an integer")))
}

fn parse_set_line(r: &mut LineReader<'_>, n: u32, what: &str) -> Result<u64> {
    let line = r.next(what)?;
    let mut mask = 0u64;
    for tok in line.split_whitespace() {
        let e: u32 = tok.parse().map_err(|_| r.err(format!("`{tok}` is not an element")))?;
        if e < 1 || e > n {
            return Err(r.err(format!("element {e} outside [{n}]")));
        }
        let bit = 1u64 << (e - 1);
        if mask & bit != 0 {
            return Err(r.err(format!("duplicate element {e}")));
        }
        mask |= bit;
    }
    if mask == 0 {
        return Err(r.err("empty set line"));
    }
    Ok(mask)
}

pub fn parse_checkpoint(text: &str) -> Result<Checkpoint> {
    let mut r = LineReader::new(text);
    let magic = r.next("header")?;
    if magic.trim_end() != CHECKPOINT_MAGIC {
        return Err(r.err(format!("expected header `{CHECKPOINT_MAGIC}`")));
    }

    let header = r.next("parameter line")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(r.err("parameter line must be `n=<int> k=<int> t=<int> s=<int>`"));
    }
    let mut vals = [0u64; 4];
    for (i, (tok, key)) in tokens.iter().zip(["n", "k", "t", "s"]).enumerate() {
        let rest = tok
            .strip_prefix(key)
            .and_then(|l| l.strip_prefix('='))
            .ok_or_else(|| r.err(format!("expected `{key}=<int>`, got `{tok}`")))?;
        vals[i] = rest.parse().map_err(|_| r.err(format!("`{rest}` is not an integer")))?;
    }
    if vals[1] > u32::MAX as u64 || vals[2] > u32::MAX as u64 || vals[3] > u32::MAX as u64 {
        return Err(r.err("k, t, or s out of range"));
    }
    let params = Params::new(vals[0], vals[1] as u32, vals[2] as u32)
        .map_err(|e| r.err(e.to_string()))?;
    params.require_bitmask().map_err(|e| r.err(e.to_string()))?;
    let s = vals[3] as u32;
    let n = params.n_small();

    let phase_line = r.next("`phase=` line")?;
    let phase = match phase_line.strip_prefix("phase=") {
        Some("value") => Phase::Value,
        Some("refine") => Phase::Refine,
        _ => return Err(r.err(format!("expected `phase=value|refine`, got `{phase_line}`"))),
    };

    let nodes_used = parse_u64_field(&mut r, "nodes")?;

    // value-proved is optional and precedes the constraint block
    let mut value_proved = None;
    let constraints_line = r.next("`constraints=` line")?;
    let constraints_count = if let Some(rest) = constraints_line.strip_prefix("value-proved=") {
        let v = rest.parse::<u64>().map_err(|_| r.err(format!("`{rest}` is not an integer")))?;
        value_proved = Some(v);
        parse_u64_field(&mut r, "constraints")?
    } else if let Some(rest) = constraints_line.strip_prefix("constraints=") {
        rest.parse::<u64>().map_err(|_| r.err(format!("`{rest}` is not an integer")))?
    } else {
        return Err(r.err(format!("expected `constraints=<count>`, got `{constraints_line}`")));
    };

    let mut constraints = Vec::new();
    for _ in 0..constraints_count {
        constraints.push(parse_set_line(&mut r, n, "constraint line")?);
    }

    let inner_count = parse_u64_field(&mut r, "inner-best")?;
    let mut inner_best = Vec::new();
    for _ in 0..inner_count {
        let m = parse_set_line(&mut r, n, "inner-best line")?;
        if m.count_ones() != params.k {
            return Err(r.err(format!("inner-best member must have k={} elements", params.k)));
        }
        inner_best.push(m);
    }

    let feasible_count = parse_u64_field(&mut r, "best-feasible")?;
    let mut best_feasible = Vec::new();
    for _ in 0..feasible_count {
        let m = parse_set_line(&mut r, n, "best-feasible line")?;
        if m.count_ones() != params.k {
            return Err(r.err(format!("best-feasible member must have k={} elements", params.k)));
        }
        best_feasible.push(m);
    }

    let path_line = r.next("`path=` line")?;
    let rest = path_line
        .strip_prefix("path=")
        .ok_or_else(|| r.err(format!("expected `path=<indices>`, got `{path_line}`")))?;
    let mut path = Vec::new();
    if !rest.is_empty() {
        for tok in rest.split(',') {
            path.push(
                tok.parse::<usize>()
                    .map_err(|_| r.err(format!("`{tok}` is not a branch index")))?,
            );
        }
    }

    if s < params.t || s > params.k {
        return Err(r.err(format!("s={s} outside [t, k]")));
    }

    Ok(Checkpoint {
        params,
        s,
        phase,
        nodes_used,
        constraints,
        inner_best,
        best_feasible,
        value_proved,
        path,
    })
}
