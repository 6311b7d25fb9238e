//! Exact computation of the maximum size of a t-intersecting k-uniform
//! family on [n] with t-covering number at least s.
//!
//! The solver alternates two steps. A branch-and-bound pass maximizes family
//! size over k-sets subject to the escape constraints generated so far
//! ("at least one chosen set meets S in fewer than t elements"); whenever the
//! optimum of a pass is still covered by some (s-1)-set S, that S becomes a
//! new escape constraint and the pass repeats. A family has covering number
//! at least s exactly when no (s-1)-set covers it, and no escape constraint
//! ever excludes such a family, so on termination the incumbent is optimal.
//! Enlarging a family never decreases its covering number, which keeps every
//! intermediate feasible incumbent usable as a seed. A final include-first
//! pass in ascending mask order rebuilds the lexicographically least optimal
//! witness.

use crate::checkpoint::{Checkpoint, Phase};
use crate::combinat::{binomial, k_subset_masks};
use crate::error::{Error, Result};
use crate::family::{cover_mask_of_size, Family};
use crate::formulas::{family_size_bound, max_construction_size, Label};
use crate::ground::Params;
use num_bigint::BigUint;
use std::time::Instant;

/// Hard cap on the number of candidate k-sets the search will materialize.
const CANDIDATE_CAP: u64 = 2_000_000;

/// Node and wall-clock limits. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_millis: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), max_millis: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    ProvedOptimal,
    BudgetExhausted,
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub constraints_generated: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub value: u64,
    pub witness: Family,
    pub status: SearchStatus,
    pub stats: SearchStats,
    /// Present exactly when the budget ran out; feeding it back resumes the run.
    pub checkpoint: Option<Checkpoint>,
}

// ---------------------------------------------------------------------------
// dense bitsets over candidate indices

#[derive(Clone, PartialEq, Eq)]
struct Bits {
    w: Vec<u64>,
}

impl Bits {
    fn empty(len: usize) -> Self {
        Bits { w: vec![0; len.div_ceil(64)] }
    }

    fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.w[i >> 6] |= 1u64 << (i & 63);
    }

    fn remove(&mut self, i: usize) {
        self.w[i >> 6] &= !(1u64 << (i & 63));
    }

    fn contains(&self, i: usize) -> bool {
        self.w[i >> 6] & (1u64 << (i & 63)) != 0
    }

    fn count(&self) -> usize {
        self.w.iter().map(|x| x.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    fn intersects(&self, o: &Bits) -> bool {
        self.w.iter().zip(&o.w).any(|(a, b)| a & b != 0)
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits { w: self.w.iter().zip(&o.w).map(|(a, b)| a & b).collect() }
    }

    fn andnot_with(&mut self, o: &Bits) {
        for (a, b) in self.w.iter_mut().zip(&o.w) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        for (wi, &word) in self.w.iter().enumerate() {
            if word != 0 {
                return Some((wi << 6) + word.trailing_zeros() as usize);
            }
        }
        None
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.w.iter().enumerate().flat_map(|(wi, &word)| {
            let mut m = word;
            std::iter::from_fn(move || {
                if m == 0 {
                    return None;
                }
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                Some((wi << 6) + b)
            })
        })
    }
}

// ---------------------------------------------------------------------------
// budget accounting shared across solver passes

struct Meter {
    nodes: u64,
    max_nodes: Option<u64>,
    deadline: Option<(Instant, u64)>,
    exhausted: bool,
}

impl Meter {
    fn new(budget: &Budget, already_used: u64) -> Self {
        Meter {
            nodes: already_used,
            max_nodes: budget.max_nodes,
            deadline: budget.max_millis.map(|ms| (Instant::now(), ms)),
            exhausted: false,
        }
    }

    /// Count one node; true when the budget just ran out.
    fn tick(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        self.nodes += 1;
        if let Some(limit) = self.max_nodes {
            if self.nodes > limit {
                self.exhausted = true;
                return true;
            }
        }
        if let Some((start, ms)) = self.deadline {
            if self.nodes.is_multiple_of(1024) && start.elapsed().as_millis() as u64 > ms {
                self.exhausted = true;
                return true;
            }
        }
        false
    }
}

/// A witness that the covering number of `masks` is below `s`: some t-cover
/// with s-1 elements. None means the covering number is at least s.
fn small_cover(masks: &[u64], t: u32, s: u32) -> Option<u64> {
    if s == t {
        return None; // covers below t elements cannot meet any member t times
    }
    cover_mask_of_size(masks, t, s - 1)
}

/// Every (s-1)-subset of [n] that t-covers `masks`. Each one is a violated
/// escape constraint of the family.
fn all_small_covers(masks: &[u64], t: u32, s: u32, n: u32) -> Vec<u64> {
    if s == t {
        return Vec::new();
    }
    let full = if n == 64 { !0u64 } else { (1u64 << n) - 1 };
    crate::combinat::subsets_of_mask(full, s - 1)
        .into_iter()
        .filter(|&c| masks.iter().all(|&m| (m & c).count_ones() >= t))
        .collect()
}

// ---------------------------------------------------------------------------
// one branch-and-bound pass

/// Shared state of a single traversal over the compatibility graph.
struct Pass<'a> {
    verts: &'a [u64],
    adj: &'a [Bits],
    t: u32,
    s: u32,
    /// Escape sets: vertices violating |G cap S| >= t, one per constraint.
    /// The refine pass appends to this as it learns covers.
    esc: Vec<Bits>,
    learned: Vec<u64>,
    chosen: Vec<usize>,
    chosen_bits: Bits,
    meter: &'a mut Meter,
    best: Vec<usize>,
    improvements: Vec<Vec<u64>>,
    cap: Option<usize>,
    stop: bool,
    aborted: bool,
    capture: Vec<usize>,
    replay: Option<std::collections::VecDeque<usize>>,
    target: usize,
    found: Option<Vec<u64>>,
}

impl<'a> Pass<'a> {
    fn new(
        verts: &'a [u64],
        adj: &'a [Bits],
        t: u32,
        s: u32,
        constraints: &[u64],
        meter: &'a mut Meter,
    ) -> Self {
        let esc = constraints.iter().map(|&c| escape_set(verts, c, t)).collect();
        Pass {
            verts,
            adj,
            t,
            s,
            esc,
            learned: Vec::new(),
            chosen: Vec::new(),
            chosen_bits: Bits::empty(verts.len()),
            meter,
            best: Vec::new(),
            improvements: Vec::new(),
            cap: None,
            stop: false,
            aborted: false,
            capture: Vec::new(),
            replay: None,
            target: 0,
            found: None,
        }
    }

    fn masks_of(&self, ids: &[usize]) -> Vec<u64> {
        ids.iter().map(|&i| self.verts[i]).collect()
    }

    /// Greedy sequential coloring of `cand`: vertices grouped by color class
    /// in ascending class order, plus each position's class number.
    fn color_order(&self, cand: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cand.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut remaining = cand.clone();
        let mut color = 0usize;
        while !remaining.is_empty() {
            color += 1;
            let mut class_avail = remaining.clone();
            while let Some(v) = class_avail.first() {
                class_avail.remove(v);
                remaining.remove(v);
                class_avail.andnot_with(&self.adj[v]);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    /// A constraint is dead when neither the chosen prefix nor any remaining
    /// candidate can satisfy it.
    fn constraints_alive(&self, cand: &Bits) -> bool {
        self.esc
            .iter()
            .all(|l| l.intersects(&self.chosen_bits) || l.intersects(cand))
    }

    fn all_constraints_satisfied(&self) -> bool {
        self.esc.iter().all(|l| l.intersects(&self.chosen_bits))
    }

    fn push(&mut self, v: usize) {
        self.chosen.push(v);
        self.chosen_bits.insert(v);
    }

    fn pop(&mut self) {
        let v = self.chosen.pop().expect("push/pop balanced");
        self.chosen_bits.remove(v);
    }

    fn record_if_better(&mut self) {
        if self.chosen.len() > self.best.len() && self.all_constraints_satisfied() {
            self.best = self.chosen.clone();
            self.improvements.push(self.masks_of(&self.best));
            if let Some(cap) = self.cap {
                if self.best.len() >= cap {
                    self.stop = true;
                }
            }
        }
    }

    /// Claim this frame's replay entry. Must be called exactly once at frame
    /// entry, before any pruning, so the queue stays aligned with the call
    /// path.
    fn claim_replay(&mut self) -> Option<usize> {
        let q = self.replay.as_mut()?;
        match q.pop_front() {
            Some(idx) => Some(idx),
            None => {
                self.replay = None;
                None
            }
        }
    }

    /// A frame on the replayed path is returning without descending into its
    /// recorded branch; the deeper entries are stale, so the resumed run
    /// explores the rest of the tree normally. Pruning more than the
    /// original run is sound: incumbents and constraints only got stronger.
    fn abandon_replay(&mut self) {
        self.replay = None;
    }

    /// Vertices adjacent to every other candidate sit in every maximum clique
    /// of the subproblem (a maximum clique missing one could be extended), and
    /// adding a vertex never unsatisfies an escape constraint. Commit them all
    /// up front; returns how many were pushed.
    fn force_universal(&mut self, cand: &mut Bits) -> usize {
        let mut forced = 0;
        let universal: Vec<usize> = cand
            .iter()
            .filter(|&u| {
                let mut rest = cand.clone();
                rest.remove(u);
                rest.andnot_with(&self.adj[u]);
                rest.is_empty()
            })
            .collect();
        for u in universal {
            self.push(u);
            cand.remove(u);
            forced += 1;
        }
        forced
    }

    /// Maximization: classic coloring-ordered max-clique extended with
    /// constraint liveness checks.
    fn dfs_max(&mut self, cand: Bits) {
        if self.stop || self.aborted {
            return;
        }
        if self.meter.tick() {
            self.aborted = true;
            self.capture = Vec::new();
            return;
        }
        let frame_replay = self.claim_replay();
        if !self.constraints_alive(&cand) {
            if frame_replay.is_some() {
                self.abandon_replay();
            }
            return;
        }
        let mut cand = cand;
        let forced = self.force_universal(&mut cand);
        self.dfs_max_body(cand, frame_replay);
        for _ in 0..forced {
            self.pop();
        }
    }

    fn dfs_max_body(&mut self, cand: Bits, frame_replay: Option<usize>) {
        if cand.is_empty() {
            if frame_replay.is_some() {
                self.abandon_replay();
            }
            self.record_if_better();
            return;
        }
        let (order, colors) = self.color_order(&cand);
        let mut cand_local = cand;

        // resume: siblings above the recorded index were already exhausted
        let mut descending_replay = false;
        let start = match frame_replay {
            Some(idx) if idx < order.len() => {
                for i in (idx + 1..order.len()).rev() {
                    cand_local.remove(order[i]);
                }
                descending_replay = true;
                idx + 1
            }
            Some(_) => {
                self.abandon_replay(); // stale entry; explore the whole node
                order.len()
            }
            None => order.len(),
        };

        for i in (0..start).rev() {
            if self.chosen.len() + colors[i] <= self.best.len() {
                if descending_replay {
                    self.abandon_replay();
                }
                break;
            }
            let v = order[i];
            let child = cand_local.and(&self.adj[v]);
            self.push(v);
            self.dfs_max(child);
            self.pop();
            descending_replay = false;
            if self.aborted {
                self.capture.insert(0, i);
                return;
            }
            if self.stop {
                return;
            }
            cand_local.remove(v);
        }
    }

    /// Witness reconstruction: include-first traversal in ascending vertex
    /// order looking for a family of exactly `target` members whose covering
    /// number reaches s. Covers of failed completions are learned as new
    /// escape constraints on the fly.
    fn dfs_lex(&mut self, cand: Bits) {
        if self.found.is_some() || self.aborted {
            return;
        }
        if self.meter.tick() {
            self.aborted = true;
            self.capture = Vec::new();
            return;
        }
        let frame_replay = self.claim_replay();
        if !self.constraints_alive(&cand) {
            if frame_replay.is_some() {
                self.abandon_replay();
            }
            return;
        }
        // committing universal vertices keeps the completion set of the
        // subtree unchanged (target-size families missing one would extend
        // past the proved optimum), so lex-first order is preserved
        let mut cand = cand;
        let forced = self.force_universal(&mut cand);
        if self.chosen.len() <= self.target {
            self.dfs_lex_body(cand, frame_replay);
        } else if frame_replay.is_some() {
            self.abandon_replay();
        }
        for _ in 0..forced {
            self.pop();
        }
    }

    fn dfs_lex_body(&mut self, cand: Bits, frame_replay: Option<usize>) {
        if self.chosen.len() == self.target {
            if frame_replay.is_some() {
                self.abandon_replay();
            }
            if self.all_constraints_satisfied() {
                let masks = self.masks_of(&self.chosen);
                match small_cover(&masks, self.t, self.s) {
                    Some(cover) => {
                        self.learned.push(cover);
                        self.esc.push(escape_set(self.verts, cover, self.t));
                    }
                    None => self.found = Some(masks),
                }
            }
            return;
        }
        let (_, colors) = self.color_order(&cand);
        let reach = colors.last().copied().unwrap_or(0);
        if self.chosen.len() + reach < self.target {
            if frame_replay.is_some() {
                self.abandon_replay();
            }
            return;
        }

        let order: Vec<usize> = cand.iter().collect();
        let mut cand_local = cand;
        let begin = match frame_replay {
            Some(idx) if idx < order.len() => {
                for &v in order.iter().take(idx) {
                    cand_local.remove(v);
                }
                idx
            }
            Some(_) => {
                self.abandon_replay();
                0
            }
            None => 0,
        };

        for (i, &v) in order.iter().enumerate().skip(begin) {
            let child = cand_local.and(&self.adj[v]);
            self.push(v);
            self.dfs_lex(child);
            self.pop();
            if self.aborted {
                self.capture.insert(0, i);
                return;
            }
            if self.found.is_some() {
                return;
            }
            cand_local.remove(v);
        }
    }
}

/// Vertices that escape the cover `s_mask`: they meet it in fewer than t
/// elements.
fn escape_set(verts: &[u64], s_mask: u64, t: u32) -> Bits {
    let mut esc = Bits::empty(verts.len());
    for (i, &m) in verts.iter().enumerate() {
        if (m & s_mask).count_ones() < t {
            esc.insert(i);
        }
    }
    esc
}

// ---------------------------------------------------------------------------
// instance data shared by all passes

struct Instance {
    params: Params,
    s: u32,
    /// Candidate k-set masks, ascending; index order is the lex order.
    cands: Vec<u64>,
    adj: Vec<Bits>,
    /// Value-pass branch order: descending compatibility degree, ties by mask.
    value_order: Vec<usize>,
}

impl Instance {
    fn new(p: &Params, s: u32) -> Result<Self> {
        p.require_bitmask()?;
        if p.n + (p.t as u64) < 2 * p.k as u64 + 1 {
            return Err(Error::Precondition(format!("need n >= 2k - t + 1, got {p}")));
        }
        if s < p.t || s > p.k {
            return Err(Error::Precondition(format!("need t <= s <= k, got s={s} with {p}")));
        }
        if binomial(p.n as i64, p.k as i64) > BigUint::from(CANDIDATE_CAP) {
            return Err(Error::InstanceTooLarge { n: p.n, k: p.k, count: CANDIDATE_CAP });
        }
        let cands = k_subset_masks(p.n_small(), p.k)?;
        let v = cands.len();
        let mut adj: Vec<Bits> = (0..v).map(|_| Bits::empty(v)).collect();
        let mut degree = vec![0u32; v];
        for i in 0..v {
            for j in (i + 1)..v {
                if (cands[i] & cands[j]).count_ones() >= p.t {
                    adj[i].insert(j);
                    adj[j].insert(i);
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
        }
        let mut value_order: Vec<usize> = (0..v).collect();
        value_order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(cands[a].cmp(&cands[b])));
        Ok(Instance { params: *p, s, cands, adj, value_order })
    }

    /// Vertex masks and adjacency remapped into `order` space.
    fn reordered(&self, order: &[usize]) -> (Vec<u64>, Vec<Bits>) {
        let v = order.len();
        let mut pos = vec![0usize; v];
        for (i, &id) in order.iter().enumerate() {
            pos[id] = i;
        }
        let verts: Vec<u64> = order.iter().map(|&id| self.cands[id]).collect();
        let mut adj: Vec<Bits> = (0..v).map(|_| Bits::empty(v)).collect();
        for (i, &id) in order.iter().enumerate() {
            for nb in self.adj[id].iter() {
                adj[i].insert(pos[nb]);
            }
        }
        (verts, adj)
    }

    /// Formula-backed cap on any family with covering number >= s, when the
    /// size bound's hypotheses hold. The bound is not monotone in tau (the
    /// C(tau, t) factor grows), so take the explicit maximum.
    fn bound_cap(&self) -> Option<usize> {
        let p = &self.params;
        let kt = (p.k - p.t) as u64;
        if p.k < p.t + 3 || p.n < kt * (kt + 1) + p.t as u64 {
            return None;
        }
        let mut best = BigUint::from(0u32);
        for tau in self.s..=p.k {
            best = best.max(family_size_bound(p, tau).ok()?);
        }
        let digits = best.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => usize::try_from(digits[0]).ok(),
            _ => None,
        }
    }

    /// Repair an incumbent that new constraints have invalidated: for each
    /// unsatisfied constraint, swap in the escaper that keeps the most
    /// members, then re-extend greedily. Filtering can unsatisfy earlier
    /// constraints, so iterate a few rounds before giving up.
    fn repair(&self, prev: &[usize], adj: &[Bits], esc: &[Bits]) -> Vec<usize> {
        let mut current = prev.to_vec();
        for _ in 0..6 {
            let mut changed = false;
            for e_set in esc {
                if current.iter().any(|&v| e_set.contains(v)) {
                    continue;
                }
                let pick = e_set
                    .iter()
                    .map(|e| {
                        let kept = current.iter().filter(|&&w| adj[e].contains(w)).count();
                        (kept, e)
                    })
                    .max_by_key(|&(kept, e)| (kept, std::cmp::Reverse(e)));
                match pick {
                    Some((_, e)) => {
                        current.retain(|&w| adj[e].contains(w));
                        current.push(e);
                        changed = true;
                    }
                    None => return Vec::new(),
                }
            }
            if !changed {
                break;
            }
        }
        if !esc.iter().all(|l| current.iter().any(|&v| l.contains(v))) {
            return Vec::new();
        }
        // greedy extension with everything still compatible
        let mut rest = Bits::full(adj.len());
        for &v in &current {
            rest = rest.and(&adj[v]);
        }
        for &v in &current {
            rest.remove(v);
        }
        while let Some(v) = rest.first() {
            current.push(v);
            rest.remove(v);
            rest = rest.and(&adj[v]);
        }
        current
    }

    /// Greedy incumbents, one per ground element: first satisfy every escape
    /// constraint with a compatible escaper, then fill the star at the
    /// element, then extend with anything else compatible. The best of these
    /// keeps each inner pass from restarting cold once constraints pile up.
    fn warm_start(&self, verts: &[u64], adj: &[Bits], esc: &[Bits]) -> Vec<usize> {
        let n = self.params.n_small();
        let compatible = |v: usize, chosen: &[usize]| chosen.iter().all(|&u| adj[u].contains(v));
        let mut best: Vec<usize> = Vec::new();
        'elements: for x in 0..n {
            let bit = 1u64 << x;
            let mut chosen: Vec<usize> = Vec::new();
            for e in esc {
                if chosen.iter().any(|&v| e.contains(v)) {
                    continue;
                }
                // prefer escapers that keep the star at x alive
                let pick = e
                    .iter()
                    .filter(|&v| !chosen.contains(&v) && compatible(v, &chosen))
                    .min_by_key(|&v| (verts[v] & bit == 0, v));
                match pick {
                    Some(v) => chosen.push(v),
                    None => continue 'elements,
                }
            }
            let mut allowed = Bits::empty(verts.len());
            for (i, &m) in verts.iter().enumerate() {
                if m & bit != 0 && compatible(i, &chosen) && !chosen.contains(&i) {
                    allowed.insert(i);
                }
            }
            while let Some(v) = allowed.first() {
                chosen.push(v);
                allowed.remove(v);
                allowed = allowed.and(&adj[v]);
            }
            let mut rest = Bits::empty(verts.len());
            for i in 0..verts.len() {
                if compatible(i, &chosen) && !chosen.contains(&i) {
                    rest.insert(i);
                }
            }
            while let Some(v) = rest.first() {
                chosen.push(v);
                rest.remove(v);
                rest = rest.and(&adj[v]);
            }
            if chosen.len() > best.len() {
                best = chosen;
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// the public search

pub fn exact_max(p: &Params, s: u32, budget: &Budget) -> Result<SearchResult> {
    exact_max_resumable(p, s, budget, None)
}

pub fn exact_max_resumable(
    p: &Params,
    s: u32,
    budget: &Budget,
    resume: Option<Checkpoint>,
) -> Result<SearchResult> {
    let wall = Instant::now();
    let inst = Instance::new(p, s)?;
    let t = p.t;
    let n = p.n_small();

    let mut constraints: Vec<u64> = Vec::new();
    let mut best_feasible: Vec<u64> = Vec::new();
    let mut inner_seed: Vec<u64> = Vec::new();
    let mut phase = Phase::Value;
    let mut value_proved: Option<u64> = None;
    let mut replay: Option<Vec<usize>> = None;
    let mut used_nodes = 0u64;

    if let Some(ck) = resume {
        if ck.params != *p || ck.s != s {
            return Err(Error::Precondition(format!(
                "checkpoint was taken for {} s={}, not {} s={}",
                ck.params, ck.s, p, s
            )));
        }
        // semantic validation: a parseable but inconsistent snapshot must
        // fail loudly instead of proving a wrong value
        let bad = |msg: &str| Err(Error::Precondition(format!("corrupt checkpoint: {msg}")));
        if s == t && !ck.constraints.is_empty() {
            return bad("constraints cannot exist when s = t");
        }
        if ck.constraints.iter().any(|c| c.count_ones() != s.saturating_sub(1)) {
            return bad("every escape constraint must have s-1 elements");
        }
        let intersecting =
            |masks: &[u64]| -> bool { Family::from_masks(*p, masks.to_vec()).is_ok_and(|f| crate::family::is_t_intersecting(&f)) };
        if !intersecting(&ck.inner_best) || !intersecting(&ck.best_feasible) {
            return bad("incumbents must be t-intersecting k-uniform families");
        }
        for &c in &ck.constraints {
            if !ck.inner_best.is_empty()
                && ck.inner_best.iter().all(|&m| (m & c).count_ones() >= t)
            {
                return bad("inner incumbent violates a recorded constraint");
            }
        }
        if !ck.best_feasible.is_empty() && small_cover(&ck.best_feasible, t, s).is_some() {
            return bad("feasible incumbent does not reach the covering floor");
        }
        if ck.phase == Phase::Refine && ck.value_proved != Some(ck.best_feasible.len() as u64) {
            return bad("proved value must match the feasible incumbent");
        }
        constraints = ck.constraints;
        best_feasible = ck.best_feasible;
        inner_seed = ck.inner_best;
        phase = ck.phase;
        value_proved = ck.value_proved;
        replay = Some(ck.path);
        used_nodes = ck.nodes_used;
    }

    let mut meter = Meter::new(budget, used_nodes);
    let cap = inst.bound_cap();
    let finish = |witness: Vec<u64>,
                  status: SearchStatus,
                  meter: &Meter,
                  n_constraints: usize,
                  checkpoint: Option<Checkpoint>|
     -> Result<SearchResult> {
        Ok(SearchResult {
            value: witness.len() as u64,
            witness: Family::from_masks(*p, witness)?,
            status,
            stats: SearchStats {
                nodes: meter.nodes,
                constraints_generated: n_constraints,
                wall_ms: wall.elapsed().as_millis(),
            },
            checkpoint,
        })
    };

    if phase == Phase::Value {
        let (verts, adj) = inst.reordered(&inst.value_order);
        let mut prev_value: Option<usize> = None;
        let mut prev_best: Vec<usize> = Vec::new();
        loop {
            let mut pass = Pass::new(&verts, &adj, t, s, &constraints, &mut meter);
            pass.cap = match (cap, prev_value) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            pass.replay = replay.take().map(Into::into);
            let seed = if inner_seed.is_empty() { &best_feasible } else { &inner_seed };
            let mut incumbent: Vec<usize> = seed
                .iter()
                .map(|m| verts.iter().position(|v| v == m).expect("seed uses candidates"))
                .collect();
            let warm = inst.warm_start(&verts, &adj, &pass.esc);
            if warm.len() > incumbent.len() {
                incumbent = warm;
            }
            if !prev_best.is_empty() {
                let repaired = inst.repair(&prev_best, &adj, &pass.esc);
                if repaired.len() > incumbent.len() {
                    incumbent = repaired;
                }
            }
            if !incumbent.is_empty() {
                let masks = pass.masks_of(&incumbent);
                pass.best = incumbent;
                pass.improvements.push(masks);
            }
            // an incumbent already at the cap is the optimum of this pass:
            // the previous pass proved nothing larger can satisfy fewer
            // constraints
            if pass.cap.is_some_and(|c| pass.best.len() >= c) {
                pass.stop = true;
            } else if constraints.is_empty() {
                // with no constraints yet the pass maximizes over all
                // t-intersecting families, a relabeling-symmetric problem, so
                // some maximum family contains the first k-set
                let first_mask = (1u64 << p.k) - 1;
                let root = verts
                    .iter()
                    .position(|&m| m == first_mask)
                    .expect("the first k-set is always a candidate");
                pass.push(root);
                pass.dfs_max(adj[root].clone());
                pass.pop();
            } else {
                pass.dfs_max(Bits::full(verts.len()));
            }

            let aborted = pass.aborted;
            let best = pass.masks_of(&pass.best);
            let improvements = std::mem::take(&mut pass.improvements);
            let path = std::mem::take(&mut pass.capture);
            drop(pass);

            for imp in improvements {
                if imp.len() > best_feasible.len() && small_cover(&imp, t, s).is_none() {
                    best_feasible = imp;
                }
            }

            if aborted {
                let n_constraints = constraints.len();
                let ck = Checkpoint {
                    params: *p,
                    s,
                    phase: Phase::Value,
                    nodes_used: meter.nodes,
                    constraints,
                    inner_best: best,
                    best_feasible: best_feasible.clone(),
                    value_proved: None,
                    path,
                };
                return finish(
                    best_feasible,
                    SearchStatus::BudgetExhausted,
                    &meter,
                    n_constraints,
                    Some(ck),
                );
            }

            if best.is_empty() {
                // not even a single k-set satisfies the constraints
                return finish(Vec::new(), SearchStatus::ProvedOptimal, &meter, constraints.len(), None);
            }

            if std::env::var_os("COVERFAM_TRACE").is_some() {
                eprintln!(
                    "iteration: constraints={} value={} nodes={}",
                    constraints.len(),
                    best.len(),
                    meter.nodes
                );
            }
            let violated = all_small_covers(&best, t, s, n);
            if violated.is_empty() {
                if best.len() > best_feasible.len() {
                    best_feasible = best;
                }
                value_proved = Some(best_feasible.len() as u64);
                break;
            }
            prev_value = Some(best.len());
            prev_best = best
                .iter()
                .map(|m| verts.iter().position(|v| v == m).expect("best uses candidates"))
                .collect();
            constraints.extend(violated);
            inner_seed = best_feasible.clone();
        }
    }

    // refine: rebuild the lexicographically least optimal witness
    let target = value_proved.expect("refine phase requires a proved value") as usize;
    let lex_order: Vec<usize> = (0..inst.cands.len()).collect();
    let (verts, adj) = inst.reordered(&lex_order);
    let mut pass = Pass::new(&verts, &adj, t, s, &constraints, &mut meter);
    pass.target = target;
    pass.replay = replay.take().map(Into::into);
    if target > 0 {
        pass.dfs_lex(Bits::full(verts.len()));
    }

    let aborted = pass.aborted;
    let found = pass.found.take();
    let path = std::mem::take(&mut pass.capture);
    let learned = std::mem::take(&mut pass.learned);
    drop(pass);
    constraints.extend(learned);

    if aborted {
        let n_constraints = constraints.len();
        let ck = Checkpoint {
            params: *p,
            s,
            phase: Phase::Refine,
            nodes_used: meter.nodes,
            constraints,
            inner_best: Vec::new(),
            best_feasible: best_feasible.clone(),
            value_proved,
            path,
        };
        return finish(best_feasible, SearchStatus::BudgetExhausted, &meter, n_constraints, Some(ck));
    }

    let witness = match found {
        Some(w) => w,
        None if target == 0 => Vec::new(),
        // a feasible family of the proved size exists and no escape
        // constraint excludes it, so an empty refine pass means the inputs
        // were inconsistent (e.g. a checkpoint from a different build)
        None => {
            return Err(Error::Precondition(
                "witness reconstruction found no family of the proved size".into(),
            ))
        }
    };
    finish(witness, SearchStatus::ProvedOptimal, &meter, constraints.len(), None)
}

// ---------------------------------------------------------------------------
// classification of maximal families against the constructions

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    Construction1,
    Construction2,
    Construction3,
    TrivialStar,
    Other,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassLabel::Construction1 => "c1",
            ClassLabel::Construction2 => "c2",
            ClassLabel::Construction3 => "c3",
            ClassLabel::TrivialStar => "trivial-star",
            ClassLabel::Other => "other",
        };
        f.write_str(s)
    }
}

/// The invariants a classification decision is based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub tau: u32,
    pub tau_of_covers: u32,
    pub cover_count: usize,
    pub family_size: usize,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub label: ClassLabel,
    pub signature: Signature,
    /// Ground-set permutation mapping the family onto the default-placed
    /// construction; present exactly when a construction label is claimed.
    pub permutation: Option<Vec<u32>>,
}

/// Match a maximal family against the three constructions up to relabeling.
pub fn classify_extremal(f: &Family) -> Result<Classification> {
    if !crate::family::is_maximal(f)? {
        return Err(Error::NotMaximal);
    }
    let p = f.params();
    let it = crate::family::iterated_tau(f)?;
    let covers = crate::family::min_covers(f)?;
    let signature = Signature {
        tau: it.tau,
        tau_of_covers: it.tau_of_covers,
        cover_count: covers.len(),
        family_size: f.len(),
    };
    if it.tau == p.t {
        return Ok(Classification { label: ClassLabel::TrivialStar, signature, permutation: None });
    }
    if p.k >= p.t + 3 && p.n > 2 * p.k as u64 {
        for (label, class) in [
            (Label::C1, ClassLabel::Construction1),
            (Label::C2, ClassLabel::Construction2),
            (Label::C3, ClassLabel::Construction3),
        ] {
            let built = crate::constructions::build_default(&p, label)?;
            if built.len() != f.len() {
                continue;
            }
            if let Some(perm) = find_isomorphism(f, &built) {
                return Ok(Classification {
                    label: class,
                    signature,
                    permutation: Some(perm),
                });
            }
        }
    }
    Ok(Classification { label: ClassLabel::Other, signature, permutation: None })
}

fn element_degrees(f: &Family, n: usize) -> Vec<usize> {
    let mut d = vec![0usize; n];
    for &m in f.masks() {
        let mut mm = m;
        while mm != 0 {
            d[mm.trailing_zeros() as usize] += 1;
            mm &= mm - 1;
        }
    }
    d
}

fn element_codegrees(f: &Family, n: usize) -> Vec<Vec<usize>> {
    let mut c = vec![vec![0usize; n]; n];
    for &m in f.masks() {
        let mut elems = Vec::new();
        let mut mm = m;
        while mm != 0 {
            elems.push(mm.trailing_zeros() as usize);
            mm &= mm - 1;
        }
        for (i, &x) in elems.iter().enumerate() {
            for &y in &elems[i + 1..] {
                c[x][y] += 1;
                c[y][x] += 1;
            }
        }
    }
    c
}

/// Backtracking search for a ground-set permutation with
/// `a.relabel(perm) == b`, pruned by element degrees and pairwise co-degrees.
fn find_isomorphism(a: &Family, b: &Family) -> Option<Vec<u32>> {
    let n = a.params().n_small() as usize;
    if b.params().n_small() as usize != n || a.len() != b.len() {
        return None;
    }
    let da = element_degrees(a, n);
    let db = element_degrees(b, n);
    {
        let mut sa = da.clone();
        let mut sb = db.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
    }
    let ca = element_codegrees(a, n);
    let cb = element_codegrees(b, n);

    // assign elements in rare degree classes first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (da.iter().filter(|&&d| d == da[x]).count(), std::cmp::Reverse(da[x])));

    struct Ctx<'c> {
        order: &'c [usize],
        da: &'c [usize],
        db: &'c [usize],
        ca: &'c [Vec<usize>],
        cb: &'c [Vec<usize>],
        a: &'c Family,
        b: &'c Family,
    }

    fn assign(ctx: &Ctx<'_>, pos: usize, image: &mut [usize], used: &mut [bool]) -> bool {
        if pos == ctx.order.len() {
            let perm: Vec<u32> = image.iter().map(|&y| (y + 1) as u32).collect();
            return matches!(ctx.a.relabel(&perm), Ok(mapped) if &mapped == ctx.b);
        }
        let x = ctx.order[pos];
        for y in 0..ctx.db.len() {
            if used[y] || ctx.da[x] != ctx.db[y] {
                continue;
            }
            if !ctx.order[..pos].iter().all(|&x2| ctx.ca[x][x2] == ctx.cb[y][image[x2]]) {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if assign(ctx, pos + 1, image, used) {
                return true;
            }
            used[y] = false;
        }
        false
    }

    let ctx = Ctx { order: &order, da: &da, db: &db, ca: &ca, cb: &cb, a, b };
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if assign(&ctx, 0, &mut image, &mut used) {
        Some(image.iter().map(|&y| (y + 1) as u32).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// parameter sweeps

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub params: Params,
    pub s: u32,
    pub value: Option<u64>,
    pub status: Option<SearchStatus>,
    pub nodes: u64,
    /// Max of the three construction formulas, where defined for the cell.
    pub formula_max: Option<(BigUint, Vec<Label>)>,
    pub error: Option<String>,
}

/// Run `exact_max` over a grid of cells, one row per cell. Budget exhaustion
/// and invalid cells are recorded in their rows, not fatal.
pub fn sweep(cells: &[(Params, u32)], budget: &Budget) -> Vec<SweepRow> {
    cells
        .iter()
        .map(|(p, s)| {
            let formula_max = max_construction_size(p).ok();
            match exact_max(p, *s, budget) {
                Ok(res) => SweepRow {
                    params: *p,
                    s: *s,
                    value: Some(res.value),
                    status: Some(res.status),
                    nodes: res.stats.nodes,
                    formula_max,
                    error: None,
                },
                Err(e) => SweepRow {
                    params: *p,
                    s: *s,
                    value: None,
                    status: None,
                    nodes: 0,
                    formula_max,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::subsets_of_mask;

    fn p(n: u64, k: u32, t: u32) -> Params {
        Params::new(n, k, t).unwrap()
    }

    /// Independent oracle: walk every t-intersecting subfamily (clique of the
    /// compatibility graph) and check covering numbers by scanning all
    /// (s-1)-subsets of the ground set directly.
    fn oracle_max(params: &Params, s: u32) -> u64 {
        let cands = k_subset_masks(params.n_small(), params.k).unwrap();
        let v = cands.len();
        assert!(v <= 30, "oracle is for tiny instances");
        let full_ground = (1u64 << params.n_small()) - 1;
        let covering_ok = |members: &[u64]| -> bool {
            if s == params.t {
                return true;
            }
            !subsets_of_mask(full_ground, s - 1).into_iter().any(|c| {
                members.iter().all(|&m| (m & c).count_ones() >= params.t)
            })
        };
        let mut best = 0u64;
        // depth-first over cliques, growing only by higher-indexed vertices
        fn walk(
            cands: &[u64],
            t: u32,
            chosen: &mut Vec<u64>,
            from: usize,
            best: &mut u64,
            covering_ok: &dyn Fn(&[u64]) -> bool,
        ) {
            if chosen.len() as u64 > *best && covering_ok(chosen) {
                *best = chosen.len() as u64;
            }
            for i in from..cands.len() {
                if chosen.iter().all(|&m| (m & cands[i]).count_ones() >= t) {
                    chosen.push(cands[i]);
                    walk(cands, t, chosen, i + 1, best, covering_ok);
                    chosen.pop();
                }
            }
        }
        let mut chosen = Vec::new();
        walk(&cands, params.t, &mut chosen, 0, &mut best, &covering_ok);
        best
    }

    #[test]
    fn matches_oracle_on_tiny_instances() {
        // every cell with C(n,k) <= 30
        let cells: [(u64, u32, u32); 7] =
            [(5, 2, 1), (6, 2, 1), (7, 2, 1), (5, 3, 1), (5, 3, 2), (6, 3, 2), (6, 4, 2)];
        for (n, k, t) in cells {
            let params = p(n, k, t);
            for s in t..=k {
                if n + t as u64 >= 2 * k as u64 + 1 {
                    let expect = oracle_max(&params, s);
                    let got = exact_max(&params, s, &Budget::unlimited()).unwrap();
                    assert_eq!(got.value, expect, "n={n} k={k} t={t} s={s}");
                    assert_eq!(got.status, SearchStatus::ProvedOptimal);
                }
            }
        }
    }

    #[test]
    fn triangle_cell() {
        let res = exact_max(&p(5, 2, 1), 2, &Budget::unlimited()).unwrap();
        assert_eq!(res.value, 3);
        assert_eq!(res.status, SearchStatus::ProvedOptimal);
        let lists: Vec<Vec<u32>> = res.witness.sets().iter().map(|s| s.elements()).collect();
        // lexicographically least optimal witness
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let tau = crate::family::covering_number(&res.witness).unwrap();
        assert!(tau >= 2);
    }

    #[test]
    fn trivial_covering_floor_gives_star() {
        let res = exact_max(&p(9, 3, 1), 1, &Budget::unlimited()).unwrap();
        assert_eq!(res.value, 28); // C(8,2)
        assert_eq!(res.status, SearchStatus::ProvedOptimal);
        // the lex-least maximum family is the star at element 1
        assert!(res.witness.masks().iter().all(|m| m & 1 != 0));
    }

    #[test]
    fn witness_always_feasible() {
        for s in 1..=3u32 {
            let res = exact_max(&p(7, 3, 1), s, &Budget::unlimited()).unwrap();
            assert!(crate::family::is_t_intersecting(&res.witness));
            let tau = crate::family::covering_number(&res.witness).unwrap();
            assert!(tau >= s, "s={s} tau={tau}");
        }
    }

    #[test]
    fn value_non_increasing_in_s() {
        let params = p(8, 3, 1);
        let mut prev = u64::MAX;
        for s in 1..=3u32 {
            let res = exact_max(&params, s, &Budget::unlimited()).unwrap();
            assert!(res.value <= prev, "s={s}");
            prev = res.value;
        }
    }

    #[test]
    fn budget_exhaustion_and_resume() {
        let params = p(7, 3, 1);
        let direct = exact_max(&params, 3, &Budget::unlimited()).unwrap();
        assert_eq!(direct.status, SearchStatus::ProvedOptimal);

        // interrupt at a range of node budgets, then resume to completion
        for cut in [1u64, 5, 20, 100, 400] {
            let first = exact_max(&params, 3, &Budget::nodes(cut)).unwrap();
            let resumed = match first.status {
                SearchStatus::ProvedOptimal => first,
                SearchStatus::BudgetExhausted => {
                    let ck = first.checkpoint.expect("exhausted run must checkpoint");
                    // serialize + parse across the boundary, as the CLI would
                    let text = crate::checkpoint::serialize_checkpoint(&ck);
                    let ck = crate::checkpoint::parse_checkpoint(&text).unwrap();
                    exact_max_resumable(&params, 3, &Budget::unlimited(), Some(ck)).unwrap()
                }
            };
            assert_eq!(resumed.value, direct.value, "cut={cut}");
            assert_eq!(resumed.status, SearchStatus::ProvedOptimal, "cut={cut}");
            assert_eq!(resumed.witness, direct.witness, "cut={cut}");
        }
    }

    #[test]
    fn multi_stage_resume() {
        // drive the search forward in many small slices, with slice sizes
        // chosen to interrupt both the value and the refine phase
        for (n, slice) in [(7u64, 50u64), (8, 37), (8, 211)] {
            let params = p(n, 3, 1);
            let direct = exact_max(&params, 3, &Budget::unlimited()).unwrap();
            let mut ck: Option<Checkpoint> = None;
            let mut finished = None;
            for _ in 0..100_000 {
                let budget = Budget::nodes(ck.as_ref().map_or(slice, |c| c.nodes_used + slice));
                let res = exact_max_resumable(&params, 3, &budget, ck.take()).unwrap();
                match res.status {
                    SearchStatus::ProvedOptimal => {
                        finished = Some(res);
                        break;
                    }
                    SearchStatus::BudgetExhausted => ck = res.checkpoint,
                }
            }
            let done = finished.expect("sliced run must finish");
            assert_eq!(done.value, direct.value, "n={n} slice={slice}");
            assert_eq!(done.witness, direct.witness, "n={n} slice={slice}");
        }
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(exact_max(&p(5, 3, 1), 1, &Budget::unlimited()).is_err()); // n < 2k-t+1
        assert!(exact_max(&p(9, 3, 1), 4, &Budget::unlimited()).is_err()); // s > k
    }

    #[test]
    fn classification_of_builders_and_stars() {
        let params = p(12, 4, 1);
        for (label, expect) in [
            (Label::C1, ClassLabel::Construction1),
            (Label::C2, ClassLabel::Construction2),
            (Label::C3, ClassLabel::Construction3),
        ] {
            let f = crate::constructions::build_default(&params, label).unwrap();
            let c = classify_extremal(&f).unwrap();
            assert_eq!(c.label, expect);
            let perm = c.permutation.expect("construction label needs a permutation");
            assert_eq!(f.relabel(&perm).unwrap(), f); // identity on the default build
        }
        // a relabeled build must classify identically, with a real permutation
        let f = crate::constructions::build_default(&params, Label::C3).unwrap();
        let perm: Vec<u32> = vec![7, 3, 11, 1, 9, 2, 4, 5, 6, 8, 10, 12];
        let g = f.relabel(&perm).unwrap();
        let c = classify_extremal(&g).unwrap();
        assert_eq!(c.label, ClassLabel::Construction3);
        let witness_perm = c.permutation.unwrap();
        assert_eq!(g.relabel(&witness_perm).unwrap(), f);

        // full star: trivial
        let star: Vec<u64> = k_subset_masks(9, 3)
            .unwrap()
            .into_iter()
            .filter(|m| m & 1 != 0)
            .collect();
        let star = Family::from_masks(p(9, 3, 1), star).unwrap();
        let c = classify_extremal(&star).unwrap();
        assert_eq!(c.label, ClassLabel::TrivialStar);

        // non-maximal input is rejected
        let lone = Family::from_masks(p(9, 3, 1), vec![0b111]).unwrap();
        assert!(classify_extremal(&lone).is_err());
    }

    #[test]
    fn witness_classification_regression_fixture() {
        // the optimum at (9,3,1) with covering floor 3 is all ten 3-subsets
        // of {1..5}; no construction applies at k = 3, so the label is
        // "other" with the recorded covering signature
        let res = exact_max(&p(9, 3, 1), 3, &Budget::unlimited()).unwrap();
        assert_eq!(res.value, 10);
        let expected: Vec<u64> = k_subset_masks(5, 3).unwrap();
        assert_eq!(res.witness.masks(), expected.as_slice());
        let c = classify_extremal(&res.witness).unwrap();
        assert_eq!(c.label, ClassLabel::Other);
        assert!(c.permutation.is_none());
        assert_eq!(
            (c.signature.tau, c.signature.tau_of_covers, c.signature.cover_count, c.signature.family_size),
            (3, 3, 10, 10)
        );
    }

    #[test]
    fn sweep_reports_cells() {
        let cells: Vec<(Params, u32)> = (5..=6u64).map(|n| (p(n, 2, 1), 2u32)).collect();
        let rows = sweep(&cells, &Budget::unlimited());
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert_eq!(row.value, Some(3));
            assert_eq!(row.status, Some(SearchStatus::ProvedOptimal));
            assert!(row.error.is_none());
        }
    }
}
