//! Executable checks for the structural facts behind the extremal bounds:
//! intersection of minimum-cover collections, the iterated covering-number
//! range, minimum-cover counts and their exact shapes, size floors of the
//! built constructions, covering-number size bounds, and the
//! cross-intersecting sum bound. A suite runner instantiates the checks over
//! built constructions, seeded random maximal families, and exhaustively
//! enumerated maximal families on tiny ground sets.

use crate::combinat::{binomial, binomial_u64, k_subset_masks, subsets_of_mask};
use crate::error::Result;
use crate::family::{
    are_cross_intersecting, covering_number, is_maximal, is_t_intersecting, iterated_tau,
    min_covers, saturate_seeded, CoverFamily, Family,
};
use crate::formulas::{
    construction_size, cross_sum_bound, family_size_bound, offcover_size_bound, Label,
};
use crate::ground::Params;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

/// Outcome of one check on one instance. A fail always carries the full
/// family for replay.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub instance: String,
    pub verdict: Verdict,
    pub metrics: Vec<(&'static str, String)>,
    pub counterexample: Option<Family>,
}

impl CheckReport {
    fn new(name: &'static str, instance: &str) -> Self {
        CheckReport {
            name,
            instance: instance.to_string(),
            verdict: Verdict::NotApplicable,
            metrics: Vec::new(),
            counterexample: None,
        }
    }

    fn metric(mut self, key: &'static str, value: impl ToString) -> Self {
        self.metrics.push((key, value.to_string()));
        self
    }

    fn pass(mut self) -> Self {
        self.verdict = Verdict::Pass;
        self
    }

    fn fail(mut self, witness: &Family) -> Self {
        self.verdict = Verdict::Fail;
        self.counterexample = Some(witness.clone());
        self
    }

    /// One stable machine-readable line per report.
    pub fn line(&self) -> String {
        let mut out = format!("check={} instance={} verdict={}", self.name, self.instance, self.verdict.as_str());
        for (k, v) in &self.metrics {
            out.push_str(&format!(" {k}={v}"));
        }
        if let Some(cx) = &self.counterexample {
            let sets: Vec<String> = cx
                .sets()
                .iter()
                .map(|s| {
                    let parts: Vec<String> = s.elements().iter().map(|e| e.to_string()).collect();
                    parts.join(".")
                })
                .collect();
            out.push_str(&format!(" counterexample={}", sets.join(";")));
        }
        out
    }
}

pub const CHECK_NAMES: [&str; 8] = [
    "construction-sanity",
    "min-covers-intersecting",
    "iterated-tau-range",
    "min-cover-count",
    "construction-size-floor",
    "family-size-bound",
    "cross-sum-bound",
    "cross-star-equality",
];

// ---------------------------------------------------------------------------
// individual checks

/// Built construction must hit its formula size, be t-intersecting and
/// maximal, and have covering number t+2.
pub fn check_construction_sanity(f: &Family, label: Label, instance: &str) -> CheckReport {
    let report = CheckReport::new("construction-sanity", instance);
    let p = f.params();
    let expected = match construction_size(&p, label) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let intersecting = is_t_intersecting(f);
    let report = report
        .metric("size", f.len())
        .metric("formula", &expected)
        .metric("intersecting", intersecting);
    if !intersecting || BigUint::from(f.len()) != expected {
        return report.fail(f);
    }
    let tau = match covering_number(f) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let maximal = is_maximal(f).unwrap_or(false);
    let report = report.metric("tau", tau).metric("maximal", maximal);
    if tau != p.t + 2 || !maximal {
        return report.fail(f);
    }
    report.pass()
}

/// The collection of minimum t-covers of a maximal family on a large enough
/// ground set is itself t-intersecting.
pub fn check_min_covers_intersecting(f: &Family, instance: &str) -> CheckReport {
    let report = CheckReport::new("min-covers-intersecting", instance);
    let p = f.params();
    if f.is_empty() || p.n < 2 * p.k as u64 || !is_maximal(f).unwrap_or(false) {
        return report.metric("gate", "needs maximal family with n >= 2k");
    }
    let it = match iterated_tau(f) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let report = report
        .metric("tau", it.tau)
        .metric("covers-intersecting", it.covers_intersecting);
    if it.covers_intersecting {
        report.pass()
    } else {
        report.fail(f)
    }
}

/// For maximal families with covering number t+2, the covering number of the
/// minimum-cover collection stays within {t, t+1, t+2}.
pub fn check_iterated_tau_range(f: &Family, instance: &str) -> CheckReport {
    let report = CheckReport::new("iterated-tau-range", instance);
    let p = f.params();
    if f.is_empty() || p.n < 2 * p.k as u64 || !is_maximal(f).unwrap_or(false) {
        return report.metric("gate", "needs maximal family with n >= 2k");
    }
    let it = match iterated_tau(f) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    if it.tau != p.t + 2 {
        return report.metric("gate", format!("tau={} is not t+2", it.tau));
    }
    let report = report.metric("tau", it.tau).metric("tau2", it.tau_of_covers);
    if (p.t..=p.t + 2).contains(&it.tau_of_covers) {
        report.pass()
    } else {
        report.fail(f)
    }
}

/// Union mask of all covers.
fn cover_union(covers: &CoverFamily) -> u64 {
    covers.masks().iter().fold(0u64, |a, &b| a | b)
}

/// Does the cover collection equal {T in C(M, t+2) : |T cap W| >= t+1} for
/// some (k+2)-set M and (t+2)-subset W? Candidate windows are the covers
/// themselves; M is recovered as the union of all covers.
fn window_structure(covers: &CoverFamily) -> Option<(u64, u64)> {
    let p = covers.params();
    let t = p.t;
    if covers.size() != t + 2 {
        return None;
    }
    let union = cover_union(covers);
    if union.count_ones() != p.k + 2 {
        return None;
    }
    for &w in covers.masks() {
        let mut expected: Vec<u64> = subsets_of_mask(union, t + 2)
            .into_iter()
            .filter(|&c| (c & w).count_ones() > t)
            .collect();
        expected.sort_unstable();
        if expected == covers.masks() {
            return Some((union, w));
        }
    }
    None
}

/// Does the cover collection equal all (t+2)-subsets of a (t+4)-set?
fn zone_structure(covers: &CoverFamily) -> Option<u64> {
    let p = covers.params();
    let t = p.t;
    if covers.size() != t + 2 {
        return None;
    }
    let union = cover_union(covers);
    if union.count_ones() != t + 4 {
        return None;
    }
    let mut expected = subsets_of_mask(union, t + 2);
    expected.sort_unstable();
    if expected == covers.masks() {
        Some(union)
    } else {
        None
    }
}

/// Count and shape of the minimum-cover collection, dispatched on its own
/// covering number.
pub fn check_min_cover_count(f: &Family, instance: &str) -> CheckReport {
    let report = CheckReport::new("min-cover-count", instance);
    let p = f.params();
    if f.is_empty()
        || p.n <= 2 * p.k as u64
        || p.k < p.t + 3
        || !is_maximal(f).unwrap_or(false)
    {
        return report.metric("gate", "needs maximal family, n > 2k, k >= t+3");
    }
    let it = match iterated_tau(f) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    if it.tau != p.t + 2 {
        return report.metric("gate", format!("tau={} is not t+2", it.tau));
    }
    let covers = match min_covers(f) {
        Ok(c) => c,
        Err(e) => return report.metric("error", e),
    };
    let count = covers.len() as u64;
    let (k, t) = (p.k as u64, p.t as u64);
    let anchored_bound = (k - t) * (k - t + 1) + 1;
    let window_bound = (t + 2) * (k - t) + 1;
    let zone_bound = binomial_u64((t + 4) as i64, 2);
    let report = report
        .metric("tau2", it.tau_of_covers)
        .metric("covers", count);
    match it.tau_of_covers {
        x if x == p.t => {
            let report = report.metric("bound", anchored_bound);
            if count <= anchored_bound {
                report.pass()
            } else {
                report.fail(f)
            }
        }
        x if x == p.t + 1 => {
            let strict = anchored_bound.max(window_bound).max(zone_bound) - 1;
            let structured = window_structure(&covers).is_some();
            let report = report
                .metric("strict-bound", strict + 1)
                .metric("window-structure", structured);
            if count < strict + 1 || structured {
                report.pass()
            } else {
                report.fail(f)
            }
        }
        x if x == p.t + 2 => {
            let report = report.metric("bound", zone_bound);
            if count > zone_bound {
                return report.fail(f);
            }
            if count == zone_bound && p.t >= 2 {
                let zoned = zone_structure(&covers).is_some();
                let report = report.metric("zone-structure", zoned);
                if zoned {
                    report.pass()
                } else {
                    report.fail(f)
                }
            } else {
                report.pass()
            }
        }
        other => report.metric("tau2-out-of-range", other).fail(f),
    }
}

/// Size floor each built construction must clear:
///   c1: ((k-t)(k-t+1)+1) C(n-t-2, k-t-2) - (k-t)(2(k-t)^2+1) C(n-t-3, k-t-3)
///   c2: ((t+2)(k-t)+1) C(n-t-2, k-t-2) - (t+2)(k-t)^2 C(n-t-3, k-t-3)
///   c3: C(t+4, 2) (C(n-t-2, k-t-2) - 2 C(n-t-3, k-t-3))
pub fn check_construction_size_floor(f: &Family, label: Label, instance: &str) -> CheckReport {
    let report = CheckReport::new("construction-size-floor", instance);
    let p = f.params();
    if p.n <= 2 * p.k as u64 || p.k < p.t + 3 {
        return report.metric("gate", "needs n > 2k, k >= t+3");
    }
    let (n, k, t) = (p.n as i128, p.k as i128, p.t as i128);
    let head = num_bigint::BigInt::from_biguint(
        num_bigint::Sign::Plus,
        binomial((n - t - 2) as i64, (k - t - 2) as i64),
    );
    let tail = num_bigint::BigInt::from_biguint(
        num_bigint::Sign::Plus,
        binomial((n - t - 3) as i64, (k - t - 3) as i64),
    );
    let floor = match label {
        Label::C1 => ((k - t) * (k - t + 1) + 1) * &head - (k - t) * (2 * (k - t) * (k - t) + 1) * &tail,
        Label::C2 => ((t + 2) * (k - t) + 1) * &head - (t + 2) * (k - t) * (k - t) * &tail,
        Label::C3 => {
            num_bigint::BigInt::from_biguint(
                num_bigint::Sign::Plus,
                binomial((t + 4) as i64, 2),
            ) * (&head - 2 * &tail)
        }
    };
    let size = num_bigint::BigInt::from(f.len());
    let report = report.metric("size", f.len()).metric("floor", &floor);
    if size > floor {
        report.pass()
    } else {
        report.fail(f)
    }
}

/// Size against the covering-number bound, and the members containing no
/// minimum cover against the off-cover bound.
pub fn check_family_size_bound(f: &Family, instance: &str) -> CheckReport {
    let report = CheckReport::new("family-size-bound", instance);
    let p = f.params();
    let kt = (p.k - p.t) as u64;
    if f.is_empty()
        || !is_t_intersecting(f)
        || p.k < p.t + 3
        || p.n < kt * (kt + 1) + p.t as u64
    {
        return report.metric("gate", "needs t-intersecting family, k >= t+3, n >= (k-t)(k-t+1)+t");
    }
    let tau = match covering_number(f) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let bound = match family_size_bound(&p, tau) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let report = report
        .metric("tau", tau)
        .metric("size", f.len())
        .metric("bound", &bound);
    if BigUint::from(f.len()) > bound {
        return report.fail(f);
    }
    // members that contain no minimum cover
    let covers = match min_covers(f) {
        Ok(c) => c,
        Err(e) => return report.metric("error", e),
    };
    let offcover = f
        .masks()
        .iter()
        .filter(|&&m| covers.masks().iter().all(|&c| c & m != c))
        .count();
    let off_bound = match offcover_size_bound(&p, tau) {
        Ok(v) => v,
        Err(e) => return report.metric("error", e),
    };
    let report = report
        .metric("offcover", offcover)
        .metric("offcover-bound", &off_bound);
    if BigUint::from(offcover) > off_bound {
        report.fail(f)
    } else {
        report.pass()
    }
}

/// Sum bound for non-empty pairwise cross intersecting families.
pub fn check_cross_sum(families: &[Family], instance: &str) -> CheckReport {
    let report = CheckReport::new("cross-sum-bound", instance);
    let Some(first) = families.first() else {
        return report.metric("gate", "no families");
    };
    let p = first.params();
    let r = families.len() as u32;
    if r < 2
        || p.n < 2 * p.k as u64
        || families.iter().filter(|f| !f.is_empty()).count() < 2
        || families.iter().any(|f| f.params() != p)
    {
        return report.metric("gate", "needs r >= 2 same-shape non-empty families, n >= 2k");
    }
    match are_cross_intersecting(families, 1) {
        Ok(true) => {}
        Ok(false) => return report.metric("gate", "not pairwise cross intersecting"),
        Err(e) => return report.metric("error", e),
    }
    let total: usize = families.iter().map(|f| f.len()).sum();
    let bound = match cross_sum_bound(p.n, p.k, r) {
        Ok(b) => b,
        Err(e) => return report.metric("error", e),
    };
    let report = report
        .metric("r", r)
        .metric("sum", total)
        .metric("bound", &bound);
    if BigUint::from(total) <= bound {
        report.pass()
    } else {
        report.fail(first)
    }
}

/// r equal full stars meet the sum bound with equality whenever the star
/// branch of the bound dominates.
pub fn check_cross_star_equality(n: u64, k: u32, r: u32, instance: &str) -> CheckReport {
    let report = CheckReport::new("cross-star-equality", instance);
    let Ok(p) = Params::new(n, k, 1) else {
        return report.metric("gate", "invalid parameters");
    };
    if n < 2 * k as u64 {
        return report.metric("gate", "needs n >= 2k");
    }
    let star: Vec<u64> = match k_subset_masks(p.n_small(), k) {
        Ok(masks) => masks.into_iter().filter(|m| m & 1 != 0).collect(),
        Err(e) => return report.metric("error", e),
    };
    let Ok(star) = Family::from_masks(p, star) else {
        return report.metric("gate", "star build failed");
    };
    let families: Vec<Family> = (0..r).map(|_| star.clone()).collect();
    if !are_cross_intersecting(&families, 1).unwrap_or(false) {
        return report.metric("error", "star tuple not cross intersecting").fail(&star);
    }
    let total = BigUint::from(star.len() * r as usize);
    let bound = match cross_sum_bound(n, k, r) {
        Ok(b) => b,
        Err(e) => return report.metric("error", e),
    };
    let star_branch = BigUint::from(r) * binomial(n as i64 - 1, k as i64 - 1);
    let report = report
        .metric("r", r)
        .metric("sum", &total)
        .metric("bound", &bound)
        .metric("star-branch-max", star_branch == bound);
    if total > bound {
        return report.fail(&star);
    }
    if star_branch == bound && total != bound {
        return report.fail(&star); // equality case must be hit exactly
    }
    report.pass()
}

// ---------------------------------------------------------------------------
// suite

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Cells for the construction checks; must satisfy n > 2k, k >= t+3.
    pub grid: Vec<Params>,
    pub seed: u64,
    /// Total number of seeded random maximal families across the grid.
    pub random_samples: usize,
    /// Total number of random cross-intersecting tuples.
    pub cross_samples: usize,
    /// Enumerate all maximal families where C(n, k) stays below this.
    pub exhaustive_limit: u64,
    /// Self-test hook: corrupt each built first-variant family by dropping
    /// its first member, which must trip construction-sanity.
    pub inject_fault: bool,
}

/// The acceptance grid: t in {1, 2}, k in {t+3, t+4}, 2k+1 <= n <= 14.
pub fn default_grid() -> Vec<Params> {
    let mut grid = Vec::new();
    for t in 1..=2u32 {
        for k in [t + 3, t + 4] {
            for n in (2 * k as u64 + 1)..=14 {
                if let Ok(p) = Params::new(n, k, t) {
                    grid.push(p);
                }
            }
        }
    }
    grid
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: default_grid(),
            seed: 20260809,
            random_samples: 200,
            cross_samples: 100,
            exhaustive_limit: 30,
            inject_fault: false,
        }
    }
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_mul(0xD131_0BA6_9E37_79B9)
        | 1
}

/// A random k-set seed saturated under a shuffled candidate order.
fn random_maximal(p: &Params, seed: u64) -> Result<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cands = k_subset_masks(p.n_small(), p.k)?;
    let base = cands[rng.gen_range(0..cands.len())];
    let start = Family::from_masks(*p, vec![base])?;
    saturate_seeded(&start, seed ^ 0xABCD_EF01_2345_6789)
}

/// Chained rejection sampler for non-empty pairwise cross intersecting
/// tuples: each family is drawn from the sets meeting everything chosen so
/// far, and the tuple is rechecked pairwise before use.
fn random_cross_tuple(n: u64, k: u32, r: u32, seed: u64) -> Option<Vec<Family>> {
    let p = Params::new(n, k, 1).ok()?;
    let all = k_subset_masks(p.n_small(), k).ok()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..64 {
        let mut families: Vec<Vec<u64>> = Vec::new();
        for _ in 0..r {
            let pool: Vec<u64> = all
                .iter()
                .copied()
                .filter(|&c| families.iter().flatten().all(|&m| m & c != 0))
                .collect();
            if pool.is_empty() {
                continue 'attempt;
            }
            // favor small families so the pools stay alive
            let want = 1 + rng.gen_range(0..4.min(pool.len()));
            let mut picked = Vec::new();
            for _ in 0..want {
                picked.push(pool[rng.gen_range(0..pool.len())]);
            }
            families.push(picked);
        }
        let built: Vec<Family> = families
            .into_iter()
            .map(|m| Family::from_masks(p, m))
            .collect::<Result<_>>()
            .ok()?;
        if are_cross_intersecting(&built, 1).ok()? {
            return Some(built);
        }
    }
    None
}

/// All maximal t-intersecting families on a tiny cell, via pivoted maximal
/// clique enumeration over the compatibility graph.
fn all_maximal_families(p: &Params) -> Result<Vec<Family>> {
    let cands = k_subset_masks(p.n_small(), p.k)?;
    let v = cands.len();
    assert!(v <= 64, "exhaustive enumeration is for tiny cells");
    let mut adj = vec![0u64; v];
    for i in 0..v {
        for j in (i + 1)..v {
            if (cands[i] & cands[j]).count_ones() >= p.t {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    fn bk(adj: &[u64], r: u64, mut p_set: u64, mut x: u64, out: &mut Vec<u64>) {
        if p_set == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = {
            let mut best = None;
            let mut both = p_set | x;
            while both != 0 {
                let u = both.trailing_zeros() as usize;
                both &= both - 1;
                let gain = (p_set & adj[u]).count_ones();
                if best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, u));
                }
            }
            best.expect("p or x non-empty").1
        };
        let mut ext = p_set & !adj[pivot];
        while ext != 0 {
            let vtx = ext.trailing_zeros() as usize;
            let bit = 1u64 << vtx;
            ext &= ext - 1;
            bk(adj, r | bit, p_set & adj[vtx], x & adj[vtx], out);
            p_set &= !bit;
            x |= bit;
        }
    }
    let mut cliques = Vec::new();
    let full = if v == 64 { !0u64 } else { (1u64 << v) - 1 };
    bk(&adj, 0, full, 0, &mut cliques);
    cliques
        .into_iter()
        .map(|c| {
            let members: Vec<u64> = (0..v).filter(|&i| c & (1 << i) != 0).map(|i| cands[i]).collect();
            Family::from_masks(*p, members)
        })
        .collect()
}

enum Job {
    Construction(Params, Label),
    Random(Params, usize),
    Exhaustive(Params),
    CrossRandom(u64, u32, u32, usize),
    CrossStars(u64, u32, u32),
}

fn run_job(job: &Job, cfg: &SuiteConfig) -> Vec<CheckReport> {
    match job {
        Job::Construction(p, label) => {
            let instance = format!("{label} {p}");
            let cp = match crate::constructions::default_params(p, *label) {
                Ok(cp) => cp,
                Err(e) => {
                    return vec![CheckReport::new("construction-sanity", &instance)
                        .metric("error", e)]
                }
            };
            let mut f = match crate::constructions::build(p, &cp) {
                Ok(f) => f,
                Err(e) => {
                    return vec![CheckReport::new("construction-sanity", &instance)
                        .metric("error", e)]
                }
            };
            if cfg.inject_fault && *label == Label::C1 {
                let masks = f.masks()[1..].to_vec();
                f = Family::from_masks(*p, masks).expect("dropping a member keeps validity");
            }
            vec![
                check_construction_sanity(&f, *label, &instance),
                check_min_covers_intersecting(&f, &instance),
                check_iterated_tau_range(&f, &instance),
                check_min_cover_count(&f, &instance),
                check_construction_size_floor(&f, *label, &instance),
                check_family_size_bound(&f, &instance),
            ]
        }
        Job::Random(p, idx) => {
            let seed = mix_seed(cfg.seed, *idx as u64);
            let instance = format!("random {p} seed={seed}");
            match random_maximal(p, seed) {
                Ok(f) => vec![
                    check_min_covers_intersecting(&f, &instance),
                    check_iterated_tau_range(&f, &instance),
                    check_min_cover_count(&f, &instance),
                    check_family_size_bound(&f, &instance),
                ],
                Err(e) => vec![CheckReport::new("min-covers-intersecting", &instance)
                    .metric("error", e)],
            }
        }
        Job::Exhaustive(p) => {
            let families = match all_maximal_families(p) {
                Ok(f) => f,
                Err(e) => {
                    return vec![CheckReport::new("min-covers-intersecting", &format!("exhaustive {p}"))
                        .metric("error", e)]
                }
            };
            let mut out = Vec::new();
            for (i, f) in families.iter().enumerate() {
                let instance = format!("exhaustive {p} idx={i}");
                out.push(check_min_covers_intersecting(f, &instance));
                out.push(check_iterated_tau_range(f, &instance));
            }
            out
        }
        Job::CrossRandom(n, k, r, idx) => {
            let seed = mix_seed(cfg.seed ^ 0xC105_5EED, *idx as u64);
            let instance = format!("cross n={n} k={k} r={r} seed={seed}");
            match random_cross_tuple(*n, *k, *r, seed) {
                Some(families) => vec![check_cross_sum(&families, &instance)],
                None => vec![CheckReport::new("cross-sum-bound", &instance)
                    .metric("error", "sampler failed to produce a tuple")],
            }
        }
        Job::CrossStars(n, k, r) => {
            let instance = format!("cross-stars n={n} k={k} r={r}");
            vec![check_cross_star_equality(*n, *k, *r, &instance)]
        }
    }
}

/// Run the whole suite. Reports come back in canonical order (check name,
/// then instance descriptor).
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut jobs: Vec<Job> = Vec::new();
    for p in &cfg.grid {
        for label in Label::ALL {
            jobs.push(Job::Construction(*p, label));
        }
    }
    if !cfg.grid.is_empty() {
        for i in 0..cfg.random_samples {
            let p = cfg.grid[i % cfg.grid.len()];
            jobs.push(Job::Random(p, i));
        }
    }
    for (n, k, t) in [(5u64, 2u32, 1u32), (6, 2, 1), (6, 3, 1), (6, 3, 2), (6, 4, 2), (6, 4, 3)] {
        if binomial(n as i64, k as i64) <= BigUint::from(cfg.exhaustive_limit) {
            if let Ok(p) = Params::new(n, k, t) {
                jobs.push(Job::Exhaustive(p));
            }
        }
    }
    let cross_cells: [(u64, u32); 2] = [(9, 3), (10, 4)];
    for (i, &(n, k)) in cross_cells.iter().cycle().take(cfg.cross_samples).enumerate() {
        let r = 2 + (i as u32 / 2) % 2;
        jobs.push(Job::CrossRandom(n, k, r, i));
    }
    for (n, k) in cross_cells {
        for r in [2, 3] {
            jobs.push(Job::CrossStars(n, k, r));
        }
    }

    let mut reports: Vec<CheckReport> =
        jobs.par_iter().flat_map_iter(|job| run_job(job, cfg)).collect();
    reports.sort_by(|a, b| a.name.cmp(b.name).then_with(|| a.instance.cmp(&b.instance)));
    reports
}

/// Aggregate counts (pass, fail, not-applicable).
pub fn tally(reports: &[CheckReport]) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for r in reports {
        match r.verdict {
            Verdict::Pass => counts.0 += 1,
            Verdict::Fail => counts.1 += 1,
            Verdict::NotApplicable => counts.2 += 1,
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_default;

    fn p(n: u64, k: u32, t: u32) -> Params {
        Params::new(n, k, t).unwrap()
    }

    #[test]
    fn construction_checks_pass_at_sample_cell() {
        let params = p(12, 4, 1);
        for label in Label::ALL {
            let f = build_default(&params, label).unwrap();
            let inst = format!("{label} {params}");
            assert_eq!(check_construction_sanity(&f, label, &inst).verdict, Verdict::Pass);
            assert_eq!(check_min_covers_intersecting(&f, &inst).verdict, Verdict::Pass);
            assert_eq!(check_iterated_tau_range(&f, &inst).verdict, Verdict::Pass);
            assert_eq!(check_min_cover_count(&f, &inst).verdict, Verdict::Pass);
            assert_eq!(check_construction_size_floor(&f, label, &inst).verdict, Verdict::Pass);
        }
    }

    #[test]
    fn window_structure_is_detected_on_second_construction() {
        let params = p(12, 4, 1);
        let f = build_default(&params, Label::C2).unwrap();
        let covers = min_covers(&f).unwrap();
        let (frame, window) = window_structure(&covers).expect("structure must be found");
        assert_eq!(frame.count_ones(), params.k + 2);
        assert_eq!(window.count_ones(), params.t + 2);
        // default placement: frame {1..6}, window {1,2,3}
        assert_eq!(frame, 0b111111);
        assert_eq!(window, 0b000111);
    }

    #[test]
    fn zone_structure_is_detected_on_third_construction() {
        let params = p(12, 4, 1);
        let f = build_default(&params, Label::C3).unwrap();
        let covers = min_covers(&f).unwrap();
        assert_eq!(zone_structure(&covers), Some(0b11111));
    }

    #[test]
    fn size_bound_check_applies_above_gate() {
        // star at element 1 with n = 13 >= (k-t)(k-t+1)+t = 13
        let params = p(13, 4, 1);
        let star: Vec<u64> = k_subset_masks(13, 4)
            .unwrap()
            .into_iter()
            .filter(|m| m & 1 != 0)
            .collect();
        let f = Family::from_masks(params, star).unwrap();
        let rep = check_family_size_bound(&f, "star n=13");
        assert_eq!(rep.verdict, Verdict::Pass);
        // below the gate the verdict is not-applicable
        let params = p(12, 4, 1);
        let f = build_default(&params, Label::C3).unwrap();
        let rep = check_family_size_bound(&f, "c3 n=12");
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn star_equality_cells() {
        assert_eq!(check_cross_star_equality(9, 3, 3, "t").verdict, Verdict::Pass);
        assert_eq!(check_cross_star_equality(10, 4, 3, "t").verdict, Verdict::Pass);
        assert_eq!(check_cross_star_equality(9, 3, 2, "t").verdict, Verdict::Pass);
    }

    #[test]
    fn fault_injection_trips_sanity() {
        let cfg = SuiteConfig {
            grid: vec![p(9, 4, 1)],
            random_samples: 0,
            cross_samples: 0,
            exhaustive_limit: 0,
            inject_fault: true,
            ..SuiteConfig::default()
        };
        let reports = run_suite(&cfg);
        let (_, fails, _) = tally(&reports);
        assert!(fails > 0, "corrupted construction must fail at least one check");
        assert!(reports
            .iter()
            .any(|r| r.name == "construction-sanity" && r.verdict == Verdict::Fail));
    }

    #[test]
    fn report_lines_are_stable() {
        let params = p(12, 4, 1);
        let f = build_default(&params, Label::C1).unwrap();
        let rep = check_min_covers_intersecting(&f, "c1 n=12 k=4 t=1");
        let line = rep.line();
        assert!(line.starts_with("check=min-covers-intersecting instance=c1 n=12 k=4 t=1 verdict=pass"));
        assert!(line.contains("tau=3"));
    }

    #[test]
    fn small_suite_is_clean_and_deterministic() {
        let cfg = SuiteConfig {
            grid: vec![p(9, 4, 1), p(12, 4, 1)],
            random_samples: 12,
            cross_samples: 8,
            exhaustive_limit: 16,
            ..SuiteConfig::default()
        };
        let a = run_suite(&cfg);
        let b = run_suite(&cfg);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.line(), y.line());
        }
        let (pass, fail, _) = tally(&a);
        assert_eq!(fail, 0, "failures: {:?}", a.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.line()).collect::<Vec<_>>());
        assert!(pass > 0);
    }
}
