//! Families of k-sets and the exact covering-number calculus: intersection
//! predicates, minimum t-covers, iterated covering numbers, maximality, and
//! deterministic saturation.

use crate::combinat::{k_subsets_lex, subsets_of_mask};
use crate::error::{Error, Result};
use crate::ground::{KSet, Params};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// A deduplicated family of k-subsets of `[n]`, sorted by bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    params: Params,
    members: Vec<u64>,
}

impl Family {
    /// Build from raw masks; sorts, deduplicates, and checks cardinality.
    pub fn from_masks(params: Params, mut members: Vec<u64>) -> Result<Self> {
        params.require_bitmask()?;
        let n = params.n_small();
        for &m in &members {
            if n < 64 && m >> n != 0 {
                return Err(Error::InvalidSet(format!("member {m:#x} outside [{n}]")));
            }
            if m.count_ones() != params.k {
                return Err(Error::InvalidSet(format!(
                    "member {m:#x} has {} elements, expected {}",
                    m.count_ones(),
                    params.k
                )));
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { params, members })
    }

    pub fn from_sets(params: Params, sets: &[KSet]) -> Result<Self> {
        Family::from_masks(params, sets.iter().map(|s| s.mask()).collect())
    }

    pub fn empty(params: Params) -> Result<Self> {
        Family::from_masks(params, Vec::new())
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn sets(&self) -> Vec<KSet> {
        let n = self.params.n_small();
        self.members
            .iter()
            .map(|&m| KSet::from_mask(n, m).expect("members validated"))
            .collect()
    }

    /// Image under a permutation of the ground set.
    pub fn relabel(&self, perm: &[u32]) -> Result<Family> {
        let n = self.params.n_small();
        let mut out = Vec::with_capacity(self.members.len());
        for &m in &self.members {
            out.push(KSet::from_mask(n, m)?.relabel(perm)?.mask());
        }
        Family::from_masks(self.params, out)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:", self.params)?;
        for s in self.sets() {
            write!(f, " {s}")?;
        }
        write!(f, "]")
    }
}

/// The complete collection of minimum t-covers of a family, each of size
/// `size` (the covering number of the source family).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFamily {
    params: Params,
    size: u32,
    covers: Vec<u64>,
}

impl CoverFamily {
    pub fn params(&self) -> Params {
        self.params
    }

    /// Cover cardinality, i.e. the covering number of the source family.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn len(&self) -> usize {
        self.covers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covers.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.covers
    }

    pub fn sets(&self) -> Vec<KSet> {
        let n = self.params.n_small();
        self.covers
            .iter()
            .map(|&m| KSet::from_mask(n, m).expect("covers validated"))
            .collect()
    }

    /// Reinterpret the covers as a family of `size`-sets on the same ground
    /// set, keeping the intersection threshold t.
    pub fn as_family(&self) -> Result<Family> {
        let p = Params::new(self.params.n, self.size, self.params.t)?;
        Family::from_masks(p, self.covers.clone())
    }
}

/// True iff every pair of members meets in at least t elements. Empty and
/// singleton families qualify.
pub fn is_t_intersecting(f: &Family) -> bool {
    let t = f.params().t;
    let ms = f.masks();
    for (i, &a) in ms.iter().enumerate() {
        for &b in &ms[i + 1..] {
            if (a & b).count_ones() < t {
                return false;
            }
        }
    }
    true
}

/// True iff `|F ∩ G| >= t` for every F, G drawn from distinct families.
pub fn are_cross_intersecting(families: &[Family], t: u32) -> Result<bool> {
    if let Some(first) = families.first() {
        for f in families {
            if f.params().n != first.params().n {
                return Err(Error::MismatchedGroundSet(first.params().n, f.params().n));
            }
        }
    }
    for (i, f) in families.iter().enumerate() {
        for g in &families[i + 1..] {
            for &a in f.masks() {
                for &b in g.masks() {
                    if (a & b).count_ones() < t {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// True iff `|S ∩ F| >= t` for every member F.
pub fn is_t_cover(cover: &KSet, f: &Family) -> bool {
    let t = f.params().t;
    let s = cover.mask();
    f.masks().iter().all(|&m| (s & m).count_ones() >= t)
}

/// Depth-first search for a t-cover of size at most `size`, branching on the
/// elements an uncovered member could contribute. `forbidden` masks out
/// elements the cover must avoid. Returns one cover (padded later if short).
fn find_cover(members: &[u64], t: u32, size: u32, partial: u64, forbidden: u64) -> Option<u64> {
    // pick the uncovered member with the fewest usable extension elements
    let mut worst: Option<(u32, u64)> = None;
    for &m in members {
        let have = (m & partial).count_ones();
        if have >= t {
            continue;
        }
        let usable = m & !partial & !forbidden;
        let avail = usable.count_ones();
        let need = t - have;
        if need > avail || partial.count_ones() + need > size {
            return None;
        }
        if worst.is_none_or(|(a, _)| avail < a) {
            worst = Some((avail, usable));
        }
    }
    let Some((_, usable)) = worst else {
        return Some(partial); // everything covered
    };
    let mut pool = usable;
    let mut dropped = 0u64;
    while pool != 0 {
        let bit = pool & pool.wrapping_neg();
        pool &= pool - 1;
        // forbid earlier siblings: covers are partitioned by their lowest
        // element drawn from this member's pool
        if let Some(found) = find_cover(members, t, size, partial | bit, forbidden | dropped) {
            return Some(found);
        }
        dropped |= bit;
    }
    None
}

/// Raw-mask cover search for the solver: any t-cover of `members` with at
/// most `size` elements.
pub(crate) fn cover_mask_of_size(members: &[u64], t: u32, size: u32) -> Option<u64> {
    find_cover(members, t, size, 0, 0)
}

/// Any t-cover of `f` with at most `size` elements, or None. The result is
/// padded with unused elements up to exactly `size`.
pub fn cover_of_size(f: &Family, size: u32) -> Result<Option<KSet>> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = f.params().n_small();
    let t = f.params().t;
    match find_cover(f.masks(), t, size, 0, 0) {
        None => Ok(None),
        Some(mut mask) => {
            let mut e = 0;
            while mask.count_ones() < size {
                debug_assert!(e < n);
                mask |= 1u64 << e;
                e += 1;
            }
            Ok(Some(KSet::from_mask(n, mask)?))
        }
    }
}

/// The t-covering number: least s such that some s-subset of `[n]` meets
/// every member in at least t elements. Requires a non-empty t-intersecting
/// family, which guarantees `t <= result <= k`.
pub fn covering_number(f: &Family) -> Result<u32> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !is_t_intersecting(f) {
        return Err(Error::NotIntersecting);
    }
    covering_number_unchecked(f)
}

/// Covering number without the t-intersecting gate; the minimum is still
/// well-defined (the union of t members is always a cover at size <= tk).
pub fn covering_number_unchecked(f: &Family) -> Result<u32> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let t = f.params().t;
    for s in t..=(f.params().n_small()) {
        if find_cover(f.masks(), t, s, 0, 0).is_some() {
            return Ok(s);
        }
    }
    unreachable!("the full ground set covers every family");
}

/// Complete enumeration of all minimum t-covers. Branches on the elements of
/// an uncovered member, forbidding earlier siblings so each cover is emitted
/// exactly once.
fn enumerate_covers(members: &[u64], t: u32, size: u32, partial: u64, forbidden: u64, out: &mut Vec<u64>) {
    let mut worst: Option<(u32, u64)> = None;
    for &m in members {
        let have = (m & partial).count_ones();
        if have >= t {
            continue;
        }
        let usable = m & !partial & !forbidden;
        let avail = usable.count_ones();
        let need = t - have;
        if need > avail || partial.count_ones() + need > size {
            return;
        }
        if worst.is_none_or(|(a, _)| avail < a) {
            worst = Some((avail, usable));
        }
    }
    let Some((_, usable)) = worst else {
        // covered; minimality of `size` ensures we only get here at full size
        debug_assert_eq!(partial.count_ones(), size);
        out.push(partial);
        return;
    };
    let mut pool = usable;
    let mut dropped = 0u64;
    while pool != 0 {
        let bit = pool & pool.wrapping_neg();
        pool &= pool - 1;
        enumerate_covers(members, t, size, partial | bit, forbidden | dropped, out);
        dropped |= bit;
    }
}

/// All minimum t-covers of `f`.
pub fn min_covers(f: &Family) -> Result<CoverFamily> {
    let tau = covering_number(f)?;
    let mut covers = Vec::new();
    enumerate_covers(f.masks(), f.params().t, tau, 0, 0, &mut covers);
    covers.sort_unstable();
    covers.dedup();
    Ok(CoverFamily { params: f.params(), size: tau, covers })
}

/// The covering number, the covering number of the minimum-cover collection,
/// and whether that collection is itself t-intersecting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IteratedTau {
    pub tau: u32,
    pub tau_of_covers: u32,
    /// False is possible when the input family is not maximal; the covering
    /// number of the cover collection is still reported.
    pub covers_intersecting: bool,
}

/// `(tau_t(f), tau_t(T_t(f)))` where the minimum covers are treated as a
/// family of tau-sets under the same threshold t.
pub fn iterated_tau(f: &Family) -> Result<IteratedTau> {
    let covers = min_covers(f)?;
    let cover_family = covers.as_family()?;
    let covers_intersecting = is_t_intersecting(&cover_family);
    let tau_of_covers = covering_number_unchecked(&cover_family)?;
    Ok(IteratedTau { tau: covers.size(), tau_of_covers, covers_intersecting })
}

/// True iff some t-set lies in every member; equivalent to covering number t.
pub fn is_trivial(f: &Family) -> Result<bool> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !is_t_intersecting(f) {
        return Err(Error::NotIntersecting);
    }
    let common = f.masks().iter().fold(!0u64, |acc, &m| acc & m);
    Ok(common.count_ones() >= f.params().t)
}

/// True iff no k-set outside the family meets every member in >= t elements.
pub fn is_maximal(f: &Family) -> Result<bool> {
    if !is_t_intersecting(f) {
        return Err(Error::NotIntersecting);
    }
    let p = f.params();
    let t = p.t;
    for cand in crate::combinat::k_subsets(p.n_small(), p.k)? {
        let c = cand.mask();
        if f.contains_mask(c) {
            continue;
        }
        if f.masks().iter().all(|&m| (m & c).count_ones() >= t) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn saturate_order(f: &Family, order: &[u64]) -> Result<Family> {
    if !is_t_intersecting(f) {
        return Err(Error::NotIntersecting);
    }
    let t = f.params().t;
    let mut members = f.masks().to_vec();
    // one pass suffices: a candidate rejected against a subfamily stays
    // rejected as the family grows
    for &c in order {
        if members.contains(&c) {
            continue;
        }
        if members.iter().all(|&m| (m & c).count_ones() >= t) {
            members.push(c);
        }
    }
    Family::from_masks(f.params(), members)
}

/// Deterministic completion to a maximal t-intersecting family: candidates
/// are scanned in lexicographic order of their element lists and added
/// greedily whenever t-intersection is preserved.
pub fn saturate(f: &Family) -> Result<Family> {
    let p = f.params();
    let order = k_subsets_lex(p.n_small(), p.k)?;
    saturate_order(f, &order)
}

/// Saturation with a seeded shuffle of the candidate order; used to sample
/// diverse maximal families reproducibly.
pub fn saturate_seeded(f: &Family, seed: u64) -> Result<Family> {
    let p = f.params();
    let mut order = k_subsets_lex(p.n_small(), p.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    saturate_order(f, &order)
}

/// Exhaustive-scan covering number: tries every subset of each size. Meant
/// for cross-checking the branch-and-prune search on small ground sets.
pub fn covering_number_bruteforce(f: &Family) -> Result<u32> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let p = f.params();
    let full = if p.n_small() == 64 { !0u64 } else { (1u64 << p.n_small()) - 1 };
    for s in p.t..=p.n_small() {
        if subsets_of_mask(full, s)
            .into_iter()
            .any(|c| f.masks().iter().all(|&m| (m & c).count_ones() >= p.t))
        {
            return Ok(s);
        }
    }
    unreachable!()
}

/// Exhaustive-scan enumeration of minimum covers, for cross-checking.
pub fn min_covers_bruteforce(f: &Family) -> Result<Vec<u64>> {
    let p = f.params();
    let tau = covering_number_bruteforce(f)?;
    let full = if p.n_small() == 64 { !0u64 } else { (1u64 << p.n_small()) - 1 };
    Ok(subsets_of_mask(full, tau)
        .into_iter()
        .filter(|&c| f.masks().iter().all(|&m| (m & c).count_ones() >= p.t))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::k_subsets;
    use proptest::prelude::*;

    fn fam(n: u64, k: u32, t: u32, sets: &[&[u32]]) -> Family {
        let p = Params::new(n, k, t).unwrap();
        let masks = sets
            .iter()
            .map(|s| KSet::from_elements(n as u32, s).unwrap().mask())
            .collect();
        Family::from_masks(p, masks).unwrap()
    }

    fn star(n: u64, k: u32, t: u32, center: u32) -> Family {
        let p = Params::new(n, k, t).unwrap();
        let masks = k_subsets(n as u32, k)
            .unwrap()
            .filter(|s| s.contains(center))
            .map(|s| s.mask())
            .collect();
        Family::from_masks(p, masks).unwrap()
    }

    #[test]
    fn intersection_predicate() {
        let triangle = fam(5, 2, 1, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert!(is_t_intersecting(&triangle));
        let disjoint = fam(5, 2, 1, &[&[1, 2], &[3, 4]]);
        assert!(!is_t_intersecting(&disjoint));
        let empty = Family::empty(Params::new(5, 2, 1).unwrap()).unwrap();
        assert!(is_t_intersecting(&empty));
        let single = fam(5, 2, 1, &[&[4, 5]]);
        assert!(is_t_intersecting(&single));
    }

    #[test]
    fn cross_intersection_predicate() {
        let s1 = star(5, 2, 1, 1);
        let s2 = star(5, 2, 1, 1);
        assert!(are_cross_intersecting(&[s1, s2], 1).unwrap());
        let a = fam(5, 2, 1, &[&[1, 2]]);
        let b = fam(5, 2, 1, &[&[3, 4]]);
        assert!(!are_cross_intersecting(&[a, b], 1).unwrap());
        let c = fam(5, 2, 1, &[&[1, 2]]);
        let d = fam(6, 2, 1, &[&[1, 2]]);
        assert!(are_cross_intersecting(&[c, d], 1).is_err());
    }

    #[test]
    fn cover_predicate() {
        let s = star(5, 2, 1, 1);
        assert!(is_t_cover(&KSet::from_elements(5, &[1]).unwrap(), &s));
        let triangle = fam(5, 2, 1, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert!(!is_t_cover(&KSet::from_elements(5, &[4, 5]).unwrap(), &triangle));
    }

    #[test]
    fn covering_numbers() {
        assert_eq!(covering_number(&star(5, 2, 1, 1)).unwrap(), 1);
        let triangle = fam(5, 2, 1, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert_eq!(covering_number(&triangle).unwrap(), 2);
        assert_eq!(covering_number_bruteforce(&triangle).unwrap(), 2);
        let empty = Family::empty(Params::new(5, 2, 1).unwrap()).unwrap();
        assert!(covering_number(&empty).is_err());
    }

    #[test]
    fn min_cover_enumeration() {
        let s = star(5, 2, 1, 1);
        let covers = min_covers(&s).unwrap();
        assert_eq!(covers.size(), 1);
        assert_eq!(covers.masks(), &[1u64]);

        let triangle = fam(5, 2, 1, &[&[1, 2], &[1, 3], &[2, 3]]);
        let covers = min_covers(&triangle).unwrap();
        assert_eq!(covers.size(), 2);
        let lists: Vec<Vec<u32>> = covers.sets().iter().map(|s| s.elements()).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(covers.masks(), min_covers_bruteforce(&triangle).unwrap().as_slice());
    }

    #[test]
    fn triviality() {
        assert!(is_trivial(&star(5, 2, 1, 1)).unwrap());
        let triangle = fam(5, 2, 1, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert!(!is_trivial(&triangle).unwrap());
    }

    #[test]
    fn maximality() {
        assert!(is_maximal(&star(9, 3, 1, 1)).unwrap());
        let lone = fam(9, 3, 1, &[&[1, 2, 3]]);
        assert!(!is_maximal(&lone).unwrap());
    }

    #[test]
    fn saturation_is_lex_greedy() {
        let seed = fam(5, 2, 1, &[&[1, 2]]);
        let sat = saturate(&seed).unwrap();
        let lists: Vec<Vec<u32>> = sat.sets().iter().map(|s| s.elements()).collect();
        // lex scan adds the star at 1, after which every candidate avoiding 1
        // misses one of the chosen pairs
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![1, 5]]);
        assert!(is_maximal(&sat).unwrap());

        let s = star(9, 3, 1, 1);
        assert_eq!(saturate(&s).unwrap(), s);
    }

    #[test]
    fn seeded_saturation_is_maximal_and_reproducible() {
        let seed_family = fam(10, 4, 1, &[&[1, 2, 3, 4]]);
        for seed in 0..10u64 {
            let a = saturate_seeded(&seed_family, seed).unwrap();
            let b = saturate_seeded(&seed_family, seed).unwrap();
            assert_eq!(a, b);
            assert!(is_t_intersecting(&a));
            assert!(is_maximal(&a).unwrap());
        }
    }

    /// Random small families for oracle cross-checks.
    fn random_family(n: u64, k: u32, t: u32, seed: u64) -> Family {
        use rand::Rng;
        let p = Params::new(n, k, t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<u64> = k_subsets(n as u32, k).unwrap().map(|s| s.mask()).collect();
        let base = all[rng.gen_range(0..all.len())];
        let mut members = vec![base];
        for &c in &all {
            if members.iter().all(|&m| (m & c).count_ones() >= t) && rng.gen_bool(0.4) {
                members.push(c);
            }
        }
        Family::from_masks(p, members).unwrap()
    }

    #[test]
    fn branch_and_prune_matches_bruteforce() {
        for seed in 0..40u64 {
            let f = random_family(9, 3, 1, seed);
            assert_eq!(
                covering_number(&f).unwrap(),
                covering_number_bruteforce(&f).unwrap(),
                "seed {seed}"
            );
            let mine = min_covers(&f).unwrap();
            assert_eq!(
                mine.masks(),
                min_covers_bruteforce(&f).unwrap().as_slice(),
                "seed {seed}"
            );
        }
        for seed in 0..20u64 {
            let f = random_family(10, 4, 2, seed);
            assert_eq!(
                covering_number(&f).unwrap(),
                covering_number_bruteforce(&f).unwrap(),
                "seed {seed}"
            );
            let mine = min_covers(&f).unwrap();
            assert_eq!(
                mine.masks(),
                min_covers_bruteforce(&f).unwrap().as_slice(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn no_smaller_cover_exists() {
        // every minimum cover passes is_t_cover and no (tau-1)-subset does
        for seed in 0..15u64 {
            let f = random_family(8, 3, 1, seed);
            let covers = min_covers(&f).unwrap();
            for c in covers.sets() {
                assert!(is_t_cover(&c, &f));
            }
            if covers.size() > 1 {
                let full = (1u64 << 8) - 1;
                for c in subsets_of_mask(full, covers.size() - 1) {
                    let s = KSet::from_mask(8, c).unwrap();
                    assert!(!is_t_cover(&s, &f));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn saturate_is_idempotent(seed in 0u64..5000) {
            let base = random_family(8, 3, 1, seed);
            let once = saturate(&base).unwrap();
            let twice = saturate(&once).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(is_maximal(&once).unwrap());
        }

        #[test]
        fn trivial_iff_covering_number_t(seed in 0u64..5000) {
            let f = saturate(&random_family(8, 3, 1, seed)).unwrap();
            let trivial = is_trivial(&f).unwrap();
            let tau = covering_number(&f).unwrap();
            prop_assert_eq!(trivial, tau == 1);
        }
    }
}
