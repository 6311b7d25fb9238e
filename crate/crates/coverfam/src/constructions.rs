//! Builders for the three candidate extremal families: t-intersecting
//! k-uniform families with t-covering number t+2.
//!
//! Each builder enumerates all of `C([n], k)` and filters by a single audited
//! membership predicate; an independent class-by-class generator is provided
//! behind the same interface as a cross-check.

use crate::combinat::{k_subsets, subsets_of_mask};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::formulas::Label;
use crate::ground::{KSet, Params};

/// Validated parameter bundle for one construction variant.
///
/// Variant 1 is anchored by two t-sets sharing all but one element (`base`
/// and `twin`), two disjoint (k-t)-blocks (`left`, `right`), and a marked
/// element `pivot` of `right`. Variant 2 lives inside a (k+2)-set `frame`
/// with a distinguished (t+2)-subset `window`. Variant 3 concentrates on a
/// (t+4)-set `zone`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionParams {
    C1 { base: KSet, twin: KSet, left: KSet, right: KSet, pivot: u32 },
    C2 { frame: KSet, window: KSet },
    C3 { zone: KSet },
}

impl ConstructionParams {
    pub fn label(&self) -> Label {
        match self {
            ConstructionParams::C1 { .. } => Label::C1,
            ConstructionParams::C2 { .. } => Label::C2,
            ConstructionParams::C3 { .. } => Label::C3,
        }
    }

    /// Check every structural invariant of the variant under `p`.
    pub fn validate(&self, p: &Params) -> Result<()> {
        require_build_range(p)?;
        p.require_bitmask()?;
        let (k, t) = (p.k, p.t);
        match self {
            ConstructionParams::C1 { base, twin, left, right, pivot } => {
                if base.card() != t || twin.card() != t {
                    return Err(Error::InvalidConstruction("base and twin must be t-sets".into()));
                }
                if base.intersection_size(twin) != t - 1 {
                    return Err(Error::InvalidConstruction(
                        "base and twin must share exactly t-1 elements".into(),
                    ));
                }
                if left.card() != k - t || right.card() != k - t {
                    return Err(Error::InvalidConstruction(
                        "left and right must be (k-t)-sets".into(),
                    ));
                }
                let blocks = left.mask() | right.mask();
                if base.mask() & blocks != 0 {
                    return Err(Error::InvalidConstruction(
                        "base must avoid both blocks".into(),
                    ));
                }
                if twin.mask() & blocks != 0 || left.mask() & right.mask() != 0 {
                    return Err(Error::InvalidConstruction(
                        "twin, left, right must be pairwise disjoint".into(),
                    ));
                }
                if !right.contains(*pivot) {
                    return Err(Error::InvalidConstruction("pivot must lie in right".into()));
                }
                Ok(())
            }
            ConstructionParams::C2 { frame, window } => {
                if frame.card() != k + 2 {
                    return Err(Error::InvalidConstruction("frame must be a (k+2)-set".into()));
                }
                if window.card() != t + 2 || !window.is_subset_of(frame) {
                    return Err(Error::InvalidConstruction(
                        "window must be a (t+2)-subset of frame".into(),
                    ));
                }
                Ok(())
            }
            ConstructionParams::C3 { zone } => {
                if zone.card() != t + 4 {
                    return Err(Error::InvalidConstruction("zone must be a (t+4)-set".into()));
                }
                Ok(())
            }
        }
    }

    /// Apply a ground-set permutation to every component.
    pub fn relabel(&self, perm: &[u32]) -> Result<ConstructionParams> {
        Ok(match self {
            ConstructionParams::C1 { base, twin, left, right, pivot } => ConstructionParams::C1 {
                base: base.relabel(perm)?,
                twin: twin.relabel(perm)?,
                left: left.relabel(perm)?,
                right: right.relabel(perm)?,
                pivot: perm[(*pivot - 1) as usize],
            },
            ConstructionParams::C2 { frame, window } => ConstructionParams::C2 {
                frame: frame.relabel(perm)?,
                window: window.relabel(perm)?,
            },
            ConstructionParams::C3 { zone } => {
                ConstructionParams::C3 { zone: zone.relabel(perm)? }
            }
        })
    }
}

fn require_build_range(p: &Params) -> Result<()> {
    if p.n <= 2 * p.k as u64 {
        return Err(Error::Precondition(format!("need n > 2k, got n={} k={}", p.n, p.k)));
    }
    if p.k < p.t + 3 {
        return Err(Error::Precondition(format!("need k >= t+3, got k={} t={}", p.k, p.t)));
    }
    Ok(())
}

fn range_set(n: u32, from: u32, to: u32) -> KSet {
    let elements: Vec<u32> = (from..=to).collect();
    KSet::from_elements(n, &elements).expect("contiguous block inside [n]")
}

/// Canonical placement: blocks packed contiguously from element 1.
pub fn default_params(p: &Params, label: Label) -> Result<ConstructionParams> {
    require_build_range(p)?;
    p.require_bitmask()?;
    let n = p.n_small();
    let (k, t) = (p.k, p.t);
    let cp = match label {
        Label::C1 => {
            // base = {1..t}, twin = {1..t-1, t+1}, then the two blocks
            let base = range_set(n, 1, t);
            let mut twin_elems: Vec<u32> = (1..t).collect();
            twin_elems.push(t + 1);
            let twin = KSet::from_elements(n, &twin_elems)?;
            ConstructionParams::C1 {
                base,
                twin,
                left: range_set(n, t + 2, k + 1),
                right: range_set(n, k + 2, 2 * k - t + 1),
                pivot: k + 2,
            }
        }
        Label::C2 => ConstructionParams::C2 {
            frame: range_set(n, 1, k + 2),
            window: range_set(n, 1, t + 2),
        },
        Label::C3 => ConstructionParams::C3 { zone: range_set(n, 1, t + 4) },
    };
    cp.validate(p)?;
    Ok(cp)
}

/// The three exceptional members of variant 1.
fn c1_specials(base: &KSet, twin: &KSet, left: &KSet, right: &KSet, pivot: u32) -> [u64; 3] {
    let pivot_bit = 1u64 << (pivot - 1);
    [
        twin.mask() | left.mask(),
        twin.mask() | right.mask(),
        (base.mask() & twin.mask()) | left.mask() | pivot_bit,
    ]
}

/// Membership predicate for variant 1, exceptional members aside.
fn c1_predicate(m: u64, base: &KSet, twin: &KSet, left: &KSet, right: &KSet, pivot: u32) -> bool {
    let anchor = base.mask() | twin.mask();
    let pivot_bit = 1u64 << (pivot - 1);
    // contains base but not the extra twin element, and meets both blocks
    let class_spread =
        m & anchor == base.mask() && m & left.mask() != 0 && m & right.mask() != 0;
    // contains base and twin entirely, and meets left or the pivot
    let class_anchor = m & anchor == anchor && m & (left.mask() | pivot_bit) != 0;
    class_spread || class_anchor
}

fn c2_predicate(m: u64, frame: &KSet, window: &KSet, t: u32) -> bool {
    let in_window = (m & window.mask()).count_ones();
    if in_window == t + 2 {
        return true; // window fully inside
    }
    if in_window == t + 1 {
        return m & (frame.mask() & !window.mask()) != 0;
    }
    if in_window == t {
        return m & !frame.mask() == 0; // confined to the frame
    }
    false
}

fn c3_predicate(m: u64, zone: &KSet, t: u32) -> bool {
    (m & zone.mask()).count_ones() >= t + 2
}

/// Build the family by scanning every k-set against the variant's predicate.
pub fn build(p: &Params, cp: &ConstructionParams) -> Result<Family> {
    cp.validate(p)?;
    let t = p.t;
    let mut members: Vec<u64> = Vec::new();
    match cp {
        ConstructionParams::C1 { base, twin, left, right, pivot } => {
            for s in k_subsets(p.n_small(), p.k)? {
                if c1_predicate(s.mask(), base, twin, left, right, *pivot) {
                    members.push(s.mask());
                }
            }
            members.extend_from_slice(&c1_specials(base, twin, left, right, *pivot));
        }
        ConstructionParams::C2 { frame, window } => {
            for s in k_subsets(p.n_small(), p.k)? {
                if c2_predicate(s.mask(), frame, window, t) {
                    members.push(s.mask());
                }
            }
        }
        ConstructionParams::C3 { zone } => {
            for s in k_subsets(p.n_small(), p.k)? {
                if c3_predicate(s.mask(), zone, t) {
                    members.push(s.mask());
                }
            }
        }
    }
    Family::from_masks(*p, members)
}

/// Build the same family class by class, without scanning `C([n], k)`.
/// Independent of the predicate route; used to cross-check it.
pub fn build_classwise(p: &Params, cp: &ConstructionParams) -> Result<Family> {
    cp.validate(p)?;
    let n = p.n_small();
    let full = if n == 64 { !0u64 } else { (1u64 << n) - 1 };
    let (k, t) = (p.k, p.t);
    let mut members: Vec<u64> = Vec::new();
    match cp {
        ConstructionParams::C1 { base, twin, left, right, pivot } => {
            let anchor = base.mask() | twin.mask();
            let pivot_bit = 1u64 << (pivot - 1);
            // spread class: base plus k-t free elements hitting both blocks
            let pool = full & !anchor;
            for rest in subsets_of_mask(pool, k - t) {
                if rest & left.mask() != 0 && rest & right.mask() != 0 {
                    members.push(base.mask() | rest);
                }
            }
            // anchor class: base+twin plus k-t-1 free elements hitting left or pivot
            for rest in subsets_of_mask(pool, k - t - 1) {
                if rest & (left.mask() | pivot_bit) != 0 {
                    members.push(anchor | rest);
                }
            }
            members.extend_from_slice(&c1_specials(base, twin, left, right, *pivot));
        }
        ConstructionParams::C2 { frame, window } => {
            let outside = full & !window.mask();
            let rim = frame.mask() & !window.mask();
            // window-complete members
            for rest in subsets_of_mask(outside, k - t - 2) {
                members.push(window.mask() | rest);
            }
            // members meeting the window in t+1 points and the rim somewhere
            for w in subsets_of_mask(window.mask(), t + 1) {
                for rest in subsets_of_mask(outside, k - t - 1) {
                    if rest & rim != 0 {
                        members.push(w | rest);
                    }
                }
            }
            // members inside the frame meeting the window in exactly t points
            for w in subsets_of_mask(window.mask(), t) {
                for rest in subsets_of_mask(rim, k - t) {
                    members.push(w | rest);
                }
            }
        }
        ConstructionParams::C3 { zone } => {
            let outside = full & !zone.mask();
            let top = (t + 4).min(k);
            for inside in (t + 2)..=top {
                for z in subsets_of_mask(zone.mask(), inside) {
                    for rest in subsets_of_mask(outside, k - inside) {
                        members.push(z | rest);
                    }
                }
            }
        }
    }
    Family::from_masks(*p, members)
}

/// Build with the canonical default placement.
pub fn build_default(p: &Params, label: Label) -> Result<Family> {
    build(p, &default_params(p, label)?)
}
