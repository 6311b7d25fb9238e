//! Counting primitives: exact binomial coefficients and subset enumeration.

use crate::error::{Error, Result};
use crate::ground::KSet;
use num_bigint::BigUint;

/// Exact binomial coefficient `C(a, b)` with the convention that any
/// out-of-range argument (`b < 0`, `b > a`, `a < 0`) yields 0.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < 0 || b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut result = BigUint::from(1u32);
    for i in 0..b {
        // C(a, i+1) = C(a, i) * (a - i) / (i + 1), exact at every step
        result = result * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    result
}

/// `binomial` clamped to u64; panics on overflow. For desk-scale counts only.
pub fn binomial_u64(a: i64, b: i64) -> u64 {
    let v = binomial(a, b);
    let digits = v.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => panic!("binomial({a},{b}) does not fit in u64"),
    }
}

/// Next bitmask with the same popcount in ascending numeric order.
fn next_same_popcount(mask: u64, n: u32) -> Option<u64> {
    if mask == 0 {
        return None;
    }
    // Gosper's hack, lifted to u128 so the top bits cannot wrap.
    let m = mask as u128;
    let c = m & m.wrapping_neg();
    let r = m + c;
    let next = (((m ^ r) >> 2) / c) | r;
    let limit = 1u128 << n;
    if next >= limit {
        None
    } else {
        Some(next as u64)
    }
}

/// All k-subsets of `[n]` in ascending bitmask order.
///
/// Yields exactly `C(n, k)` sets; `(n, 0)` yields the empty set once.
pub fn k_subsets(n: u32, k: u32) -> Result<impl Iterator<Item = KSet>> {
    if n as u64 > crate::ground::MAX_GROUND {
        return Err(Error::GroundSetTooLarge(n as u64));
    }
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds n = {n}")));
    }
    let first = if k == 0 { 0u64 } else { (1u64 << k) - 1 };
    let mut cur = Some(first);
    Ok(std::iter::from_fn(move || {
        let mask = cur?;
        cur = if k == 0 { None } else { next_same_popcount(mask, n) };
        Some(KSet::from_mask(n, mask).expect("enumeration stays within [n]"))
    }))
}

/// All k-subsets of `[n]` as raw masks, ascending. Convenience for hot paths.
pub fn k_subset_masks(n: u32, k: u32) -> Result<Vec<u64>> {
    Ok(k_subsets(n, k)?.map(|s| s.mask()).collect())
}

/// All k-subsets of `[n]` in lexicographic order of their ascending element
/// lists ({1,2} < {1,3} < {1,4} < {2,3} ...), as masks.
pub fn k_subsets_lex(n: u32, k: u32) -> Result<Vec<u64>> {
    if n as u64 > crate::ground::MAX_GROUND {
        return Err(Error::GroundSetTooLarge(n as u64));
    }
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds n = {n}")));
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(0);
        return Ok(out);
    }
    let k = k as usize;
    let mut idx: Vec<u32> = (1..=k as u32).collect();
    loop {
        let mut mask = 0u64;
        for &e in &idx {
            mask |= 1u64 << (e - 1);
        }
        out.push(mask);
        // lexicographic successor
        let mut i = k;
        while i > 0 && idx[i - 1] == n - (k - i) as u32 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(out)
}

/// All subsets of the set encoded by `pool` with exactly `r` elements.
pub fn subsets_of_mask(pool: u64, r: u32) -> Vec<u64> {
    let elems: Vec<u32> = {
        let mut v = Vec::new();
        let mut m = pool;
        while m != 0 {
            v.push(m.trailing_zeros());
            m &= m - 1;
        }
        v
    };
    let mut out = Vec::new();
    if r as usize > elems.len() {
        return out;
    }
    if r == 0 {
        out.push(0);
        return out;
    }
    let r = r as usize;
    let mut choose = vec![0usize; r];
    for (i, c) in choose.iter_mut().enumerate() {
        *c = i;
    }
    loop {
        let mut mask = 0u64;
        for &c in &choose {
            mask |= 1u64 << elems[c];
        }
        out.push(mask);
        let mut i = r;
        while i > 0 && choose[i - 1] == elems.len() - (r - i) - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        choose[i - 1] += 1;
        for j in i..r {
            choose[j] = choose[j - 1] + 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: Pascal's triangle built by addition only.
    fn pascal_triangle(rows: usize) -> Vec<Vec<BigUint>> {
        let mut tri: Vec<Vec<BigUint>> = Vec::with_capacity(rows);
        for a in 0..rows {
            let mut row = vec![BigUint::from(1u32); a + 1];
            for b in 1..a {
                row[b] = &tri[a - 1][b - 1] + &tri[a - 1][b];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn binomial_matches_pascal_oracle() {
        let tri = pascal_triangle(48);
        for a in 0..48 {
            for b in 0..=a {
                assert_eq!(binomial(a as i64, b as i64), tri[a][b], "C({a},{b})");
            }
        }
    }

    #[test]
    fn binomial_fixed_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(binomial(40, 20), BigUint::from(137_846_528_820u64));
        assert_eq!(binomial(-1, 0), BigUint::from(0u32));
        assert_eq!(binomial(7, -2), BigUint::from(0u32));
        assert_eq!(binomial(0, 0), BigUint::from(1u32));
    }

    #[test]
    fn subset_stream_basics() {
        let sets: Vec<_> = k_subsets(3, 2).unwrap().collect();
        let lists: Vec<Vec<u32>> = sets.iter().map(|s| s.elements()).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);

        let empty: Vec<_> = k_subsets(4, 0).unwrap().collect();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].card(), 0);

        assert_eq!(k_subsets(9, 3).unwrap().count(), 84);
        assert!(k_subsets(3, 4).is_err());
    }

    #[test]
    fn subset_stream_length_equals_binomial() {
        for n in 0..=16u32 {
            for k in 0..=n {
                let count = k_subsets(n, k).unwrap().count() as u64;
                assert_eq!(count, binomial_u64(n as i64, k as i64), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn subset_stream_is_ascending_and_duplicate_free() {
        let masks: Vec<u64> = k_subsets(10, 4).unwrap().map(|s| s.mask()).collect();
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lex_order_matches_sorted_element_lists() {
        let lex = k_subsets_lex(6, 3).unwrap();
        let mut lists: Vec<Vec<u32>> = k_subsets(6, 3)
            .unwrap()
            .map(|s| s.elements())
            .collect();
        lists.sort();
        let from_lex: Vec<Vec<u32>> = lex
            .iter()
            .map(|&m| KSet::from_mask(6, m).unwrap().elements())
            .collect();
        assert_eq!(from_lex, lists);
        assert_eq!(lex.len(), 20);
    }

    #[test]
    fn subsets_of_mask_enumerates_pool() {
        let pool = 0b10110u64; // {2,3,5}
        let subs = subsets_of_mask(pool, 2);
        assert_eq!(subs.len(), 3);
        for s in &subs {
            assert_eq!(s.count_ones(), 2);
            assert_eq!(s & !pool, 0);
        }
        assert_eq!(subsets_of_mask(pool, 0), vec![0]);
        assert!(subsets_of_mask(pool, 4).is_empty());
    }

    #[test]
    fn full_width_ground_set() {
        // n = 64 must not overflow the mask arithmetic
        let masks: Vec<u64> = k_subset_masks(64, 63).unwrap();
        assert_eq!(masks.len(), 64);
        assert_eq!(masks[0], !0u64 >> 1); // everything but element 64
        assert_eq!(*masks.last().unwrap(), !1u64); // everything but element 1
    }

    proptest! {
        #[test]
        fn pascal_identity(a in 1i64..60, b in 0i64..60) {
            prop_assert_eq!(
                binomial(a, b),
                binomial(a - 1, b - 1) + binomial(a - 1, b)
            );
        }

        #[test]
        fn binomial_symmetry(a in 0i64..60, b in 0i64..60) {
            if b <= a {
                prop_assert_eq!(binomial(a, b), binomial(a, a - b));
            }
        }
    }
}
