//! Plain-text interchange format for families.
//!
//! ```text
//! coverfam-family v1
//! n=5 k=2 t=1
//! 1 2
//! 1 3
//! 2 3
//! ```
//!
//! Elements are 1-indexed and strictly ascending within each line; the set
//! lines themselves are sorted lexicographically. Parsing is strict and every
//! error carries the offending 1-based line number.

use crate::error::{Error, Result};
use crate::family::Family;
use crate::ground::{KSet, Params};

pub const FAMILY_MAGIC: &str = "coverfam-family v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parse one `key=value` token as an integer.
fn parse_kv(token: &str, key: &str, line: usize) -> Result<u64> {
    let rest = token
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=<int>`, got `{token}`")))?;
    rest.parse::<u64>()
        .map_err(|_| parse_err(line, format!("`{rest}` is not a non-negative integer")))
}

/// Serialize a family. Sets are emitted in lexicographic order of their
/// ascending element lists.
pub fn serialize_family(f: &Family) -> String {
    let p = f.params();
    let mut lists: Vec<Vec<u32>> = f.sets().iter().map(|s| s.elements()).collect();
    lists.sort();
    let mut out = String::new();
    out.push_str(FAMILY_MAGIC);
    out.push('\n');
    out.push_str(&format!("n={} k={} t={}\n", p.n, p.k, p.t));
    for list in lists {
        let parts: Vec<String> = list.iter().map(|e| e.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

/// Parse a family document. Strict: exact magic line, sorted set lines,
/// no duplicates, each set of the declared cardinality.
pub fn parse_family(text: &str) -> Result<Family> {
    let mut lines = text.lines().enumerate();

    let (i, magic) = lines.next().ok_or_else(|| parse_err(1, "empty document"))?;
    if magic.trim_end() != FAMILY_MAGIC {
        return Err(parse_err(i + 1, format!("expected header `{FAMILY_MAGIC}`")));
    }

    let (i, header) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing parameter line `n=.. k=.. t=..`"))?;
    let line_no = i + 1;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(parse_err(line_no, "parameter line must be `n=<int> k=<int> t=<int>`"));
    }
    let n = parse_kv(tokens[0], "n", line_no)?;
    let k = parse_kv(tokens[1], "k", line_no)?;
    let t = parse_kv(tokens[2], "t", line_no)?;
    if k > u32::MAX as u64 || t > u32::MAX as u64 {
        return Err(parse_err(line_no, "k or t out of range"));
    }
    let params = Params::new(n, k as u32, t as u32)
        .map_err(|e| parse_err(line_no, e.to_string()))?;
    params
        .require_bitmask()
        .map_err(|e| parse_err(line_no, e.to_string()))?;

    let mut lists: Vec<Vec<u32>> = Vec::new();
    let mut masks: Vec<u64> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            return Err(parse_err(line_no, "blank line inside document"));
        }
        let mut elements = Vec::with_capacity(params.k as usize);
        for tok in line.split_whitespace() {
            let e: u64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("`{tok}` is not an element")))?;
            if e < 1 || e > params.n {
                return Err(parse_err(line_no, format!("element {e} outside [{}]", params.n)));
            }
            elements.push(e as u32);
        }
        if elements.len() != params.k as usize {
            return Err(parse_err(
                line_no,
                format!("set has {} elements, expected k={}", elements.len(), params.k),
            ));
        }
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(parse_err(line_no, "elements must be strictly ascending"));
        }
        if let Some(prev) = lists.last() {
            if *prev >= elements {
                return Err(parse_err(
                    line_no,
                    "set lines must be in strictly ascending lexicographic order",
                ));
            }
        }
        let set = KSet::from_elements(params.n_small(), &elements)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        masks.push(set.mask());
        lists.push(elements);
    }
    Family::from_masks(params, masks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_examples() {
        let p = Params::new(5, 2, 1).unwrap();
        let f = Family::from_masks(p, vec![0b00011, 0b00101, 0b00110]).unwrap();
        let text = serialize_family(&f);
        assert_eq!(text, "coverfam-family v1\nn=5 k=2 t=1\n1 2\n1 3\n2 3\n");
        assert_eq!(parse_family(&text).unwrap(), f);

        let empty = Family::empty(p).unwrap();
        assert_eq!(parse_family(&serialize_family(&empty)).unwrap(), empty);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("", 1),
            ("bogus\n", 1),
            ("coverfam-family v1\n", 2),
            ("coverfam-family v1\nn=5 k=2\n", 2),
            ("coverfam-family v1\nn=5 k=2 t=0\n", 2),
            ("coverfam-family v1\nn=99 k=2 t=1\n", 2),
            ("coverfam-family v1\nn=5 k=2 t=1\n1\n", 3),
            ("coverfam-family v1\nn=5 k=2 t=1\n2 1\n", 3),
            ("coverfam-family v1\nn=5 k=2 t=1\n1 6\n", 3),
            ("coverfam-family v1\nn=5 k=2 t=1\n1 2\n1 2\n", 4),
            ("coverfam-family v1\nn=5 k=2 t=1\n1 3\n1 2\n", 4),
            ("coverfam-family v1\nn=5 k=2 t=1\n1 2\n\n2 3\n", 4),
            ("coverfam-family v1\nn=5 k=2 t=1\n1 x\n", 3),
        ];
        for (text, want_line) in cases {
            match parse_family(text) {
                Err(Error::Parse { line, .. }) => {
                    assert_eq!(line, *want_line, "input {text:?}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        // n=99 must be rejected as over the bitmask cap even though k <= n
        assert!(parse_family("coverfam-family v1\nn=99 k=2 t=1\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roundtrip_random_families(seed in 0u64..1u64 << 48, n in 3u32..14, k in 1u32..5) {
            let k = k.min(n);
            let p = Params::new(n as u64, k, 1).unwrap();
            // pseudo-random member selection driven by the seed
            let mut members = Vec::new();
            let mut state = seed | 1;
            for s in crate::combinat::k_subsets(n, k).unwrap() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if state >> 62 == 0 {
                    members.push(s.mask());
                }
            }
            let f = Family::from_masks(p, members).unwrap();
            let back = parse_family(&serialize_family(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
