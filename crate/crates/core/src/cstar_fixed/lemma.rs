use log::debug;

use super::perm::{all_words, PermWord};
use crate::error::{Error, Result};
use crate::exactpoly::Prime;

const COUNT_S_MAX: u32 = 10;

/// Number of words in `S_n` whose major index `sum_j j s_j` is `0 mod n`.
pub fn count_s(n: Prime) -> Result<u64> {
    if n.get() > COUNT_S_MAX {
        return Err(Error::Limit {
            what: format!("enumeration of S_{n}"),
            limit: COUNT_S_MAX as u64,
        });
    }
    let nn = n.get() as u64;
    Ok(all_words(n.get())
        .iter()
        .filter(|w| w.major_index() % nn == 0)
        .count() as u64)
}

/// Which case of the explicit insertion bijection produced a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertionCase {
    AtEnd,
    AtDescent,
    BeforeFirstDescent,
    BetweenDescents,
    AfterLastDescent,
}

/// Position `j` at which inserting `n` into `prev` raises the major index by
/// exactly `target` (mod n), according to the explicit case analysis.
pub fn insertion_witness(prev: &PermWord, target: usize) -> (usize, InsertionCase) {
    let n = prev.len() + 1;
    let a: Vec<usize> = prev
        .descents()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 1)
        .map(|(i, _)| i + 1)
        .collect();
    let s = a.len();
    let k = target;
    if k == 0 {
        return (n - 1, InsertionCase::AtEnd);
    }
    if k <= s {
        return (a[s - k], InsertionCase::AtDescent);
    }
    let i1 = a.first().copied().unwrap_or(n - 1);
    if k <= s + i1 {
        return (k - s - 1, InsertionCase::BeforeFirstDescent);
    }
    for l in 1..s {
        // 1-based l: i_l = a[l-1], i_{l+1} = a[l]
        if a[l - 1] + s - l + 2 <= k && k <= a[l] + s - l {
            return (k + l - s - 1, InsertionCase::BetweenDescents);
        }
    }
    (k - 1, InsertionCase::AfterLastDescent)
}

/// Checks that inserting `n` at the `n` possible positions of `prev` shifts
/// the major index through every residue mod `n` exactly once, and that the
/// explicit witness of each residue is correct.
pub fn insertion_bijection_check(prev: &PermWord, n: Prime) -> bool {
    let nn = n.as_usize();
    if prev.len() + 1 != nn {
        return false;
    }
    let sigma = prev.major_index() as i64;
    let shift = |j: usize| (prev.insert_top(j).major_index() as i64 - sigma).rem_euclid(nn as i64) as usize;
    let mut hit = vec![false; nn];
    for j in 0..nn {
        hit[shift(j)] = true;
    }
    if !hit.iter().all(|&h| h) {
        return false;
    }
    (0..nn).all(|k| {
        let (j, case) = insertion_witness(prev, k);
        debug!("prev {prev}: residue {k} from position {j} ({case:?})");
        j < nn && shift(j) == k
    })
}

/// Runs the insertion check for every word of length `n - 1`.
pub fn insertion_bijection_all(n: Prime) -> bool {
    all_words(n.get() - 1)
        .iter()
        .all(|w| insertion_bijection_check(w, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(count_s(prime(2)).unwrap(), 1);
        assert_eq!(count_s(prime(3)).unwrap(), 2);
        assert_eq!(count_s(prime(5)).unwrap(), 24);
        assert!(count_s(prime(11)).is_err());
    }

    #[test]
    fn insertions() {
        let one: PermWord = "1".parse().unwrap();
        assert!(insertion_bijection_check(&one, prime(2)));
        assert_eq!(one.insert_top(0).to_string(), "21");
        let w: PermWord = "21".parse().unwrap();
        assert!(insertion_bijection_check(&w, prime(3)));
        for n in [2, 3, 5, 7] {
            assert!(insertion_bijection_all(prime(n)), "n = {n}");
        }
    }

    #[test]
    fn every_case_occurs() {
        let mut seen = std::collections::HashSet::new();
        for w in all_words(6) {
            for k in 0..7 {
                seen.insert(format!("{:?}", insertion_witness(&w, k).1));
            }
        }
        assert_eq!(seen.len(), 5);
    }
}
