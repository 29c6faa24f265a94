use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation `a_1 a_2 ... a_n` of `{1, ..., n}` written as a word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PermWord(Vec<u32>);

impl PermWord {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        let n = letters.len();
        let mut seen = vec![false; n + 1];
        for &a in &letters {
            if a == 0 || a as usize > n || seen[a as usize] {
                return Err(Error::InvalidParams(format!("{letters:?} is not a permutation word")));
            }
            seen[a as usize] = true;
        }
        Ok(Self(letters))
    }

    pub fn identity(n: u32) -> Self {
        Self((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    /// `a_j` with `j` 1-based.
    pub fn letter(&self, j: usize) -> u32 {
        self.0[j - 1]
    }

    /// Descent indicators: entry `j-1` is 1 iff `a_j > a_{j+1}`.
    pub fn descents(&self) -> Vec<u32> {
        self.0.windows(2).map(|w| u32::from(w[0] > w[1])).collect()
    }

    /// `sum_j j * [a_j > a_{j+1}]`.
    pub fn major_index(&self) -> u64 {
        self.descents()
            .iter()
            .enumerate()
            .map(|(j, &s)| (j as u64 + 1) * s as u64)
            .sum()
    }

    /// The word with `n + 1` inserted after the first `j` letters.
    pub fn insert_top(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v.insert(j, self.0.len() as u32 + 1);
        Self(v)
    }

    /// Cyclic relabelling `a -> a + shift mod n` of every letter.
    pub fn rotate_letters(&self, shift: u32) -> Self {
        let n = self.0.len() as u32;
        Self(self.0.iter().map(|&a| (a - 1 + shift) % n + 1).collect())
    }
}

impl TryFrom<Vec<u32>> for PermWord {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        PermWord::new(v)
    }
}

impl From<PermWord> for Vec<u32> {
    fn from(w: PermWord) -> Vec<u32> {
        w.0
    }
}

impl std::str::FromStr for PermWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = if s.contains(',') || s.contains(' ') {
            s.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad word {s:?}"))))
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad word {s:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        PermWord::new(letters)
    }
}

impl fmt::Display for PermWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// All words of length `n` in lexicographic order.
pub fn all_words(n: u32) -> Vec<PermWord> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (1..=n).collect();
    loop {
        out.push(PermWord(cur.clone()));
        // next permutation
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// One word per marked point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PermTuple {
    pub words: Vec<PermWord>,
}

impl PermTuple {
    pub fn new(words: Vec<PermWord>) -> Result<Self> {
        let n = words.first().map(PermWord::len).unwrap_or(0);
        if words.is_empty() || words.iter().any(|w| w.len() != n) {
            return Err(Error::InvalidParams("words must be non-empty and of equal length".into()));
        }
        Ok(Self { words })
    }

    pub fn rank(&self) -> usize {
        self.words[0].len()
    }

    pub fn num_points(&self) -> usize {
        self.words.len()
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(PermWord::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Descent counts `s_j` and the sets `S_j` of points with `a_j(p) > a_{j+1}(p)`.
pub fn descent_stats(t: &PermTuple) -> (Vec<u32>, Vec<Vec<usize>>) {
    let n = t.rank();
    let mut sets = vec![Vec::new(); n.saturating_sub(1)];
    for (p, w) in t.words.iter().enumerate() {
        for (j, d) in w.descents().into_iter().enumerate() {
            if d == 1 {
                sets[j].push(p);
            }
        }
    }
    let s = sets.iter().map(|v| v.len() as u32).collect();
    (s, sets)
}
