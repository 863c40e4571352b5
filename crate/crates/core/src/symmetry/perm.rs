use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Permutation of `{0, .., k-1}` in one-line notation: `p.0[i]` is the image
/// of `i`. Composition follows function composition, `(s t)(i) = s(t(i))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &v in &images {
            if v >= k || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidParameter(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(k: usize) -> Self {
        Perm((0..k).collect())
    }

    /// Product of cycles on `k` points, 0-based labels.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut p = Perm::identity(k);
        for c in cycles.iter().rev() {
            let mut img: Vec<usize> = (0..k).collect();
            for (a, &from) in c.iter().enumerate() {
                if from >= k {
                    return Err(Error::InvalidParameter(format!("cycle entry {from} >= {k}")));
                }
                img[from] = c[(a + 1) % c.len()];
            }
            p = Perm::new(img)?.compose(&p);
        }
        Ok(p)
    }

    pub fn transposition(k: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.swap(i, j);
        Perm(v)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.k()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.k()];
        let mut out = Vec::new();
        for s in 0..self.k() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut j = self.0[s];
            while j != s {
                seen[j] = true;
                c.push(j);
                j = self.0[j];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    pub fn cycle_type(&self) -> Partition {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let fixed = self.k() - lens.iter().sum::<usize>();
        lens.extend(std::iter::repeat(1).take(fixed));
        lens.sort_unstable_by(|a, b| b.cmp(a));
        Partition(lens)
    }

    pub fn sign(&self) -> i32 {
        let even = self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0;
        if even {
            1
        } else {
            -1
        }
    }

    /// Adjacent transpositions `s_a = (a, a+1)` with `self = s_{w0} s_{w1} ...`.
    pub fn reduced_word(&self) -> Vec<usize> {
        // Bubble sort: swapping positions a, a+1 of the one-line form
        // multiplies by s_a on the right.
        let mut w = self.0.clone();
        let mut swaps = Vec::new();
        let k = w.len();
        for end in (1..k).rev() {
            for a in 0..end {
                if w[a] > w[a + 1] {
                    w.swap(a, a + 1);
                    swaps.push(a);
                }
            }
        }
        swaps.reverse();
        swaps
    }

    /// Lexicographic rank among all permutations of `k` points.
    pub fn rank(&self) -> usize {
        let k = self.k();
        let mut r = 0;
        for i in 0..k {
            let smaller = self.0[i + 1..].iter().filter(|&&v| v < self.0[i]).count();
            r = r * (k - i) + smaller;
        }
        r
    }

    /// All permutations of `k` points in lexicographic order (so that
    /// `all(k)[p.rank()] == p`).
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::with_capacity(factorial(k));
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Perm(cur.clone()));
            // Next permutation in lexicographic order.
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

impl std::fmt::Display for Perm {
    /// Cycle notation with 1-based labels, e.g. `(1 2)(3 4)`; `id` for the identity.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return f.write_str("id");
        }
        for c in cs {
            let s: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Integer partition, parts weakly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    /// All partitions of `k` in reverse lexicographic order: `[k]` first.
    pub fn all(k: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, k, &mut Vec::new(), &mut out);
        out
    }

    /// Column lengths of the conjugate partition.
    pub fn conjugate(&self) -> Partition {
        let cols = self.0[0];
        Partition((0..cols).map(|c| self.0.iter().filter(|&&r| r > c).count()).collect())
    }

    pub fn hook_product(&self) -> u128 {
        let conj = self.conjugate();
        let mut prod = 1u128;
        for (r, &len) in self.0.iter().enumerate() {
            for c in 0..len {
                prod *= ((len - c - 1) + (conj.0[c] - r - 1) + 1) as u128;
            }
        }
        prod
    }

    /// Number of standard Young tableaux (hook length formula).
    pub fn num_tableaux(&self) -> usize {
        let n: u128 = (1..=self.size() as u128).product();
        (n / self.hook_product()) as usize
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Dimension of the `GL(d)` irrep `lambda` (hook-content formula), zero
/// when `height > d`.
pub fn schur_dimension(lambda: &Partition, d: usize) -> u128 {
    if lambda.height() > d {
        return 0;
    }
    let mut num = 1u128;
    for (r, &len) in lambda.0.iter().enumerate() {
        for c in 0..len {
            num *= (d + c - r) as u128;
        }
    }
    num / lambda.hook_product()
}
