//! Histograms over a finite range and the multinomial coefficient `NUM(h)`.
//!
//! Histograms of size `n` over `r` range values are enumerated in
//! lexicographic order of their count vectors; the position in that order is
//! the axis index used by counting-formula potentials.

use std::fmt;

/// Counts per range value, in range order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Histogram {
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(counts: Vec<usize>) -> Self {
        Histogram { counts }
    }

    /// Histogram of a joint assignment given as range indices.
    pub fn from_assignment(values: &[usize], r: usize) -> Self {
        let mut counts = vec![0; r];
        for &v in values {
            counts[v] += 1;
        }
        Histogram { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of assignments realizing this histogram, `n! / prod(n_i!)`.
    /// `None` on overflow.
    pub fn num(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        let mut seen = 0u128;
        for &c in &self.counts {
            for k in 1..=c as u128 {
                seen += 1;
                // acc * seen / k stays integral: acc is C(seen-1, k-1)-style partial product.
                acc = acc.checked_mul(seen)? / k;
            }
        }
        Some(acc)
    }

    pub fn ln_num(&self) -> f64 {
        ln_factorial(self.total()) - self.counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
    }

    /// Position in the lexicographic enumeration of all histograms with the
    /// same total and range size.
    pub fn rank(&self) -> usize {
        let r = self.counts.len();
        let mut rem = self.total();
        let mut rank = 0;
        for i in 0..r.saturating_sub(1) {
            for v in 0..self.counts[i] {
                rank += count(rem - v, r - i - 1).expect("rank overflow");
            }
            rem -= self.counts[i];
        }
        rank
    }
}

impl fmt::Display for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

/// Number of histograms of size `n` over `r` values: `C(n + r - 1, r - 1)`.
pub fn count(n: usize, r: usize) -> Option<usize> {
    if r == 0 {
        return Some(usize::from(n == 0));
    }
    binomial(n + r - 1, r - 1)
}

pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    usize::try_from(acc).ok()
}

/// Calls `f` on every histogram of size `n` over `r` values, in rank order.
pub fn for_each(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r == 0 {
        if n == 0 {
            f(&[]);
        }
        return;
    }
    // Start at the lexicographically smallest vector (0, ..., 0, n).
    let mut h = vec![0usize; r];
    h[r - 1] = n;
    loop {
        f(&h);
        // Next vector: find rightmost position i < r-1 that can grow, i.e.
        // whose suffix (i+1..r) still holds something.
        let mut i = r - 1;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let suffix: usize = h[i + 1..].iter().sum();
            if suffix > 0 {
                h[i] += 1;
                for v in h[i + 1..].iter_mut() {
                    *v = 0;
                }
                h[r - 1] = suffix - 1;
                break;
            }
        }
    }
}

pub fn all(n: usize, r: usize) -> Vec<Histogram> {
    let mut out = Vec::new();
    for_each(n, r, |h| out.push(Histogram::new(h.to_vec())));
    out
}

/// `ln(n!)` by direct summation; exact enough for the sizes used here.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Cached `ln(k!)` for `k <= n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Falling factorial `n (n-1) ... (n-k+1)` as `f64`.
pub fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}
