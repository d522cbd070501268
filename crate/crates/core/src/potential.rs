//! Dense potential tables stored as natural logarithms.
//!
//! Axis order is row-major: the last axis varies fastest. A zero entry is
//! stored as `-inf`.

use crate::error::{Error, Result};
use crate::scalar::{ln_of, ln_pow, ln_sum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T = f64> {
    shape: Vec<usize>,
    ln: Vec<T>,
}

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub fn table_len(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

/// Calls `f` with every multi-index of `shape` in row-major order.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        let mut k = shape.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl<T: Scalar> Potential<T> {
    /// The same table in another scalar type.
    pub fn cast<U: Scalar>(&self) -> Potential<U> {
        Potential { shape: self.shape.clone(), ln: self.ln.iter().map(|v| U::of(v.to_f64_lossy())).collect() }
    }

    pub fn from_ln(shape: Vec<usize>, ln: Vec<T>) -> Result<Self> {
        let len = table_len(&shape).ok_or_else(|| Error::Capacity("table too large".into()))?;
        if len != ln.len() {
            return Err(Error::Arity(format!(
                "table has {} entries, shape {:?} needs {len}",
                ln.len(),
                shape
            )));
        }
        if ln.iter().any(|v| v.is_nan() || *v == T::infinity()) {
            return Err(Error::Domain("potential values must be finite".into()));
        }
        Ok(Potential { shape, ln })
    }

    pub fn from_values(shape: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::Domain("potential values must be finite and non-negative".into()));
        }
        Potential::from_ln(shape, values.into_iter().map(ln_of).collect())
    }

    pub fn ones(shape: Vec<usize>) -> Self {
        let len = table_len(&shape).expect("table size overflow");
        Potential { shape, ln: vec![T::zero(); len] }
    }

    pub fn scalar_ln(ln: T) -> Self {
        Potential { shape: Vec::new(), ln: vec![ln] }
    }

    /// Builds a table from a function of the multi-index returning log-values.
    pub fn build(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len = table_len(&shape).ok_or_else(|| Error::Capacity("table too large".into()))?;
        let mut ln = Vec::with_capacity(len);
        for_each_index(&shape, |idx| ln.push(f(idx)));
        Ok(Potential { shape, ln })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.ln.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln.is_empty()
    }

    pub fn ln_values(&self) -> &[T] {
        &self.ln
    }

    pub fn values(&self) -> Vec<T> {
        self.ln.iter().map(|v| v.exp()).collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(strides(&self.shape)).map(|(i, s)| i * s).sum()
    }

    pub fn ln_at(&self, idx: &[usize]) -> T {
        self.ln[self.flat_index(idx)]
    }

    pub fn value_at(&self, idx: &[usize]) -> T {
        self.ln_at(idx).exp()
    }

    pub fn set_ln(&mut self, idx: &[usize], v: T) {
        let k = self.flat_index(idx);
        self.ln[k] = v;
    }

    /// New table of `shape` whose entry at `idx` is the old entry at
    /// `f(idx)` (old multi-index), or zero when `f` returns `None`.
    pub fn reindex(
        &self,
        shape: Vec<usize>,
        mut f: impl FnMut(&[usize], &mut [usize]) -> bool,
    ) -> Result<Self> {
        let st = strides(&self.shape);
        let mut old = vec![0usize; self.shape.len()];
        Potential::build(shape, |idx| {
            if f(idx, &mut old) {
                self.ln[old.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
            } else {
                T::neg_infinity()
            }
        })
    }

    /// Pointwise product on a joint shape. `self_axes[k]` gives the output
    /// axis carrying this table's axis `k`; likewise for `other`.
    pub fn product(
        &self,
        self_axes: &[usize],
        other: &Potential<T>,
        other_axes: &[usize],
        out_shape: Vec<usize>,
    ) -> Result<Self> {
        for (k, &a) in self_axes.iter().enumerate() {
            if out_shape[a] != self.shape[k] {
                return Err(Error::Alignment("axis sizes differ in product".into()));
            }
        }
        for (k, &a) in other_axes.iter().enumerate() {
            if out_shape[a] != other.shape[k] {
                return Err(Error::Alignment("axis sizes differ in product".into()));
            }
        }
        let s1 = strides(&self.shape);
        let s2 = strides(&other.shape);
        Potential::build(out_shape, |idx| {
            let i1: usize = self_axes.iter().zip(&s1).map(|(&a, s)| idx[a] * s).sum();
            let i2: usize = other_axes.iter().zip(&s2).map(|(&a, s)| idx[a] * s).sum();
            self.ln[i1] + other.ln[i2]
        })
    }

    /// Sums out one axis; `ln_weights`, when given, multiplies each slice by
    /// the corresponding weight before summation.
    pub fn sum_out(&self, axis: usize, ln_weights: Option<&[T]>) -> Self {
        let d = self.shape[axis];
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut shape = self.shape.clone();
        shape.remove(axis);
        let mut ln = Vec::with_capacity(outer * inner);
        let mut buf = vec![T::zero(); d];
        for o in 0..outer {
            for i in 0..inner {
                for (k, b) in buf.iter_mut().enumerate() {
                    let v = self.ln[(o * d + k) * inner + i];
                    *b = match ln_weights {
                        Some(w) => v + w[k],
                        None => v,
                    };
                }
                ln.push(ln_sum(&buf));
            }
        }
        Potential { shape, ln }
    }

    /// Restricts one axis to a single value and drops it.
    pub fn slice(&self, axis: usize, value: usize) -> Self {
        let d = self.shape[axis];
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut shape = self.shape.clone();
        shape.remove(axis);
        let mut ln = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            for i in 0..inner {
                ln.push(self.ln[(o * d + value) * inner + i]);
            }
        }
        Potential { shape, ln }
    }

    /// Keeps only entries where axes `keep` and `drop` agree, then removes
    /// axis `drop`.
    pub fn diagonal(&self, keep: usize, drop: usize) -> Result<Self> {
        if self.shape[keep] != self.shape[drop] || keep == drop {
            return Err(Error::Alignment("diagonal needs two distinct axes of equal size".into()));
        }
        let mut shape = self.shape.clone();
        shape.remove(drop);
        let keep_new = if keep > drop { keep - 1 } else { keep };
        self.reindex(shape, |idx, old| {
            let mut j = 0;
            for (k, o) in old.iter_mut().enumerate() {
                if k == drop {
                    *o = idx[keep_new];
                } else {
                    *o = idx[j];
                    j += 1;
                }
            }
            true
        })
    }

    /// Reorders axes: new axis `i` is old axis `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let shape: Vec<usize> = order.iter().map(|&o| self.shape[o]).collect();
        self.reindex(shape, |idx, old| {
            for (i, &o) in order.iter().enumerate() {
                old[o] = idx[i];
            }
            true
        })
    }

    /// Elementwise power `phi^s`.
    pub fn powf(&self, s: T) -> Self {
        Potential { shape: self.shape.clone(), ln: self.ln.iter().map(|&v| ln_pow(v, s)).collect() }
    }

    /// Log of the sum of all entries.
    pub fn ln_total(&self) -> T {
        ln_sum(&self.ln)
    }

    pub fn map_ln(&self, mut f: impl FnMut(usize, T) -> T) -> Self {
        Potential {
            shape: self.shape.clone(),
            ln: self.ln.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot(shape: &[usize], vals: &[f64]) -> Potential<f64> {
        Potential::from_values(shape.to_vec(), vals.to_vec()).unwrap()
    }

    #[test]
    fn sum_out_collapses_axis() {
        let p = pot(&[2], &[0.25, 0.5]);
        let z = p.sum_out(0, None);
        assert!(z.shape().is_empty());
        assert!((z.value_at(&[]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sum_out_middle_axis() {
        let p = pot(&[2, 3, 2], &(1..=12).map(f64::from).collect::<Vec<_>>());
        let s = p.sum_out(1, None);
        assert_eq!(s.shape(), &[2, 2]);
        assert!((s.value_at(&[0, 0]) - (1.0 + 3.0 + 5.0)).abs() < 1e-12);
        assert!((s.value_at(&[1, 1]) - (8.0 + 10.0 + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn product_with_ones_is_identity() {
        let p = pot(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let ones = Potential::ones(vec![3]);
        let q = p.product(&[0, 1], &ones, &[1], vec![2, 3]).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_and_permute() {
        let p = pot(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
        let d = p.diagonal(0, 1).unwrap();
        assert_eq!(d.shape(), &[2]);
        assert!((d.value_at(&[1]) - 4.0).abs() < 1e-12);
        let t = p.permute(&[1, 0]).unwrap();
        assert!((t.value_at(&[0, 1]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zeros_survive_powers() {
        let p = pot(&[2], &[0.0, 4.0]);
        let q = p.powf(0.5);
        assert_eq!(q.value_at(&[0]), 0.0);
        assert!((q.value_at(&[1]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_values() {
        assert!(Potential::<f64>::from_values(vec![1], vec![-1.0]).is_err());
        assert!(Potential::<f64>::from_values(vec![2], vec![1.0]).is_err());
    }
}
