//! Compositions, partitions and the exponent statistic `L_i` that governs
//! which tuples contribute to `[q^j] t_n`.
//!
//! Indices in the public API (`raise`, `transpose`) are 1-based.

use serde::Serialize;

use crate::error::{Error, Result};

fn binom2(n: u64) -> i64 {
    let n = n as i64;
    n * (n - 1) / 2
}

/// A tuple `(n_1, ..., n_i)` of nonnegative integers, `i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Composition {
    parts: Vec<u64>,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("a composition has at least one part".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_pair(&self, j: usize, k: usize) -> Result<()> {
        if !(1 <= j && j < k && k <= self.parts.len()) {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= j < k <= {}, got j = {j}, k = {k}",
                self.parts.len()
            )));
        }
        Ok(())
    }
}

/// `L_i(n_1..n_i) = C(n,2) - Σ C(n_j,2) + Σ (j-1) n_j`.
pub fn l_statistic(parts: &[u64]) -> i64 {
    let n: u64 = parts.iter().sum();
    let mut l = binom2(n);
    for (j, &nj) in parts.iter().enumerate() {
        l += j as i64 * nj as i64 - binom2(nj);
    }
    l
}

/// The same statistic as `n(n-2)/2 - ½ Σ n_j² + Σ j n_j`, computed in
/// doubled form to stay in integers.
pub fn l_statistic_alt(parts: &[u64]) -> i64 {
    let n: i64 = parts.iter().sum::<u64>() as i64;
    let mut twice = n * (n - 2);
    for (j, &nj) in parts.iter().enumerate() {
        let nj = nj as i64;
        twice += -nj * nj + 2 * (j as i64 + 1) * nj;
    }
    debug_assert_eq!(twice % 2, 0);
    twice / 2
}

impl Composition {
    pub fn l(&self) -> i64 {
        l_statistic(&self.parts)
    }
}

/// `R_{j,k}`: part `j` goes up by one, part `k` down by one.
pub fn raise(c: &Composition, j: usize, k: usize) -> Result<Composition> {
    c.check_pair(j, k)?;
    if c.parts[k - 1] == 0 {
        return Err(Error::InvalidArgument(format!("R_{{{j},{k}}} needs n_{k} >= 1")));
    }
    let mut parts = c.parts.clone();
    parts[j - 1] += 1;
    parts[k - 1] -= 1;
    Ok(Composition { parts })
}

/// `τ_{j,k}`: swaps parts `j` and `k`.
pub fn transpose(c: &Composition, j: usize, k: usize) -> Result<Composition> {
    c.check_pair(j, k)?;
    let mut parts = c.parts.clone();
    parts.swap(j - 1, k - 1);
    Ok(Composition { parts })
}

/// `L(c) - L(R_{j,k} c)`, checked against `n_j - n_k + k - j + 1`.
pub fn l_raise_delta(c: &Composition, j: usize, k: usize) -> Result<i64> {
    let raised = raise(c, j, k)?;
    let delta = c.l() - raised.l();
    let expected = c.parts[j - 1] as i64 - c.parts[k - 1] as i64 + k as i64 - j as i64 + 1;
    if delta != expected {
        return Err(Error::Assertion(format!(
            "raising identity failed on {:?}: {delta} != {expected}",
            c.parts
        )));
    }
    Ok(delta)
}

/// `L(c) - L(τ_{j,k} c)`, checked against `(k - j)(n_k - n_j)`.
pub fn l_transpose_delta(c: &Composition, j: usize, k: usize) -> Result<i64> {
    let swapped = transpose(c, j, k)?;
    let delta = c.l() - swapped.l();
    let expected = (k as i64 - j as i64) * (c.parts[k - 1] as i64 - c.parts[j - 1] as i64);
    if delta != expected {
        return Err(Error::Assertion(format!(
            "transposition identity failed on {:?}: {delta} != {expected}",
            c.parts
        )));
    }
    Ok(delta)
}

/// A nonincreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Accepts a nonincreasing list; zero parts (necessarily trailing) are dropped.
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not nonincreasing")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// `n'_j = #{i : n_i ≥ j}`.
    pub fn conjugate(&self) -> Partition {
        let largest = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=largest)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u64)
            .collect();
        Partition { parts }
    }

    /// `Δ(p) = Σ C(n_j,2) - Σ C(n'_j,2)`.
    pub fn delta(&self) -> i64 {
        let own: i64 = self.parts.iter().map(|&p| binom2(p)).sum();
        let conj: i64 = self.conjugate().parts.iter().map(|&p| binom2(p)).sum();
        own - conj
    }

    /// `L` of the partition read as a composition, computed through the
    /// conjugate: `L = Δ(n,0,...,0) - Δ(p)`. Checked against the direct form.
    pub fn l_via_conjugate(&self) -> Result<i64> {
        let n = self.total();
        let single = Partition { parts: if n == 0 { vec![] } else { vec![n] } };
        let via = single.delta() - self.delta();
        let direct = if self.parts.is_empty() { 0 } else { l_statistic(&self.parts) };
        if via != direct {
            return Err(Error::Assertion(format!(
                "conjugate form of L failed on {:?}: {via} != {direct}",
                self.parts
            )));
        }
        Ok(via)
    }
}

/// Streams all compositions of `n` into exactly `parts` nonnegative parts in
/// colexicographic order, starting at `(n, 0, ..., 0)`. One buffer is reused;
/// use [`Compositions::advance`] to avoid per-item allocation.
#[derive(Clone, Debug)]
pub struct Compositions {
    buf: Vec<u64>,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(n: u64, parts: usize) -> Self {
        let mut buf = vec![0; parts];
        if let Some(first) = buf.first_mut() {
            *first = n;
        }
        Self { buf, started: false, done: parts == 0 }
    }

    pub fn advance(&mut self) -> Option<&[u64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.buf);
        }
        let last = self.buf.len() - 1;
        let j = self.buf.iter().position(|&p| p > 0)?;
        if j == last {
            self.done = true;
            return None;
        }
        let v = self.buf[j];
        self.buf[j] = 0;
        self.buf[0] = v - 1;
        self.buf[j + 1] += 1;
        Some(&self.buf)
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        self.advance().map(<[u64]>::to_vec)
    }
}

/// Outcome of the exhaustive check of the three minimum lemmas for one
/// `(n, i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinLemmaReport {
    pub n: u64,
    pub i: usize,
    pub count: usize,
    /// Minimum of `L` and every tuple achieving it.
    pub min: i64,
    pub argmin: Vec<Vec<u64>>,
    /// Minimum over tuples with `n_1 < n`, when that set is nonempty.
    pub min_restricted: Option<i64>,
    pub argmin_restricted: Vec<Vec<u64>>,
    /// Tuples with `k ≥ 2` violating `L ≥ n + k - 2`.
    pub bound_violations: Vec<Vec<u64>>,
    /// Tuples where the two closed forms of `L` disagree.
    pub form_mismatches: Vec<Vec<u64>>,
    pub max: i64,
    pub lemma_i: bool,
    /// Restricted minimum is `n` and `(n-1,1,0,...,0)` attains it.
    pub lemma_ii: bool,
    /// `(n-1,1,0,...,0)` is the only restricted minimizer. False whenever
    /// `n ≥ 2` and `i ≥ 2`, since `(0,n,0,...,0)` ties with it.
    pub lemma_ii_unique: bool,
    /// The bound over all tuples with `k ≥ 2`.
    pub lemma_iii: bool,
    /// The bound including `k = 1`, where `(n,0,...,0)` gives `0 < n - 1`
    /// as soon as `n ≥ 2`.
    pub lemma_iii_all_k: bool,
}

impl MinLemmaReport {
    pub fn holds(&self) -> bool {
        self.lemma_i && self.lemma_ii && self.lemma_iii && self.form_mismatches.is_empty()
    }
}

/// Enumerates every composition of `n` into `i` parts and checks:
/// (i) the minimum of `L` is 0, only at `(n,0,...,0)`;
/// (ii) over `n_1 < n` the minimum is `n`, attained at `(n-1,1,0,...,0)`;
/// (iii) `L ≥ n + k - 2` with `k ≥ 2` the last positive index.
/// The stronger literal readings (a unique minimizer in (ii), and (iii)
/// for `k = 1`) are recorded separately.
pub fn verify_min_lemmas(n: u64, i: usize) -> Result<MinLemmaReport> {
    if i == 0 {
        return Err(Error::InvalidArgument("need at least one part".into()));
    }
    let mut it = Compositions::new(n, i);
    let mut report = MinLemmaReport {
        n,
        i,
        count: 0,
        min: i64::MAX,
        argmin: Vec::new(),
        min_restricted: None,
        argmin_restricted: Vec::new(),
        bound_violations: Vec::new(),
        form_mismatches: Vec::new(),
        max: i64::MIN,
        lemma_i: false,
        lemma_ii: false,
        lemma_ii_unique: false,
        lemma_iii: false,
        lemma_iii_all_k: false,
    };
    let mut all_k_ok = true;
    while let Some(c) = it.advance() {
        report.count += 1;
        let l = l_statistic(c);
        if l != l_statistic_alt(c) {
            report.form_mismatches.push(c.to_vec());
        }
        report.max = report.max.max(l);
        track_min(&mut report.min, &mut report.argmin, l, c);
        if c[0] < n {
            let mut m = report.min_restricted.unwrap_or(i64::MAX);
            track_min(&mut m, &mut report.argmin_restricted, l, c);
            report.min_restricted = Some(m);
        }
        if let Some(k) = c.iter().rposition(|&p| p > 0) {
            if l < n as i64 + (k as i64 + 1) - 2 {
                if k >= 1 {
                    report.bound_violations.push(c.to_vec());
                }
                all_k_ok = false;
            }
        }
    }
    let mut top = vec![0; i];
    top[0] = n;
    report.lemma_i = report.min == 0 && report.argmin == vec![top];
    (report.lemma_ii, report.lemma_ii_unique) = match report.min_restricted {
        None => (true, true),
        Some(m) => {
            let mut second = vec![0; i];
            second[0] = n - 1;
            second[1] = 1;
            let attained = m == n as i64 && report.argmin_restricted.contains(&second);
            (attained, attained && report.argmin_restricted.len() == 1)
        }
    };
    report.lemma_iii = report.bound_violations.is_empty();
    report.lemma_iii_all_k = all_k_ok;
    Ok(report)
}

fn track_min(min: &mut i64, argmin: &mut Vec<Vec<u64>>, l: i64, c: &[u64]) {
    if l < *min {
        *min = l;
        argmin.clear();
        argmin.push(c.to_vec());
    } else if l == *min {
        argmin.push(c.to_vec());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(p: &[u64]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn l_examples() {
        for n in 0..8 {
            assert_eq!(l_statistic(&[n]), 0);
        }
        for n in 1..8 {
            assert_eq!(l_statistic(&[n - 1, 1]), n as i64);
        }
        assert_eq!(l_statistic(&[1, 1, 1]), 6);
        assert_eq!(l_statistic_alt(&[1, 1, 1]), 6);
        assert_eq!(l_statistic(&[0, 0, 0, 4]), 12);
    }

    #[test]
    fn raise_and_transpose_examples() {
        let c = comp(&[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(raise(&c, 2, 5).unwrap().parts(), &[1, 3, 3, 4, 4, 6, 7]);
        assert_eq!(transpose(&c, 2, 5).unwrap().parts(), &[1, 5, 3, 4, 2, 6, 7]);
        assert_eq!(raise(&comp(&[0, 1]), 1, 2).unwrap().parts(), &[1, 0]);
        assert_eq!(transpose(&comp(&[4, 9]), 1, 2).unwrap().parts(), &[9, 4]);
        assert!(raise(&comp(&[1, 0]), 1, 2).is_err());
        assert!(raise(&comp(&[1, 1]), 2, 1).is_err());
        assert!(raise(&comp(&[1, 1]), 2, 2).is_err());
        assert!(transpose(&comp(&[1, 1]), 1, 3).is_err());
        assert!(Composition::new(vec![]).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(l_raise_delta(&comp(&[1, 1]), 1, 2).unwrap(), 2);
        assert_eq!(l_raise_delta(&comp(&[2, 1]), 1, 2).unwrap(), 3);
        assert_eq!(l_statistic(&[2, 1]), 3);
        assert_eq!(l_transpose_delta(&comp(&[1, 4, 0]), 1, 3).unwrap(), 2 * (0 - 1));
    }

    #[test]
    fn partition_examples() {
        let p = Partition::new(vec![3, 1]).unwrap();
        assert_eq!(p.conjugate().parts(), &[2, 1, 1]);
        assert_eq!(p.conjugate().conjugate(), p);
        assert_eq!(Partition::new(vec![4]).unwrap().conjugate().parts(), &[1, 1, 1, 1]);
        assert_eq!(p.delta(), 2);
        assert_eq!(Partition::new(vec![2, 1]).unwrap().delta(), 0);
        assert_eq!(Partition::new(vec![5]).unwrap().delta(), 10);
        assert_eq!(p.l_via_conjugate().unwrap(), l_statistic(&[3, 1]));
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 0, 0]).unwrap().parts(), &[2]);
    }

    #[test]
    fn composition_enumeration() {
        let all: Vec<Vec<u64>> = Compositions::new(2, 2).collect();
        assert_eq!(all, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(Compositions::new(1, 3).count(), 3);
        assert_eq!(Compositions::new(0, 4).count(), 1);
        // C(n+i-1, i-1) compositions
        assert_eq!(Compositions::new(6, 4).count(), 84);
        assert_eq!(Compositions::new(3, 0).count(), 0);
    }

    #[test]
    fn min_lemmas_small_cases() {
        let r = verify_min_lemmas(5, 3).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.argmin, vec![vec![5, 0, 0]]);
        assert_eq!(r.argmin_restricted, vec![vec![4, 1, 0], vec![0, 5, 0]]);
        assert!(!r.lemma_ii_unique);
        assert!(!r.lemma_iii_all_k);
        let r = verify_min_lemmas(1, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.min, 0);
        let r = verify_min_lemmas(4, 4).unwrap();
        assert_eq!(l_statistic(&[0, 0, 0, 4]), 12);
        // (0,0,1,3) beats the all-at-the-end tuple.
        assert_eq!(r.max, 14);
        assert!(r.holds());
        assert!(verify_min_lemmas(3, 0).is_err());
    }
}
