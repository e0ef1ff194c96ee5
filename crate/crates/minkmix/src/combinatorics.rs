//! Weak compositions and multinomial coefficients.
//!
//! Expanding `(Σ_i x_i)^α` by the multinomial theorem indexes terms by weak
//! compositions of `α` into `k` parts, `C(k+α−1, α)` of them. The stream
//! here enumerates them in the order induced by the nested-loop expansion
//! identity (outermost loop over the tail sum), which makes runs
//! bit-reproducible and lets parallel consumers split the stream into
//! contiguous index ranges. Coefficients come in two flavours: exact
//! big-integer values from the Pascal's-simplex recurrence (used in tests)
//! and log-domain values from log-Gamma sums (used in distance
//! computations).

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Default cap on enumerated expansion terms.
pub const DEFAULT_TERM_CAP: u64 = 100_000_000;

/// Exact binomial coefficient `C(n, r)`; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for j in 1..=r {
        acc = acc * BigUint::from(n - r + j) / BigUint::from(j);
    }
    acc
}

/// Number of weak compositions of `alpha` into `k` parts: `C(k+α−1, α)`.
pub fn composition_count(alpha: u32, k: usize) -> BigUint {
    assert!(k >= 1, "compositions need at least one part");
    binomial(k as u64 - 1 + u64::from(alpha), u64::from(alpha))
}

/// `composition_count` as a `u64`; `None` when it does not fit.
pub fn composition_count_u64(alpha: u32, k: usize) -> Option<u64> {
    composition_count(alpha, k).to_u64()
}

fn composition_count_checked(alpha: u32, k: usize) -> u64 {
    composition_count_u64(alpha, k).expect("block count exceeds u64 after cap check")
}

/// Streams every weak composition of `alpha` into `k` parts exactly once.
///
/// The order is the one the nested-loop expansion identity generates: the
/// first part starts at `alpha` and drains into the tail, so for
/// `alpha = 3, k = 2` the stream is `(3,0), (2,1), (1,2), (0,3)`.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    alpha: u32,
    k: usize,
    /// Loop variables of the nested-loop identity: `loops[j]` is the sum of
    /// parts `j+1..k`; invariant `alpha ≥ loops[0] ≥ … ≥ loops[k−2] ≥ 0`.
    loops: Vec<u32>,
    parts: Vec<u32>,
    remaining: u64,
    started: bool,
}

impl WeakCompositions {
    /// Full stream without a budget check.
    pub fn new(alpha: u32, k: usize) -> Self {
        assert!(k >= 1);
        WeakCompositions {
            alpha,
            k,
            loops: vec![0; k - 1],
            parts: Self::first_parts(alpha, k),
            remaining: composition_count_checked(alpha, k),
            started: false,
        }
    }

    /// Full stream, refusing to start when the term count exceeds `cap`.
    /// The error carries the exact count.
    pub fn with_cap(alpha: u32, k: usize, cap: u64) -> Result<Self> {
        let count = composition_count(alpha, k);
        if count > BigUint::from(cap) {
            return Err(Error::Budget { required: count, cap });
        }
        Ok(Self::new(alpha, k))
    }

    /// Contiguous sub-range `[start, end)` of the full enumeration.
    pub fn range(alpha: u32, k: usize, start: u64, end: u64) -> Self {
        assert!(start <= end);
        let total = composition_count_checked(alpha, k);
        assert!(end <= total, "range end beyond the enumeration");
        if start == total {
            return WeakCompositions {
                alpha,
                k,
                loops: vec![0; k - 1],
                parts: vec![0; k],
                remaining: 0,
                started: true,
            };
        }
        let parts = unrank(alpha, k, start);
        let mut loops = Vec::with_capacity(k - 1);
        let mut rem = alpha;
        for &p in parts.iter().take(k - 1) {
            rem -= p;
            loops.push(rem);
        }
        WeakCompositions { alpha, k, loops, parts, remaining: end - start, started: false }
    }

    fn first_parts(alpha: u32, k: usize) -> Vec<u32> {
        let mut parts = vec![0; k];
        parts[0] = alpha;
        parts
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    fn rebuild_parts(&mut self) {
        let k = self.k;
        self.parts[0] = self.alpha - self.loops.first().copied().unwrap_or(0);
        for i in 1..k - 1 {
            self.parts[i] = self.loops[i - 1] - self.loops[i];
        }
        if k > 1 {
            self.parts[k - 1] = self.loops[k - 2];
        }
    }

    /// Advances to the next composition, borrowing the internal buffer.
    pub fn next_parts(&mut self) -> Option<&[u32]> {
        if self.remaining == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            self.remaining -= 1;
            return Some(&self.parts);
        }
        // Odometer on the loop variables, innermost fastest.
        for j in (0..self.k - 1).rev() {
            let bound = if j == 0 { self.alpha } else { self.loops[j - 1] };
            if self.loops[j] < bound {
                self.loops[j] += 1;
                for inner in self.loops[j + 1..].iter_mut() {
                    *inner = 0;
                }
                self.rebuild_parts();
                self.remaining -= 1;
                return Some(&self.parts);
            }
        }
        self.remaining = 0;
        None
    }

    /// Zero-allocation consumption of the whole stream.
    pub fn visit<F: FnMut(&[u32])>(mut self, mut f: F) {
        while let Some(parts) = self.next_parts() {
            f(parts);
        }
    }
}

impl Iterator for WeakCompositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.next_parts().map(|p| p.to_vec())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

/// Composition at position `idx` of the stream order.
fn unrank(alpha: u32, k: usize, mut idx: u64) -> Vec<u32> {
    let mut parts = Vec::with_capacity(k);
    let mut rem = alpha;
    for level in 0..k - 1 {
        let parts_after = k - level - 1;
        let mut tail = 0u32;
        loop {
            let block = composition_count_checked(tail, parts_after);
            if idx < block {
                parts.push(rem - tail);
                rem = tail;
                break;
            }
            idx -= block;
            tail += 1;
            debug_assert!(tail <= rem, "unrank index out of range");
        }
    }
    parts.push(rem);
    parts
}

/// Multinomial coefficients by the generalized Pascal recurrence
/// `C(α; α_1,…,α_k) = Σ_i C(α−1; α_1,…,α_i−1,…,α_k)`, memoized on the
/// sorted multiset of non-zero parts. Terms with a negative part are zero,
/// so positions at zero simply drop out of the sum.
#[derive(Debug, Default)]
pub struct PascalSimplex {
    memo: HashMap<Vec<u32>, BigUint>,
}

impl PascalSimplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coeff(&mut self, parts: &[u32]) -> BigUint {
        let mut key: Vec<u32> = parts.iter().copied().filter(|&p| p != 0).collect();
        key.sort_unstable();
        self.coeff_sorted(key)
    }

    fn coeff_sorted(&mut self, key: Vec<u32>) -> BigUint {
        if key.is_empty() {
            return BigUint::one();
        }
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for i in 0..key.len() {
            let mut sub = key.clone();
            sub[i] -= 1;
            if sub[i] == 0 {
                sub.remove(i);
            } else {
                sub.sort_unstable();
            }
            total += self.coeff_sorted(sub);
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// Exact multinomial coefficient `α! / (α_1! ⋯ α_k!)` with `α = Σ α_i`.
pub fn multinomial_coeff_exact(parts: &[u32]) -> BigUint {
    PascalSimplex::new().coeff(parts)
}

/// Log of the multinomial coefficient via log-Gamma sums.
pub fn multinomial_coeff_log(parts: &[u32]) -> f64 {
    let alpha: u64 = parts.iter().map(|&p| u64::from(p)).sum();
    let mut log = ln_gamma(alpha as f64 + 1.0);
    for &p in parts {
        log -= ln_gamma(f64::from(p) + 1.0);
    }
    log
}

/// Precomputed `ln Γ(i + 1)` for `i = 0..=alpha`, the only values the
/// expansion loops need.
pub(crate) fn ln_factorial_table(alpha: u32) -> Vec<f64> {
    (0..=alpha).map(|i| ln_gamma(f64::from(i) + 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    /// Independent oracle: the factorial formula on big integers.
    fn factorial(n: u32) -> BigUint {
        (1..=u64::from(n)).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
    }

    fn coeff_by_factorials(parts: &[u32]) -> BigUint {
        let alpha: u32 = parts.iter().sum();
        let mut denom = BigUint::one();
        for &p in parts {
            denom *= factorial(p);
        }
        factorial(alpha) / denom
    }

    #[test]
    fn binomial_spot_values() {
        assert_eq!(binomial(4, 3), BigUint::from(4u32));
        assert_eq!(binomial(5, 0), BigUint::from(1u32));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(3, 7), BigUint::zero());
    }

    #[test]
    fn enumeration_order_matches_nested_loops() {
        let got: Vec<Vec<u32>> = WeakCompositions::new(3, 2).collect();
        assert_eq!(got, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
    }

    #[test]
    fn zero_alpha_single_composition() {
        let got: Vec<Vec<u32>> = WeakCompositions::new(0, 3).collect();
        assert_eq!(got, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn counts_match_formula() {
        for alpha in 0..=8u32 {
            for k in 1..=6usize {
                let n = WeakCompositions::new(alpha, k).count();
                assert_eq!(BigUint::from(n as u64), composition_count(alpha, k));
            }
        }
        assert_eq!(composition_count(2, 3).to_u64(), Some(6));
    }

    #[test]
    fn every_composition_sums_to_alpha_and_is_unique() {
        for alpha in 0..=6u32 {
            for k in 1..=5usize {
                let all: Vec<Vec<u32>> = WeakCompositions::new(alpha, k).collect();
                let mut seen = std::collections::HashSet::new();
                for c in &all {
                    assert_eq!(c.iter().sum::<u32>(), alpha);
                    assert!(seen.insert(c.clone()), "duplicate composition {c:?}");
                }
            }
        }
    }

    #[test]
    fn range_splitting_reassembles_full_stream() {
        let alpha = 6;
        let k = 4;
        let total = composition_count(alpha, k).to_u64().unwrap();
        let full: Vec<Vec<u32>> = WeakCompositions::new(alpha, k).collect();
        for pieces in [2u64, 3, 5] {
            let mut glued = Vec::new();
            for w in 0..pieces {
                let start = total * w / pieces;
                let end = total * (w + 1) / pieces;
                glued.extend(WeakCompositions::range(alpha, k, start, end));
            }
            assert_eq!(glued, full);
        }
    }

    #[test]
    fn budget_error_carries_exact_count() {
        match WeakCompositions::with_cap(8, 6, 10) {
            Err(Error::Budget { required, cap }) => {
                assert_eq!(required, composition_count(8, 6));
                assert_eq!(cap, 10);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn pascal_simplex_spot_values() {
        let mut ps = PascalSimplex::new();
        assert_eq!(ps.coeff(&[1, 1]), BigUint::from(2u32));
        assert_eq!(ps.coeff(&[2, 1, 1]), BigUint::from(12u32));
        assert_eq!(ps.coeff(&[3, 0]), BigUint::one());
        assert_eq!(ps.coeff(&[]), BigUint::one());
    }

    #[test]
    fn pascal_matches_factorial_oracle() {
        let mut ps = PascalSimplex::new();
        for alpha in 0..=8u32 {
            for k in 1..=5usize {
                for parts in WeakCompositions::new(alpha, k) {
                    assert_eq!(ps.coeff(&parts), coeff_by_factorials(&parts), "{parts:?}");
                }
            }
        }
    }

    #[test]
    fn coefficients_sum_to_k_pow_alpha() {
        for alpha in 0..=8u32 {
            for k in 1..=5usize {
                let mut ps = PascalSimplex::new();
                let mut total = BigUint::zero();
                for parts in WeakCompositions::new(alpha, k) {
                    total += ps.coeff(&parts);
                }
                assert_eq!(total, BigUint::from(k as u64).pow(alpha), "k={k} alpha={alpha}");
            }
        }
    }

    #[test]
    fn pascal_recurrence_holds_exactly() {
        let mut ps = PascalSimplex::new();
        for parts in [vec![3u32, 2, 1], vec![4, 4], vec![2, 2, 2, 1], vec![5, 0, 3]] {
            let lhs = ps.coeff(&parts);
            let mut rhs = BigUint::zero();
            for i in 0..parts.len() {
                if parts[i] == 0 {
                    continue;
                }
                let mut sub = parts.clone();
                sub[i] -= 1;
                rhs += ps.coeff(&sub);
            }
            assert_eq!(lhs, rhs, "{parts:?}");
        }
    }

    #[test]
    fn log_coefficient_matches_exact() {
        // Includes the 30!/(10!)^3 case, about 5.55e12.
        for parts in [vec![1u32, 1], vec![2, 1, 1], vec![10, 10, 10], vec![8, 0, 4, 3]] {
            let exact = multinomial_coeff_exact(&parts);
            let exact_log = exact.to_f64().unwrap().ln();
            let log = multinomial_coeff_log(&parts);
            assert!(
                (log - exact_log).abs() <= 1e-12 * exact_log.abs().max(1.0),
                "{parts:?}: {log} vs {exact_log}"
            );
        }
    }

    proptest! {
        #[test]
        fn prop_pascal_recurrence(parts in prop::collection::vec(0u32..6, 1..5)) {
            let mut ps = PascalSimplex::new();
            let lhs = ps.coeff(&parts);
            if parts.iter().all(|&p| p == 0) {
                prop_assert_eq!(lhs, BigUint::one());
            } else {
                let mut rhs = BigUint::zero();
                for i in 0..parts.len() {
                    if parts[i] == 0 { continue; }
                    let mut sub = parts.clone();
                    sub[i] -= 1;
                    rhs += ps.coeff(&sub);
                }
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn prop_log_matches_exact(parts in prop::collection::vec(0u32..20, 1..6)) {
            let exact = multinomial_coeff_exact(&parts);
            let exact_log = exact.to_f64().unwrap().ln();
            let log = multinomial_coeff_log(&parts);
            prop_assert!((log - exact_log).abs() <= 1e-12 * exact_log.abs().max(1.0));
        }

        #[test]
        fn prop_unrank_consistent(alpha in 0u32..7, k in 1usize..6) {
            let total = composition_count(alpha, k).to_u64().unwrap();
            let full: Vec<Vec<u32>> = WeakCompositions::new(alpha, k).collect();
            for idx in 0..total {
                let tail: Vec<Vec<u32>> =
                    WeakCompositions::range(alpha, k, idx, total).take(1).collect();
                prop_assert_eq!(&tail[0], &full[idx as usize]);
            }
        }
    }
}
