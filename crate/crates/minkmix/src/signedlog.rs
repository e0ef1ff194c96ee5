//! Signed log-domain arithmetic.
//!
//! Multinomial expansions of mixture powers produce terms spanning hundreds
//! of orders of magnitude, and the squared-difference expansion behind `M_α`
//! additionally produces *negative* coefficients. Every internal summation
//! therefore runs on `(sign, log magnitude)` pairs: products are exact sums
//! of logs, and sums go through a max-shifted, Kahan-compensated
//! log-sum-exp with separate pools for positive and negative terms that are
//! merged once at the end.

/// A real number stored as `sign · exp(log_mag)`.
///
/// `sign == 0` encodes exact zero; `log_mag` is ignored in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    sign: i8,
    log_mag: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };

    /// Wraps a plain float. `0.0` maps to the exact zero.
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else if v > 0.0 {
            Self { sign: 1, log_mag: v.ln() }
        } else {
            Self { sign: -1, log_mag: (-v).ln() }
        }
    }

    /// Builds from an explicit sign and log-magnitude.
    pub fn new(sign: i8, log_mag: f64) -> Self {
        debug_assert!((-1..=1).contains(&sign));
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign, log_mag }
        }
    }

    /// Positive value from its logarithm.
    pub fn from_log(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of |value|; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to a plain float. Overflows to ±inf, underflows to ±0.
    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            1 => self.log_mag.exp(),
            _ => -self.log_mag.exp(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.sign * other.sign, self.log_mag + other.log_mag)
    }

    /// Integer power: exact on the sign, a product in the log domain.
    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Self { sign: 1, log_mag: 0.0 };
        }
        let sign = if self.sign >= 0 || n % 2 == 0 { self.sign.abs() } else { -1 };
        Self::new(sign * self.sign.abs(), f64::from(n) * self.log_mag)
    }

    pub fn neg(&self) -> Self {
        Self { sign: -self.sign, log_mag: self.log_mag }
    }

    /// Signed addition through log-sum-exp; exact cancellation gives zero.
    pub fn add(&self, other: &Self) -> Self {
        match (self.sign, other.sign) {
            (0, _) => *other,
            (_, 0) => *self,
            (a, b) if a == b => Self::new(a, log_sum_exp2(self.log_mag, other.log_mag)),
            _ => {
                let (big, small) =
                    if self.log_mag >= other.log_mag { (self, other) } else { (other, self) };
                if big.log_mag == small.log_mag {
                    return Self::ZERO;
                }
                Self::new(big.sign, big.log_mag + (-((small.log_mag - big.log_mag).exp())).ln_1p())
            }
        }
    }
}

/// One sign's worth of a running log-sum-exp.
///
/// Stores `sum · exp(max)` with `sum` kept near `[1, n]` by rescaling
/// whenever a larger exponent arrives; `comp` is the Kahan compensation.
#[derive(Debug, Clone)]
struct LogPool {
    max: f64,
    sum: f64,
    comp: f64,
}

impl LogPool {
    fn new() -> Self {
        LogPool { max: f64::NEG_INFINITY, sum: 0.0, comp: 0.0 }
    }

    fn kahan_add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn add(&mut self, log_mag: f64) {
        if log_mag == f64::NEG_INFINITY {
            return;
        }
        if log_mag > self.max {
            let scale = (self.max - log_mag).exp(); // 0.0 on the first term
            self.sum *= scale;
            self.comp *= scale;
            self.max = log_mag;
            self.kahan_add(1.0);
        } else {
            self.kahan_add((log_mag - self.max).exp());
        }
    }

    fn merge(&mut self, other: &LogPool) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            let scale = (self.max - other.max).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = other.max;
            self.kahan_add(other.sum);
            self.kahan_add(other.comp);
        } else {
            let scale = (other.max - self.max).exp();
            self.kahan_add(other.sum * scale);
            self.kahan_add(other.comp * scale);
        }
    }

    fn log_total(&self) -> f64 {
        let s = self.sum + self.comp;
        if s <= 0.0 || self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + s.ln()
        }
    }
}

/// Accumulates signed log-domain terms: positive and negative pools are
/// summed independently and merged into one [`SignedLogValue`] at the end.
#[derive(Debug, Clone)]
pub struct SignedLogAccumulator {
    pos: LogPool,
    neg: LogPool,
}

impl Default for SignedLogAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl SignedLogAccumulator {
    pub fn new() -> Self {
        SignedLogAccumulator { pos: LogPool::new(), neg: LogPool::new() }
    }

    pub fn add(&mut self, term: SignedLogValue) {
        match term.sign {
            1 => self.pos.add(term.log_mag),
            -1 => self.neg.add(term.log_mag),
            _ => {}
        }
    }

    pub fn add_log(&mut self, sign: i8, log_mag: f64) {
        match sign {
            1 => self.pos.add(log_mag),
            -1 => self.neg.add(log_mag),
            _ => {}
        }
    }

    /// Merges another accumulator. Deterministic for a fixed merge order, so
    /// parallel consumers must merge their partial accumulators by index.
    pub fn merge(&mut self, other: &SignedLogAccumulator) {
        self.pos.merge(&other.pos);
        self.neg.merge(&other.neg);
    }

    /// Log of the total positive mass seen so far; the scale against which
    /// cancellation residuals are judged.
    pub fn log_positive_mass(&self) -> f64 {
        self.pos.log_total()
    }

    /// Final signed merge of the two pools.
    pub fn total(&self) -> SignedLogValue {
        let lp = self.pos.log_total();
        let ln = self.neg.log_total();
        if lp == f64::NEG_INFINITY && ln == f64::NEG_INFINITY {
            return SignedLogValue::ZERO;
        }
        if lp >= ln {
            SignedLogValue::new(1, lp + (-((ln - lp).exp())).ln_1p())
        } else {
            SignedLogValue::new(-1, ln + (-((lp - ln).exp())).ln_1p())
        }
    }
}

/// `log(exp(a) + exp(b))` guarded against infinities.
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Max-shifted `log Σ exp(x_i)` over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roundtrip_and_zero() {
        let v = SignedLogValue::from_value(-3.25);
        assert_eq!(v.sign(), -1);
        assert_relative_eq!(v.value(), -3.25, max_relative = 1e-15);
        assert!(SignedLogValue::from_value(0.0).is_zero());
        assert_eq!(SignedLogValue::from_value(0.0).value(), 0.0);
    }

    #[test]
    fn product_and_power_signs() {
        let a = SignedLogValue::from_value(-2.0);
        let b = SignedLogValue::from_value(4.0);
        assert_relative_eq!(a.mul(&b).value(), -8.0, max_relative = 1e-14);
        assert_relative_eq!(a.powi(3).value(), -8.0, max_relative = 1e-14);
        assert_relative_eq!(a.powi(2).value(), 4.0, max_relative = 1e-14);
        assert_eq!(SignedLogValue::ZERO.powi(0).value(), 1.0);
        assert!(SignedLogValue::ZERO.powi(2).is_zero());
    }

    #[test]
    fn accumulator_matches_plain_sum() {
        let terms = [1.5, -0.25, 3.0, -1.75, 0.5];
        let mut acc = SignedLogAccumulator::new();
        for t in terms {
            acc.add(SignedLogValue::from_value(t));
        }
        let expected: f64 = terms.iter().sum();
        assert_relative_eq!(acc.total().value(), expected, max_relative = 1e-14);
    }

    #[test]
    fn accumulator_survives_huge_dynamic_range() {
        // exp(1000) + exp(999) - exp(1000) == exp(999) in exact arithmetic.
        let mut acc = SignedLogAccumulator::new();
        acc.add_log(1, 1000.0);
        acc.add_log(1, 999.0);
        acc.add_log(-1, 1000.0);
        let total = acc.total();
        assert_eq!(total.sign(), 1);
        assert_relative_eq!(total.log_mag(), 999.0, max_relative = 1e-13);

        // A residual smaller than an ulp of the positive pool is gone for
        // good; the two-pass sum collapses it to an exact zero rather than
        // inventing a value.
        let mut tiny = SignedLogAccumulator::new();
        tiny.add_log(1, 1000.0);
        tiny.add_log(1, -1000.0);
        tiny.add_log(-1, 1000.0);
        assert!(tiny.total().is_zero());
    }

    #[test]
    fn exact_cancellation_yields_zero() {
        let mut acc = SignedLogAccumulator::new();
        acc.add_log(1, 2.5);
        acc.add_log(-1, 2.5);
        assert!(acc.total().is_zero());
    }

    #[test]
    fn merge_agrees_with_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64) - 50.0).collect();
        let mut whole = SignedLogAccumulator::new();
        for &x in &xs {
            whole.add_log(if x >= 0.0 { 1 } else { -1 }, x.abs());
        }
        let mut parts: Vec<SignedLogAccumulator> = Vec::new();
        for chunk in xs.chunks(173) {
            let mut acc = SignedLogAccumulator::new();
            for &x in chunk {
                acc.add_log(if x >= 0.0 { 1 } else { -1 }, x.abs());
            }
            parts.push(acc);
        }
        let mut merged = parts[0].clone();
        for p in &parts[1..] {
            merged.merge(p);
        }
        assert_relative_eq!(
            merged.total().log_mag(),
            whole.total().log_mag(),
            max_relative = 1e-13
        );
        assert_eq!(merged.total().sign(), whole.total().sign());
    }

    #[test]
    fn log_sum_exp_basics() {
        assert_relative_eq!(log_sum_exp2(0.0, 0.0), 2.0_f64.ln(), max_relative = 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_relative_eq!(
            log_sum_exp(&[1000.0, 1000.0]),
            1000.0 + 2.0_f64.ln(),
            max_relative = 1e-15
        );
    }
}
