//! Log-domain helpers shared by the cluster and dual evaluators.

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ln Σ exp(x_i)`; returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// A real number stored as sign and log-magnitude. Zero has `log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, log_abs: f64::NEG_INFINITY };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: x.signum(), log_abs: x.abs().ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn value(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.log_abs.exp()
        }
    }
}

/// Sum of signed terms given in sign/log-magnitude form.
pub fn signed_log_sum(terms: &[SignedLog]) -> SignedLog {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return SignedLog::ZERO;
    }
    let mut acc = CompensatedSum::new();
    for t in terms.iter().filter(|t| !t.is_zero()) {
        acc.add(t.sign * (t.log_abs - max).exp());
    }
    let s = acc.value();
    if s == 0.0 {
        SignedLog::ZERO
    } else {
        SignedLog { sign: s.signum(), log_abs: max + s.abs().ln() }
    }
}
