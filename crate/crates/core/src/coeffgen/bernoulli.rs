use num::bigint::BigInt;
use num::{One, Zero};

use crate::rational::Rational;

/// Bernoulli numbers `B_0 … B_max` with the `B_1 = -1/2` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.values.get(index)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// Builds `B_0 … B_max_index` from `Σ_{k=0}^{m} C(m+1, k) B_k = 0` (m ≥ 1).
pub fn bernoulli_numbers(max_index: usize) -> BernoulliTable {
    let mut values = vec![Rational::one()];
    for m in 1..=max_index {
        // binomial row m+1, built incrementally
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (k, b) in values.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        // binom now equals C(m+1, m) = m+1
        values.push(-acc / Rational::from_integer(binom));
    }
    BernoulliTable { values }
}
