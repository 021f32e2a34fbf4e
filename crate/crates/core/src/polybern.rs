//! Single-index poly-Bernoulli numbers `B_n^(k)` for every integer `k`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::kernel::{factorial, pow_u, sign, Rational};
use crate::multipoly::IndexVector;
use crate::series::mpb_generating_series;

/// Extra truncation order used when a single coefficient is extracted from a
/// generating series.
pub const SINGLE_VALUE_SLACK: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyBernoulliValue {
    pub n: u32,
    pub k: i64,
    pub value: Rational,
}

impl Engine {
    /// `B_n^(-k)` by the closed formula
    /// `sum_{j=0}^{min(n,k)} (j!)^2 {n+1, j+1} {k+1, j+1}`.
    pub fn pb_closed_neg(&self, n: u32, k: u32) -> BigInt {
        (0..=n.min(k))
            .map(|j| {
                let f = factorial(j);
                &f * &f * self.stirling2(n + 1, j + 1) * self.stirling2(k + 1, j + 1)
            })
            .sum()
    }

    /// `B_n^(-k) = sum_{l=1}^{k} (-1)^{l+k} l! {k, l} (l+1)^n`, for `k >= 1`.
    pub fn pb_power_sum(&self, n: u32, k: u32) -> Result<BigInt> {
        if k == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "k",
                min: 1,
                got: 0,
            });
        }
        Ok((1..=k)
            .map(|l| {
                sign(i64::from(l + k))
                    * factorial(l)
                    * self.stirling2(k, l)
                    * pow_u(u64::from(l) + 1, n)
            })
            .sum())
    }

    /// Memoized dispatcher: the closed formula for negative `k`, the
    /// generating series otherwise.
    pub fn pb(&self, n: u32, k: i64) -> Rational {
        self.pb_memo
            .get_or_try_insert_with(&(n, k), || -> Result<Rational> {
                Ok(if k < 0 {
                    let magnitude = u32::try_from(-k).expect("index magnitude exceeds u32");
                    Rational::from(self.pb_closed_neg(n, magnitude))
                } else {
                    pb_series(n, k)
                })
            })
            .expect("pb routes are infallible")
    }

    pub fn pb_value(&self, n: u32, k: i64) -> PolyBernoulliValue {
        PolyBernoulliValue {
            n,
            k,
            value: self.pb(n, k),
        }
    }
}

/// `n! [t^n]` of `Li_k(1 - e^{-t}) / (1 - e^{-t})`.
pub fn pb_series(n: u32, k: i64) -> Rational {
    let indices = IndexVector::new(vec![k]).expect("one entry");
    mpb_generating_series(&indices, n as usize + SINGLE_VALUE_SLACK)
        .expect("the polylog has valuation >= 1")
        .egf_coefficient(n as usize)
        .expect("order covers n")
}

pub fn pb_closed_neg(n: u32, k: u32) -> BigInt {
    Engine::global().pb_closed_neg(n, k)
}

pub fn pb_power_sum(n: u32, k: u32) -> Result<BigInt> {
    Engine::global().pb_power_sum(n, k)
}

pub fn pb(n: u32, k: i64) -> Rational {
    Engine::global().pb(n, k)
}
