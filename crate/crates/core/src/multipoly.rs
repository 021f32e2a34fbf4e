//! Multi-poly-Bernoulli numbers `B_n^(k1,...,kr)`.
//!
//! Nonpositive index vectors have three independent routes:
//!
//! * the alpha-coefficient engine, which writes `B_n^(-k1,...,-kr)` as an
//!   integer combination of powers `(l + r)^n`;
//! * a recurrence that grows the vector one entry at a time, extending by a
//!   zero with a binomial transform and decrementing the last entry with the
//!   three-term recurrence in `n`;
//! * the generating-series oracle from [`crate::series`].
//!
//! Vectors with a positive entry only have the series route.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::{Engine, Fault};
use crate::error::{Error, Result};
use crate::kernel::{binomial, factorial, pow_u, rising_factorial, sign, Rational};
use crate::polybern::SINGLE_VALUE_SLACK;
use crate::series::mpb_generating_series;

/// Upper index `(k1, ..., kr)` with `r >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexVector(Vec<i64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignProfile {
    AllZero,
    /// Every entry `<= 0`, at least one negative.
    NonPositive,
    /// At least one entry `> 0`.
    HasPositive,
}

impl IndexVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyIndexVector);
        }
        Ok(IndexVector(entries))
    }

    pub fn zeros(r: u32) -> Self {
        assert!(r >= 1, "index vectors have at least one entry");
        IndexVector(vec![0; r as usize])
    }

    /// Length-`r` vector with `value` at 1-based `position` and zeros elsewhere.
    pub fn single(r: u32, position: u32, value: i64) -> Result<Self> {
        if position == 0 || position > r {
            return Err(Error::PositionOutOfRange { position, len: r });
        }
        let mut v = vec![0; r as usize];
        v[position as usize - 1] = value;
        Ok(IndexVector(v))
    }

    /// Nonpositive vector from magnitudes: `(k1, ..., kr) -> (-k1, ..., -kr)`.
    pub fn from_magnitudes(magnitudes: &[u32]) -> Result<Self> {
        Self::new(magnitudes.iter().map(|&k| -i64::from(k)).collect())
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn sign_profile(&self) -> SignProfile {
        if self.0.iter().any(|&k| k > 0) {
            SignProfile::HasPositive
        } else if self.0.iter().all(|&k| k == 0) {
            SignProfile::AllZero
        } else {
            SignProfile::NonPositive
        }
    }

    /// `(-k1, ..., -kr) -> (k1, ..., kr)`; fails on a positive entry.
    pub fn magnitudes(&self) -> Result<Vec<u32>> {
        self.0
            .iter()
            .map(|&k| {
                if k > 0 {
                    Err(Error::PositiveIndex(self.to_string()))
                } else {
                    Ok(u32::try_from(-k).expect("index magnitude exceeds u32"))
                }
            })
            .collect()
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Parses `k1,k2,...`, optionally wrapped in parentheses.
impl FromStr for IndexVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if inner.is_empty() {
            return Err(Error::EmptyIndexVector);
        }
        let entries = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::ParseScalar(p.trim().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        IndexVector::new(entries)
    }
}

/// `sum_l coeff(l) * (l + base_offset)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerExpansion {
    pub base_offset: u32,
    pub terms: BTreeMap<u32, BigInt>,
}

impl PowerExpansion {
    pub fn eval(&self, n: u32) -> BigInt {
        self.terms
            .iter()
            .map(|(&l, c)| c * pow_u(u64::from(l) + u64::from(self.base_offset), n))
            .sum()
    }

    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn coefficient(&self, l: u32) -> BigInt {
        self.terms.get(&l).cloned().unwrap_or_default()
    }
}

/// Renders like `3^n - 7*4^n + 8*5^n`, omitting zero terms.
impl fmt::Display for PowerExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&l, c) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let base = u64::from(l) + u64::from(self.base_offset);
            let negative = c < &BigInt::zero();
            let magnitude = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{base}^n")?;
            } else {
                write!(f, "{magnitude}*{base}^n")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Integers `alpha_1..alpha_k` with
/// `B_n^(-k1,...,-kr) = sum_l alpha_l (l + r)^n`, `k = k1 + ... + kr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaVector {
    pub magnitudes: Vec<u32>,
    pub weight: u32,
    /// `coefficients[l - 1]` is `alpha_l`.
    pub coefficients: Vec<BigInt>,
}

impl AlphaVector {
    /// `alpha_l`, zero for `l = 0` and `l > weight`.
    pub fn alpha(&self, l: u32) -> BigInt {
        if l == 0 || l > self.weight {
            return BigInt::zero();
        }
        self.coefficients[l as usize - 1].clone()
    }

    pub fn expansion(&self) -> PowerExpansion {
        PowerExpansion {
            base_offset: self.magnitudes.len() as u32,
            terms: (1..=self.weight)
                .zip(self.coefficients.iter().cloned())
                .collect(),
        }
    }
}

/// Which computation produced a multi-poly-Bernoulli value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    AllZero,
    Alpha,
    Recurrence,
    Series,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::AllZero => "all-zero",
            Route::Alpha => "alpha",
            Route::Recurrence => "recurrence",
            Route::Series => "series",
        })
    }
}

impl Engine {
    /// Alpha coefficients, built left to right: seed from the first entry,
    /// copy when appending a zero, and apply
    /// `alpha_l <- (l + r - 1) alpha_{l-1} - l alpha_l` for each unit added to
    /// the last entry of a length-`r` vector.
    pub fn alpha_coefficients(&self, magnitudes: &[u32]) -> Result<Arc<AlphaVector>> {
        if magnitudes.is_empty() {
            return Err(Error::EmptyIndexVector);
        }
        if magnitudes.iter().all(|&k| k == 0) {
            return Err(Error::AllZeroIndexVector);
        }
        self.alpha_memo
            .get_or_try_insert_with(&magnitudes.to_vec(), || {
                let mut alpha = self.compute_alpha(magnitudes);
                if let Some(Fault::Alpha {
                    magnitudes: target,
                    l,
                    delta,
                }) = &self.fault
                {
                    if target == magnitudes && (1..=alpha.weight).contains(l) {
                        alpha.coefficients[*l as usize - 1] += *delta;
                    }
                }
                Ok(Arc::new(alpha))
            })
    }

    fn compute_alpha(&self, magnitudes: &[u32]) -> AlphaVector {
        let k1 = magnitudes[0];
        // table[l] = alpha_l for l = 0..=current weight
        let mut table: Vec<BigInt> = (0..=k1)
            .map(|l| {
                if l == 0 {
                    if k1 == 0 {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                } else {
                    sign(i64::from(l + k1)) * factorial(l) * self.stirling2(k1, l)
                }
            })
            .collect();
        for (pos, &kj) in magnitudes.iter().enumerate().skip(1) {
            let r = pos as u64 + 1;
            for _ in 0..kj {
                let len = table.len();
                let next: Vec<BigInt> = (0..=len)
                    .map(|l| {
                        let prev = if l == 0 {
                            BigInt::zero()
                        } else {
                            &table[l - 1] * BigInt::from(l as u64 + r - 1)
                        };
                        let here = table
                            .get(l)
                            .map(|a| a * BigInt::from(l))
                            .unwrap_or_default();
                        prev - here
                    })
                    .collect();
                table = next;
            }
        }
        let weight: u32 = magnitudes.iter().sum();
        debug_assert_eq!(table.len(), weight as usize + 1);
        debug_assert!(table[0].is_zero());
        AlphaVector {
            magnitudes: magnitudes.to_vec(),
            weight,
            coefficients: table.split_off(1),
        }
    }

    pub fn mpb_from_alpha(&self, n: u32, magnitudes: &[u32]) -> Result<BigInt> {
        Ok(self.alpha_coefficients(magnitudes)?.expansion().eval(n))
    }

    /// `B_0 .. B_upto` of a nonpositive vector via the entry-by-entry recurrence.
    pub fn mpb_recurrence_row(&self, indices: &IndexVector, upto: u32) -> Result<Vec<BigInt>> {
        let magnitudes = indices.magnitudes()?;
        Ok(self.recurrence_row(&magnitudes, upto as usize))
    }

    fn recurrence_row(&self, magnitudes: &[u32], upto: usize) -> Vec<BigInt> {
        let (&last, prefix) = magnitudes.split_last().expect("nonempty");
        let last = last as usize;
        if prefix.is_empty() {
            return (0..=upto as u32)
                .map(|n| self.pb_closed_neg(n, last as u32))
                .collect();
        }
        let r = magnitudes.len() as u64;
        let reach = upto + last;
        let prefix_row = self.recurrence_row(prefix, reach);
        // B_n^(..., 0) = sum_i C(n, i) B_i^(...)
        let mut row: Vec<BigInt> = (0..=reach)
            .map(|n| {
                (0..=n)
                    .map(|i| binomial(n as u32, i as i64) * &prefix_row[i])
                    .sum()
            })
            .collect();
        // B_n^(..., -k-1) = sum_m C(n, m) B_{m+1}^(..., -k) + r B_n^(..., -k) - B_{n+1}^(..., -k)
        for _ in 0..last {
            let len = row.len() - 1;
            row = (0..len)
                .map(|n| {
                    let s: BigInt = (0..=n)
                        .map(|m| binomial(n as u32, m as i64) * &row[m + 1])
                        .sum();
                    s + BigInt::from(r) * &row[n] - &row[n + 1]
                })
                .collect();
        }
        row.truncate(upto + 1);
        row
    }

    pub fn mpb_recurrence(&self, n: u32, indices: &IndexVector) -> Result<BigInt> {
        Ok(self
            .mpb_recurrence_row(indices, n)?
            .pop()
            .expect("row has n + 1 entries"))
    }

    /// Dispatches on the sign profile and reports the route used.
    pub fn mpb_with_route(&self, n: u32, indices: &IndexVector) -> (Rational, Route) {
        match indices.sign_profile() {
            SignProfile::AllZero => (
                Rational::from(pow_u(indices.len() as u64, n)),
                Route::AllZero,
            ),
            SignProfile::NonPositive => {
                let mags = indices.magnitudes().expect("nonpositive");
                let v = self.mpb_from_alpha(n, &mags).expect("not all zero");
                (Rational::from(v), Route::Alpha)
            }
            SignProfile::HasPositive => (mpb_series(n, indices), Route::Series),
        }
    }

    pub fn mpb(&self, n: u32, indices: &IndexVector) -> Rational {
        self.mpb_with_route(n, indices).0
    }

    /// `B_n` of the length-`r` vector with `-1` at position `i`: `i (r+1)^n`.
    pub fn special_single_minus_one(&self, n: u32, r: u32, i: u32) -> Result<BigInt> {
        check_position(r, i)?;
        Ok(BigInt::from(i) * pow_u(u64::from(r) + 1, n))
    }

    /// Power expansion of the length-`r` vector with `-m` at position `i`:
    /// coefficient of `(r + l)^n` is `(-1)^{l+m} (i)_l {m, l}`.
    pub fn expansion_single_minus_m(&self, m: u32, r: u32, i: u32) -> Result<PowerExpansion> {
        check_position(r, i)?;
        if m == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "m",
                min: 1,
                got: 0,
            });
        }
        let terms = (1..=m)
            .map(|l| {
                (
                    l,
                    sign(i64::from(l + m)) * rising_factorial(i, l) * self.stirling2(m, l),
                )
            })
            .collect();
        Ok(PowerExpansion {
            base_offset: r,
            terms,
        })
    }

    /// The same vector's value as a combination of single-index numbers:
    /// `sum_{l=1}^{m} (-1)^{l+m} (i)_l {m,l} / (r+l-1)! * sum_{k=1}^{r+l-1} [r+l-1, k] B_n^(-k)`.
    /// The result must be an integer.
    pub fn mpb_as_pb_sum(&self, m: u32, r: u32, i: u32, n: u32) -> Result<Rational> {
        check_position(r, i)?;
        if m == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "m",
                min: 1,
                got: 0,
            });
        }
        let mut total = Rational::zero();
        for l in 1..=m {
            let top = r + l - 1;
            let weight = Rational::from(
                sign(i64::from(l + m)) * rising_factorial(i, l) * self.stirling2(m, l),
            )
            .checked_div(&Rational::from(factorial(top)))?;
            let inner: Rational = (1..=top)
                .map(|k| {
                    Rational::from(self.stirling1_unsigned(top, k)) * self.pb(n, -i64::from(k))
                })
                .sum();
            total += weight * inner;
        }
        if !total.is_integer() {
            return Err(Error::NotIntegral(total.to_string()));
        }
        Ok(total)
    }
}

fn check_position(r: u32, i: u32) -> Result<()> {
    if i == 0 || i > r {
        return Err(Error::PositionOutOfRange {
            position: i,
            len: r,
        });
    }
    Ok(())
}

/// Series-oracle value `n! [t^n]` of the defining generating function.
pub fn mpb_series(n: u32, indices: &IndexVector) -> Rational {
    mpb_series_row(indices, n + SINGLE_VALUE_SLACK as u32).swap_remove(n as usize)
}

/// Series-oracle values `B_0 .. B_upto` from a single expansion.
pub fn mpb_series_row(indices: &IndexVector, upto: u32) -> Vec<Rational> {
    let s = mpb_generating_series(indices, upto as usize)
        .expect("the polylog has valuation >= r, so the quotient exists");
    (0..=upto as usize)
        .map(|n| s.egf_coefficient(n).expect("within order"))
        .collect()
}

pub fn alpha_coefficients(magnitudes: &[u32]) -> Result<Arc<AlphaVector>> {
    Engine::global().alpha_coefficients(magnitudes)
}

pub fn mpb_from_alpha(n: u32, magnitudes: &[u32]) -> Result<BigInt> {
    Engine::global().mpb_from_alpha(n, magnitudes)
}

pub fn mpb_recurrence(n: u32, indices: &IndexVector) -> Result<BigInt> {
    Engine::global().mpb_recurrence(n, indices)
}

pub fn mpb(n: u32, indices: &IndexVector) -> Rational {
    Engine::global().mpb(n, indices)
}

pub fn special_single_minus_one(n: u32, r: u32, i: u32) -> Result<BigInt> {
    Engine::global().special_single_minus_one(n, r, i)
}

pub fn expansion_single_minus_m(m: u32, r: u32, i: u32) -> Result<PowerExpansion> {
    Engine::global().expansion_single_minus_m(m, r, i)
}

pub fn mpb_as_pb_sum(m: u32, r: u32, i: u32, n: u32) -> Result<Rational> {
    Engine::global().mpb_as_pb_sum(m, r, i, n)
}
