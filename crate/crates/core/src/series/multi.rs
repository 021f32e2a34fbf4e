//! Sparse multivariate series with a hard total-degree cap.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::kernel::Rational;

pub const MAX_MULTI_ARITY: usize = 4;
pub const MAX_MULTI_CAP: u32 = 16;

/// Series in `arity` variables; terms of total degree above `cap` are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    arity: usize,
    cap: u32,
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn degree(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

impl MultiSeries {
    pub fn zero(arity: usize, cap: u32) -> Result<Self> {
        if arity == 0 || arity > MAX_MULTI_ARITY {
            return Err(Error::MultiSeriesLimit(format!(
                "arity {arity} not in 1..={MAX_MULTI_ARITY}"
            )));
        }
        if cap > MAX_MULTI_CAP {
            return Err(Error::MultiSeriesLimit(format!(
                "cap {cap} exceeds {MAX_MULTI_CAP}"
            )));
        }
        Ok(MultiSeries {
            arity,
            cap,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(c: Rational, arity: usize, cap: u32) -> Result<Self> {
        let mut s = Self::zero(arity, cap)?;
        s.insert(vec![0; arity], c);
        Ok(s)
    }

    pub fn one(arity: usize, cap: u32) -> Result<Self> {
        Self::constant(Rational::one(), arity, cap)
    }

    /// `exp(sum_i c_i x_i)` for an integer linear form.
    pub fn exp_linear(coeffs: &[i64], cap: u32) -> Result<Self> {
        let arity = coeffs.len();
        let mut linear = Self::zero(arity, cap)?;
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; arity];
            e[i] = 1;
            linear.insert(e, Rational::from(c));
        }
        let mut term = Self::one(arity, cap)?;
        let mut total = term.clone();
        for d in 1..=cap {
            term = (&term * &linear).scale(&Rational::new(1, d).expect("d >= 1"));
            total = &total + &term;
        }
        Ok(total)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        assert_eq!(exps.len(), self.arity, "exponent vector has wrong arity");
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    fn insert(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() || degree(&exps) > self.cap {
            return;
        }
        self.terms.insert(exps, c);
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: Rational) {
        if degree(&exps) > self.cap {
            return;
        }
        let slot = self.terms.entry(exps).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = MultiSeries {
            terms: BTreeMap::new(),
            ..*self
        };
        for (e, v) in &self.terms {
            out.insert(e.clone(), v * c);
        }
        out
    }

    /// Inverse of a series whose constant term is exactly 1, as the
    /// geometric sum of `-(self - 1)`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(&vec![0; self.arity]);
        if !c0.is_one() {
            return Err(Error::NotUnitConstant(c0.to_string()));
        }
        let one = Self::one(self.arity, self.cap)?;
        let minus_h = &one - self;
        let mut power = one.clone();
        let mut total = one;
        for _ in 0..self.cap {
            power = &power * &minus_h;
            total = &total + &power;
        }
        Ok(total)
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            self.arity, other.arity,
            "multivariate series arity mismatch"
        );
    }
}

impl<'b> Add<&'b MultiSeries> for &MultiSeries {
    type Output = MultiSeries;
    fn add(self, rhs: &'b MultiSeries) -> MultiSeries {
        self.check_compatible(rhs);
        let cap = self.cap.min(rhs.cap);
        let mut out = MultiSeries {
            arity: self.arity,
            cap,
            terms: BTreeMap::new(),
        };
        for (e, v) in self.terms.iter().chain(rhs.terms.iter()) {
            out.accumulate(e.clone(), v.clone());
        }
        out
    }
}

impl<'b> Sub<&'b MultiSeries> for &MultiSeries {
    type Output = MultiSeries;
    fn sub(self, rhs: &'b MultiSeries) -> MultiSeries {
        self + &rhs.scale(&Rational::from(-1))
    }
}

impl<'b> Mul<&'b MultiSeries> for &MultiSeries {
    type Output = MultiSeries;
    fn mul(self, rhs: &'b MultiSeries) -> MultiSeries {
        self.check_compatible(rhs);
        let cap = self.cap.min(rhs.cap);
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, va) in &self.terms {
            let da = degree(ea);
            for (eb, vb) in &rhs.terms {
                if da + degree(eb) > cap {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += va * vb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MultiSeries {
            arity: self.arity,
            cap,
            terms: acc,
        }
    }
}

/// Expansion of `1 / prod_{j=1..r} (e^{-(x_j + ... + x_r)} + e^{-t} - 1)` in
/// the variables `(x_1, ..., x_r, t)`, up to total degree `cap`.
pub fn joint_generating_series(r: usize, cap: u32) -> Result<MultiSeries> {
    if r == 0 {
        return Err(Error::ArgumentTooSmall {
            name: "r",
            min: 1,
            got: 0,
        });
    }
    let arity = r + 1;
    let mut exp_t = vec![0i64; arity];
    exp_t[r] = -1;
    let e_minus_t = MultiSeries::exp_linear(&exp_t, cap)?;
    let minus_one = MultiSeries::constant(Rational::from(-1), arity, cap)?;
    let mut product = MultiSeries::one(arity, cap)?;
    for j in 0..r {
        let tail: Vec<i64> = (0..arity)
            .map(|i| if i >= j && i < r { -1 } else { 0 })
            .collect();
        let factor = &(&MultiSeries::exp_linear(&tail, cap)? + &e_minus_t) + &minus_one;
        let c0 = factor.coeff(&vec![0; arity]);
        assert!(c0.is_one(), "factor constant term is {c0}, expected 1");
        product = &product * &factor.inverse()?;
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d).unwrap()
    }

    #[test]
    fn exp_linear_matches_univariate_taylor() {
        let e = MultiSeries::exp_linear(&[1, 0], 5).unwrap();
        assert_eq!(e.coeff(&[3, 0]), q(1, 6));
        assert_eq!(e.coeff(&[0, 1]), Rational::zero());
        let f = MultiSeries::exp_linear(&[-1, -1], 4).unwrap();
        // e^{-(x+y)}: coefficient of x^2 y^1 is -C(3,1)/3! = -1/2
        assert_eq!(f.coeff(&[2, 1]), q(-1, 2));
    }

    #[test]
    fn products_respect_the_cap() {
        let e = MultiSeries::exp_linear(&[1, 1, 1], 3).unwrap();
        let sq = &e * &e;
        assert!(sq.terms().all(|(exp, _)| degree(exp) <= 3));
        // e^{2(x+y+z)}: coefficient of x y z is 2^3
        assert_eq!(sq.coeff(&[1, 1, 1]), Rational::from(8));
    }

    #[test]
    fn inverse_round_trip() {
        let e = MultiSeries::exp_linear(&[2, -1], 6).unwrap();
        let inv = e.inverse().unwrap();
        assert_eq!(&e * &inv, MultiSeries::one(2, 6).unwrap());
        assert_eq!(inv, MultiSeries::exp_linear(&[-2, 1], 6).unwrap());
        let two = MultiSeries::constant(Rational::from(2), 2, 3).unwrap();
        assert!(matches!(two.inverse(), Err(Error::NotUnitConstant(_))));
    }

    #[test]
    fn limits() {
        assert!(MultiSeries::zero(5, 3).is_err());
        assert!(MultiSeries::zero(2, MAX_MULTI_CAP + 1).is_err());
        assert!(joint_generating_series(0, 3).is_err());
    }

    #[test]
    fn rhs_examples() {
        let one = joint_generating_series(1, 4).unwrap();
        assert_eq!(one.coeff(&[2, 2]), q(7, 2));
        assert_eq!(
            joint_generating_series(1, 2).unwrap().coeff(&[0, 0]),
            Rational::one()
        );
        let two = joint_generating_series(2, 4).unwrap();
        assert_eq!(two.coeff(&[0, 1, 1]), Rational::from(6));
    }
}
