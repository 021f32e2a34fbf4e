//! Truncated formal power series over exact rationals, the multiple
//! polylogarithm coefficient generator, and the exponential generating
//! series of multi-poly-Bernoulli numbers. This is the independent oracle the
//! recurrence routes are checked against.

mod multi;

pub use multi::{joint_generating_series, MultiSeries, MAX_MULTI_ARITY, MAX_MULTI_CAP};

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::kernel::{factorial, Rational};
use crate::multipoly::IndexVector;

/// A power series `sum c_i t^i` known up to and including `t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Builds a series from `coeffs[0..=order]`. An empty vector is the zero
    /// series of order 0.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// The series `t` (the identity map under composition).
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, or `None` past the truncation order.
    pub fn coeff(&self, i: usize) -> Option<&Rational> {
        self.coeffs.get(i)
    }

    /// `n! [t^n]`, the value an exponential generating series assigns to `n`.
    pub fn egf_coefficient(&self, n: usize) -> Option<Rational> {
        self.coeff(n)
            .map(|c| c * Rational::from(factorial(n as u32)))
    }

    /// Index of the first nonzero coefficient; `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Divides by `t^k`; requires valuation at least `k` and `k <= order`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if let Some(v) = self.valuation() {
            if v < k {
                return Err(Error::ValuationTooLow {
                    valuation: v,
                    power: k,
                });
            }
        }
        if k > self.order() {
            return Err(Error::ValuationTooLow {
                valuation: self.order(),
                power: k,
            });
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Multiplicative inverse of a series with nonzero constant term,
    /// coefficient by coefficient.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let inv0 = c0
            .recip()
            .map_err(|_| Error::NotUnitConstant(c0.to_string()))?;
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let acc: Rational = (1..=n).map(|i| &self.coeffs[i] * &out[n - i]).sum();
            out.push(-(acc * &inv0));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<'b> Add<&'b TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &'b TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
                .collect(),
        }
    }
}

impl<'b> Sub<&'b TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &'b TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'b> Mul<&'b TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &'b TruncatedSeries) -> TruncatedSeries {
        series_mul(self, rhs)
    }
}

/// Cauchy product truncated to the smaller of the two orders.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    let order = a.order().min(b.order());
    let mut out = vec![Rational::zero(); order + 1];
    for (i, x) in a.coeffs.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate().take(order + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    TruncatedSeries { coeffs: out }
}

/// `f(g(t))` by Horner's rule, truncated to the common order. `g(0)` must be 0.
pub fn compose(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !g.coeffs[0].is_zero() {
        return Err(Error::NonZeroConstantTerm);
    }
    let order = f.order().min(g.order());
    let g = g.truncate(order);
    let mut acc = TruncatedSeries::constant(f.coeffs[order].clone(), order);
    for c in f.coeffs[..order].iter().rev() {
        acc = &acc * &g;
        acc.coeffs[0] += c;
    }
    Ok(acc)
}

/// `f / u^r` where `u` has valuation exactly 1 and `f` valuation at least
/// `r`. The result has order `order(f) - r` (or less if `u` is shorter).
pub fn divide_by_valuation_power(
    f: &TruncatedSeries,
    u: &TruncatedSeries,
    r: usize,
) -> Result<TruncatedSeries> {
    if u.valuation() != Some(1) {
        return Err(Error::DivisorValuation);
    }
    let numer = f.shift_down(r)?;
    let unit = u.shift_down(1)?;
    let order = numer.order().min(unit.order());
    let denom = unit.truncate(order).pow(r as u32).inverse()?;
    Ok(&numer.truncate(order) * &denom)
}

/// `1 - e^{-t}` to order `order`.
pub fn u_series(order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Rational::zero());
    let mut fact = BigInt::from(1);
    for n in 1..=order {
        fact *= BigInt::from(n);
        let sign = if n % 2 == 1 { 1 } else { -1 };
        coeffs.push(Rational::new(sign, fact.clone()).expect("factorial is nonzero"));
    }
    TruncatedSeries { coeffs }
}

/// Coefficients of the multiple polylogarithm
/// `Li_{k1..kr}(z) = sum_{0<m1<...<mr} z^{mr} / (m1^k1 ... mr^kr)` to order
/// `order`, by a prefix-sum sweep over the nesting depth.
pub fn multiple_polylog_series(indices: &IndexVector, order: usize) -> TruncatedSeries {
    let ks = indices.entries();
    // depth[m] holds A_j(m) for the current depth j; m = 0 is never populated.
    let weight = |m: usize, k: i64| -> Rational {
        debug_assert!(m >= 1);
        Rational::from(m as i64).pow(-k).expect("m >= 1")
    };
    let mut depth: Vec<Rational> = (0..=order)
        .map(|m| {
            if m == 0 {
                Rational::zero()
            } else {
                weight(m, ks[0])
            }
        })
        .collect();
    for &k in &ks[1..] {
        let mut prefix = Rational::zero();
        let mut next = vec![Rational::zero(); order + 1];
        for m in 1..=order {
            if !prefix.is_zero() {
                next[m] = &prefix * weight(m, k);
            }
            prefix += &depth[m];
        }
        depth = next;
    }
    TruncatedSeries { coeffs: depth }
}

/// Exponential generating series of `B_n^{(k1..kr)}`:
/// `Li_{k1..kr}(1 - e^{-t}) / (1 - e^{-t})^r` to order `order`.
pub fn mpb_generating_series(indices: &IndexVector, order: usize) -> Result<TruncatedSeries> {
    let r = indices.len();
    let u = u_series(order + r);
    let li = multiple_polylog_series(indices, order + r);
    let f = compose(&li, &u)?;
    divide_by_valuation_power(&f, &u, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d).unwrap()
    }

    fn series(v: &[Rational]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(v.to_vec())
    }

    fn idx(v: &[i64]) -> IndexVector {
        IndexVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn u_series_values() {
        assert_eq!(u_series(3), series(&[q(0, 1), q(1, 1), q(-1, 2), q(1, 6)]));
        assert_eq!(u_series(0), series(&[q(0, 1)]));
        assert_eq!(u_series(4).coeff(4), Some(&q(-1, 24)));
        assert_eq!(u_series(7).valuation(), Some(1));
    }

    #[test]
    fn multiplication() {
        let u = u_series(4);
        assert_eq!(series_mul(&u, &TruncatedSeries::one(4)), u);
        assert_eq!(
            series_mul(&u, &u),
            series(&[q(0, 1), q(0, 1), q(1, 1), q(-1, 1), q(7, 12)])
        );
        assert!(series_mul(&u, &TruncatedSeries::zero(4)).is_zero());
        assert_eq!(series_mul(&u_series(6), &u_series(3)).order(), 3);
    }

    #[test]
    fn composition() {
        let u = u_series(5);
        assert_eq!(compose(&TruncatedSeries::variable(5), &u).unwrap(), u);
        let z2 = series(&[q(0, 1), q(0, 1), q(1, 1), q(0, 1), q(0, 1)]);
        let u4 = u_series(4);
        assert_eq!(compose(&z2, &u4).unwrap(), series_mul(&u4, &u4));
        let li_minus_one = multiple_polylog_series(&idx(&[-1]), 6);
        let composed = compose(&li_minus_one, &u_series(6)).unwrap();
        for n in 1..=6 {
            assert_eq!(
                composed.egf_coefficient(n).unwrap(),
                Rational::from(2i64.pow(n as u32) - 1)
            );
        }
        let bad = TruncatedSeries::one(3);
        assert_eq!(compose(&u4, &bad), Err(Error::NonZeroConstantTerm));
    }

    #[test]
    fn division_by_valuation_power() {
        let u = u_series(6);
        let one = divide_by_valuation_power(&u, &u, 1).unwrap();
        assert_eq!(one, TruncatedSeries::one(5));

        let u8 = u_series(8);
        let f = compose(&multiple_polylog_series(&idx(&[-1]), 8), &u8).unwrap();
        let quotient = divide_by_valuation_power(&f, &u8, 1).unwrap();
        for n in 0..=7 {
            assert_eq!(
                quotient.egf_coefficient(n).unwrap(),
                Rational::from(1i64 << n)
            );
        }

        assert_eq!(
            divide_by_valuation_power(&u, &u, 2),
            Err(Error::ValuationTooLow {
                valuation: 1,
                power: 2
            })
        );
        assert_eq!(
            divide_by_valuation_power(&u, &TruncatedSeries::one(6), 1),
            Err(Error::DivisorValuation)
        );
    }

    #[test]
    fn polylog_coefficients() {
        let li = multiple_polylog_series(&idx(&[-1]), 5);
        assert_eq!(
            li.coefficients(),
            (0..=5).map(Rational::from).collect::<Vec<_>>().as_slice()
        );
        let li1 = multiple_polylog_series(&idx(&[1]), 3);
        assert_eq!(li1, series(&[q(0, 1), q(1, 1), q(1, 2), q(1, 3)]));
        let li01 = multiple_polylog_series(&idx(&[0, -1]), 4);
        assert_eq!(
            li01.coefficients(),
            [0, 0, 2, 6, 12].map(Rational::from).as_slice()
        );
    }

    /// Nested-sum oracle over 0 < m1 < ... < mr = M.
    fn polylog_brute_force(ks: &[i64], big_m: usize) -> Rational {
        fn go(ks: &[i64], level: usize, lower: usize, big_m: usize) -> Rational {
            let k = ks[level];
            if level + 1 == ks.len() {
                if lower >= big_m {
                    return Rational::zero();
                }
                return Rational::from(big_m as i64).pow(-k).unwrap();
            }
            let mut total = Rational::zero();
            for m in lower + 1..big_m {
                total += Rational::from(m as i64).pow(-k).unwrap() * go(ks, level + 1, m, big_m);
            }
            total
        }
        go(ks, 0, 0, big_m)
    }

    #[test]
    fn polylog_sweep_matches_nested_sums() {
        let cases: &[&[i64]] = &[
            &[2],
            &[1, 1],
            &[0, -1],
            &[-2, 1, 0],
            &[1, -1, 2, 0],
            &[-1, -1, -1, -1],
        ];
        for ks in cases {
            let s = multiple_polylog_series(&idx(ks), 10);
            for m in 0..=10 {
                let expected = if m == 0 {
                    Rational::zero()
                } else {
                    polylog_brute_force(ks, m)
                };
                assert_eq!(s.coeff(m).unwrap(), &expected, "{ks:?} M={m}");
            }
        }
    }

    #[test]
    fn polylog_valuation_is_at_least_depth() {
        for r in 1..=4usize {
            for pattern in 0..3i64.pow(r as u32) {
                let ks: Vec<i64> = (0..r)
                    .map(|j| (pattern / 3i64.pow(j as u32)) % 3 - 1)
                    .collect();
                let s = multiple_polylog_series(&idx(&ks), 12);
                assert!(s.valuation().unwrap() >= r, "{ks:?}");
            }
        }
    }

    #[test]
    fn generating_series_values() {
        let s = mpb_generating_series(&idx(&[-2]), 5).unwrap();
        assert_eq!(s.egf_coefficient(5).unwrap(), Rational::from(454));
        let s = mpb_generating_series(&idx(&[0, -1]), 3).unwrap();
        assert_eq!(s.egf_coefficient(3).unwrap(), Rational::from(54));
        let s = mpb_generating_series(&idx(&[1, 1]), 2).unwrap();
        assert_eq!(s.egf_coefficient(2).unwrap(), q(5, 12));
        assert_eq!(s.order(), 2);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..6).prop_map(|(p, d)| q(p, d))
    }

    fn small_series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(small_rational(), order + 1)
            .prop_map(TruncatedSeries::from_coeffs)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_series(6), b in small_series(6), c in small_series(6)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn inverse_is_two_sided(mut a in small_series(7)) {
            if a.coefficients()[0].is_zero() {
                a = &a + &TruncatedSeries::one(7);
            }
            prop_assume!(!a.coefficients()[0].is_zero());
            let inv = a.inverse().unwrap();
            prop_assert_eq!(&a * &inv, TruncatedSeries::one(7));
        }
    }
}
