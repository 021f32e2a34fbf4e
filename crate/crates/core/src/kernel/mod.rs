//! Exact integers and rationals plus the combinatorial primitives every
//! formula consumes: factorials, binomials, rising factorials and Stirling
//! numbers of both kinds (including the negative-argument extension).

mod scalar;
mod stirling;

pub use scalar::Rational;
pub use stirling::{StirlingCache, StirlingKind};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::engine::{Engine, Fault};

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `C(n, m)`, zero when `m` lies outside `0..=n`.
pub fn binomial(n: u32, m: i64) -> BigInt {
    if m < 0 || m > i64::from(n) {
        return BigInt::zero();
    }
    let m = (m as u32).min(n - m as u32);
    let mut acc = BigInt::one();
    for i in 0..m {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Rising factorial `(r)_l = r (r+1) ... (r+l-1)`, with `(r)_0 = 1`.
pub fn rising_factorial(r: u32, l: u32) -> BigInt {
    (0..l).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(u64::from(r) + u64::from(i))
    })
}

/// `(-1)^e` as an `i64`.
pub(crate) fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn pow_u(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

impl Engine {
    pub fn stirling2(&self, n: u32, m: u32) -> BigInt {
        let value = self.stirling.second(n, m);
        match self.fault {
            Some(Fault::Stirling2 {
                n: fn_,
                m: fm,
                delta,
            }) if (fn_, fm) == (n, m) => value + delta,
            _ => value,
        }
    }

    pub fn stirling1_unsigned(&self, n: u32, m: u32) -> BigInt {
        let value = self.stirling.first_unsigned(n, m);
        match self.fault {
            Some(Fault::Stirling1 {
                n: fn_,
                m: fm,
                delta,
            }) if (fn_, fm) == (n, m) => value + delta,
            _ => value,
        }
    }

    /// Stirling numbers on all of `Z x Z` via the duality `[n, m] = {-m, -n}`.
    ///
    /// `kind` names the bracket the pair is written in. Nonnegative pairs read
    /// the table of that kind; nonpositive pairs read the other kind with the
    /// arguments negated and swapped. Mixed-sign pairs are 0.
    pub fn stirling_extended(&self, kind: StirlingKind, n: i64, m: i64) -> BigInt {
        let to_u32 =
            |x: i64| u32::try_from(x.unsigned_abs()).expect("Stirling argument exceeds u32");
        if n >= 0 && m >= 0 {
            match kind {
                StirlingKind::Second => self.stirling2(to_u32(n), to_u32(m)),
                StirlingKind::First => self.stirling1_unsigned(to_u32(n), to_u32(m)),
            }
        } else if n <= 0 && m <= 0 {
            match kind {
                StirlingKind::Second => self.stirling1_unsigned(to_u32(m), to_u32(n)),
                StirlingKind::First => self.stirling2(to_u32(m), to_u32(n)),
            }
        } else {
            BigInt::zero()
        }
    }
}

pub fn stirling2(n: u32, m: u32) -> BigInt {
    Engine::global().stirling2(n, m)
}

pub fn stirling1_unsigned(n: u32, m: u32) -> BigInt {
    Engine::global().stirling1_unsigned(n, m)
}

pub fn stirling_extended(kind: StirlingKind, n: i64, m: i64) -> BigInt {
    Engine::global().stirling_extended(kind, n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(5), int(120));
        let mut oracle = 1i64;
        for i in 1..=10 {
            oracle *= i;
        }
        assert_eq!(factorial(10), int(oracle));
        assert_eq!(factorial(10), int(3628800));
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(4, 5), int(0));
        assert_eq!(binomial(4, -1), int(0));
        let mut row = vec![int(1)];
        for n in 0..=20u32 {
            for (m, v) in row.iter().enumerate() {
                assert_eq!(&binomial(n, m as i64), v);
            }
            let mut next = vec![int(1); row.len() + 1];
            for m in 1..row.len() {
                next[m] = &row[m - 1] + &row[m];
            }
            row = next;
        }
        assert_eq!(binomial(7, 3), int(35));
    }

    #[test]
    fn rising_factorial_values() {
        assert_eq!(rising_factorial(3, 0), int(1));
        assert_eq!(rising_factorial(3, 2), int(12));
        assert_eq!(rising_factorial(1, 4), int(24));
        assert_eq!(rising_factorial(0, 0), int(1));
        assert_eq!(rising_factorial(0, 3), int(0));
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling2(4, 2), int(7));
        assert_eq!(stirling2(5, 1), int(1));
        assert_eq!(stirling1_unsigned(4, 2), int(11));
        assert_eq!(stirling1_unsigned(3, 1), int(2));
    }

    #[test]
    fn extended_stirling() {
        use StirlingKind::*;
        assert_eq!(stirling_extended(Second, -2, -4), int(11));
        assert_eq!(stirling_extended(Second, 0, 0), int(1));
        assert_eq!(stirling_extended(First, 0, 0), int(1));
        assert_eq!(stirling_extended(First, -2, -2), int(1));
        // [-r-1, -k] at r = 1, k = 2 is {2, 2}
        assert_eq!(stirling_extended(First, -2, -2), stirling2(2, 2));
        assert_eq!(stirling_extended(First, -3, -5), stirling2(5, 3));
        assert_eq!(stirling_extended(Second, 3, -1), int(0));
        assert_eq!(stirling_extended(First, -3, 2), int(0));
    }

    #[test]
    fn orthogonality() {
        for n in 0..=12u32 {
            for m in 0..=12u32 {
                let sum: BigInt = (0..=n)
                    .map(|l| sign(l.into()) * stirling2(n, l) * stirling1_unsigned(l, m))
                    .sum();
                let expected = if m == n { int(sign(m.into())) } else { int(0) };
                assert_eq!(sum, expected, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn powers_to_rising_factorials() {
        for m in 1..=10u32 {
            for x in 0..=10u32 {
                let sum: BigInt = (1..=m)
                    .map(|l| stirling2(m, l) * sign(i64::from(m - l)) * rising_factorial(x, l))
                    .sum();
                assert_eq!(sum, pow_u(x.into(), m), "x={x} m={m}");
            }
        }
    }

    #[test]
    fn duality_between_kinds() {
        for n in 0..=10i64 {
            for m in 0..=10i64 {
                assert_eq!(
                    stirling_extended(StirlingKind::First, n, m),
                    stirling_extended(StirlingKind::Second, -m, -n)
                );
            }
        }
    }

    #[test]
    fn faults_touch_one_entry() {
        let engine = Engine::with_fault(Fault::Stirling2 {
            n: 4,
            m: 2,
            delta: 1,
        });
        assert_eq!(engine.stirling2(4, 2), int(8));
        assert_eq!(engine.stirling2(5, 2), int(15));
        assert_eq!(engine.stirling1_unsigned(4, 2), int(11));
    }
}
