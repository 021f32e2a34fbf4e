//! Registry of identities between poly-Bernoulli numbers, multi-poly-Bernoulli
//! numbers and Stirling numbers.
//!
//! Each identity is checked exhaustively over a bounded [`RangeSpec`]: both
//! sides are evaluated exactly for every parameter tuple, and any mismatch is
//! recorded as a counterexample in the resulting [`VerificationReport`]. One
//! entry, [`IdentityId::TriangleConjecture`], is an unproved claim and is
//! reported as such.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::kernel::{binomial, factorial, pow_u, rising_factorial, sign, Rational, StirlingKind};
use crate::multipoly::{mpb_series_row, IndexVector};
use crate::polybern::pb_series;
use crate::series::joint_generating_series;

macro_rules! identities {
    ($($variant:ident => $name:literal,)*) => {
        /// One checkable statement.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum IdentityId {
            $($variant,)*
        }

        impl IdentityId {
            pub const ALL: &'static [IdentityId] = &[$(IdentityId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(IdentityId::$variant => $name,)*
                }
            }
        }

        impl FromStr for IdentityId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(IdentityId::$variant),)*
                    other => Err(Error::UnknownIdentity(other.to_string())),
                }
            }
        }
    };
}

identities! {
    NegativeIndexClosedForm => "closed-formula-s1",
    SingleDuality => "duality-s1",
    LastEntryRecurrence => "lemma-2.2",
    PowerSumForm => "lemma-2.3",
    AllZeroPower => "cor-2.4-1",
    MultiDuality => "cor-2.4-2",
    AppendZeroBinomial => "cor-2.4-3",
    BivariatePolynomial => "cor-2.4-4",
    JointGeneratingFunction => "thm-2.5",
    LeadingMinusOne => "thm-2.6-1",
    TrailingMinusOne => "thm-2.6-2",
    InteriorMinusOne => "thm-2.6-3",
    SecondKindTrailing => "thm-3.1-1",
    SecondKindLeading => "thm-3.1-2",
    SecondKindInterior => "thm-3.1-3",
    NegativeFirstKindForms => "cor-3.3",
    TrailingCoefficientSum => "thm-3.5-1",
    LeadingCoefficientSum => "thm-3.5-2",
    InteriorCoefficientSum => "thm-3.5-3",
    FirstKindMinusOne => "thm-3.6",
    NegativeSecondKindMinusOne => "cor-3.7",
    LeadingMinusM => "thm-3.9",
    TrailingMinusM => "thm-3.10",
    InteriorMinusM => "thm-3.11",
    MinusMCoefficientSums => "thm-3.12",
    BinomialLeadingPair => "thm-3.13-1",
    BinomialTrailingPair => "thm-3.13-2",
    MixedZeroBlocks => "thm-3.14",
    MixedCoefficientSum => "thm-3.18",
    TriangleConjecture => "conj-3.17",
}

impl IdentityId {
    pub fn is_conjecture(self) -> bool {
        self == IdentityId::TriangleConjecture
    }

    /// Smallest admissible value of each range field this identity reads.
    pub fn minimums(self) -> &'static [(&'static str, u32)] {
        use IdentityId::*;
        match self {
            NegativeIndexClosedForm | SingleDuality => &[],
            PowerSumForm | SecondKindTrailing | SecondKindLeading | BinomialLeadingPair
            | BinomialTrailingPair => &[("max_k", 1)],
            LastEntryRecurrence
            | AllZeroPower
            | MultiDuality
            | JointGeneratingFunction
            | LeadingMinusOne
            | TrailingMinusOne
            | InteriorMinusOne
            | FirstKindMinusOne
            | NegativeSecondKindMinusOne => &[("max_r", 1)],
            AppendZeroBinomial => &[("max_r", 2)],
            BivariatePolynomial => &[("sample_points", 1)],
            SecondKindInterior | NegativeFirstKindForms => &[("max_k", 1), ("max_i", 1)],
            TrailingCoefficientSum | LeadingCoefficientSum => &[("max_k", 2)],
            InteriorCoefficientSum => &[("max_k", 2), ("max_i", 1)],
            LeadingMinusM | TrailingMinusM | MinusMCoefficientSums => &[("max_m", 1), ("max_r", 1)],
            InteriorMinusM => &[("max_m", 1), ("max_r", 1), ("max_i", 1)],
            MixedZeroBlocks => &[("max_k", 1), ("max_r", 1)],
            MixedCoefficientSum | TriangleConjecture => &[("max_k", 2), ("max_r", 1)],
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Bounds for a verification sweep. Every loop is inclusive of its bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeSpec {
    pub max_n: u32,
    pub max_k: u32,
    pub max_r: u32,
    pub max_m: u32,
    pub max_i: u32,
    /// Total-degree cap for the multivariate generating function.
    pub cap: u32,
    /// Exact `(p, q)` points at which the bivariate polynomial identity is tested.
    pub sample_points: Vec<(Rational, Rational)>,
}

impl Default for RangeSpec {
    fn default() -> Self {
        let q = |p: i64, d: i64| Rational::new(p, d).expect("nonzero denominator");
        RangeSpec {
            max_n: 8,
            max_k: 6,
            max_r: 4,
            max_m: 3,
            max_i: 4,
            cap: 6,
            sample_points: vec![
                (q(0, 1), q(1, 1)),
                (q(1, 1), q(0, 1)),
                (q(1, 1), q(1, 1)),
                (q(2, 1), q(-1, 1)),
                (q(1, 2), q(3, 1)),
                (q(-3, 2), q(2, 3)),
            ],
        }
    }
}

impl RangeSpec {
    fn field(&self, name: &str) -> u32 {
        match name {
            "max_n" => self.max_n,
            "max_k" => self.max_k,
            "max_r" => self.max_r,
            "max_m" => self.max_m,
            "max_i" => self.max_i,
            "cap" => self.cap,
            "sample_points" => self.sample_points.len() as u32,
            _ => unreachable!("unknown range field {name}"),
        }
    }

    fn raise(&mut self, name: &str, min: u32) {
        let slot = match name {
            "max_n" => &mut self.max_n,
            "max_k" => &mut self.max_k,
            "max_r" => &mut self.max_r,
            "max_m" => &mut self.max_m,
            "max_i" => &mut self.max_i,
            "cap" => &mut self.cap,
            "sample_points" => {
                let defaults = RangeSpec::default().sample_points;
                let missing = (min as usize).saturating_sub(self.sample_points.len());
                self.sample_points
                    .extend(defaults.into_iter().take(missing));
                return;
            }
            _ => unreachable!("unknown range field {name}"),
        };
        *slot = (*slot).max(min);
    }

    /// Fails if any field this identity reads is below its minimum.
    pub fn check_for(&self, id: IdentityId) -> Result<()> {
        for &(field, min) in id.minimums() {
            let got = self.field(field);
            if got < min {
                return Err(Error::RangeBelowMinimum {
                    identity: id.to_string(),
                    field,
                    min,
                    got,
                });
            }
        }
        Ok(())
    }

    /// Copy with every field this identity reads raised to its minimum.
    pub fn clamped_for(&self, id: IdentityId) -> RangeSpec {
        let mut out = self.clone();
        for &(field, min) in id.minimums() {
            out.raise(field, min);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Text(String),
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(i64::from(v))
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

pub type Params = BTreeMap<String, ParamValue>;

macro_rules! params {
    ($($key:literal => $value:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut map = Params::new();
        $(map.insert($key.to_string(), ParamValue::from($value));)*
        map
    }};
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub params: Params,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: IdentityId,
    pub range: RangeSpec,
    pub cases: usize,
    pub passed: bool,
    /// Sorted by parameters; empty exactly when `passed`.
    pub counterexamples: Vec<Counterexample>,
}

/// `a_{j,m}` for rows `j = 0..=max_row`; row `j` has entries `m = 0..=j+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureTriangle {
    pub r: u32,
    pub rows: Vec<Vec<BigInt>>,
}

impl ConjectureTriangle {
    pub fn entry(&self, j: usize, m: usize) -> Option<&BigInt> {
        self.rows.get(j)?.get(m)
    }
}

/// Signed coefficients of the conjectured expansion of `B_n^(-k)`:
/// `zeros[l - 1]` multiplies `B_n` of `l + 1` zeros (`l = 1..=r`), and
/// `trailing[m - 1]` multiplies `B_n` of `r` zeros followed by `-m`
/// (`m = 1..=k-r`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureCoefficients {
    pub zeros: Vec<BigInt>,
    pub trailing: Vec<BigInt>,
}

struct Checker<'e> {
    engine: &'e Engine,
    cases: usize,
    failures: Vec<Counterexample>,
}

impl Checker<'_> {
    fn case(&mut self, params: Params, eval: impl FnOnce(&Engine) -> Result<(Rational, Rational)>) {
        self.cases += 1;
        match eval(self.engine) {
            Ok((lhs, rhs)) if lhs == rhs => {}
            Ok((lhs, rhs)) => self.failures.push(Counterexample {
                params,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }),
            Err(e) => self.failures.push(Counterexample {
                params,
                lhs: format!("error: {e}"),
                rhs: String::new(),
            }),
        }
    }
}

/// Which Stirling form supplies the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    /// `{k, j}` and `[r, k]`, as stated directly.
    Direct,
    /// The same numbers read through negative-argument duality:
    /// `[-j, -k]` and `{-k, -r}`.
    Dual,
}

impl Form {
    fn second(self, e: &Engine, k: u32, j: u32) -> BigInt {
        match self {
            Form::Direct => e.stirling2(k, j),
            Form::Dual => e.stirling_extended(StirlingKind::First, -i64::from(j), -i64::from(k)),
        }
    }

    fn first(self, e: &Engine, r: u32, k: u32) -> BigInt {
        match self {
            Form::Direct => e.stirling1_unsigned(r, k),
            Form::Dual => e.stirling_extended(StirlingKind::Second, -i64::from(k), -i64::from(r)),
        }
    }
}

fn q(x: impl Into<BigInt>) -> Rational {
    Rational::from(x.into())
}

fn signed(e: i64) -> BigInt {
    BigInt::from(sign(e))
}

fn vector(entries: Vec<i64>) -> IndexVector {
    IndexVector::new(entries).expect("nonempty by construction")
}

/// `zeros` zeros followed by `last`.
fn zeros_then(zeros: u32, last: i64) -> IndexVector {
    let mut v = vec![0; zeros as usize];
    v.push(last);
    vector(v)
}

/// `first` followed by `zeros` zeros.
fn lead_then_zeros(first: i64, zeros: u32) -> IndexVector {
    let mut v = vec![first];
    v.resize(zeros as usize + 1, 0);
    vector(v)
}

fn neg(k: u32) -> i64 {
    -i64::from(k)
}

/// All vectors of length `len` with entries in `0..=max_entry`.
fn magnitude_vectors(len: u32, max_entry: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max_entry).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// All exponent tuples of length `len` with total degree at most `cap`.
fn exponent_tuples(len: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=cap - used).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn show(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

// Coefficients of the three expansions of B_n^(-k) into vectors with one -1.

fn trailing_coeff(e: &Engine, form: Form, k: u32, r: u32) -> Rational {
    q(signed(i64::from(r + k + 1)) * factorial(r) * form.second(e, k, r + 1))
}

fn leading_coeff(e: &Engine, form: Form, k: u32, r: u32) -> Rational {
    q(signed(i64::from(r + k + 1)) * factorial(r + 1) * form.second(e, k, r + 1))
}

/// Coefficient of the length-`r - i + 2` vector with `-1` at position `i`.
fn interior_coeff(e: &Engine, form: Form, k: u32, r: u32, i: u32) -> Rational {
    let len = r + 2 - i;
    let numer = signed(i64::from(r + k) - i64::from(i)) * factorial(len) * form.second(e, k, len);
    Rational::new(numer, i).expect("i >= 1")
}

fn leading_constant(k: u32) -> Rational {
    q(sign(i64::from(k) - 1))
}

pub(crate) fn trailing_term(e: &Engine, k: u32, r: u32, n: u32) -> Rational {
    trailing_coeff(e, Form::Direct, k, r) * e.mpb(n, &zeros_then(r, -1))
}

pub(crate) fn leading_term(e: &Engine, k: u32, r: u32, n: u32) -> Rational {
    leading_coeff(e, Form::Direct, k, r) * e.mpb(n, &lead_then_zeros(-1, r))
}

/// `None` when the vector would have its `-1` past its last entry.
pub(crate) fn interior_term(e: &Engine, k: u32, r: u32, i: u32, n: u32) -> Option<Rational> {
    let len = (r + 2).checked_sub(i)?;
    let v = IndexVector::single(len, i, -1).ok()?;
    Some(interior_coeff(e, Form::Direct, k, r, i) * e.mpb(n, &v))
}

/// `sum_{k=1}^{j} [j, k] B_n^(-k)`.
fn first_kind_pb_sum(e: &Engine, form: Form, j: u32, n: u32) -> Rational {
    (1..=j)
        .map(|k| q(form.first(e, j, k)) * e.pb(n, neg(k)))
        .sum()
}

impl Engine {
    /// Checks one identity over `range`, which must meet the identity's minimums.
    pub fn verify(&self, id: IdentityId, range: &RangeSpec) -> Result<VerificationReport> {
        range.check_for(id)?;
        let mut c = Checker {
            engine: self,
            cases: 0,
            failures: Vec::new(),
        };
        run(id, &mut c, range);
        let mut counterexamples = c.failures;
        counterexamples.sort();
        Ok(VerificationReport {
            identity: id,
            range: range.clone(),
            cases: c.cases,
            passed: counterexamples.is_empty(),
            counterexamples,
        })
    }

    /// Every identity, in registry order, each at `range` clamped to its minimums.
    pub fn verify_all(&self, range: &RangeSpec) -> Vec<VerificationReport> {
        IdentityId::ALL
            .par_iter()
            .map(|&id| {
                self.verify(id, &range.clamped_for(id))
                    .expect("clamped range meets minimums")
            })
            .collect()
    }

    /// Rows `0..=max_row` of the triangle for a fixed `r >= 1`.
    pub fn conjecture_triangle(&self, r: u32, max_row: u32) -> Result<ConjectureTriangle> {
        if r == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "r",
                min: 1,
                got: 0,
            });
        }
        let r_fact = factorial(r);
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_row as usize + 1);
        for j in 0..=max_row as usize {
            let mut row = Vec::with_capacity(j + 2);
            row.push(&r_fact * self.stirling2(j as u32 + r + 1, r));
            for m in 1..=j {
                let above = &rows[j - 1];
                row.push(&above[m - 1] + BigInt::from(r) * &above[m]);
            }
            row.push(r_fact.clone());
            rows.push(row);
        }
        Ok(ConjectureTriangle { r, rows })
    }

    /// Coefficients of the conjectured expansion for `1 <= r < k`.
    pub fn conjecture_coefficients(&self, k: u32, r: u32) -> Result<ConjectureCoefficients> {
        if r == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "r",
                min: 1,
                got: 0,
            });
        }
        if k <= r {
            return Err(Error::ArgumentTooSmall {
                name: "k",
                min: i64::from(r) + 1,
                got: i64::from(k),
            });
        }
        let zeros = (1..=r)
            .map(|l| signed(i64::from(k) - i64::from(l)) * factorial(l) * self.stirling2(k, l))
            .collect();
        let row = k - r - 1;
        let triangle = self.conjecture_triangle(r, row)?;
        let trailing = (1..=k - r)
            .map(|m| {
                let a = triangle
                    .entry(row as usize, m as usize)
                    .expect("row has k - r + 1 entries");
                signed(i64::from(k) - i64::from(m) - i64::from(r)) * a
            })
            .collect();
        Ok(ConjectureCoefficients { zeros, trailing })
    }

    /// Tests the conjectured expansion for every `1 <= r <= max_r`,
    /// `r < k <= max_k`, `0 <= n <= max_n`. A failing case is a finding
    /// about the conjecture, not an error.
    pub fn check_triangle_conjecture(
        &self,
        max_k: u32,
        max_r: u32,
        max_n: u32,
    ) -> Result<VerificationReport> {
        if max_r == 0 {
            return Err(Error::ArgumentTooSmall {
                name: "max_r",
                min: 1,
                got: 0,
            });
        }
        if max_k <= max_r {
            return Err(Error::ArgumentTooSmall {
                name: "max_k",
                min: i64::from(max_r) + 1,
                got: i64::from(max_k),
            });
        }
        let range = RangeSpec {
            max_k,
            max_r,
            max_n,
            ..RangeSpec::default()
        };
        self.verify(IdentityId::TriangleConjecture, &range)
    }
}

fn run(id: IdentityId, c: &mut Checker<'_>, s: &RangeSpec) {
    use IdentityId::*;
    match id {
        NegativeIndexClosedForm => {
            for k in 0..=s.max_k {
                for n in 0..=s.max_n {
                    c.case(params! {"n" => n, "k" => k}, |e| {
                        Ok((q(e.pb_closed_neg(n, k)), pb_series(n, neg(k))))
                    });
                }
            }
        }
        SingleDuality => {
            for k in 0..=s.max_k {
                for n in 0..=s.max_n {
                    c.case(params! {"n" => n, "k" => k}, |e| {
                        Ok((e.pb(n, neg(k)), e.pb(k, neg(n))))
                    });
                }
            }
        }
        LastEntryRecurrence => {
            for r in 1..=s.max_r {
                for mags in magnitude_vectors(r, s.max_m) {
                    let base = IndexVector::from_magnitudes(&mags).expect("nonempty");
                    let row: Vec<Rational> =
                        (0..=s.max_n + 1).map(|n| c.engine.mpb(n, &base)).collect();
                    let mut bumped = mags.clone();
                    *bumped.last_mut().expect("nonempty") += 1;
                    let target = IndexVector::from_magnitudes(&bumped).expect("nonempty");
                    for n in 0..=s.max_n {
                        c.case(params! {"base" => show(&mags), "n" => n}, |e| {
                            let nu = n as usize;
                            let sum: Rational = (0..=n)
                                .map(|m| q(binomial(n, i64::from(m))) * &row[m as usize + 1])
                                .sum();
                            let rhs = sum + q(r) * &row[nu] - &row[nu + 1];
                            Ok((e.mpb(n, &target), rhs))
                        });
                    }
                }
            }
        }
        PowerSumForm => {
            for k in 1..=s.max_k {
                for n in 0..=s.max_n {
                    c.case(params! {"n" => n, "k" => k}, |e| {
                        Ok((q(e.pb_power_sum(n, k)?), pb_series(n, neg(k))))
                    });
                }
            }
        }
        AllZeroPower => {
            for r in 1..=s.max_r {
                let row = mpb_series_row(&IndexVector::zeros(r), s.max_n);
                for n in 0..=s.max_n {
                    c.case(params! {"r" => r, "n" => n}, |_| {
                        Ok((row[n as usize].clone(), q(pow_u(u64::from(r), n))))
                    });
                }
            }
        }
        MultiDuality => {
            for r in 1..=s.max_r {
                for k in 0..=s.max_k {
                    for n in 0..=s.max_n {
                        c.case(params! {"r" => r, "n" => n, "k" => k}, |e| {
                            Ok((
                                e.mpb(n, &zeros_then(r - 1, neg(k))),
                                e.mpb(k, &zeros_then(r - 1, neg(n))),
                            ))
                        });
                    }
                }
            }
        }
        AppendZeroBinomial => {
            for r in 2..=s.max_r {
                for prefix in magnitude_vectors(r - 1, s.max_m) {
                    let short = IndexVector::from_magnitudes(&prefix).expect("nonempty");
                    let row: Vec<Rational> =
                        (0..=s.max_n).map(|n| c.engine.mpb(n, &short)).collect();
                    let mut longer = prefix.clone();
                    longer.push(0);
                    let long = IndexVector::from_magnitudes(&longer).expect("nonempty");
                    for n in 0..=s.max_n {
                        c.case(params! {"prefix" => show(&prefix), "n" => n}, |e| {
                            let rhs = (0..=n)
                                .map(|i| q(binomial(n, i64::from(i))) * &row[i as usize])
                                .sum();
                            Ok((e.mpb(n, &long), rhs))
                        });
                    }
                }
            }
        }
        BivariatePolynomial => {
            for (idx, (p, qq)) in s.sample_points.iter().enumerate() {
                for k in 0..=s.max_k {
                    for n in 0..=s.max_n {
                        let point = format!("({p},{qq})");
                        c.case(
                            params! {"n" => n, "k" => k, "point" => point, "sample" => idx as i64},
                            |e| {
                                let ki = i64::from(k);
                                let mut lhs = Rational::zero();
                                let mut rhs = Rational::zero();
                                let sum_pq = p + qq;
                                for i in 0..=k {
                                    let ii = i64::from(i);
                                    let weight = q(binomial(k, ii)) * qq.pow(ki - ii)?;
                                    lhs += &weight
                                        * p.pow(ii)?
                                        * e.mpb(n, &vector(vec![-ii, ii - ki]));
                                    let inner: Rational = (0..=n)
                                        .map(|j| {
                                            q(binomial(n, i64::from(j)))
                                                * e.pb(j, -ii)
                                                * e.pb(n - j, ii - ki)
                                        })
                                        .sum();
                                    rhs += weight * sum_pq.pow(ii)? * inner;
                                }
                                Ok((lhs, rhs))
                            },
                        );
                    }
                }
            }
        }
        JointGeneratingFunction => {
            for r in 1..=s.max_r.min(2) {
                let series = match joint_generating_series(r as usize, s.cap) {
                    Ok(series) => series,
                    Err(err) => {
                        c.case(params! {"r" => r}, |_| Err(err));
                        continue;
                    }
                };
                for exps in exponent_tuples(r as usize + 1, s.cap) {
                    let (a, n) = exps.split_at(r as usize);
                    let n = n[0];
                    c.case(params! {"a" => show(a), "n" => n}, |e| {
                        let v = IndexVector::new(a.iter().map(|&x| neg(x)).collect())?;
                        let denom: BigInt =
                            a.iter().map(|&x| factorial(x)).product::<BigInt>() * factorial(n);
                        Ok((series.coeff(&exps), e.mpb(n, &v).checked_div(&q(denom))?))
                    });
                }
            }
        }
        LeadingMinusOne => {
            for r in 1..=s.max_r {
                for n in 0..=s.max_n {
                    let lhs = |e: &Engine| e.mpb(n, &lead_then_zeros(-1, r - 1));
                    c.case(params! {"r" => r, "n" => n, "rhs" => "power"}, |e| {
                        Ok((lhs(e), q(pow_u(u64::from(r) + 1, n))))
                    });
                    c.case(params! {"r" => r, "n" => n, "rhs" => "zeros"}, |e| {
                        Ok((lhs(e), e.mpb(n, &IndexVector::zeros(r + 1))))
                    });
                }
            }
        }
        TrailingMinusOne => {
            for r in 1..=s.max_r {
                for n in 0..=s.max_n {
                    let lhs = |e: &Engine| e.mpb(n, &zeros_then(r - 1, -1));
                    c.case(params! {"r" => r, "n" => n, "rhs" => "power"}, |e| {
                        Ok((lhs(e), q(BigInt::from(r) * pow_u(u64::from(r) + 1, n))))
                    });
                    c.case(params! {"r" => r, "n" => n, "rhs" => "leading"}, |e| {
                        Ok((lhs(e), q(r) * e.mpb(n, &lead_then_zeros(-1, r - 1))))
                    });
                }
            }
        }
        InteriorMinusOne => {
            for r in 1..=s.max_r {
                for i in 1..=r {
                    for n in 0..=s.max_n {
                        c.case(params! {"r" => r, "i" => i, "n" => n}, |e| {
                            let v = IndexVector::single(r, i, -1)?;
                            Ok((e.mpb(n, &v), q(e.special_single_minus_one(n, r, i)?)))
                        });
                    }
                }
            }
        }
        SecondKindTrailing | SecondKindLeading => {
            for k in 1..=s.max_k {
                for n in 0..=s.max_n {
                    c.case(params! {"k" => k, "n" => n}, |e| {
                        let head = leading_constant(k) * e.mpb(n, &IndexVector::zeros(2));
                        let tail: Rational = (1..k)
                            .map(|r| match id {
                                SecondKindTrailing => trailing_term(e, k, r, n),
                                _ => leading_term(e, k, r, n),
                            })
                            .sum();
                        Ok((e.pb(n, neg(k)), head + tail))
                    });
                }
            }
        }
        SecondKindInterior => {
            for i in 1..=s.max_i {
                for k in 1..=s.max_k {
                    let terms_exist = (i..=k + i - 2).all(|r| r + 2 >= 2 * i);
                    if !terms_exist {
                        continue;
                    }
                    for n in 0..=s.max_n {
                        c.case(params! {"i" => i, "k" => k, "n" => n}, |e| {
                            let head = leading_constant(k) * e.mpb(n, &IndexVector::zeros(2));
                            let tail: Rational = (i..=k + i - 2)
                                .map(|r| interior_term(e, k, r, i, n).expect("checked above"))
                                .sum();
                            Ok((e.pb(n, neg(k)), head + tail))
                        });
                    }
                }
            }
        }
        NegativeFirstKindForms => {
            for k in 1..=s.max_k {
                for n in 0..=s.max_n {
                    for part in [1u32, 2] {
                        c.case(params! {"part" => part, "k" => k, "n" => n}, |e| {
                            let head = leading_constant(k) * e.mpb(n, &IndexVector::zeros(2));
                            let tail: Rational = (1..k)
                                .map(|r| {
                                    if part == 1 {
                                        trailing_coeff(e, Form::Dual, k, r)
                                            * e.mpb(n, &zeros_then(r, -1))
                                    } else {
                                        leading_coeff(e, Form::Dual, k, r)
                                            * e.mpb(n, &lead_then_zeros(-1, r))
                                    }
                                })
                                .sum();
                            Ok((e.pb(n, neg(k)), head + tail))
                        });
                    }
                    for i in 1..=s.max_i {
                        if !(i..=k + i - 2).all(|r| r + 2 >= 2 * i) {
                            continue;
                        }
                        c.case(
                            params! {"part" => 3u32, "i" => i, "k" => k, "n" => n},
                            |e| {
                                let head = leading_constant(k) * e.mpb(n, &IndexVector::zeros(2));
                                let tail: Rational = (i..=k + i - 2)
                                    .map(|r| {
                                        let v = IndexVector::single(r + 2 - i, i, -1)
                                            .expect("checked above");
                                        interior_coeff(e, Form::Dual, k, r, i) * e.mpb(n, &v)
                                    })
                                    .sum();
                                Ok((e.pb(n, neg(k)), head + tail))
                            },
                        );
                    }
                }
            }
        }
        TrailingCoefficientSum | LeadingCoefficientSum => {
            for k in 2..=s.max_k {
                c.case(params! {"k" => k}, |e| {
                    let sum: Rational = (1..k)
                        .map(|r| match id {
                            TrailingCoefficientSum => trailing_coeff(e, Form::Direct, k, r),
                            _ => leading_coeff(e, Form::Direct, k, r),
                        })
                        .sum();
                    let expected = if id == TrailingCoefficientSum { 0 } else { 1 };
                    Ok((leading_constant(k) + sum, q(expected)))
                });
            }
        }
        InteriorCoefficientSum => {
            for i in 1..=s.max_i {
                for k in 2..=s.max_k {
                    c.case(params! {"i" => i, "k" => k}, |e| {
                        let sum: Rational = (i..=k + i - 2)
                            .map(|r| interior_coeff(e, Form::Direct, k, r, i))
                            .sum();
                        let expected = if k % 2 == 1 {
                            Rational::one()
                        } else {
                            Rational::new(2, i)? - Rational::one()
                        };
                        Ok((leading_constant(k) + sum, expected))
                    });
                }
            }
        }
        FirstKindMinusOne | NegativeSecondKindMinusOne => {
            let form = if id == FirstKindMinusOne {
                Form::Direct
            } else {
                Form::Dual
            };
            for r in 1..=s.max_r {
                for n in 0..=s.max_n {
                    c.case(params! {"part" => 1u32, "r" => r, "n" => n}, |e| {
                        let rhs = first_kind_pb_sum(e, form, r, n).checked_div(&q(factorial(r)))?;
                        Ok((e.mpb(n, &lead_then_zeros(-1, r - 1)), rhs))
                    });
                    c.case(params! {"part" => 2u32, "r" => r, "n" => n}, |e| {
                        let rhs =
                            first_kind_pb_sum(e, form, r, n).checked_div(&q(factorial(r - 1)))?;
                        Ok((e.mpb(n, &zeros_then(r - 1, -1)), rhs))
                    });
                    for i in 1..=r {
                        c.case(
                            params! {"part" => 3u32, "r" => r, "i" => i, "n" => n},
                            |e| {
                                let rhs = q(i)
                                    * first_kind_pb_sum(e, form, r, n)
                                        .checked_div(&q(factorial(r)))?;
                                Ok((e.mpb(n, &IndexVector::single(r, i, -1)?), rhs))
                            },
                        );
                    }
                }
            }
        }
        LeadingMinusM | TrailingMinusM => {
            for m in 1..=s.max_m {
                for r in 1..=s.max_r {
                    for n in 0..=s.max_n {
                        c.case(params! {"m" => m, "r" => r, "n" => n}, |e| {
                            let mut rhs = Rational::zero();
                            for l in 1..=m {
                                let j = r + l - 1;
                                let (weight, denom) = if id == LeadingMinusM {
                                    (factorial(l), factorial(j))
                                } else {
                                    (rising_factorial(r, l - 1), factorial(r + l - 2))
                                };
                                let numer = signed(i64::from(l + m)) * weight * e.stirling2(m, l);
                                rhs += Rational::new(numer, denom)?
                                    * first_kind_pb_sum(e, Form::Direct, j, n);
                            }
                            let v = if id == LeadingMinusM {
                                lead_then_zeros(neg(m), r - 1)
                            } else {
                                zeros_then(r - 1, neg(m))
                            };
                            Ok((e.mpb(n, &v), rhs))
                        });
                    }
                }
            }
        }
        InteriorMinusM => {
            for m in 1..=s.max_m {
                for r in 1..=s.max_r {
                    for i in 1..=r.min(s.max_i) {
                        for n in 0..=s.max_n {
                            c.case(params! {"m" => m, "r" => r, "i" => i, "n" => n}, |e| {
                                let v = IndexVector::single(r, i, neg(m))?;
                                Ok((e.mpb(n, &v), e.mpb_as_pb_sum(m, r, i, n)?))
                            });
                        }
                    }
                }
            }
        }
        MinusMCoefficientSums => {
            for m in 1..=s.max_m {
                for r in 1..=s.max_r {
                    c.case(params! {"part" => 1u32, "m" => m, "r" => r}, |e| {
                        let mut mags = vec![0; r as usize];
                        mags[0] = m;
                        Ok((
                            q(e.alpha_coefficients(&mags)?.expansion().coefficient_sum()),
                            Rational::one(),
                        ))
                    });
                    c.case(params! {"part" => 2u32, "m" => m, "r" => r}, |e| {
                        let mut mags = vec![0; r as usize];
                        mags[r as usize - 1] = m;
                        let sum = e.alpha_coefficients(&mags)?.expansion().coefficient_sum();
                        Ok((q(sum), q(pow_u(u64::from(r), m))))
                    });
                    for i in 1..=r {
                        c.case(
                            params! {"part" => 3u32, "m" => m, "r" => r, "i" => i},
                            |e| {
                                let sum = e.expansion_single_minus_m(m, r, i)?.coefficient_sum();
                                Ok((q(sum), q(pow_u(u64::from(i), m))))
                            },
                        );
                    }
                }
            }
        }
        BinomialLeadingPair | BinomialTrailingPair => {
            let leading = id == BinomialLeadingPair;
            let coeff = |k: u32, m: u32| {
                let top = if leading { k } else { k - 1 };
                signed(i64::from(k) - i64::from(m) - 1) * binomial(top, i64::from(m))
            };
            for k in 1..=s.max_k {
                for n in 0..=s.max_n {
                    c.case(params! {"k" => k, "n" => n}, |e| {
                        let rhs = (0..k)
                            .map(|m| {
                                let v = if leading {
                                    lead_then_zeros(neg(m), 1)
                                } else {
                                    zeros_then(1, neg(m))
                                };
                                q(coeff(k, m)) * e.mpb(n, &v)
                            })
                            .sum();
                        Ok((e.pb(n, neg(k)), rhs))
                    });
                }
                c.case(params! {"k" => k, "part" => "coefficient-sum"}, |_| {
                    let sum: BigInt = (0..k).map(|m| coeff(k, m)).sum();
                    let expected = if leading || k == 1 { 1 } else { 0 };
                    Ok((q(sum), q(expected)))
                });
            }
        }
        MixedZeroBlocks => {
            for r in 1..=s.max_r {
                for k in 1..=s.max_k {
                    for n in 0..=s.max_n {
                        c.case(params! {"r" => r, "k" => k, "n" => n}, |e| {
                            let mut rhs = Rational::zero();
                            for l in 1..=r {
                                let coeff = signed(i64::from(k) - i64::from(l))
                                    * factorial(l)
                                    * e.stirling2(k, l);
                                rhs += q(coeff) * e.mpb(n, &IndexVector::zeros(l + 1));
                            }
                            for m in 1..=k.saturating_sub(r) {
                                let coeff = signed(i64::from(k) - i64::from(m) - i64::from(r))
                                    * binomial(k, i64::from(m))
                                    * factorial(r)
                                    * e.stirling2(k - m, r);
                                rhs += q(coeff) * e.mpb(n, &lead_then_zeros(neg(m), r));
                            }
                            Ok((e.pb(n, neg(k)), rhs))
                        });
                    }
                }
            }
        }
        MixedCoefficientSum => {
            for r in 1..=s.max_r {
                for k in r + 1..=s.max_k {
                    c.case(params! {"r" => r, "k" => k}, |e| {
                        let first: BigInt = (1..=r)
                            .map(|l| {
                                signed(i64::from(k) - i64::from(l))
                                    * factorial(l)
                                    * e.stirling2(k, l)
                            })
                            .sum();
                        let second: BigInt = (1..=k - r)
                            .map(|m| {
                                signed(i64::from(k) - i64::from(m) - i64::from(r))
                                    * binomial(k, i64::from(m))
                                    * factorial(r)
                                    * e.stirling2(k - m, r)
                            })
                            .sum();
                        Ok((q(first + second), Rational::one()))
                    });
                }
            }
        }
        TriangleConjecture => {
            for r in 1..=s.max_r {
                for k in r + 1..=s.max_k {
                    let coeffs = c.engine.conjecture_coefficients(k, r);
                    for n in 0..=s.max_n {
                        c.case(params! {"r" => r, "k" => k, "n" => n}, |e| {
                            let coeffs = coeffs.clone()?;
                            let mut rhs = Rational::zero();
                            for (l, a) in (1..).zip(&coeffs.zeros) {
                                rhs += q(a.clone()) * e.mpb(n, &IndexVector::zeros(l + 1));
                            }
                            for (m, a) in (1..).zip(&coeffs.trailing) {
                                rhs += q(a.clone()) * e.mpb(n, &zeros_then(r, neg(m)));
                            }
                            Ok((e.pb(n, neg(k)), rhs))
                        });
                    }
                }
            }
        }
    }
}

pub fn verify(id: IdentityId, range: &RangeSpec) -> Result<VerificationReport> {
    Engine::global().verify(id, range)
}

pub fn verify_all(range: &RangeSpec) -> Vec<VerificationReport> {
    Engine::global().verify_all(range)
}

pub fn conjecture_triangle(r: u32, max_row: u32) -> Result<ConjectureTriangle> {
    Engine::global().conjecture_triangle(r, max_row)
}

pub fn conjecture_coefficients(k: u32, r: u32) -> Result<ConjectureCoefficients> {
    Engine::global().conjecture_coefficients(k, r)
}

pub fn check_triangle_conjecture(max_k: u32, max_r: u32, max_n: u32) -> Result<VerificationReport> {
    Engine::global().check_triangle_conjecture(max_k, max_r, max_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Fault;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn small() -> RangeSpec {
        RangeSpec {
            max_n: 5,
            max_k: 4,
            max_r: 3,
            max_m: 2,
            max_i: 3,
            cap: 4,
            ..RangeSpec::default()
        }
    }

    #[test]
    fn registry_names_round_trip() {
        assert_eq!(IdentityId::ALL.len(), 30);
        for &id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        }
        assert_eq!(
            "bogus".parse::<IdentityId>(),
            Err(Error::UnknownIdentity("bogus".into()))
        );
        let conjectures: Vec<_> = IdentityId::ALL
            .iter()
            .filter(|id| id.is_conjecture())
            .collect();
        assert_eq!(conjectures, vec![&IdentityId::TriangleConjecture]);
    }

    #[test]
    fn range_below_minimum_is_rejected() {
        let range = RangeSpec {
            max_k: 1,
            ..RangeSpec::default()
        };
        let err = verify(IdentityId::TrailingCoefficientSum, &range).unwrap_err();
        assert!(matches!(
            err,
            Error::RangeBelowMinimum {
                field: "max_k",
                min: 2,
                got: 1,
                ..
            }
        ));
        let clamped = range.clamped_for(IdentityId::TrailingCoefficientSum);
        assert_eq!(clamped.max_k, 2);
        let report = verify(IdentityId::TrailingCoefficientSum, &clamped).unwrap();
        assert_eq!(report.cases, 1);
        assert!(report.passed);
    }

    #[test]
    fn every_identity_passes_on_a_small_range() {
        for report in verify_all(&small()) {
            assert!(
                report.passed,
                "{}: {:?}",
                report.identity,
                report.counterexamples.first()
            );
            assert!(report.cases > 0, "{}", report.identity);
        }
    }

    #[test]
    fn verify_all_clamps_an_empty_range() {
        let empty = RangeSpec {
            max_n: 0,
            max_k: 0,
            max_r: 0,
            max_m: 0,
            max_i: 0,
            cap: 0,
            sample_points: vec![],
        };
        let reports = verify_all(&empty);
        assert_eq!(reports.len(), 30);
        let order: Vec<_> = reports.iter().map(|r| r.identity).collect();
        assert_eq!(order, IdentityId::ALL);
        assert!(reports.iter().all(|r| r.passed));
        for &id in IdentityId::ALL {
            assert_eq!(
                empty.check_for(id).is_ok(),
                id.minimums().is_empty(),
                "{id}"
            );
        }
    }

    #[test]
    fn case_counts_match_the_sweep() {
        let r = small();
        let report = verify(IdentityId::SingleDuality, &r).unwrap();
        assert_eq!(report.cases, 5 * 6);
        let report = verify(IdentityId::InteriorMinusOne, &r).unwrap();
        assert_eq!(report.cases, (1 + 2 + 3) * 6);
        let report = verify(IdentityId::JointGeneratingFunction, &r).unwrap();
        assert_eq!(report.cases, 15 + 35);
    }

    #[test]
    fn interior_reduces_to_trailing_and_leading() {
        let e = Engine::global();
        for k in 1..=6 {
            for r in 1..k {
                for n in 0..=5 {
                    assert_eq!(
                        interior_term(e, k, 2 * r, r + 1, n).unwrap(),
                        trailing_term(e, k, r, n)
                    );
                    assert_eq!(
                        interior_term(e, k, r, 1, n).unwrap(),
                        leading_term(e, k, r, n)
                    );
                }
            }
        }
        assert_eq!(interior_term(e, 3, 3, 3, 0), None);
    }

    #[test]
    fn dual_forms_give_identical_coefficients() {
        let e = Engine::global();
        for k in 1..=7 {
            for r in 1..=7 {
                assert_eq!(
                    trailing_coeff(e, Form::Dual, k, r),
                    trailing_coeff(e, Form::Direct, k, r)
                );
                assert_eq!(
                    leading_coeff(e, Form::Dual, k, r),
                    leading_coeff(e, Form::Direct, k, r)
                );
                for i in 1..=r {
                    assert_eq!(
                        interior_coeff(e, Form::Dual, k, r, i),
                        interior_coeff(e, Form::Direct, k, r, i)
                    );
                }
                for n in 0..=4 {
                    assert_eq!(
                        first_kind_pb_sum(e, Form::Dual, r, n),
                        first_kind_pb_sum(e, Form::Direct, r, n)
                    );
                }
            }
        }
    }

    #[test]
    fn odd_interior_sums_are_one_for_every_position() {
        let e = Engine::global();
        for k in (3..=9).step_by(2) {
            for i in 1..=6 {
                let sum: Rational = (i..=k + i - 2)
                    .map(|r| interior_coeff(e, Form::Direct, k, r, i))
                    .sum();
                assert_eq!(leading_constant(k) + sum, Rational::one(), "k={k} i={i}");
            }
        }
        let even: Rational = (2..=4)
            .map(|r| interior_coeff(e, Form::Direct, 4, r, 2))
            .sum();
        assert_eq!(leading_constant(4) + even, Rational::zero());
    }

    #[test]
    fn mixed_coefficient_sum_up_to_ten() {
        let range = RangeSpec {
            max_k: 10,
            max_r: 9,
            ..RangeSpec::default()
        };
        let report = verify(IdentityId::MixedCoefficientSum, &range).unwrap();
        assert!(report.passed);
        assert_eq!(report.cases, (1..=9).map(|r| 10 - r).sum::<usize>());
    }

    #[test]
    fn triangle_examples() {
        let t = conjecture_triangle(2, 3).unwrap();
        assert_eq!(t.rows[0], ints(&[6, 2]));
        assert_eq!(t.rows[1], ints(&[14, 10, 2]));
        assert_eq!(t.rows[2], ints(&[30, 34, 14, 2]));
        assert_eq!(t.rows[3], ints(&[62, 98, 62, 18, 2]));
        let pascal = conjecture_triangle(1, 4).unwrap();
        for (j, row) in pascal.rows.iter().enumerate() {
            let expected: Vec<BigInt> = (0..=j as i64 + 1)
                .map(|m| binomial(j as u32 + 1, m))
                .collect();
            assert_eq!(row, &expected);
        }
        assert!(conjecture_triangle(0, 2).is_err());
    }

    #[test]
    fn conjecture_coefficient_examples() {
        let c = conjecture_coefficients(4, 2).unwrap();
        assert_eq!(c.zeros, ints(&[-1, 14]));
        assert_eq!(c.trailing, ints(&[-10, 2]));
        let c = conjecture_coefficients(6, 3).unwrap();
        assert_eq!(c.zeros, ints(&[-1, 62, -540]));
        assert_eq!(c.trailing, ints(&[312, -72, 6]));
        let c = conjecture_coefficients(2, 1).unwrap();
        assert_eq!(c.zeros, ints(&[-1]));
        assert_eq!(c.trailing, ints(&[1]));
        assert!(conjecture_coefficients(2, 2).is_err());
    }

    #[test]
    fn conjecture_check_preconditions() {
        assert!(check_triangle_conjecture(2, 2, 3).is_err());
        let report = check_triangle_conjecture(4, 2, 4).unwrap();
        assert!(report.passed);
        assert_eq!(report.cases, (3 + 2) * 5);
    }

    #[test]
    fn stirling_fault_is_noticed() {
        let engine = Engine::with_fault(Fault::Stirling2 {
            n: 4,
            m: 2,
            delta: 1,
        });
        let report = engine
            .verify(IdentityId::NegativeIndexClosedForm, &small())
            .unwrap();
        assert!(!report.passed);
        assert!(!report.counterexamples.is_empty());
        let sorted = {
            let mut c = report.counterexamples.clone();
            c.sort();
            c
        };
        assert_eq!(sorted, report.counterexamples);
    }

    #[test]
    fn errors_inside_a_case_are_failures() {
        let mut c = Checker {
            engine: Engine::global(),
            cases: 0,
            failures: vec![],
        };
        c.case(params! {"n" => 1u32}, |_| Err(Error::DivisionByZero));
        assert_eq!(c.cases, 1);
        assert_eq!(c.failures[0].lhs, "error: division by zero");
    }

    #[test]
    fn report_json_shape() {
        let report = verify(IdentityId::LeadingCoefficientSum, &RangeSpec::default()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["identity"], "thm-3.5-2");
        assert_eq!(json["cases"], 5);
        assert_eq!(json["passed"], true);
        assert_eq!(json["counterexamples"], serde_json::json!([]));
        assert_eq!(json["range"]["max_n"], 8);
        assert_eq!(
            json["range"]["sample_points"][4],
            serde_json::json!(["1/2", "3"])
        );
        let failing = Engine::with_fault(Fault::Stirling2 {
            n: 3,
            m: 2,
            delta: 1,
        })
        .verify(IdentityId::LeadingCoefficientSum, &RangeSpec::default())
        .unwrap();
        let json = serde_json::to_value(&failing).unwrap();
        assert_eq!(json["passed"], false);
        assert_eq!(
            json["counterexamples"][0]["params"],
            serde_json::json!({"k": 3})
        );
    }
}
