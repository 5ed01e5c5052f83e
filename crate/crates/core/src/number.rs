//! Numeric plumbing shared by every module: exact rationals, the arithmetic
//! modes a computation may run in, and the storage for sequences produced in
//! each mode.

use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Binary floating point with a runtime-selected significand width.
pub type BigFloat = FBig<HalfEven, 2>;

/// Significand bits of an IEEE 754 double.
pub const DOUBLE_BITS: u32 = 53;

/// Default cap on numerator/denominator size in exact mode.
pub const DEFAULT_BIT_BUDGET: u64 = 4096;

/// How a sequence is computed.
///
/// `Float { precision_bits: 53 }` runs on native `f64`; any other width runs
/// on [`BigFloat`] with round-half-even at that many significand bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    Float { precision_bits: u32 },
    ExactRational { bit_budget: u64 },
}

impl ArithmeticMode {
    pub const fn double() -> Self {
        ArithmeticMode::Float {
            precision_bits: DOUBLE_BITS,
        }
    }

    pub const fn float(precision_bits: u32) -> Self {
        ArithmeticMode::Float { precision_bits }
    }

    pub const fn exact() -> Self {
        ArithmeticMode::ExactRational {
            bit_budget: DEFAULT_BIT_BUDGET,
        }
    }

    pub const fn is_exact(&self) -> bool {
        matches!(self, ArithmeticMode::ExactRational { .. })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            ArithmeticMode::Float { precision_bits } if precision_bits < 8 => {
                Err(Error::InvalidPrecision(precision_bits))
            }
            ArithmeticMode::ExactRational { bit_budget: 0 } => Err(Error::InvalidPrecision(0)),
            _ => Ok(()),
        }
    }
}

impl Default for ArithmeticMode {
    fn default() -> Self {
        Self::double()
    }
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticMode::Float { precision_bits } => write!(f, "float{precision_bits}"),
            ArithmeticMode::ExactRational { .. } => f.write_str("exact"),
        }
    }
}

/// A sequence of values stored in the representation of the mode that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Double(Vec<f64>),
    Multi(Vec<BigFloat>),
    Exact(Vec<BigRational>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Double(v) => v.len(),
            Values::Multi(v) => v.len(),
            Values::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nearest `f64` of the value at `i`.
    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            Values::Double(v) => v[i],
            Values::Multi(v) => v[i].to_f64().value(),
            Values::Exact(v) => rational_to_f64(&v[i]),
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.get_f64(i)).collect()
    }

    pub fn as_exact(&self) -> Option<&[BigRational]> {
        match self {
            Values::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// Text form of the value at `i`: shortest round-trip decimal for doubles,
    /// `p/q` for exact values, and a decimal carrying the working precision
    /// for wide floats.
    pub fn display(&self, i: usize) -> String {
        match self {
            Values::Double(v) => format!("{}", v[i]),
            Values::Multi(v) => format_big_float(&v[i]),
            Values::Exact(v) => v[i].to_string(),
        }
    }
}

/// Ways a single arithmetic result can leave the representable range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Fault {
    Overflow,
    Underflow,
    Growth(u64),
}

/// Field operations needed by the recurrences, implemented once per mode.
pub(crate) trait Scalar: Clone + Sized {
    type Ctx: Copy;

    fn lift(q: &BigRational, ctx: Self::Ctx) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn fault(&self, ctx: Self::Ctx) -> Option<Fault>;
    fn wrap(values: Vec<Self>) -> Values;
}

impl Scalar for f64 {
    type Ctx = ();

    fn lift(q: &BigRational, _: ()) -> Self {
        rational_to_f64(q)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn fault(&self, _: ()) -> Option<Fault> {
        if !self.is_finite() {
            Some(Fault::Overflow)
        } else if *self == 0.0 {
            Some(Fault::Underflow)
        } else {
            None
        }
    }
    fn wrap(values: Vec<Self>) -> Values {
        Values::Double(values)
    }
}

impl Scalar for BigFloat {
    type Ctx = u32;

    fn lift(q: &BigRational, bits: u32) -> Self {
        rational_to_big_float(q, bits)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn fault(&self, _: u32) -> Option<Fault> {
        if self.repr().is_infinite() {
            Some(Fault::Overflow)
        } else if *self.repr().significand() == IBig::ZERO {
            Some(Fault::Underflow)
        } else {
            None
        }
    }
    fn wrap(values: Vec<Self>) -> Values {
        Values::Multi(values)
    }
}

impl Scalar for BigRational {
    type Ctx = u64;

    fn lift(q: &BigRational, _: u64) -> Self {
        q.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn fault(&self, budget: u64) -> Option<Fault> {
        let bits = rational_bits(self);
        (bits > budget).then_some(Fault::Growth(bits))
    }
    fn wrap(values: Vec<Self>) -> Values {
        Values::Exact(values)
    }
}

/// Larger of the numerator and denominator bit lengths.
pub fn rational_bits(q: &BigRational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

/// Correctly rounded conversion to the nearest double.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// The exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

fn to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let magnitude = IBig::from(UBig::from_le_bytes(&bytes));
    if sign == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}

/// Round `q` to a float with `bits` significand bits.
pub fn rational_to_big_float(q: &BigRational, bits: u32) -> BigFloat {
    let bits = bits as usize;
    let numer = BigFloat::from(to_ibig(q.numer()))
        .with_precision(bits)
        .value();
    let denom = BigFloat::from(to_ibig(q.denom()))
        .with_precision(bits)
        .value();
    numer / denom
}

fn format_big_float(x: &BigFloat) -> String {
    let digits = (x.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.clone()
        .with_base_and_precision::<10>(digits)
        .value()
        .to_string()
}

/// Parse a decimal (`0.25`, `-3`, `1e-3`, `2.5E+2`) or a fraction of two
/// decimals (`7/3`, `1/0.5`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(text.to_string());
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    parse_decimal(text).ok_or_else(bad)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10u8));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, scale.unsigned_abs() as usize);
    }
    Some(if negative { -value } else { value })
}

/// Decimal text of `x` rounded to `decimals` places with ties to even,
/// evaluated on the exact binary value of `x`.
pub fn round_half_even(x: f64, decimals: u32) -> String {
    let exact = rational_from_f64(x).expect("finite value");
    round_rational_half_even(&exact, decimals)
}

pub fn round_rational_half_even(q: &BigRational, decimals: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), decimals as usize);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    let mut units = floor.to_integer();
    if frac > half || (frac == half && (&units % 2u8) == BigInt::one()) {
        units += 1u8;
    }
    let int_part = &units / &scale;
    let frac_part = (&units % &scale).to_string();
    let sign = if q.is_negative() && !units.is_zero() {
        "-"
    } else {
        ""
    };
    if decimals == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac_part:0>width$}",
            width = decimals as usize
        )
    }
}

/// `%g`-style text with `digits` significant digits and trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
