//! Parameters of the recurrence
//!
//! ```text
//! x[n+1] = a·x[n-1] + b·x[n-1]·x[n-4] / (c·x[n-4] + d·x[n-2])
//! ```
//!
//! and the scalars that decide where its positive solutions go.
//!
//! The sign of `A = (c+d)(1-a) - b` splits parameter space: every positive
//! solution tends to 0 when `A > 0` and to `+∞` when `A < 0`. On the surface
//! `A = 0` every positive constant is a solution. `B = bd - (c+d)²` and
//! `p = bd/(c+d)²` describe the linearization there.
//!
//! On `A = 0` with positive parameters, `B = -(c+d)(ad+c)` is always negative,
//! so [`Regime::CriticalUnstable`] cannot be produced from valid [`Params`]. It
//! is kept so classification stays a total function of the signs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::number::{parse_rational, rational_from_f64, rational_to_f64};

/// A strictly positive number carried both exactly and as its nearest double.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveReal {
    exact: BigRational,
    value: f64,
}

impl PositiveReal {
    pub fn new(name: &'static str, value: f64) -> Result<Self> {
        let exact = rational_from_f64(value).ok_or_else(|| Error::NonPositive {
            name,
            value: value.to_string(),
        })?;
        Self::from_rational(name, exact)
    }

    pub fn from_rational(name: &'static str, exact: BigRational) -> Result<Self> {
        if !exact.is_positive() {
            return Err(Error::NonPositive {
                name,
                value: exact.to_string(),
            });
        }
        let value = rational_to_f64(&exact);
        if value == 0.0 || !value.is_finite() {
            return Err(Error::NonPositive {
                name,
                value: exact.to_string(),
            });
        }
        Ok(Self { exact, value })
    }

    /// Parse decimal or `p/q` text, keeping the exact value it spells.
    pub fn parse(name: &'static str, text: &str) -> Result<Self> {
        Self::from_rational(name, parse_rational(text)?)
    }

    pub fn ratio(name: &'static str, numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse(format!("{numer}/{denom}")));
        }
        Self::from_rational(name, BigRational::new(numer.into(), denom.into()))
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

impl fmt::Display for PositiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The four positive coefficients `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    a: PositiveReal,
    b: PositiveReal,
    c: PositiveReal,
    d: PositiveReal,
}

impl Params {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Ok(Self {
            a: PositiveReal::new("a", a)?,
            b: PositiveReal::new("b", b)?,
            c: PositiveReal::new("c", c)?,
            d: PositiveReal::new("d", d)?,
        })
    }

    pub fn from_rationals(
        a: BigRational,
        b: BigRational,
        c: BigRational,
        d: BigRational,
    ) -> Result<Self> {
        Ok(Self {
            a: PositiveReal::from_rational("a", a)?,
            b: PositiveReal::from_rational("b", b)?,
            c: PositiveReal::from_rational("c", c)?,
            d: PositiveReal::from_rational("d", d)?,
        })
    }

    pub fn from_parts(a: PositiveReal, b: PositiveReal, c: PositiveReal, d: PositiveReal) -> Self {
        Self { a, b, c, d }
    }

    /// Parameters on the surface `A = 0` with `b := (c+d)(1-a)`; needs `a < 1`.
    pub fn critical(a: BigRational, c: BigRational, d: BigRational) -> Result<Self> {
        let b = (&c + &d) * (BigRational::one() - &a);
        Self::from_rationals(a, b, c, d)
    }

    pub fn a(&self) -> f64 {
        self.a.value
    }
    pub fn b(&self) -> f64 {
        self.b.value
    }
    pub fn c(&self) -> f64 {
        self.c.value
    }
    pub fn d(&self) -> f64 {
        self.d.value
    }

    /// Exact coefficients in `(a, b, c, d)` order.
    pub fn exact(&self) -> [&BigRational; 4] {
        [&self.a.exact, &self.b.exact, &self.c.exact, &self.d.exact]
    }

    /// `A = (c+d)(1-a) - b`, exactly.
    pub fn exact_a_discriminant(&self) -> BigRational {
        let [a, b, c, d] = self.exact();
        (c + d) * (BigRational::one() - a) - b
    }

    /// `B = bd - (c+d)²`, exactly.
    pub fn exact_b_discriminant(&self) -> BigRational {
        let [_, b, c, d] = self.exact();
        let s = c + d;
        b * d - &s * &s
    }

    /// Multiply `b`, `c` and `d` by a common positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.a(),
            self.b() * factor,
            self.c() * factor,
            self.d() * factor,
        )
    }
}

/// Five positive starting values `x[-4], …, x[0]`, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedValues([PositiveReal; 5]);

impl SeedValues {
    pub fn new(values: [f64; 5]) -> Result<Self> {
        let mut out = Vec::with_capacity(5);
        for v in values {
            out.push(PositiveReal::new("seed", v)?);
        }
        Ok(Self(out.try_into().expect("five seeds")))
    }

    pub fn from_reals(values: [PositiveReal; 5]) -> Self {
        Self(values)
    }

    pub fn from_rationals(values: [BigRational; 5]) -> Result<Self> {
        let mut out = Vec::with_capacity(5);
        for v in values {
            out.push(PositiveReal::from_rational("seed", v)?);
        }
        Ok(Self(out.try_into().expect("five seeds")))
    }

    /// All five seeds equal to `w`.
    pub fn constant(w: PositiveReal) -> Self {
        Self([w.clone(), w.clone(), w.clone(), w.clone(), w])
    }

    pub fn ones() -> Self {
        Self::constant(PositiveReal::ratio("seed", 1, 1).expect("one is positive"))
    }

    pub fn values(&self) -> [f64; 5] {
        [0, 1, 2, 3, 4].map(|i| self.0[i].value)
    }

    pub fn reals(&self) -> &[PositiveReal; 5] {
        &self.0
    }
}

/// Every derived scalar of the asymptotic analysis for one parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantReport {
    /// `(c+d)(1-a) - b`, exact value rounded once.
    pub a_discriminant: f64,
    /// `bd - (c+d)²`, exact value rounded once.
    pub b_discriminant: f64,
    /// Dominant root of `λ² - (c+ad)λ - bd`.
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// Limit of `x[n+1]/x[n-1]`, equal to `(ρ+ - c)/d`.
    pub ratio_limit: f64,
    /// `bd/(c+d)²`, the coupling entry of the critical-case Jacobian.
    pub coupling: f64,
    /// `max(1, p^(1/3))`.
    pub spectral_radius: f64,
}

/// Closed-form discriminants, characteristic roots and ratio limit.
pub fn discriminants(params: &Params) -> DiscriminantReport {
    let (a, b, c, d) = (params.a(), params.b(), params.c(), params.d());
    let trace = c + a * d;
    let det = b * d;
    let rho_plus = 0.5 * (trace + (trace * trace + 4.0 * det).sqrt());
    // Vieta: ρ+ρ- = -bd, avoids the cancellation in the minus-branch formula.
    let rho_minus = -det / rho_plus;
    // ρ+ = c + ad + bd/ρ+, so (ρ+ - c)/d = a + b/ρ+ without cancellation.
    let ratio_limit = a + b / rho_plus;
    let s = c + d;
    let coupling = det / (s * s);
    DiscriminantReport {
        a_discriminant: rational_to_f64(&params.exact_a_discriminant()),
        b_discriminant: rational_to_f64(&params.exact_b_discriminant()),
        rho_plus,
        rho_minus,
        ratio_limit,
        coupling,
        spectral_radius: coupling.cbrt().max(1.0),
    }
}

/// Asymptotic fate of all positive solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `A > 0`: every positive solution tends to 0.
    Extinction(DiscriminantReport),
    /// `A < 0`: every positive solution tends to `+∞`.
    Blowup(DiscriminantReport),
    /// `A = 0, B > 0`: constant solutions are unstable.
    CriticalUnstable(DiscriminantReport),
    /// `A = 0, B ≤ 0`: non-constant solutions converging to a positive limit exist.
    CriticalConvergent(DiscriminantReport),
}

impl Regime {
    pub fn report(&self) -> &DiscriminantReport {
        match self {
            Regime::Extinction(r)
            | Regime::Blowup(r)
            | Regime::CriticalUnstable(r)
            | Regime::CriticalConvergent(r) => r,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Extinction(_) => "Extinction",
            Regime::Blowup(_) => "Blowup",
            Regime::CriticalUnstable(_) => "CriticalUnstable",
            Regime::CriticalConvergent(_) => "CriticalConvergent",
        }
    }

    pub fn is_critical(&self) -> bool {
        matches!(
            self,
            Regime::CriticalUnstable(_) | Regime::CriticalConvergent(_)
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify by the sign of `A` (band `[-tol, tol]` counts as zero), then by
/// the sign of `B` on the critical band. With `tol == 0` the signs are taken
/// from the exact rational coefficients.
pub fn classify(params: &Params, tol: f64) -> Regime {
    let report = discriminants(params);
    let (a_sign, b_sign) = if tol == 0.0 {
        (
            sign_of(&params.exact_a_discriminant()),
            sign_of(&params.exact_b_discriminant()),
        )
    } else {
        let tol = tol.abs();
        let a = report.a_discriminant;
        let a_sign = if a > tol {
            1
        } else if a < -tol {
            -1
        } else {
            0
        };
        (a_sign, sign_of_f64(report.b_discriminant))
    };
    match (a_sign, b_sign) {
        (1, _) => Regime::Extinction(report),
        (-1, _) => Regime::Blowup(report),
        (_, 1) => Regime::CriticalUnstable(report),
        _ => Regime::CriticalConvergent(report),
    }
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_of_f64(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Fixed points of the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumSet {
    /// Zero alone. The recurrence map is `0/0` at the origin, so 0 is a fixed
    /// point only through the limit of the map along the diagonal
    /// `v ↦ av + bv²/((c+d)v)`.
    OnlyZero,
    /// Every positive constant is a fixed point (the `A = 0` surface).
    PositiveContinuum,
}

impl EquilibriumSet {
    pub fn for_regime(regime: &Regime) -> Self {
        if regime.is_critical() {
            EquilibriumSet::PositiveContinuum
        } else {
            EquilibriumSet::OnlyZero
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            EquilibriumSet::OnlyZero => "only 0 (limiting fixed point)",
            EquilibriumSet::PositiveContinuum => "every w > 0",
        }
    }
}

pub fn equilibria(params: &Params) -> EquilibriumSet {
    EquilibriumSet::for_regime(&classify(params, 0.0))
}

/// The parameters `(1/2, 1, 1, 1)`, on the critical surface.
pub fn half_one_one_one() -> Params {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    Params::from_rationals(q(1, 2), q(1, 1), q(1, 1), q(1, 1)).expect("positive")
}
