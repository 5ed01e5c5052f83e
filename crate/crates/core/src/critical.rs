//! A convergent non-constant solution on the critical surface.
//!
//! Matching coefficients of the `A = 0` recurrence against the product
//! construction pins the parameters to `(a, b, c, d) = (1/2, 1, 1, 1)`, where
//! the recurrence reads `x[n+1] = x[n-1]·(1/2 + x[n-4]/(x[n-4] + x[n-2]))`.
//! Starting from `x0 = x1 = x2 = 1`, `x3 = x4 = μ` the solution is
//!
//! ```text
//! x[3n+j] = K0·K1⋯Kn   (j = 0, 1, 2),   K0 = 1, K1 = μ, K[i+1] = 1/2 + 1/(1 + K[i])
//! ```
//!
//! `Σ ln K[i]` alternates in sign with shrinking magnitude, so consecutive
//! partial products bracket the limit.
//!
//! The application labels its seeds `x0..x4`; the engine stores them at
//! indices `-4..0`, so application index `k` is engine index `k - 4`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::engine::simulate;
use crate::error::{Error, Result};
use crate::model::{half_one_one_one, Params, PositiveReal, SeedValues};
use crate::number::{
    rational_from_f64, rational_to_f64, round_rational_half_even, ArithmeticMode, BigFloat, Fault,
    Scalar, Values,
};

/// Application index minus engine index.
pub const APPLICATION_INDEX_SHIFT: i64 = 4;

/// Cap on terms for [`product_limit`].
pub const MAX_LIMIT_TERMS: usize = 10_000;

/// `(1/2, 1, 1, 1)`.
pub fn application_params() -> Params {
    half_one_one_one()
}

/// Engine seeds `(1, 1, 1, μ, μ)`.
pub fn application_seeds(mu: &PositiveReal) -> SeedValues {
    let one = PositiveReal::ratio("seed", 1, 1).expect("positive");
    SeedValues::from_reals([one.clone(), one.clone(), one, mu.clone(), mu.clone()])
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSequence {
    mu: PositiveReal,
    terms: Values,
}

impl KSequence {
    pub fn mu(&self) -> &PositiveReal {
        &self.mu
    }

    /// `K0, …, KN`.
    pub fn terms(&self) -> &Values {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.terms.get_f64(i)
    }

    pub fn log_terms(&self) -> Vec<f64> {
        self.terms.to_f64_vec().iter().map(|k| k.ln()).collect()
    }
}

fn k_terms<T: Scalar>(mu: &BigRational, n: usize, ctx: T::Ctx) -> (Vec<T>, Option<(usize, Fault)>) {
    let one = T::lift(&BigRational::one(), ctx);
    let half = T::lift(&q(1, 2), ctx);
    let mut terms = vec![one.clone()];
    if n == 0 {
        return (terms, None);
    }
    terms.push(T::lift(mu, ctx));
    for i in 2..=n {
        let prev = &terms[i - 1];
        let next = half.add(&one.div(&one.add(prev)));
        if let Some(fault) = next.fault(ctx) {
            return (terms, Some((i, fault)));
        }
        terms.push(next);
    }
    (terms, None)
}

fn growth_error(index: usize, fault: Fault, mode: ArithmeticMode) -> Error {
    let budget = match mode {
        ArithmeticMode::ExactRational { bit_budget } => bit_budget,
        ArithmeticMode::Float { .. } => 0,
    };
    match fault {
        Fault::Growth(bits) => Error::ExactGrowth {
            index: index as i64,
            bits,
            budget,
            partial: None,
        },
        // K stays in (1/2, 3/2) after the first step, so floats cannot leave range.
        Fault::Overflow | Fault::Underflow => unreachable!("K-map is bounded"),
    }
}

/// `K0, …, Kn` in the requested arithmetic.
pub fn k_sequence(mu: &PositiveReal, n: usize, mode: ArithmeticMode) -> Result<KSequence> {
    mode.validate()?;
    let exact_mu = mu.exact();
    let (terms, fault) = match mode {
        ArithmeticMode::Float { precision_bits: 53 } => {
            let (t, f) = k_terms::<f64>(exact_mu, n, ());
            (f64::wrap(t), f)
        }
        ArithmeticMode::Float { precision_bits } => {
            let (t, f) = k_terms::<BigFloat>(exact_mu, n, precision_bits);
            (BigFloat::wrap(t), f)
        }
        ArithmeticMode::ExactRational { bit_budget } => {
            let (t, f) = k_terms::<BigRational>(exact_mu, n, bit_budget);
            (BigRational::wrap(t), f)
        }
    };
    if let Some((i, fault)) = fault {
        return Err(growth_error(i, fault, mode));
    }
    Ok(KSequence {
        mu: mu.clone(),
        terms,
    })
}

/// The limit of `K0⋯Kn` with a Leibniz bound on its logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEstimate {
    /// `P0, …, Pn` with `Pn = K0⋯Kn`.
    pub partial_products: Vec<f64>,
    /// `Pn`, the last partial product.
    pub limit_estimate: f64,
    /// `|ln K[n+1]|`, which bounds `|ln(limit) - ln(Pn)|`.
    pub tail_bound: f64,
    /// `n + 1`.
    pub terms_used: usize,
}

impl SeriesEstimate {
    /// `[Pn·e^(-bound), Pn·e^(+bound)]`.
    pub fn bracket(&self) -> (f64, f64) {
        (
            self.limit_estimate * (-self.tail_bound).exp(),
            self.limit_estimate * self.tail_bound.exp(),
        )
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            name,
            value: x.to_string(),
        })
    }
}

/// Multiply in `K` terms until the next log-term is at most `tol` in magnitude.
pub fn product_limit(mu: f64, tol: f64) -> Result<SeriesEstimate> {
    positive("mu", mu)?;
    positive("tol", tol)?;
    let mut partial_products = vec![1.0];
    let mut next = mu;
    loop {
        let bound = next.ln().abs();
        if bound <= tol {
            return Ok(SeriesEstimate {
                limit_estimate: *partial_products.last().expect("P0"),
                tail_bound: bound,
                terms_used: partial_products.len(),
                partial_products,
            });
        }
        if partial_products.len() >= MAX_LIMIT_TERMS {
            return Err(Error::NonConvergence(MAX_LIMIT_TERMS));
        }
        let p = partial_products.last().expect("P0") * next;
        partial_products.push(p);
        next = 0.5 + 1.0 / (1.0 + next);
    }
}

fn products<T: Scalar>(terms: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(terms.len());
    for k in terms {
        let p = match out.last() {
            Some(prev) => prev.mul(k),
            None => k.clone(),
        };
        out.push(p);
    }
    out
}

fn tripled<T: Clone>(ps: Vec<T>) -> Vec<T> {
    ps.into_iter()
        .flat_map(|p| [p.clone(), p.clone(), p])
        .collect()
}

/// Solution values at application indices `0..=3·n_max + 2` from the product formula.
pub fn product_form_solution(
    mu: &PositiveReal,
    n_max: usize,
    mode: ArithmeticMode,
) -> Result<Values> {
    let seq = k_sequence(mu, n_max, mode)?;
    let values = match seq.terms {
        Values::Double(t) => Values::Double(tripled(products(&t))),
        Values::Multi(t) => Values::Multi(tripled(products(&t))),
        Values::Exact(t) => {
            let ps = products(&t);
            if let ArithmeticMode::ExactRational { bit_budget } = mode {
                if let Some((i, p)) = ps
                    .iter()
                    .enumerate()
                    .find(|(_, p)| p.fault(bit_budget).is_some())
                {
                    return Err(growth_error(i, p.fault(bit_budget).expect("fault"), mode));
                }
            }
            Values::Exact(tripled(ps))
        }
    };
    Ok(values)
}

/// Exact partial products `P1, …, P_rows`.
pub fn exact_partial_products(mu: &PositiveReal, rows: usize) -> Result<Vec<BigRational>> {
    let seq = k_sequence(mu, rows, ArithmeticMode::exact())?;
    let terms = seq.terms.as_exact().expect("exact mode");
    Ok(products(terms).into_iter().skip(1).collect())
}

/// `P1, …, P_rows` rounded half-to-even at `decimals` places.
pub fn product_table(mu: &PositiveReal, rows: usize, decimals: u32) -> Result<Vec<String>> {
    Ok(exact_partial_products(mu, rows)?
        .iter()
        .map(|p| round_rational_half_even(p, decimals))
        .collect())
}

/// Compare an exact direct simulation of the application against the exact
/// product formula at every index `3n + j`, `n ≤ n_max`.
pub fn oracle_equivalence(mu: &BigRational, n_max: usize) -> Result<bool> {
    let mu = PositiveReal::from_rational("mu", mu.clone())?;
    let mode = ArithmeticMode::exact();
    let formula = product_form_solution(&mu, n_max, mode)?;
    let last_application_index = 3 * n_max as i64 + 2;
    let steps = (last_application_index - APPLICATION_INDEX_SHIFT).max(1) as usize;
    let direct = simulate(&application_params(), &application_seeds(&mu), steps, mode)?;
    let (Some(formula), Some(direct)) = (formula.as_exact(), direct.values().as_exact()) else {
        unreachable!("exact mode")
    };
    Ok(formula.iter().zip(direct).all(|(f, d)| f == d) && direct.len() >= formula.len())
}

/// Outcome of checking the K-sequence invariants with exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct KInvariants {
    /// `ln K[i]` and `ln K[i+1]` have strictly opposite signs for `i >= 1`.
    pub alternates: bool,
    /// `|ln K[i+1]| < |ln K[i]|` for `i >= 1`.
    pub damped: bool,
    /// `K[i] > 1/2` for `i >= 2` and `K[i] < 7/6` for `i >= 3`.
    pub bounded: bool,
    /// First `N` with `|K[n] - 1| < 1e-8` for every checked `n >= N`.
    pub converged_from: Option<usize>,
    /// Every bracket `[P[n], P[n+1]]`, `n >= 1`, contains the deepest one computed.
    pub bracketed: bool,
}

impl KInvariants {
    pub fn all_hold(&self) -> bool {
        self.alternates
            && self.damped
            && self.bounded
            && self.converged_from.is_some()
            && self.bracketed
    }
}

/// Check the K-sequence invariants over `K0..K[terms]` in exact arithmetic.
///
/// Signs of `ln K` are signs of `K - 1`, and `|ln K[i+1]| < |ln K[i]|` is
/// decided through `K[i]·K[i+1]` versus 1, so nothing here is rounded.
pub fn check_k_invariants(mu: &PositiveReal, terms: usize) -> Result<KInvariants> {
    let mode = ArithmeticMode::ExactRational {
        bit_budget: u64::MAX,
    };
    let seq = k_sequence(mu, terms, mode)?;
    let k = seq.terms.as_exact().expect("exact mode");
    let one = BigRational::one();
    let sign = |x: &BigRational| (x - &one).signum();

    let alternates = (1..k.len().saturating_sub(1))
        .all(|i| !sign(&k[i]).is_zero() && sign(&k[i]) == -sign(&k[i + 1]));
    let damped = (1..k.len().saturating_sub(1)).all(|i| {
        let product = &k[i] * &k[i + 1];
        if k[i] > one {
            product > one
        } else if k[i] < one {
            product < one
        } else {
            false
        }
    });
    let half = q(1, 2);
    let seven_sixths = q(7, 6);
    let bounded = k
        .iter()
        .enumerate()
        .skip(2)
        .all(|(i, ki)| *ki > half && (i < 3 || *ki < seven_sixths));

    let eps = rational_from_f64(1e-8).expect("finite");
    let converged_from = (0..k.len())
        .rev()
        .take_while(|&i| (&k[i] - &one).abs() < eps)
        .last();

    let deep_tol = rational_from_f64(1e-12).expect("finite");
    let deep = (1..k.len().saturating_sub(1)).find(|&n| (&k[n + 1] - &one).abs() <= deep_tol);
    let bracketed = match deep {
        None => false,
        Some(deep) => {
            let ps = products(&k[..=deep + 1]);
            let interval = |n: usize| {
                if ps[n] <= ps[n + 1] {
                    (&ps[n], &ps[n + 1])
                } else {
                    (&ps[n + 1], &ps[n])
                }
            };
            let (lo, hi) = interval(deep);
            (1..deep).all(|n| {
                let (a, b) = interval(n);
                a <= lo && hi <= b
            })
        }
    };

    Ok(KInvariants {
        alternates,
        damped,
        bounded,
        converged_from,
        bracketed,
    })
}

/// Nearest double of each exact partial product, for quick display.
pub fn partial_products_f64(mu: &PositiveReal, rows: usize) -> Result<Vec<f64>> {
    Ok(exact_partial_products(mu, rows)?
        .iter()
        .map(rational_to_f64)
        .collect())
}
