//! Orbit simulation and the sequences derived from an orbit.
//!
//! Seeds sit at indices `-4..=0` and the recurrence produces `n >= 1`.
//! From an orbit we form the step-two ratios `y[n] = x[n]/x[n-2]` and, on each
//! residue class mod 3, `w = c + d·y`. Along a residue class `w` obeys the
//! Möbius map `w ↦ c + ad + bd/w`, which the product `u[n] = w[1]⋯w[n]` turns
//! into the linear recurrence `u[n+1] = (c+ad)u[n] + bd·u[n-1]`.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::model::{DiscriminantReport, Params, SeedValues};
use crate::number::{ArithmeticMode, BigFloat, Fault, Scalar, Values, DOUBLE_BITS};

/// Index of the oldest seed.
pub const FIRST_INDEX: i64 = -4;

/// Number of trailing ratio samples averaged by [`ratio_limit_estimate`].
pub const RATIO_TAIL_WINDOW: usize = 10;

/// A simulated orbit `x[-4], …, x[N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    params: Params,
    seeds: SeedValues,
    mode: ArithmeticMode,
    values: Values,
}

impl Trajectory {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn seeds(&self) -> &SeedValues {
        &self.seeds
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the newest value.
    pub fn last_index(&self) -> i64 {
        self.len() as i64 + FIRST_INDEX - 1
    }

    /// `x[n]` as a double.
    pub fn get(&self, n: i64) -> f64 {
        self.values.get_f64(position(n))
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.values.to_f64_vec()
    }

    /// Indices paired with their values.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        (0..self.len()).map(|i| (i as i64 + FIRST_INDEX, self.values.get_f64(i)))
    }
}

fn position(n: i64) -> usize {
    usize::try_from(n - FIRST_INDEX).expect("index at or after the oldest seed")
}

fn step<T: Scalar>(coef: &[T; 4], prev1: &T, prev2: &T, prev4: &T) -> T {
    let [a, b, c, d] = coef;
    let linear = a.mul(prev1);
    let numer = b.mul(prev1).mul(prev4);
    let denom = c.mul(prev4).add(&d.mul(prev2));
    linear.add(&numer.div(&denom))
}

fn run<T: Scalar>(
    params: &Params,
    seeds: &SeedValues,
    steps: usize,
    ctx: T::Ctx,
) -> (Vec<T>, Option<(i64, Fault)>) {
    let coef = params.exact().map(|q| T::lift(q, ctx));
    let mut xs: Vec<T> = Vec::with_capacity(steps + 5);
    for (i, seed) in seeds.reals().iter().enumerate() {
        let v = T::lift(seed.exact(), ctx);
        if let Some(fault) = v.fault(ctx) {
            return (xs, Some((i as i64 + FIRST_INDEX, fault)));
        }
        xs.push(v);
    }
    for n in 1..=steps as i64 {
        let k = xs.len();
        let next = step(&coef, &xs[k - 2], &xs[k - 3], &xs[k - 5]);
        if let Some(fault) = next.fault(ctx) {
            return (xs, Some((n, fault)));
        }
        xs.push(next);
    }
    (xs, None)
}

/// Iterate the recurrence `steps` times from `seeds`.
///
/// Float-mode overflow, underflow to zero and exact-mode bit growth abort the
/// run; the error carries the values computed so far.
pub fn simulate(
    params: &Params,
    seeds: &SeedValues,
    steps: usize,
    mode: ArithmeticMode,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::NoSteps);
    }
    mode.validate()?;
    let (values, fault) = match mode {
        ArithmeticMode::Float { precision_bits: 53 } => {
            let (v, f) = run::<f64>(params, seeds, steps, ());
            (f64::wrap(v), f)
        }
        ArithmeticMode::Float { precision_bits } => {
            let (v, f) = run::<BigFloat>(params, seeds, steps, precision_bits);
            (BigFloat::wrap(v), f)
        }
        ArithmeticMode::ExactRational { bit_budget } => {
            let (v, f) = run::<BigRational>(params, seeds, steps, bit_budget);
            (BigRational::wrap(v), f)
        }
    };
    let trajectory = Trajectory {
        params: params.clone(),
        seeds: seeds.clone(),
        mode,
        values,
    };
    match fault {
        None => Ok(trajectory),
        Some((index, fault)) => {
            let partial = Box::new(trajectory);
            Err(match fault {
                Fault::Overflow => Error::Overflow { index, partial },
                Fault::Underflow => Error::Underflow { index, partial },
                Fault::Growth(bits) => Error::ExactGrowth {
                    index,
                    bits,
                    budget: match mode {
                        ArithmeticMode::ExactRational { bit_budget } => bit_budget,
                        _ => unreachable!("bit growth only in exact mode"),
                    },
                    partial: Some(partial),
                },
            })
        }
    }
}

/// `y = x[n]/x[n-2]` and `c + d·y` for every index from `-2`, computed in
/// the trajectory's own arithmetic.
pub fn ratio_columns(traj: &Trajectory) -> (Values, Values) {
    let params = traj.params();
    match (traj.values(), traj.mode()) {
        (Values::Double(xs), _) => ratio_pair(xs, params, ()),
        (Values::Multi(xs), ArithmeticMode::Float { precision_bits }) => {
            ratio_pair(xs, params, precision_bits)
        }
        (Values::Multi(xs), _) => ratio_pair(xs, params, DOUBLE_BITS),
        (Values::Exact(xs), _) => ratio_pair(xs, params, u64::MAX),
    }
}

fn ratio_pair<T: Scalar>(xs: &[T], params: &Params, ctx: T::Ctx) -> (Values, Values) {
    let [_, _, c, d] = params.exact();
    let (c, d) = (T::lift(c, ctx), T::lift(d, ctx));
    let y: Vec<T> = xs.windows(3).map(|win| win[2].div(&win[0])).collect();
    let w = y.iter().map(|y| c.add(&d.mul(y))).collect();
    (T::wrap(y), T::wrap(w))
}

/// Sequences built from an orbit.
///
/// `y[k]` holds `y` at index `k - 2`; `w`, `w_prime` and `w_double_prime`
/// hold `c + d·y` at indices `3k`, `3k+1`, `3k+2` for `k >= 0`.
/// `u[0] = 1` and `u[n] = w[1]⋯w[n]`, so `w[n] = u[n]/u[n-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSequences {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub w_double_prime: Vec<f64>,
    pub u: Vec<f64>,
}

impl TransformSequences {
    /// Index of `y[0]`.
    pub const Y_FIRST_INDEX: i64 = -2;

    pub fn y_at(&self, n: i64) -> f64 {
        self.y[usize::try_from(n - Self::Y_FIRST_INDEX).expect("y defined from n = -2")]
    }

    /// The three residue-class sequences in order `3k`, `3k+1`, `3k+2`.
    pub fn residue_classes(&self) -> [&[f64]; 3] {
        [&self.w, &self.w_prime, &self.w_double_prime]
    }
}

/// Relative tolerance for the Möbius-map check in float modes.
pub const MOBIUS_TOLERANCE: f64 = 1e-10;

/// Build `y`, the three `w` classes and `u`, and check the Möbius map along
/// every class (exactly in exact mode, to [`MOBIUS_TOLERANCE`] otherwise).
pub fn transforms(traj: &Trajectory) -> Result<TransformSequences> {
    const MIN_LEN: usize = 8;
    if traj.len() < MIN_LEN {
        return Err(Error::TooShort {
            needed: MIN_LEN,
            got: traj.len(),
        });
    }
    let params = traj.params();
    let (a, b, c, d) = (params.a(), params.b(), params.c(), params.d());
    let xs = traj.to_f64_vec();
    let y: Vec<f64> = (2..xs.len()).map(|i| xs[i] / xs[i - 2]).collect();
    // y[k] is at index k - 2, so index 3j + r lives at y[3j + r + 2].
    let class =
        |r: usize| -> Vec<f64> { (r + 2..y.len()).step_by(3).map(|i| c + d * y[i]).collect() };
    let (w, w_prime, w_double_prime) = (class(0), class(1), class(2));

    let mut u = Vec::with_capacity(w.len());
    u.push(1.0);
    for wn in w.iter().skip(1) {
        let prev = *u.last().expect("u starts at 1");
        u.push(prev * wn);
    }

    if let Some(exact) = traj.values().as_exact() {
        check_mobius_exact(params, exact)?;
    } else {
        let shift = c + a * d;
        let coupling = b * d;
        let mut offset = 0;
        for seq in [&w, &w_prime, &w_double_prime] {
            for (k, pair) in seq.windows(2).enumerate() {
                let predicted = shift + coupling / pair[0];
                let err = (pair[1] - predicted).abs() / predicted.abs();
                if err > MOBIUS_TOLERANCE {
                    return Err(Error::RecurrenceMismatch {
                        position: offset + k,
                        error: err,
                    });
                }
            }
            offset += seq.len();
        }
    }

    Ok(TransformSequences {
        y,
        w,
        w_prime,
        w_double_prime,
        u,
    })
}

fn check_mobius_exact(params: &Params, xs: &[BigRational]) -> Result<()> {
    let [a, b, c, d] = params.exact();
    let shift = c + a * d;
    let coupling = b * d;
    let w = |i: usize| c + d * (&xs[i] / &xs[i - 2]);
    // w at index n depends on x[n] and x[n-2]; consecutive members of a residue
    // class are three positions apart.
    for i in 2..xs.len().saturating_sub(3) {
        let current = w(i);
        let next = w(i + 3);
        if next != &shift + &coupling / &current {
            return Err(Error::RecurrenceMismatch {
                position: i,
                error: f64::NAN,
            });
        }
    }
    Ok(())
}

/// Constants `l1`, `l2` of `w[n+1] = (l1·ρ+^(n+1) + l2·ρ-^(n+1)) / (l1·ρ+^n + l2·ρ-^n)`,
/// normalized so `u[0] = l1 + l2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormFit {
    pub l1: f64,
    pub l2: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
}

/// Solve `l1 + l2 = 1`, `l1·ρ+ + l2·ρ- = w1`.
pub fn fit_closed_form(w1: f64, report: &DiscriminantReport) -> Result<ClosedFormFit> {
    let (rho_plus, rho_minus) = (report.rho_plus, report.rho_minus);
    let gap = rho_plus - rho_minus;
    if gap.abs() <= 1e-14 {
        return Err(Error::DegenerateRoots);
    }
    let l1 = (w1 - rho_minus) / gap;
    Ok(ClosedFormFit {
        l1,
        l2: (rho_plus - w1) / gap,
        rho_plus,
        rho_minus,
    })
}

/// `w[n+1]` from the fitted closed form.
///
/// Evaluated as `(l1·ρ+ + l2·ρ-·r^n) / (l1 + l2·r^n)` with `r = ρ-/ρ+`, which
/// is the same quotient with both powers divided by `ρ+^n`.
pub fn predict_w(fit: &ClosedFormFit, n: u64) -> Result<f64> {
    let ratio = fit.rho_minus / fit.rho_plus;
    let decay = ratio.powi(i32::try_from(n).unwrap_or(i32::MAX));
    let denom = fit.l1 + fit.l2 * decay;
    let scale = fit.l1.abs() + (fit.l2 * decay).abs();
    if denom == 0.0 || denom.abs() <= f64::EPSILON * scale {
        return Err(Error::ZeroDenominator(n));
    }
    Ok((fit.l1 * fit.rho_plus + fit.l2 * fit.rho_minus * decay) / denom)
}

/// Mean of `x[n+1]/x[n-1]` over the last [`RATIO_TAIL_WINDOW`] indices.
pub fn ratio_limit_estimate(traj: &Trajectory) -> Result<f64> {
    let needed = RATIO_TAIL_WINDOW + 2;
    if traj.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: traj.len(),
        });
    }
    let xs = traj.to_f64_vec();
    let tail = &xs[xs.len() - needed..];
    let sum: f64 = (2..tail.len()).map(|i| tail[i] / tail[i - 2]).sum();
    Ok(sum / RATIO_TAIL_WINDOW as f64)
}

/// Desk-scale stand-ins for "tends to 0" and "tends to +∞".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationThresholds {
    /// Extinction: the last five values must fall below this multiple of the largest seed.
    pub extinction_factor: f64,
    pub extinction_steps: usize,
    /// Blow-up: some value must exceed this.
    pub blowup_level: f64,
    pub blowup_steps: usize,
}

impl Default for RealizationThresholds {
    fn default() -> Self {
        Self {
            extinction_factor: 1e-3,
            extinction_steps: 600,
            blowup_level: 1e6,
            blowup_steps: 2000,
        }
    }
}

/// What a double-precision run showed within the thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Realization {
    /// Tail fell below the extinction level (underflow counts).
    Extinct {
        tail_max: f64,
    },
    /// A value exceeded the blow-up level at index `n` (overflow counts).
    Exploded {
        n: i64,
    },
    Undecided,
}

/// Run the extinction test when `expect_extinction`, the blow-up test otherwise.
pub fn realize(
    params: &Params,
    seeds: &SeedValues,
    expect_extinction: bool,
    limits: &RealizationThresholds,
) -> Result<Realization> {
    let steps = if expect_extinction {
        limits.extinction_steps
    } else {
        limits.blowup_steps
    };
    let traj = match simulate(params, seeds, steps, ArithmeticMode::double()) {
        Ok(t) => t,
        Err(Error::Underflow { .. }) if expect_extinction => {
            return Ok(Realization::Extinct { tail_max: 0.0 })
        }
        Err(Error::Overflow { partial, .. }) => *partial,
        Err(e) => return Err(e),
    };
    if expect_extinction {
        let xs = traj.to_f64_vec();
        let tail_max = xs[xs.len() - 5..].iter().cloned().fold(0.0, f64::max);
        let scale = seeds.values().iter().cloned().fold(0.0, f64::max);
        let level = scale * limits.extinction_factor;
        Ok(if tail_max < level {
            Realization::Extinct { tail_max }
        } else {
            Realization::Undecided
        })
    } else {
        let hit = traj.indexed().find(|&(_, x)| x > limits.blowup_level);
        Ok(match hit {
            Some((n, _)) => Realization::Exploded { n },
            // overflow without a finite value above the level still diverged
            None if traj.last_index() < steps as i64 => Realization::Exploded {
                n: traj.last_index() + 1,
            },
            None => Realization::Undecided,
        })
    }
}
