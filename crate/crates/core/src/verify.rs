//! Self-check suite: each check samples deterministically from its own
//! seeded stream, runs against a wall-clock budget, and reports one line.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical::{check_k_invariants, oracle_equivalence, product_table};
use crate::engine::{
    fit_closed_form, predict_w, ratio_limit_estimate, realize, simulate, transforms, Realization,
    RealizationThresholds,
};
use crate::model::{discriminants, Params, PositiveReal, SeedValues};
use crate::number::{parse_rational, ArithmeticMode};
use crate::spectral::{
    characteristic_polynomial, characteristic_roots, jacobian, numeric_eigen_check,
};

pub const DEFAULT_SEED: u64 = 42;

/// Partial products `P1..P10` for `μ = 1/2` at five decimals, as printed in
/// the reference table.
pub const REFERENCE_TABLE: [&str; 10] = [
    "0.5", "0.58333", "0.56089", "0.56639", "0.56501", "0.56535", "0.56527", "0.56529", "0.56528",
    "0.56528",
];

/// `|A|` below which a sample is too close to the critical surface for the
/// desk-scale regime thresholds.
pub const REGIME_MARGIN: f64 = 0.05;

type CheckFn = fn(&mut ChaCha8Rng) -> Result<String, String>;

pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub summary: &'static str,
    pub budget: Duration,
    run: CheckFn,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: {} ({:.3}s, budget {:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

pub const CHECKS: [Check; 9] = [
    Check {
        id: 1,
        name: "paper-table",
        summary: "mu = 1/2 partial products at five decimals match the reference table",
        budget: Duration::from_millis(100),
        run: check_table,
    },
    Check {
        id: 2,
        name: "ratio-limit",
        summary: "L(1/2, 1, 1/2, 1) = sqrt(5)/2 and the simulated tail ratio agrees",
        budget: Duration::from_millis(100),
        run: check_ratio_limit,
    },
    Check {
        id: 3,
        name: "regimes",
        summary: "200 samples with |A| > 0.05 die out or blow up as classified",
        budget: Duration::from_secs(5),
        run: check_regimes,
    },
    Check {
        id: 4,
        name: "constant-solution",
        summary: "equal seeds on A = 0 stay constant (exact and double)",
        budget: Duration::from_secs(1),
        run: check_constant_solution,
    },
    Check {
        id: 5,
        name: "closed-form-w",
        summary: "fitted closed form reproduces simulated w for n <= 60",
        budget: Duration::from_secs(2),
        run: check_closed_form,
    },
    Check {
        id: 6,
        name: "spectrum",
        summary: "companion eigenpairs and spectral radius for 100 p in (0, 10]",
        budget: Duration::from_secs(1),
        run: check_spectrum,
    },
    Check {
        id: 7,
        name: "oracle",
        summary: "exact direct simulation equals the exact product formula",
        budget: Duration::from_secs(1),
        run: check_oracle,
    },
    Check {
        id: 8,
        name: "k-invariants",
        summary: "alternation, damping, bounds, convergence and bracketing of K",
        budget: Duration::from_secs(2),
        run: check_k_sequences,
    },
    Check {
        id: 9,
        name: "root-link",
        summary: "sign(A) = sign(1 - L) and f(c+d) = d*A over 1000 tuples",
        budget: Duration::from_millis(500),
        run: check_root_link,
    },
];

pub fn find(name: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.name == name)
}

impl Check {
    pub fn run(&self, seed: u64) -> CheckOutcome {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(self.id as u64));
        let start = Instant::now();
        let result = (self.run)(&mut rng);
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > self.budget {
            passed = false;
            detail = format!("{detail}; over time budget");
        }
        CheckOutcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

/// Run every check whose name is in `only` (all when empty), in suite order.
pub fn run_checks(seed: u64, only: &[String]) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c.name))
        .map(|c| c.run(seed))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        (x - reference).abs() / reference.abs()
    }
}

/// `a ∈ (0, 1.5)`, `b, c, d ∈ [0.1, 1]`.
fn sample_params(rng: &mut ChaCha8Rng) -> Params {
    let a = rng.random_range(1e-3..1.5);
    let [b, c, d] = [0; 3].map(|_| rng.random_range(0.1..=1.0));
    Params::new(a, b, c, d).expect("positive sample")
}

fn sample_seeds(rng: &mut ChaCha8Rng) -> SeedValues {
    SeedValues::new([0; 5].map(|_| rng.random_range(0.5..=2.0))).expect("positive seeds")
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_table(_: &mut ChaCha8Rng) -> Result<String, String> {
    let mu = PositiveReal::ratio("mu", 1, 2).expect("positive");
    let table = product_table(&mu, REFERENCE_TABLE.len(), 5).map_err(|e| e.to_string())?;
    let mismatches: Vec<String> = table
        .iter()
        .zip(REFERENCE_TABLE)
        .enumerate()
        .filter(|(_, (got, want))| parse_rational(got).ok() != parse_rational(want).ok())
        .map(|(i, (got, want))| format!("n={}: {got} vs {want}", i + 1))
        .collect();
    ensure(mismatches.is_empty(), || {
        format!(
            "{} of 10 differ: {}",
            mismatches.len(),
            mismatches.join(", ")
        )
    })?;
    Ok("all 10 values match".into())
}

fn check_ratio_limit(_: &mut ChaCha8Rng) -> Result<String, String> {
    let params = Params::new(0.5, 1.0, 0.5, 1.0).expect("positive");
    let target = 5f64.sqrt() / 2.0;
    let limit = discriminants(&params).ratio_limit;
    ensure((limit - target).abs() <= 1e-12, || {
        format!("L = {limit}, expected {target}")
    })?;
    let traj = simulate(&params, &SeedValues::ones(), 200, ArithmeticMode::double())
        .map_err(|e| e.to_string())?;
    let est = ratio_limit_estimate(&traj).map_err(|e| e.to_string())?;
    ensure((est - target).abs() <= 1e-6, || {
        format!("tail ratio {est}, expected {target}")
    })?;
    Ok(format!(
        "L = {limit:.12}, tail ratio error {:.1e}",
        (est - target).abs()
    ))
}

fn check_regimes(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let limits = RealizationThresholds::default();
    let (mut extinct, mut exploded, mut drawn) = (0, 0, 0);
    while extinct + exploded < 200 {
        let params = sample_params(rng);
        let seeds = sample_seeds(rng);
        drawn += 1;
        let a = discriminants(&params).a_discriminant;
        if a.abs() <= REGIME_MARGIN {
            continue;
        }
        let outcome = realize(&params, &seeds, a > 0.0, &limits).map_err(|e| e.to_string())?;
        match (a > 0.0, outcome) {
            (true, Realization::Extinct { .. }) => extinct += 1,
            (false, Realization::Exploded { .. }) => exploded += 1,
            _ => {
                return Err(format!(
                    "a={} b={} c={} d={} (A={a:.4}) seeds {:?}: {outcome:?}",
                    params.a(),
                    params.b(),
                    params.c(),
                    params.d(),
                    seeds.values()
                ))
            }
        }
    }
    Ok(format!(
        "{extinct} extinct, {exploded} blow-up ({drawn} drawn)"
    ))
}

fn check_constant_solution(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = ratio(rng.random_range(1..100), 100);
        let c = ratio(rng.random_range(1..=21), 7);
        let d = ratio(rng.random_range(1..=27), 9);
        let params = Params::critical(a, c, d).map_err(|e| e.to_string())?;
        let w = PositiveReal::from_rational(
            "w",
            ratio(rng.random_range(1..=200), rng.random_range(1..=13)),
        )
        .expect("positive");
        let seeds = SeedValues::constant(w.clone());

        let exact =
            simulate(&params, &seeds, 100, ArithmeticMode::exact()).map_err(|e| e.to_string())?;
        let values = exact.values().as_exact().expect("exact");
        ensure(values.iter().all(|x| x == w.exact()), || {
            format!(
                "exact orbit left w = {} at params {:?}",
                w.exact(),
                params.exact()
            )
        })?;

        let float =
            simulate(&params, &seeds, 100, ArithmeticMode::double()).map_err(|e| e.to_string())?;
        for x in float.to_f64_vec() {
            worst = worst.max(rel_err(x, w.value()));
        }
    }
    ensure(worst <= 1e-12, || format!("double deviation {worst:.2e}"))?;
    Ok(format!("exact deviation 0, double deviation {worst:.1e}"))
}

fn check_closed_form(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let params = sample_params(rng);
        let seeds = sample_seeds(rng);
        let traj =
            simulate(&params, &seeds, 190, ArithmeticMode::double()).map_err(|e| e.to_string())?;
        let seqs = transforms(&traj).map_err(|e| e.to_string())?;
        let report = discriminants(&params);
        let fit = fit_closed_form(seqs.w[1], &report).map_err(|e| e.to_string())?;
        for n in 0..=60u64 {
            let predicted = predict_w(&fit, n).map_err(|e| e.to_string())?;
            let err = rel_err(predicted, seqs.w[n as usize + 1]);
            worst = worst.max(err);
            ensure(err <= 1e-9, || {
                format!(
                    "n={n}: predicted {predicted}, simulated {}",
                    seqs.w[n as usize + 1]
                )
            })?;
        }
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn check_spectrum(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..100 {
        // (0, 10]
        let p = 10.0 - rng.random_range(0.0..10.0);
        let m = jacobian(p).map_err(|e| e.to_string())?;
        ensure(numeric_eigen_check(&m, 1e-10), || {
            format!("eigenpair residual above 1e-10 at p={p}")
        })?;
        let spectrum = characteristic_roots(p).map_err(|e| e.to_string())?;
        let expected = p.cbrt().max(1.0);
        ensure(rel_err(spectrum.spectral_radius, expected) <= 1e-12, || {
            format!("radius {} vs {expected} at p={p}", spectrum.spectral_radius)
        })?;
        ensure(
            characteristic_polynomial(p) == [-p, 0.0, p, -1.0, 0.0, 1.0],
            || format!("polynomial expansion at p={p}"),
        )?;
    }
    Ok("100 values of p".into())
}

fn check_oracle(_: &mut ChaCha8Rng) -> Result<String, String> {
    for mu in [ratio(1, 2), ratio(1, 1), ratio(2, 1), ratio(7, 3)] {
        let ok = oracle_equivalence(&mu, 20).map_err(|e| e.to_string())?;
        ensure(ok, || format!("mismatch for mu = {mu}"))?;
    }
    Ok("mu in {1/2, 1, 2, 7/3}, n <= 20".into())
}

fn check_k_sequences(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut latest = 0;
    for _ in 0..50 {
        let mu = 5.0 - rng.random_range(0.0..5.0);
        let mu = PositiveReal::new("mu", mu).expect("positive");
        let inv = check_k_invariants(&mu, 100).map_err(|e| e.to_string())?;
        ensure(inv.all_hold(), || format!("mu = {mu}: {inv:?}"))?;
        latest = latest.max(inv.converged_from.unwrap_or(0));
    }
    Ok(format!(
        "50 values of mu, |K - 1| < 1e-8 from n = {latest} at the latest"
    ))
}

fn check_root_link(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = rng.random_range(1e-3..2.0);
        let [b, c, d] = [0; 3].map(|_| rng.random_range(1e-2..2.0));
        let params = Params::new(a, b, c, d).expect("positive");
        let r = discriminants(&params);
        let a_disc = r.a_discriminant;
        ensure(a_disc.signum() == (1.0 - r.ratio_limit).signum(), || {
            format!("sign mismatch: A = {a_disc}, L = {}", r.ratio_limit)
        })?;

        // f(λ) = λ² - (c+ad)λ - bd, evaluated at λ = c + d
        let lambda = c + d;
        let terms = [lambda * lambda, (c + a * d) * lambda, b * d];
        let f = terms[0] - terms[1] - terms[2];
        let scale = terms.iter().sum::<f64>();
        let err = (f - d * a_disc).abs() / scale;
        worst = worst.max(err);
        ensure(err <= 1e-12, || {
            format!("f(c+d) = {f}, d*A = {}", d * a_disc)
        })?;

        let [qa, qb, qc, qd] = params.exact();
        let ql = qc + qd;
        let exact_f = &ql * &ql - (qc + qa * qd) * &ql - qb * qd;
        ensure(exact_f == qd * params.exact_a_discriminant(), || {
            "exact identity failed".into()
        })?;

        for root in [r.rho_plus, r.rho_minus] {
            let residual = root * root - (c + a * d) * root - b * d;
            let size = root * root + (c + a * d) * root.abs() + b * d;
            ensure(residual.abs() <= 1e-12 * size, || {
                format!("root {root} residual {residual}")
            })?;
        }
    }
    Ok(format!("1000 tuples, max scaled error {worst:.1e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_ordered() {
        for (i, c) in CHECKS.iter().enumerate() {
            assert_eq!(c.id as usize, i + 1);
            assert!(find(c.name).is_some());
        }
        assert!(find("missing").is_none());
    }

    #[test]
    fn filter_selects_by_name() {
        let out = run_checks(DEFAULT_SEED, &["oracle".to_string()]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, "oracle");
        assert!(out[0].passed, "{}", out[0].line());
    }

    #[test]
    fn table_mismatches_are_listed() {
        let out = find("paper-table").unwrap().run(DEFAULT_SEED);
        println!("{}", out.line());
        assert!(out.detail.contains("n=10"), "{}", out.detail);
    }

    #[test]
    fn remaining_checks_pass() {
        for out in run_checks(7, &[]).iter().filter(|o| o.id != 1) {
            println!("{}", out.line());
            assert!(out.passed, "{}", out.line());
        }
    }
}
