use std::io::Write;

use anyhow::anyhow;
use rayon::prelude::*;

use pentarec::critical::{application_params, application_seeds, product_limit, product_table};
use pentarec::engine::{ratio_columns, simulate as run_simulation, Trajectory, FIRST_INDEX};
use pentarec::model::{classify as classify_params, EquilibriumSet, Params, Regime};
use pentarec::number::{format_significant, ArithmeticMode};
use pentarec::spectral::characteristic_roots;
use pentarec::verify::{find, run_checks};
use pentarec::Error;

use crate::input::{self, Axis};
use crate::{ClassifyArgs, CriticalArgs, Failure, ParamArgs, ScanArgs, SimulateArgs, VerifyArgs};

type Outcome = std::result::Result<(), Failure>;

const SCAN_HEADER: &str = "a,b,c,d,A,B,L,p,regime";

/// Trailing values inspected by `critical-limit --explore`.
const EXPLORE_WINDOW: usize = 30;
const EXPLORE_SETTLED: f64 = 1e-6;

fn required_params(args: &ParamArgs) -> anyhow::Result<Params> {
    let get = |v: &Option<String>, name: &str| v.clone().ok_or_else(|| anyhow!("missing --{name}"));
    input::params(
        &get(&args.a, "a")?,
        &get(&args.b, "b")?,
        &get(&args.c, "c")?,
        &get(&args.d, "d")?,
    )
}

/// Like [`format_significant`] but keeps trailing zeros, so `1` reads `1.00000`.
fn significant_fixed(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format_significant(x, digits);
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-5..digits as i32).contains(&exp) {
        format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn classify(args: &ClassifyArgs) -> Outcome {
    let params = required_params(&args.params)?;
    let regime = classify_params(&params, args.crit_tol);
    let r = regime.report();
    let mut out = args.output.sink()?;
    if args.csv {
        writeln!(out, "a,b,c,d,A,B,rho_plus,rho_minus,L,p,regime")?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            params.a(),
            params.b(),
            params.c(),
            params.d(),
            r.a_discriminant,
            r.b_discriminant,
            r.rho_plus,
            r.rho_minus,
            r.ratio_limit,
            r.coupling,
            regime
        )?;
    } else {
        let g = |x: f64| format_significant(x, args.output.digits);
        writeln!(
            out,
            "a={} b={} c={} d={}",
            g(params.a()),
            g(params.b()),
            g(params.c()),
            g(params.d())
        )?;
        writeln!(out, "A={}", g(r.a_discriminant))?;
        writeln!(out, "B={}", g(r.b_discriminant))?;
        writeln!(out, "rho+={}", g(r.rho_plus))?;
        writeln!(out, "rho-={}", g(r.rho_minus))?;
        writeln!(out, "L={}", g(r.ratio_limit))?;
        writeln!(out, "p={}", g(r.coupling))?;
        if regime.is_critical() {
            let spectrum = characteristic_roots(r.coupling)?;
            writeln!(out, "spectral_radius={}", g(spectrum.spectral_radius))?;
            writeln!(out, "linear_stability={}", spectrum.verdict)?;
        }
        writeln!(out, "regime={regime}")?;
        writeln!(
            out,
            "equilibria={}",
            EquilibriumSet::for_regime(&regime).describe()
        )?;
    }
    out.flush()?;
    Ok(())
}

fn write_orbit(out: &mut dyn Write, traj: &Trajectory, ratios: bool) -> std::io::Result<()> {
    let values = traj.values();
    let columns = ratios.then(|| ratio_columns(traj));
    for i in 0..values.len() {
        let n = i as i64 + FIRST_INDEX;
        write!(out, "{n},{}", values.display(i))?;
        if let Some((y, w)) = &columns {
            match i.checked_sub(2) {
                Some(k) => write!(out, ",{},{}", y.display(k), w.display(k))?,
                None => write!(out, ",,")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

fn abort_reason(e: &Error) -> String {
    match e {
        Error::Overflow { .. } => "overflow".into(),
        Error::Underflow { .. } => "underflow".into(),
        Error::ExactGrowth { bits, budget, .. } => {
            format!("exact growth ({bits} bits > budget {budget})")
        }
        other => other.to_string(),
    }
}

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let (params, seeds) = match &args.app_mu {
        Some(mu) => (
            application_params(),
            application_seeds(&input::positive("app-mu", mu)?),
        ),
        None => (
            required_params(&args.params)?,
            input::seeds(args.seeds.as_deref())?,
        ),
    };
    let mode = args.mode.mode();
    let result = run_simulation(&params, &seeds, args.steps, mode);
    if let Err(e) = &result {
        if e.abort_index().is_none() {
            return Err(Failure::new(2, anyhow!("{e}")));
        }
    }
    let mut out = args.output.sink()?;
    writeln!(
        out,
        "{}",
        if args.ratios {
            "n,x,y,w_residue"
        } else {
            "n,x"
        }
    )?;
    match result {
        Ok(traj) => {
            write_orbit(&mut out, &traj, args.ratios)?;
            out.flush()?;
            Ok(())
        }
        Err(e) => {
            if let Some(partial) = e.partial_trajectory() {
                write_orbit(&mut out, partial, args.ratios)?;
            }
            let index = e.abort_index().expect("arithmetic abort");
            writeln!(out, "# aborted: {} at n={index}", abort_reason(&e))?;
            out.flush()?;
            Err(Failure::new(3, e))
        }
    }
}

pub fn critical_limit(args: &CriticalArgs) -> Outcome {
    let mu = input::positive("mu", &args.mu)?;
    let digits = args.output.digits;
    let mut out = args.output.sink()?;

    if let Some(triple) = &args.explore {
        let params = input::critical_triple(triple)?;
        let traj = run_simulation(
            &params,
            &application_seeds(&mu),
            args.steps,
            ArithmeticMode::double(),
        )?;
        let xs = traj.to_f64_vec();
        let tail = &xs[xs.len().saturating_sub(EXPLORE_WINDOW)..];
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(0.0, f64::max);
        let spread = (hi - lo) / hi;
        let g = |x: f64| format_significant(x, digits);
        writeln!(
            out,
            "a={} b={} c={} d={}",
            g(params.a()),
            g(params.b()),
            g(params.c()),
            g(params.d())
        )?;
        writeln!(out, "seeds=1,1,1,{mu},{mu}", mu = g(mu.value()))?;
        writeln!(out, "steps={}", args.steps)?;
        writeln!(out, "last={}", g(xs[xs.len() - 1]))?;
        writeln!(out, "tail_min={}", g(lo))?;
        writeln!(out, "tail_max={}", g(hi))?;
        writeln!(out, "tail_spread={}", g(spread))?;
        writeln!(
            out,
            "settled={}",
            if spread < EXPLORE_SETTLED {
                "yes"
            } else {
                "no"
            }
        )?;
        writeln!(
            out,
            "note=simulation only, no product formula is assumed here"
        )?;
        out.flush()?;
        return Ok(());
    }

    if args.table {
        let rows = product_table(&mu, args.rows, 5)?;
        writeln!(out, "n,product")?;
        for (i, row) in rows.iter().enumerate() {
            writeln!(out, "{},{row}", i + 1)?;
        }
        out.flush()?;
        return Ok(());
    }

    let est = product_limit(mu.value(), args.tol)?;
    let (lo, hi) = est.bracket();
    writeln!(out, "mu={}", format_significant(mu.value(), digits))?;
    writeln!(
        out,
        "limit={}",
        significant_fixed(est.limit_estimate, digits)
    )?;
    writeln!(
        out,
        "bracket=[{}, {}]",
        significant_fixed(lo, digits),
        significant_fixed(hi, digits)
    )?;
    writeln!(
        out,
        "log_width={}",
        format_significant(2.0 * est.tail_bound, digits)
    )?;
    writeln!(out, "terms={}", est.terms_used)?;
    out.flush()?;
    Ok(())
}

fn scan_row(params: &Params, tol: f64) -> String {
    let regime: Regime = classify_params(params, tol);
    let r = regime.report();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        params.a(),
        params.b(),
        params.c(),
        params.d(),
        r.a_discriminant,
        r.b_discriminant,
        r.ratio_limit,
        r.coupling,
        regime
    )
}

pub fn scan(args: &ScanArgs) -> Outcome {
    let axes = [
        Axis::parse("a", &args.a)?,
        Axis::parse("b", &args.b)?,
        Axis::parse("c", &args.c)?,
        Axis::parse("d", &args.d)?,
    ];
    let cells = input::cell_count(&axes);
    if cells > args.max_cells {
        return Err(Failure::new(
            4,
            anyhow!("grid has {cells} cells, cap is {}", args.max_cells),
        ));
    }
    let rows: Vec<String> = (0..cells)
        .into_par_iter()
        .map(|mut cell| {
            // d varies fastest, a slowest
            let mut pick = [0usize; 4];
            for (slot, axis) in pick.iter_mut().zip(&axes).rev() {
                *slot = cell % axis.len();
                cell /= axis.len();
            }
            let params = Params::from_parts(
                axes[0].points[pick[0]].clone(),
                axes[1].points[pick[1]].clone(),
                axes[2].points[pick[2]].clone(),
                axes[3].points[pick[3]].clone(),
            );
            scan_row(&params, args.crit_tol)
        })
        .collect();
    let mut out = args.output.sink()?;
    writeln!(out, "{SCAN_HEADER}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    for name in &args.only {
        if find(name).is_none() {
            return Err(Failure::new(2, anyhow!("unknown check {name:?}")));
        }
    }
    let outcomes = run_checks(args.seed, &args.only);
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{}", o.line())?;
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(
        out,
        "{passed}/{} checks passed (seed {})",
        outcomes.len(),
        args.seed
    )?;
    out.flush()?;
    if let Some(first) = outcomes.iter().find(|o| !o.passed) {
        return Err(Failure::new(
            1,
            anyhow!("first failing check: {}", first.name),
        ));
    }
    Ok(())
}
