use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use num_traits::One;

use pentarec::model::{Params, PositiveReal, SeedValues};
use pentarec::number::parse_rational;

pub fn positive(name: &'static str, text: &str) -> Result<PositiveReal> {
    PositiveReal::parse(name, text.trim()).with_context(|| format!("invalid --{name}"))
}

pub fn params(a: &str, b: &str, c: &str, d: &str) -> Result<Params> {
    Ok(Params::from_parts(
        positive("a", a)?,
        positive("b", b)?,
        positive("c", c)?,
        positive("d", d)?,
    ))
}

/// Five comma-separated positive values; all ones when absent.
pub fn seeds(text: Option<&str>) -> Result<SeedValues> {
    let Some(text) = text else {
        return Ok(SeedValues::ones());
    };
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 5 {
        bail!(
            "--seeds needs exactly five comma-separated values, got {}",
            parts.len()
        );
    }
    let reals = parts
        .iter()
        .map(|p| positive("seeds", p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedValues::from_reals(
        reals.try_into().expect("five values"),
    ))
}

/// One scan axis: either a single value or `lo:hi:count` with inclusive ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub points: Vec<PositiveReal>,
}

impl Axis {
    pub fn parse(name: &'static str, text: &str) -> Result<Self> {
        let fields: Vec<&str> = text.split(':').collect();
        match fields.as_slice() {
            [value] => Ok(Axis {
                name,
                points: vec![positive(name, value)?],
            }),
            [lo, hi, count] => {
                let lo =
                    parse_rational(lo.trim()).with_context(|| format!("invalid --{name} range"))?;
                let hi =
                    parse_rational(hi.trim()).with_context(|| format!("invalid --{name} range"))?;
                let count: usize = count
                    .trim()
                    .parse()
                    .with_context(|| format!("invalid --{name} range count {count:?}"))?;
                if lo >= hi {
                    bail!("--{name} range needs lo < hi");
                }
                if count < 2 {
                    bail!("--{name} range needs at least 2 points");
                }
                let span = (&hi - &lo) / BigRational::from_integer((count - 1).into());
                let mut points = Vec::with_capacity(count);
                let mut x = lo;
                for i in 0..count {
                    let value = if i + 1 == count {
                        hi.clone()
                    } else {
                        x.clone()
                    };
                    points.push(
                        PositiveReal::from_rational(name, value)
                            .with_context(|| format!("invalid --{name} range"))?,
                    );
                    x += &span;
                }
                Ok(Axis { name, points })
            }
            _ => bail!("--{name} expects a value or lo:hi:count, got {text:?}"),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Product of axis lengths, saturating at `usize::MAX`.
pub fn cell_count(axes: &[Axis]) -> usize {
    axes.iter().fold(1usize, |n, a| n.saturating_mul(a.len()))
}

/// `(a, c, d)` for a point on the critical surface.
pub fn critical_triple(text: &str) -> Result<Params> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        bail!("--explore needs a,c,d");
    }
    let a = positive("a", parts[0])?;
    let c = positive("c", parts[1])?;
    let d = positive("d", parts[2])?;
    if a.exact() >= &BigRational::one() {
        bail!("--explore needs a < 1 so that b = (c+d)(1-a) is positive");
    }
    Ok(Params::critical(
        a.exact().clone(),
        c.exact().clone(),
        d.exact().clone(),
    )?)
}
