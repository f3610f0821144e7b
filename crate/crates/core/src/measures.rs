//! Closed-form correlation measures of Bell-diagonal states, in bits.
//!
//! * mutual information `I = Σ λ log2(4λ)`
//! * classical correlations `C = 1 - H2((1 + c)/2)`, `c = max |c_j|`
//! * discord `D = I - C`
//! * concurrence `max(0, 2 λ_max - 1)`
//! * entanglement of formation `H2((1 + √(1 - C²))/2)` (Wootters' formula)

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{spectrum, CorrelationVector};

/// Discord below this is treated as an internal error rather than rounding noise.
pub const DISCORD_FLOOR: f64 = -1e-12;

/// `-x log2 x` with `0 log 0 = 0`; nonpositive arguments contribute nothing.
pub(crate) fn neg_xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy, no domain check. Outside `[0, 1]` only the positive-argument term survives.
pub(crate) fn h2(p: f64) -> f64 {
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok(h2(p.clamp(0.0, 1.0)))
}

pub(crate) fn mutual_information_unchecked(c: CorrelationVector) -> f64 {
    spectrum(c)
        .lambda
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * (4.0 * l).log2())
        .sum()
}

pub(crate) fn classical_unchecked(c: CorrelationVector) -> f64 {
    1.0 - h2((1.0 + c.c_max()) / 2.0)
}

pub(crate) fn concurrence_unchecked(c: CorrelationVector) -> f64 {
    (2.0 * spectrum(c).max().1 - 1.0).max(0.0)
}

pub(crate) fn eof_from_concurrence(conc: f64) -> f64 {
    let conc = conc.clamp(0.0, 1.0);
    h2((1.0 + (1.0 - conc * conc).sqrt()) / 2.0)
}

pub fn mutual_information(c: CorrelationVector) -> Result<f64> {
    Ok(mutual_information_unchecked(c.ensure_physical()?))
}

pub fn classical_correlation(c: CorrelationVector) -> Result<f64> {
    Ok(classical_unchecked(c.ensure_physical()?))
}

/// `I - C`. Values below [`DISCORD_FLOOR`] are reported as [`Error::NegativeDiscord`].
pub fn discord(c: CorrelationVector) -> Result<f64> {
    let c = c.ensure_physical()?;
    let d = mutual_information_unchecked(c) - classical_unchecked(c);
    if d < DISCORD_FLOOR {
        return Err(Error::NegativeDiscord(d));
    }
    Ok(d)
}

pub fn concurrence(c: CorrelationVector) -> Result<f64> {
    Ok(concurrence_unchecked(c.ensure_physical()?))
}

pub fn entanglement_of_formation(c: CorrelationVector) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence_unchecked(c.ensure_physical()?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMeasures {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub concurrence: f64,
    pub eof: f64,
    pub c_max: f64,
}

pub fn all_measures(c: CorrelationVector) -> Result<CorrelationMeasures> {
    let c = c.ensure_physical()?;
    let mutual_info = mutual_information_unchecked(c);
    let classical = classical_unchecked(c);
    let discord = mutual_info - classical;
    if discord < DISCORD_FLOOR {
        return Err(Error::NegativeDiscord(discord));
    }
    let concurrence = concurrence_unchecked(c);
    Ok(CorrelationMeasures {
        mutual_info,
        classical,
        discord,
        concurrence,
        eof: eof_from_concurrence(concurrence),
        c_max: c.c_max(),
    })
}
