//! Seeded random chain parameters with exact rational entries.
//!
//! Numerators and denominators are bounded by [`BOUND`]. Singular draws are
//! rejected exactly, so every sampled configuration keeps all R, R̃ and
//! shifted-argument R factors finite for both coupling signs.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::ChainConfig;
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::rmatrix::{arg_shifted, build_r, RFamily, RParams};
use crate::scalar::{rat, Rational, Scalar};

pub const BOUND: i64 = 100;
const MAX_DRAWS: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero rational num/den with |num|, den ≤ [`BOUND`]; positive when asked.
pub fn random_rational(rng: &mut ChaCha8Rng, positive: bool) -> Rational {
    loop {
        let num = if positive { rng.gen_range(1..=BOUND) } else { rng.gen_range(-BOUND..=BOUND) };
        let den = rng.gen_range(1..=BOUND);
        if num != 0 {
            return rat(num, den);
        }
    }
}

/// Chain parameters as exact rationals; `None` fields of a template are drawn.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainParams {
    pub positions: Option<Vec<Rational>>,
    pub twist: Option<Vec<Rational>>,
    pub coupling: Option<Rational>,
    pub shift: Option<Rational>,
    pub kappa: Option<Rational>,
}

impl ChainParams {
    pub fn is_fixed(&self) -> bool {
        self.positions.is_some()
            && self.twist.is_some()
            && self.coupling.is_some()
            && self.shift.is_some()
            && self.kappa.is_some()
    }
}

/// Builds the chain over any backend from exact parameters.
pub fn chain_from<S: Scalar>(
    grading: &Grading,
    family: RFamily,
    positions: &[Rational],
    twist: &[Rational],
    coupling: &Rational,
    shift: &Rational,
    kappa: &Rational,
) -> Result<ChainConfig<S>> {
    let conv = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<_>>();
    ChainConfig::new(
        grading.clone(),
        family,
        conv(positions),
        conv(twist),
        RParams::new(S::from_rational(coupling), S::from_rational(shift)),
        S::from_rational(kappa),
    )
}

/// Rejects configurations where some factor of K_i, H_i or T has a pole for
/// either coupling sign, including the shifted arguments of K_i.
pub fn check_nonsingular(cfg: &ChainConfig<Rational>) -> Result<()> {
    cfg.check_generic()?;
    let c = &cfg.params.coupling;
    for i in 0..cfg.n() {
        for j in 0..i {
            let arg = arg_shifted(cfg.family, &cfg.diff(i, j)?, &cfg.params);
            build_r(cfg.family, &arg, c, &cfg.grading)?;
            build_r(cfg.family.opposite(), &arg, c, &cfg.grading)?;
        }
    }
    if cfg.family.is_trig() {
        // q = ±1 makes sinh η vanish and the trig families degenerate
        if c.is_one() || (-c.clone()).is_one() {
            return Err(Error::SingularSpectralParameter("q must differ from ±1".into()));
        }
    } else if c.is_zero() {
        return Err(Error::SingularSpectralParameter("eta must be nonzero".into()));
    }
    Ok(())
}

/// Draws the missing parameters until the chain is nonsingular.
///
/// Trig positions, q and w are positive; twist entries are positive integers
/// up to 9 so that eigenvalues stay readable. Fails with a config error when
/// fixed values make every draw singular.
pub fn sample_params(
    rng: &mut ChaCha8Rng,
    template: &ChainParams,
    grading: &Grading,
    family: RFamily,
    n: usize,
) -> Result<ChainParams> {
    let trig = family.is_trig();
    let mut last = None;
    for _ in 0..MAX_DRAWS {
        let positions = match &template.positions {
            Some(p) => p.clone(),
            None => (0..n).map(|_| random_rational(rng, trig)).collect(),
        };
        let twist = match &template.twist {
            Some(g) => g.clone(),
            None => (0..grading.k()).map(|_| rat(rng.gen_range(1..=9), 1)).collect(),
        };
        let coupling = template.coupling.clone().unwrap_or_else(|| random_rational(rng, trig));
        let shift = template.shift.clone().unwrap_or_else(|| random_rational(rng, trig));
        let kappa = template.kappa.clone().unwrap_or_else(|| random_rational(rng, false));
        let attempt = chain_from::<Rational>(grading, family, &positions, &twist, &coupling, &shift, &kappa)
            .and_then(|cfg| check_nonsingular(&cfg));
        match attempt {
            Ok(()) => {
                return Ok(ChainParams {
                    positions: Some(positions),
                    twist: Some(twist),
                    coupling: Some(coupling),
                    shift: Some(shift),
                    kappa: Some(kappa),
                })
            }
            Err(e) => {
                if template.is_fixed() {
                    return Err(Error::Config(format!("singular fixed positions: {e}")));
                }
                last = Some(e);
            }
        }
    }
    Err(Error::Config(format!(
        "singular fixed positions: no nonsingular draw in {MAX_DRAWS} attempts ({})",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Spectral sample points: additive for rational families, positive multiplicative for trig.
pub fn sample_points(rng: &mut ChaCha8Rng, family: RFamily, count: usize) -> Vec<Rational> {
    (0..count).map(|_| random_rational(rng, family.is_trig())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let g = Grading::new(2, &[1]).unwrap();
        let a = sample_params(&mut rng(7), &ChainParams::default(), &g, RFamily::TrigPlus, 3).unwrap();
        let b = sample_params(&mut rng(7), &ChainParams::default(), &g, RFamily::TrigPlus, 3).unwrap();
        assert_eq!(a, b);
        for x in a.positions.unwrap() {
            assert!(x > Rational::zero());
            assert!(x.numer() <= &100.into() && x.denom() <= &100.into());
        }
    }

    #[test]
    fn singular_fixed_positions_rejected() {
        let g = Grading::new(2, &[1]).unwrap();
        let t = ChainParams {
            positions: Some(vec![rat(0, 1), rat(1, 1), rat(3, 1)]),
            twist: Some(vec![rat(2, 1), rat(3, 1)]),
            coupling: Some(rat(1, 1)),
            shift: Some(rat(2, 1)),
            kappa: Some(rat(1, 1)),
        };
        let e = sample_params(&mut rng(1), &t, &g, RFamily::RationalPlus, 3).unwrap_err();
        assert!(e.to_string().contains("singular fixed positions"));
    }
}
