//! Pairs in the lift with large rotation-number defect.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{c_from_interval_map, CircleMap};
use crate::error::{Error, Result};
use crate::lift::{l_conjugate, l_defect_delta, l_lift, l_power, DefectValue, LiftMap};
use crate::plmap::PLMap;
use crate::ring::{tau_pow, Rational, ZTau};
use crate::Budgets;

use super::random::{random_element_with, RandomFlavor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectWitness {
    pub g: LiftMap,
    pub h: LiftMap,
    /// `|rot g + rot h - rot gh|`.
    pub delta: DefectValue,
    /// Parameter of the deterministic family, if the pair came from it.
    pub n: Option<u64>,
    /// Seed of the random search, if the pair came from it.
    pub seed: Option<u64>,
}

/// Fixes `0`, pushes everything else towards `1`: slope `tau^-1` on
/// `[0, tau^2]`, slope `tau` on `[tau^2, 1]`.
pub fn parabolic() -> CircleMap {
    let p = PLMap::new(
        vec![ZTau::zero(), tau_pow(2), ZTau::one()],
        vec![ZTau::zero(), tau_pow(1), ZTau::one()],
        vec![-1, 1],
    )
    .expect("valid table");
    c_from_interval_map(&p).expect("fixes 0 and 1")
}

/// `g = p^-n` for the parabolic map `p` and `h` its conjugate by the
/// translation by `tau^2`. Both have rotation number zero, while `gh` drags
/// points nearly a full turn backwards.
pub fn defect_witness(n: u64, budgets: &Budgets) -> Result<DefectWitness> {
    if n == 0 {
        return Err(Error::BadTuple("n must be at least 1".into()));
    }
    let p = l_lift(&parabolic(), 0);
    let g = l_power(&p, -(n as i64), budgets.piece_cap)?;
    let t = LiftMap::translation(&tau_pow(2));
    let h = l_conjugate(&g, &t);
    let delta = l_defect_delta(&g, &h, budgets)?;
    Ok(DefectWitness {
        g,
        h,
        delta,
        n: Some(n),
        seed: None,
    })
}

/// Best of `samples` random pairs of lifts with `size`-leaf tree pairs, by
/// certified lower bound; ties go to the earliest sample. Samples that run out
/// of budget are skipped.
pub fn defect_search(
    samples: usize,
    seed: u64,
    size: usize,
    budgets: &Budgets,
) -> Result<DefectWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(LiftMap, LiftMap)> = (0..samples)
        .map(|_| {
            let s1 = rng.gen_range(1..=size.max(1));
            let s2 = rng.gen_range(1..=size.max(1));
            let f = random_element_with(&mut rng, s1, RandomFlavor::Lift);
            let g = random_element_with(&mut rng, s2, RandomFlavor::Lift);
            (
                f.as_lift().expect("lift flavor").clone(),
                g.as_lift().expect("lift flavor").clone(),
            )
        })
        .collect();
    let deltas = crate::par::map(&pairs, |(f, g)| l_defect_delta(f, g, budgets));
    let mut best: Option<(usize, DefectValue, Rational)> = None;
    for (i, d) in deltas.into_iter().enumerate() {
        let d = match d {
            Ok(d) => d,
            Err(e) if e.is_budget() => continue,
            Err(e) => return Err(e),
        };
        let lb = d.lower_bound();
        if best.as_ref().map_or(true, |(_, _, b)| &lb > b) {
            best = Some((i, d, lb));
        }
    }
    let (i, delta, _) = best.ok_or_else(|| {
        Error::SearchBudgetExceeded("every sample exhausted its budget".into())
    })?;
    let (g, h) = pairs[i].clone();
    Ok(DefectWitness {
        g,
        h,
        delta,
        n: None,
        seed: Some(seed),
    })
}

impl DefectWitness {
    pub(crate) fn check_direct(&self, budgets: &Budgets) -> Result<()> {
        let again = l_defect_delta(&self.g, &self.h, budgets)?;
        if again != self.delta {
            return Err(Error::Certificate(format!(
                "recomputed defect {again:?} differs from the recorded one"
            )));
        }
        let one = Rational::from_integer(BigInt::from(1));
        if self.delta.lower_bound() > one {
            return Err(Error::Certificate("defect exceeds 1".into()));
        }
        Ok(())
    }
}
