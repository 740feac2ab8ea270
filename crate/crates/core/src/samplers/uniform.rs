use crate::error::{Error, Result};
use crate::linalg::CoordSubset;
use crate::rng::RngStream;

fn check_tau(d: usize, tau: usize) -> Result<()> {
    if (1..=d).contains(&tau) {
        Ok(())
    } else {
        Err(Error::ContractViolation(format!(
            "tau must lie in [1, {d}], got {tau}"
        )))
    }
}

/// Uniform size-`tau` subset via a partial Fisher–Yates shuffle.
pub fn tau_nice_sample(d: usize, tau: usize, rng: &mut RngStream) -> Result<CoordSubset> {
    check_tau(d, tau)?;
    let mut perm: Vec<usize> = (0..d).collect();
    for i in 0..tau {
        let j = i + rng.below(d - i);
        perm.swap(i, j);
    }
    perm.truncate(tau);
    CoordSubset::from_unsorted(d, perm)
}

/// Uniform over the `d - tau + 1` windows `{j, .., j + tau - 1}`.
pub fn tau_list_sample(d: usize, tau: usize, rng: &mut RngStream) -> Result<CoordSubset> {
    check_tau(d, tau)?;
    let start = rng.below(d - tau + 1);
    CoordSubset::new(d, (start..start + tau).collect())
}
