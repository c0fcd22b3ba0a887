//! Random shooting: independent draws from the initial distribution.

use crate::error::Result;
use crate::oracle::Oracle;
use crate::rng::SeededRng;

use super::InitDistribution;

/// Spends the remaining budget on independent draws from `init`.
pub fn random_shooting(
    oracle: &mut Oracle<'_>,
    init: &InitDistribution,
    rng: &mut SeededRng,
) -> Result<()> {
    while oracle.remaining() > 0 {
        oracle.evaluate(init.sample(rng))?;
    }
    Ok(())
}
