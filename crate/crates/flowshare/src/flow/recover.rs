//! Exact rational recovery from an enclosing interval, plus denominator
//! bounds for the parametric searches.

use super::network::{Bound, BoundedNetwork};
use super::FlowError;
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Returns the unique rational in `[lo, hi]` with denominator at most
/// `den_bound`, found by continued-fraction descent (the Stern-Brocot
/// mediant walk).
///
/// Intended use: after a binary search has narrowed an exact threshold to an
/// interval of width below `1 / den_bound^2`, the threshold is the only
/// rational of bounded denominator left inside, and this recovers it.
/// Returns [`FlowError::RecoverNotFound`] when the simplest rational in the
/// interval has a larger denominator, which signals a wrong bound upstream.
pub fn rational_recover(lo: &Rat, hi: &Rat, den_bound: &BigInt) -> Result<Rat, FlowError> {
    if lo > hi {
        return Err(FlowError::InvalidInput(format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    if den_bound < &BigInt::one() {
        return Err(FlowError::InvalidInput(format!(
            "denominator bound {den_bound} below 1"
        )));
    }
    let simplest = simplest_in_interval(lo, hi);
    debug_assert!(&simplest >= lo && &simplest <= hi);
    if simplest.denom() <= den_bound {
        Ok(simplest)
    } else {
        Err(FlowError::RecoverNotFound {
            lo: lo.clone(),
            hi: hi.clone(),
            bound: den_bound.clone(),
        })
    }
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (ties by smallest absolute value, so a point interval returns
/// its point and an interval containing integers returns the one nearest
/// zero).
pub fn simplest_in_interval(lo: &Rat, hi: &Rat) -> Rat {
    debug_assert!(lo <= hi);
    // Any integer inside?
    let ceil_lo = lo.ceil_int();
    let floor_hi = hi.floor_int();
    if ceil_lo <= floor_hi {
        let zero = BigInt::zero();
        let pick = if ceil_lo <= zero && zero <= floor_hi {
            zero
        } else if ceil_lo.is_positive() {
            ceil_lo
        } else {
            floor_hi
        };
        return Rat::from_bigint(pick);
    }
    // Both endpoints lie strictly between n and n+1 for n = floor(lo):
    // recurse on the inverted fractional parts. The recursion mirrors the
    // continued-fraction expansion and terminates because denominators of
    // the interval endpoints strictly shrink.
    let n = lo.floor_int();
    let base = Rat::from_bigint(n);
    let inv_hi = (lo - &base).recip();
    let inv_lo = (hi - &base).recip();
    base + simplest_in_interval(&inv_lo, &inv_hi).recip()
}

/// Least common multiple of the denominators of every finite capacity,
/// lower bound, and extra value (profits, pinned payments) of a network.
pub fn common_denominator<'a>(
    net: &BoundedNetwork,
    extra: impl IntoIterator<Item = &'a Rat>,
) -> BigInt {
    let mut acc = BigInt::one();
    let mut fold = |d: &BigInt| acc = acc.lcm(d);
    for e in net.graph().edge_ids() {
        fold(net.lower(e).denom());
        if let Bound::Finite(u) = net.upper(e) {
            fold(u.denom());
        }
    }
    for r in extra {
        fold(r.denom());
    }
    acc
}

/// Safe denominator bound for thresholds determined by cut equations of a
/// network with `edge_count` edges and common capacity denominator `d`:
/// `d * (m + 2)!`. Generous by construction; the factorial dominates the
/// determinant (Hadamard) bound of any square submatrix of the constraint
/// system at these sizes.
pub fn factorial_denominator_bound(d: &BigInt, edge_count: usize) -> BigInt {
    let mut acc = d.clone();
    for k in 2..=(edge_count as u64 + 2) {
        acc *= BigInt::from(k);
    }
    acc
}
