//! Pairwise-disagreement distance between clusterings and the ℓ-mean
//! consensus objective built on it.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::error::{FairError, Result};
use crate::model::Clustering;

/// Number of unordered point pairs co-clustered in exactly one of two clusterings.
pub type Distance = u64;

fn check_sizes(a: &Clustering, b: &Clustering) -> Result<()> {
    if a.n() != b.n() {
        return Err(FairError::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// Quadratic reference implementation: visits every pair.
pub fn dist(a: &Clustering, b: &Clustering) -> Result<Distance> {
    check_sizes(a, b)?;
    let (la, lb) = (a.labels(), b.labels());
    let mut total = 0;
    for u in 0..la.len() {
        for v in (u + 1)..la.len() {
            if (la[u] == la[v]) != (lb[u] == lb[v]) {
                total += 1;
            }
        }
    }
    Ok(total)
}

fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Linear-time distance through the contingency table:
/// `Σ C(|A_i|,2) + Σ C(|B_j|,2) − 2 Σ C(|A_i ∩ B_j|,2)`.
pub fn dist_fast(a: &Clustering, b: &Clustering) -> Result<Distance> {
    check_sizes(a, b)?;
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *cells.entry((x, y)).or_insert(0) += 1;
    }
    let within_a: u64 = a.sizes().into_iter().map(|s| pairs(s as u64)).sum();
    let within_b: u64 = b.sizes().into_iter().map(|s| pairs(s as u64)).sum();
    let within_both: u64 = cells.values().map(|&c| pairs(c)).sum();
    Ok(within_a + within_b - 2 * within_both)
}

/// Exponent of the ℓ-mean objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ell<F> {
    Finite(F),
    Infinity,
}

impl<F: Float + ToPrimitive> Ell<F> {
    pub fn finite(ell: F) -> Result<Self> {
        if ell.is_nan() || ell < F::one() {
            return Err(FairError::InvalidExponent(format!("{:?}", ell.to_f64())));
        }
        if ell.is_infinite() {
            return Ok(Ell::Infinity);
        }
        Ok(Ell::Finite(ell))
    }

    /// The exponent as an integer, when it is one.
    fn integral(&self) -> Option<u32> {
        match self {
            Ell::Finite(l) if l.fract().is_zero() => l.to_u32(),
            _ => None,
        }
    }
}

impl<F: Float + ToPrimitive> std::fmt::Display for Ell<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ell::Infinity => write!(f, "inf"),
            Ell::Finite(l) => write!(f, "{}", l.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

/// `(Σ d_i^ℓ)^{1/ℓ}` for finite ℓ, `max d_i` for ℓ = ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusObjective<F> {
    pub ell: Ell<F>,
    pub value: F,
}

pub fn lmean<F: Float + FromPrimitive>(dists: &[Distance], ell: Ell<F>) -> Result<ConsensusObjective<F>> {
    let max = *dists.iter().max().ok_or(FairError::EmptyInput)?;
    let value = match ell {
        Ell::Infinity => F::from_u64(max).unwrap(),
        Ell::Finite(l) if l == F::one() => F::from_u64(dists.iter().sum()).unwrap(),
        Ell::Finite(_) if max == 0 => F::zero(),
        Ell::Finite(l) => {
            // max-factored so that d^ℓ never overflows
            let m = F::from_u64(max).unwrap();
            let scaled = dists
                .iter()
                .fold(F::zero(), |acc, &d| acc + (F::from_u64(d).unwrap() / m).powf(l));
            m * scaled.powf(l.recip())
        }
    };
    Ok(ConsensusObjective { ell, value })
}

/// Comparable stand-in for the ℓ-mean: the power sum `Σ d^ℓ` (exact where
/// it fits in 128 bits), or the maximum for ℓ = ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
enum PowerSum {
    Exact(u128),
    /// `ln Σ d^ℓ`, `-inf` for an all-zero vector.
    Log(f64),
}

fn power_sum<F: Float + ToPrimitive>(dists: &[Distance], ell: Ell<F>) -> PowerSum {
    match ell {
        Ell::Infinity => PowerSum::Exact(dists.iter().copied().max().unwrap_or(0) as u128),
        Ell::Finite(l) => {
            if let Some(k) = ell.integral() {
                let exact = dists.iter().try_fold(0u128, |acc, &d| {
                    (d as u128).checked_pow(k).and_then(|x| acc.checked_add(x))
                });
                if let Some(s) = exact {
                    return PowerSum::Exact(s);
                }
            }
            let max = dists.iter().copied().max().unwrap_or(0);
            if max == 0 {
                return PowerSum::Log(f64::NEG_INFINITY);
            }
            let l = l.to_f64().unwrap();
            let m = max as f64;
            let s: f64 = dists.iter().map(|&d| (d as f64 / m).powf(l)).sum();
            PowerSum::Log(l * m.ln() + s.ln())
        }
    }
}

impl PowerSum {
    fn as_log(self) -> f64 {
        match self {
            PowerSum::Exact(0) => f64::NEG_INFINITY,
            PowerSum::Exact(x) => (x as f64).ln(),
            PowerSum::Log(x) => x,
        }
    }
}

/// Orders two distance vectors by their ℓ-mean without taking the root.
pub fn compare_lmean<F: Float + ToPrimitive>(a: &[Distance], b: &[Distance], ell: Ell<F>) -> Ordering {
    match (power_sum(a, ell), power_sum(b, ell)) {
        (PowerSum::Exact(x), PowerSum::Exact(y)) => x.cmp(&y),
        (x, y) => x.as_log().total_cmp(&y.as_log()),
    }
}

/// Whether `lmean(achieved) <= factor * lmean(optimal)`, decided through
/// `Σ a^ℓ <= factor^ℓ Σ b^ℓ` in integers whenever ℓ is 1, ∞, or a small integer.
pub fn lmean_within<F: Float + ToPrimitive>(
    achieved: &[Distance],
    optimal: &[Distance],
    ell: Ell<F>,
    factor: Ratio<u64>,
) -> bool {
    let (num, den) = (*factor.numer() as u128, *factor.denom() as u128);
    let exact = match ell {
        Ell::Infinity => Some(1),
        _ => ell.integral(),
    };
    if let Some(k) = exact {
        if let (PowerSum::Exact(a), PowerSum::Exact(b)) = (power_sum(achieved, ell), power_sum(optimal, ell)) {
            let lhs = den.checked_pow(k).and_then(|d| a.checked_mul(d));
            let rhs = num.checked_pow(k).and_then(|f| b.checked_mul(f));
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                return lhs <= rhs;
            }
        }
    }
    let l = match ell {
        Ell::Finite(l) => l.to_f64().unwrap(),
        Ell::Infinity => 1.0,
    };
    let a = power_sum(achieved, ell).as_log();
    let b = power_sum(optimal, ell).as_log();
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return a == f64::NEG_INFINITY;
    }
    let f = (num as f64 / den as f64).ln() * l;
    a <= b + f + 1e-12 * (b.abs() + f.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(labels: &[usize]) -> Clustering {
        Clustering::from_labels(labels)
    }

    #[test]
    fn dist_examples() {
        let a = c(&[0, 0, 1, 2]);
        assert_eq!(dist(&a, &a).unwrap(), 0);
        assert_eq!(dist(&c(&[0, 0, 1]), &c(&[0, 1, 1])).unwrap(), 2);
        assert_eq!(dist(&Clustering::singletons(4), &Clustering::single_cluster(4)).unwrap(), 6);
    }

    #[test]
    fn dist_fast_examples() {
        assert_eq!(dist_fast(&c(&[0, 0, 1]), &c(&[0, 1, 1])).unwrap(), 2);
        assert_eq!(dist_fast(&Clustering::singletons(4), &Clustering::single_cluster(4)).unwrap(), 6);
        let a = c(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(dist_fast(&a, &a).unwrap(), 0);
        assert_eq!(dist_fast(&Clustering::single_cluster(5), &Clustering::singletons(5)).unwrap(), 10);
    }

    #[test]
    fn size_mismatch() {
        let e = dist(&c(&[0, 0]), &c(&[0])).unwrap_err();
        assert_eq!(e, FairError::SizeMismatch { left: 2, right: 1 });
        assert!(dist_fast(&c(&[0, 0]), &c(&[0])).is_err());
    }

    #[test]
    fn lmean_examples() {
        let one = lmean(&[3, 4], Ell::Finite(1.0f64)).unwrap();
        assert_eq!(one.value, 7.0);
        let inf = lmean::<f64>(&[3, 4], Ell::Infinity).unwrap();
        assert_eq!(inf.value, 4.0);
        let two = lmean(&[3, 4], Ell::Finite(2.0f64)).unwrap();
        assert!((two.value - 5.0).abs() < 1e-12);
        let two32 = lmean(&[3, 4], Ell::Finite(2.0f32)).unwrap();
        assert!((two32.value - 5.0).abs() < 1e-5);
        assert_eq!(lmean::<f64>(&[], Ell::Infinity), Err(FairError::EmptyInput));
    }

    #[test]
    fn lmean_large_exponent_does_not_overflow() {
        let v = lmean(&[1_000_000, 1_000_000], Ell::Finite(400.0f64)).unwrap();
        assert!(v.value.is_finite());
        assert!((v.value / 1e6 - 2f64.powf(1.0 / 400.0)).abs() < 1e-12);
    }

    #[test]
    fn exponent_validation() {
        assert!(Ell::finite(0.5f64).is_err());
        assert_eq!(Ell::finite(f64::INFINITY).unwrap(), Ell::Infinity);
        assert_eq!(Ell::finite(1.5f64).unwrap(), Ell::Finite(1.5));
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare_lmean(&[3, 4], &[5, 1], Ell::Finite(1.0f64)), Ordering::Greater);
        assert_eq!(compare_lmean(&[3, 4], &[5, 1], Ell::Finite(2.0f64)), Ordering::Less);
        assert_eq!(compare_lmean::<f64>(&[3, 4], &[5, 1], Ell::Infinity), Ordering::Less);
        assert_eq!(compare_lmean(&[0, 0], &[0, 0], Ell::Finite(2.5f64)), Ordering::Equal);
        assert_eq!(compare_lmean(&[0, 0], &[0, 1], Ell::Finite(2.5f64)), Ordering::Less);
    }

    #[test]
    fn within_factor() {
        let three = Ratio::from_integer(3);
        assert!(lmean_within(&[9, 0], &[3, 0], Ell::Finite(1.0f64), three));
        assert!(!lmean_within(&[10, 0], &[3, 0], Ell::Finite(1.0f64), three));
        assert!(lmean_within(&[9, 12], &[3, 4], Ell::Finite(2.0f64), three));
        assert!(!lmean_within(&[9, 13], &[3, 4], Ell::Finite(2.0f64), three));
        assert!(lmean_within::<f64>(&[12, 1], &[4, 4], Ell::Infinity, three));
        assert!(lmean_within(&[0], &[0], Ell::Finite(1.5f64), three));
        assert!(!lmean_within(&[1], &[0], Ell::Finite(1.5f64), three));
    }
}
