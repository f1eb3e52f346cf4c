//! End-to-end closest fair clustering and the ℓ-mean fair consensus built on it.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};
use rayon::prelude::*;

use crate::balance_frac::balance_pq_in;
use crate::balance_int::balance_p_in;
use crate::distance::{compare_lmean, dist_fast, lmean, ConsensusObjective, Distance, Ell};
use crate::equifair::closest_fair_11_in;
use crate::error::{FairError, Result};
use crate::fairify::make_clusters_fair_in;
use crate::model::{Clustering, ColoredInstance, Regime};
use crate::workspace::{Transcript, WorkingClustering};

/// Exact rational approximation factor.
pub type Factor = Ratio<u64>;

/// Worst-case factors of one regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guarantee {
    pub label: &'static str,
    /// Balancing factor (1 when the regime is solved exactly).
    pub alpha: Factor,
    /// Fairification factor, absent when there is no separate fairify stage.
    pub beta: Option<Factor>,
}

impl Guarantee {
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::Equal => Guarantee {
                label: "exact",
                alpha: Factor::from_integer(1),
                beta: None,
            },
            Regime::Integral => Guarantee {
                label: "17-close",
                alpha: Factor::new(7, 2),
                beta: Some(Factor::from_integer(3)),
            },
            Regime::Fractional => Guarantee {
                label: "33-close",
                alpha: Factor::new(15, 2),
                beta: Some(Factor::from_integer(3)),
            },
        }
    }

    /// `α + β + αβ`, or `α` alone without a fairify stage.
    pub fn composed(&self) -> Factor {
        match self.beta {
            Some(b) => self.alpha + b + self.alpha * b,
            None => self.alpha,
        }
    }

    /// Consensus factor `2 + composed`.
    pub fn consensus(&self) -> Factor {
        Factor::from_integer(2) + self.composed()
    }
}

/// Distance covered by one stage, measured from that stage's input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageDistance {
    pub stage: &'static str,
    pub distance: Distance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeReport {
    pub regime: Regime,
    pub guarantee: Guarantee,
    pub composed_factor: Factor,
    pub consensus_factor: Factor,
    pub stages: Vec<StageDistance>,
    pub achieved_distance: Distance,
}

impl GuaranteeReport {
    pub fn label(&self) -> &'static str {
        self.guarantee.label
    }
}

/// Fair clustering close to `clustering`, dispatched on the instance's ratio.
pub fn closest_fair(instance: &ColoredInstance, clustering: &Clustering) -> Result<(Clustering, GuaranteeReport, Transcript)> {
    instance.validate_feasible()?;
    let regime = instance.regime();
    let mut ws = WorkingClustering::new(instance, clustering)?;
    let mut stages = Vec::new();
    match regime {
        Regime::Equal => {
            closest_fair_11_in(&mut ws, clustering)?;
            stages.push(StageDistance {
                stage: "fair",
                distance: ws.distance(),
            });
        }
        Regime::Integral | Regime::Fractional => {
            if regime == Regime::Integral {
                balance_p_in(&mut ws)?;
            } else {
                balance_pq_in(&mut ws)?;
            }
            let balanced = ws.snapshot();
            stages.push(StageDistance {
                stage: "balance",
                distance: ws.distance(),
            });
            make_clusters_fair_in(&mut ws)?;
            stages.push(StageDistance {
                stage: "fairify",
                distance: dist_fast(&balanced, &ws.snapshot())?,
            });
        }
    }
    let achieved_distance = ws.distance();
    let (out, transcript) = ws.finish();
    let guarantee = Guarantee::for_regime(regime);
    let report = GuaranteeReport {
        regime,
        guarantee,
        composed_factor: guarantee.composed(),
        consensus_factor: guarantee.consensus(),
        stages,
        achieved_distance,
    };
    Ok((out, report, transcript))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult<F> {
    pub clustering: Clustering,
    /// Index of the input whose fair candidate was returned.
    pub chosen: usize,
    pub objective: ConsensusObjective<F>,
    /// Distance from every input to the returned clustering.
    pub distances: Vec<Distance>,
    /// `candidate_distances[k][j]` = distance from input `j` to candidate `k`.
    pub candidate_distances: Vec<Vec<Distance>>,
    pub factor: Factor,
    pub regime: Regime,
}

/// Makes every input fair and returns the candidate with the smallest
/// ℓ-mean distance to all inputs (lowest index on ties).
pub fn fair_consensus<F>(instance: &ColoredInstance, inputs: &[Clustering], ell: Ell<F>) -> Result<ConsensusResult<F>>
where
    F: Float + FromPrimitive + Send + Sync,
{
    if inputs.is_empty() {
        return Err(FairError::EmptyInput);
    }
    instance.validate_feasible()?;
    let candidates: Vec<Clustering> = inputs
        .par_iter()
        .map(|d| closest_fair(instance, d).map(|(f, _, _)| f))
        .collect::<Result<_>>()?;
    let candidate_distances: Vec<Vec<Distance>> = candidates
        .par_iter()
        .map(|f| inputs.iter().map(|d| dist_fast(d, f)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut chosen = 0;
    for k in 1..candidates.len() {
        if compare_lmean(&candidate_distances[k], &candidate_distances[chosen], ell) == Ordering::Less {
            chosen = k;
        }
    }
    let distances = candidate_distances[chosen].clone();
    let regime = instance.regime();
    Ok(ConsensusResult {
        objective: lmean(&distances, ell)?,
        clustering: candidates[chosen].clone(),
        chosen,
        distances,
        candidate_distances,
        factor: Guarantee::for_regime(regime).consensus(),
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dist;
    use crate::model::{is_fair, Color};
    use crate::workspace::replay;

    fn inst(colors: &str, p: usize, q: usize) -> ColoredInstance {
        ColoredInstance::new(colors.chars().map(|c| Color::from_char(c).unwrap()).collect(), p, q).unwrap()
    }

    #[test]
    fn composed_factors() {
        let f = |r| Guarantee::for_regime(r);
        assert_eq!(f(Regime::Equal).composed(), Factor::from_integer(1));
        assert_eq!(f(Regime::Integral).composed(), Factor::from_integer(17));
        assert_eq!(f(Regime::Fractional).composed(), Factor::from_integer(33));
        assert_eq!(f(Regime::Equal).consensus(), Factor::from_integer(3));
        assert_eq!(f(Regime::Integral).consensus(), Factor::from_integer(19));
        assert_eq!(f(Regime::Fractional).consensus(), Factor::from_integer(35));
    }

    #[test]
    fn dispatch_and_stage_distances() {
        let cases = [("RBRBBR", 1, 1, "exact"), ("BBRBBBRB", 3, 1, "17-close"), ("BBBRRBBBRR", 3, 2, "33-close")];
        for (colors, p, q, label) in cases {
            let i = inst(colors, p, q);
            let c = Clustering::from_labels(&(0..i.n()).map(|v| v % 3).collect::<Vec<_>>());
            let (out, report, t) = closest_fair(&i, &c).unwrap();
            assert!(is_fair(&i, &out));
            assert_eq!(report.label(), label);
            assert_eq!(report.achieved_distance, dist(&c, &out).unwrap());
            assert_eq!(replay(&t, &out).unwrap(), report.achieved_distance);
            if label != "exact" {
                assert_eq!(report.stages.len(), 2);
            }
        }
    }

    #[test]
    fn consensus_single_input_matches_closest_fair() {
        let i = inst("BBRBBRBBR", 2, 1);
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1, 1, 2, 2]);
        let r = fair_consensus(&i, std::slice::from_ref(&c), Ell::Finite(2.0)).unwrap();
        assert_eq!(r.clustering, closest_fair(&i, &c).unwrap().0);
        assert_eq!(r.chosen, 0);
        assert_eq!(r.factor, Factor::from_integer(19));
    }

    #[test]
    fn consensus_identical_fair_inputs() {
        let i = inst("RBRB", 1, 1);
        let c = Clustering::from_labels(&[0, 0, 1, 1]);
        let r = fair_consensus(&i, &[c.clone(), c.clone(), c], Ell::<f64>::Infinity).unwrap();
        assert_eq!(r.objective.value, 0.0);
    }

    #[test]
    fn consensus_rejects_empty() {
        let i = inst("RB", 1, 1);
        assert_eq!(fair_consensus(&i, &[], Ell::Finite(1.0f64)).unwrap_err(), FairError::EmptyInput);
    }
}
