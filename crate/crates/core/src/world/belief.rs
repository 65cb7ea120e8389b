use serde::{Deserialize, Serialize};

use super::{Label, WorldError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub hypothesis: String,
    pub probability: f64,
}

/// Posterior over hypotheses, kept in scenario order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefState {
    pub entries: Vec<BeliefEntry>,
}

impl BeliefState {
    pub fn uniform<S: AsRef<str>>(ids: impl IntoIterator<Item = S>) -> Self {
        let ids: Vec<String> = ids.into_iter().map(|s| s.as_ref().to_string()).collect();
        let p = 1.0 / ids.len() as f64;
        Self {
            entries: ids
                .into_iter()
                .map(|hypothesis| BeliefEntry {
                    hypothesis,
                    probability: p,
                })
                .collect(),
        }
    }

    pub fn probability(&self, id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.hypothesis == id)
            .map(|e| e.probability)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }
}

/// Effective lift of an item with assessed reliability `r`.
pub fn lift(r: f64, lambda: f64) -> f64 {
    1.0 + r * (lambda - 1.0)
}

/// Multiplies the supported hypothesis by `lift(r)` and renormalizes. Noise
/// leaves the belief unchanged.
pub fn update_belief(
    b: &BeliefState,
    assigned: &Label,
    r: f64,
    lambda: f64,
) -> Result<BeliefState, WorldError> {
    let Some(h) = assigned.hypothesis() else {
        return Ok(b.clone());
    };
    let idx = b
        .entries
        .iter()
        .position(|e| e.hypothesis == h)
        .ok_or_else(|| WorldError::UnknownHypothesis(h.to_string()))?;
    let mut out = b.clone();
    out.entries[idx].probability *= lift(r.clamp(0.0, 1.0), lambda);
    let total = out.total();
    for e in &mut out.entries {
        e.probability /= total;
    }
    Ok(out)
}

/// The most probable hypothesis; exact ties go to the lexicographically
/// smallest id.
pub fn map_hypothesis(b: &BeliefState) -> (String, f64) {
    let best = b
        .entries
        .iter()
        .reduce(|best, e| {
            if e.probability > best.probability
                || (e.probability == best.probability && e.hypothesis < best.hypothesis)
            {
                e
            } else {
                best
            }
        })
        .expect("belief has at least one hypothesis");
    (best.hypothesis.clone(), best.probability)
}

pub fn decision_reached(b: &BeliefState, tau: f64) -> bool {
    map_hypothesis(b).1 >= tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const IDS: [&str; 3] = ["H1", "H2", "H3"];

    fn h(id: &str) -> Label {
        Label::Hypothesis(id.into())
    }

    fn state(ps: &[f64]) -> BeliefState {
        BeliefState {
            entries: ps
                .iter()
                .zip(IDS)
                .map(|(&p, id)| BeliefEntry {
                    hypothesis: id.into(),
                    probability: p,
                })
                .collect(),
        }
    }

    #[test]
    fn full_reliability_example() {
        // unnormalized weights (3, 1, 1)
        let expected = [3.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0];
        let b = update_belief(&BeliefState::uniform(IDS), &h("H1"), 1.0, 3.0).unwrap();
        for (got, want) in b.probabilities().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert!((expected[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_reliability_and_noise_are_identity() {
        let b = state(&[0.5, 0.3, 0.2]);
        assert_eq!(update_belief(&b, &h("H2"), 0.0, 3.0).unwrap(), b);
        assert_eq!(update_belief(&b, &Label::Noise, 1.0, 3.0).unwrap(), b);
    }

    #[test]
    fn unknown_hypothesis() {
        assert_eq!(
            update_belief(&BeliefState::uniform(IDS), &h("H9"), 1.0, 3.0),
            Err(WorldError::UnknownHypothesis("H9".into()))
        );
    }

    #[test]
    fn map_and_ties() {
        assert_eq!(map_hypothesis(&state(&[0.6, 0.2, 0.2])), ("H1".into(), 0.6));
        let two = BeliefState::uniform(["H2", "H1"]);
        assert_eq!(map_hypothesis(&two), ("H1".into(), 0.5));
        assert_eq!(map_hypothesis(&BeliefState::uniform(["H1"])), ("H1".into(), 1.0));
    }

    #[test]
    fn decision_boundary_is_inclusive() {
        assert!(!decision_reached(&state(&[0.6, 0.2, 0.2]), 0.9));
        assert!(decision_reached(&state(&[0.9, 0.05, 0.05]), 0.9));
        assert!(decision_reached(&BeliefState::uniform(["only"]), 1.0));
    }

    fn evidence() -> impl Strategy<Value = Vec<(usize, f64)>> {
        prop::collection::vec((0usize..4, 0.0f64..=1.0), 0..12)
    }

    fn label(i: usize) -> Label {
        IDS.get(i).map_or(Label::Noise, |id| h(id))
    }

    proptest! {
        #[test]
        fn stays_normalized(ev in evidence(), lambda in 1.01f64..10.0) {
            let mut b = BeliefState::uniform(IDS);
            for (c, r) in ev {
                b = update_belief(&b, &label(c), r, lambda).unwrap();
                prop_assert!((b.total() - 1.0).abs() <= 1e-9);
                prop_assert!(b.probabilities().iter().all(|&p| p >= 0.0));
            }
        }

        #[test]
        fn order_does_not_matter(ev in evidence(), seed in any::<u64>()) {
            let fold = |seq: &[(usize, f64)]| {
                seq.iter().fold(BeliefState::uniform(IDS), |b, (c, r)| {
                    update_belief(&b, &label(*c), *r, 3.0).unwrap()
                })
            };
            let mut shuffled = ev.clone();
            let mut rng = crate::rng::Lcg::new(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.index(i + 1));
            }
            let a = fold(&ev);
            let b = fold(&shuffled);
            for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn support_strictly_increases(ps in prop::array::uniform3(0.01f64..1.0), c in 0usize..3, r in 0.001f64..=1.0) {
            let total: f64 = ps.iter().sum();
            let b = state(&ps.map(|p| p / total));
            let before = b.entries[c].probability;
            let after = update_belief(&b, &label(c), r, 3.0).unwrap().entries[c].probability;
            prop_assert!(after > before);
        }
    }
}
