use teamsim_core::world::{lift, update_belief, BeliefState, Label};

const H: [&str; 3] = ["attack", "espionage", "false_alarm"];
const R: [f64; 3] = [0.0, 0.5, 1.0];
const LAMBDA: f64 = 3.0;

/// One piece of evidence: label index (3 = noise) and reliability.
type Ev = (usize, f64);

/// Closed form: P(h) ∝ Π over evidence supporting h of L(r).
fn oracle(seq: &[Ev]) -> [f64; 3] {
    let mut w = [1.0f64; 3];
    for &(l, r) in seq {
        if l < 3 {
            w[l] *= 1.0 + r * (LAMBDA - 1.0);
        }
    }
    let z: f64 = w.iter().sum();
    w.map(|x| x / z)
}

fn label(i: usize) -> Label {
    if i < 3 {
        Label::Hypothesis(H[i].into())
    } else {
        Label::Noise
    }
}

fn all_sequences(max: usize) -> Vec<Vec<Ev>> {
    let alphabet: Vec<Ev> = (0..4).flat_map(|l| R.map(|r| (l, r))).collect();
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            for &e in &alphabet {
                let mut t: Vec<Ev> = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn iterated_update_matches_product_form() {
    let seqs = all_sequences(5);
    assert_eq!(seqs.len(), 1 + 12 + 144 + 1728 + 20736 + 248832);
    for seq in &seqs {
        let mut b = BeliefState::uniform(H);
        for &(l, r) in seq {
            b = update_belief(&b, &label(l), r, LAMBDA).unwrap();
            assert!((b.total() - 1.0).abs() <= 1e-9, "{seq:?}");
        }
        let want = oracle(seq);
        for (got, want) in b.probabilities().iter().zip(want) {
            assert!((got - want).abs() <= 1e-12, "{seq:?}: {got} vs {want}");
        }
    }
}

#[test]
fn permutations_agree() {
    for seq in all_sequences(4).iter().filter(|s| s.len() >= 2) {
        let fwd = seq.iter().fold(BeliefState::uniform(H), |b, &(l, r)| {
            update_belief(&b, &label(l), r, LAMBDA).unwrap()
        });
        let rev = seq.iter().rev().fold(BeliefState::uniform(H), |b, &(l, r)| {
            update_belief(&b, &label(l), r, LAMBDA).unwrap()
        });
        let mut rot = seq.clone();
        rot.rotate_left(1);
        let rot = rot.iter().fold(BeliefState::uniform(H), |b, &(l, r)| {
            update_belief(&b, &label(l), r, LAMBDA).unwrap()
        });
        for ((a, b), c) in fwd
            .probabilities()
            .iter()
            .zip(rev.probabilities())
            .zip(rot.probabilities())
        {
            assert!((a - b).abs() <= 1e-12 && (a - c).abs() <= 1e-12, "{seq:?}");
        }
    }
}

#[test]
fn lift_endpoints() {
    assert_eq!(lift(0.0, LAMBDA), 1.0);
    assert_eq!(lift(1.0, LAMBDA), LAMBDA);
}
