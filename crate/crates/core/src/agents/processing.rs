use super::{AgentError, AgentState, SourceView};
use crate::rng::Lcg;
use crate::world::{InfoItem, Label, Processing};

/// Draws a label that equals `truth` with probability `accuracy`, otherwise one
/// of the remaining labels uniformly.
pub fn relabel(truth: &Label, labels: &[Label], accuracy: f64, rng: &mut Lcg) -> Label {
    if rng.chance(accuracy) {
        return truth.clone();
    }
    let others: Vec<&Label> = labels.iter().filter(|l| *l != truth).collect();
    if others.is_empty() {
        truth.clone()
    } else {
        others[rng.index(others.len())].clone()
    }
}

pub fn execute_process(
    item: &InfoItem,
    labels: &[Label],
    accuracy: f64,
    reliability_noise: f64,
    actor: &str,
    rng: &mut Lcg,
) -> Result<Processing, AgentError> {
    if item.processing.is_some() {
        return Err(AgentError::AlreadyProcessed(item.id.clone()));
    }
    let assigned_class = relabel(&item.true_class, labels, accuracy, rng);
    let assessed_reliability = (item.true_reliability
        + rng.uniform_range(-reliability_noise, reliability_noise))
    .clamp(0.0, 1.0);
    Ok(Processing {
        assigned_class,
        assessed_reliability,
        processed_by: actor.into(),
        corrected: false,
    })
}

pub fn apply_correction(
    item: &mut InfoItem,
    class: Label,
    reliability: Option<f64>,
) -> Result<Processing, AgentError> {
    let p = item
        .processing
        .as_mut()
        .ok_or_else(|| AgentError::NotProcessed(item.id.clone()))?;
    if p.corrected {
        return Err(AgentError::AlreadyCorrected(item.id.clone()));
    }
    p.assigned_class = class;
    if let Some(r) = reliability {
        p.assessed_reliability = r.clamp(0.0, 1.0);
    }
    p.corrected = true;
    Ok(p.clone())
}

/// Puts `source` first in the agent's collection priority.
pub fn apply_guidance(
    agent: &mut AgentState,
    source: &str,
    sources: &[SourceView],
) -> Result<(), AgentError> {
    let s = sources
        .iter()
        .find(|s| s.id == source)
        .ok_or_else(|| AgentError::UnknownSource(source.into()))?;
    if !s.discovered {
        return Err(AgentError::UndiscoveredSource(source.into()));
    }
    agent.guided = Some(source.into());
    Ok(())
}
