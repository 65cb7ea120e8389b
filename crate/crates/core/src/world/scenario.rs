use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::WorldError;
use crate::rng::Lcg;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: String,
    pub label: String,
}

/// Classification label: a hypothesis id, or `noise` for irrelevant items.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Label {
    Noise,
    Hypothesis(String),
}

impl Label {
    pub const NOISE: &'static str = "noise";

    pub fn hypothesis(&self) -> Option<&str> {
        match self {
            Label::Noise => None,
            Label::Hypothesis(h) => Some(h),
        }
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        if s == Label::NOISE {
            Label::Noise
        } else {
            Label::Hypothesis(s)
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::from(s.to_string())
    }
}

impl From<Label> for String {
    fn from(l: Label) -> Self {
        l.to_string()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Noise => f.write_str(Label::NOISE),
            Label::Hypothesis(h) => f.write_str(h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sensitivity {
    Open,
    Sensitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub id: String,
    pub label: String,
    pub sensitivity: Sensitivity,
    pub discovered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linked_question: Option<String>,
    pub n_items: u32,
    pub signal_rate: f64,
    pub reliability_mean: f64,
}

/// Belief and stopping parameters shared by every session on a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Likelihood lift of a fully reliable supporting item.
    pub lambda: f64,
    /// Decision threshold on the MAP probability.
    pub tau: f64,
    /// Processed items supporting a hypothesis before its question is raised.
    pub q_threshold: u32,
    pub reliability_spread: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            lambda: 3.0,
            tau: 0.9,
            q_threshold: 3,
            reliability_spread: 0.2,
        }
    }
}

/// A hand-authored item; supplying any for a source disables sampling there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub id: String,
    pub source_id: String,
    pub true_class: Label,
    pub true_reliability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub description: String,
    pub hypotheses: Vec<Hypothesis>,
    pub ground_truth: String,
    pub sources: Vec<Source>,
    pub generator: GeneratorParams,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<ItemSpec>>,
}

fn check_prob(name: &str, v: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(format!("{name} = {v} is outside [0, 1]"))
    }
}

fn check_params(g: &GeneratorParams) -> Result<(), String> {
    if !(g.lambda > 1.0 && g.lambda.is_finite()) {
        return Err(format!("lambda = {} must be > 1", g.lambda));
    }
    if !(g.tau > 0.5 && g.tau <= 1.0) {
        return Err(format!("tau = {} must lie in (0.5, 1]", g.tau));
    }
    if g.q_threshold == 0 {
        return Err("q_threshold must be >= 1".into());
    }
    if !(g.reliability_spread >= 0.0 && g.reliability_spread.is_finite()) {
        return Err("reliability_spread must be >= 0".into());
    }
    Ok(())
}

impl Scenario {
    pub fn hypothesis_ids(&self) -> impl Iterator<Item = &str> {
        self.hypotheses.iter().map(|h| h.id.as_str())
    }

    pub fn has_hypothesis(&self, id: &str) -> bool {
        self.hypotheses.iter().any(|h| h.id == id)
    }

    pub fn source(&self, id: &str) -> Option<&Source> {
        self.sources.iter().find(|s| s.id == id)
    }

    /// All labels an item can carry, in canonical order: hypotheses then noise.
    pub fn labels(&self) -> Vec<Label> {
        self.hypotheses
            .iter()
            .map(|h| Label::Hypothesis(h.id.clone()))
            .chain(std::iter::once(Label::Noise))
            .collect()
    }

    pub fn explicit_items(&self, source_id: &str) -> Option<Vec<&ItemSpec>> {
        let items: Vec<_> = self
            .items
            .as_deref()?
            .iter()
            .filter(|i| i.source_id == source_id)
            .collect();
        (!items.is_empty()).then_some(items)
    }

    /// Item count of a source; hand-authored items override `n_items`.
    pub fn capacity(&self, source_id: &str) -> u32 {
        match self.explicit_items(source_id) {
            Some(items) => items.len() as u32,
            None => self.source(source_id).map_or(0, |s| s.n_items),
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        self.check().map_err(WorldError::InvalidScenario)
    }

    fn check(&self) -> Result<(), String> {
        if self.hypotheses.is_empty() {
            return Err("at least one hypothesis is required".into());
        }
        let mut ids = HashSet::new();
        for h in &self.hypotheses {
            if h.id == Label::NOISE {
                return Err("`noise` is reserved and cannot name a hypothesis".into());
            }
            if !ids.insert(h.id.as_str()) {
                return Err(format!("duplicate hypothesis `{}`", h.id));
            }
        }
        if !self.has_hypothesis(&self.ground_truth) {
            return Err(format!("ground truth `{}` is not a hypothesis", self.ground_truth));
        }
        if self.sources.is_empty() {
            return Err("at least one source is required".into());
        }
        let mut ids = HashSet::new();
        for s in &self.sources {
            if !ids.insert(s.id.as_str()) {
                return Err(format!("duplicate source `{}`", s.id));
            }
            if s.n_items == 0 && self.explicit_items(&s.id).is_none() {
                return Err(format!("source `{}` needs n_items >= 1", s.id));
            }
            check_prob(&format!("{}.signal_rate", s.id), s.signal_rate)?;
            check_prob(&format!("{}.reliability_mean", s.id), s.reliability_mean)?;
            if let Some(q) = &s.linked_question {
                if !self.has_hypothesis(q) {
                    return Err(format!("source `{}` links unknown hypothesis `{q}`", s.id));
                }
                if s.discovered {
                    return Err(format!("question-linked source `{}` must start undiscovered", s.id));
                }
            }
        }
        check_params(&self.generator)?;
        if let Some(items) = &self.items {
            let mut ids = HashSet::new();
            for it in items {
                if !ids.insert(it.id.as_str()) {
                    return Err(format!("duplicate item `{}`", it.id));
                }
                if self.source(&it.source_id).is_none() {
                    return Err(format!("item `{}` names unknown source `{}`", it.id, it.source_id));
                }
                if let Label::Hypothesis(h) = &it.true_class {
                    if !self.has_hypothesis(h) {
                        return Err(format!("item `{}` has unknown class `{h}`", it.id));
                    }
                }
                check_prob(&format!("{}.true_reliability", it.id), it.true_reliability)?;
            }
        }
        Ok(())
    }
}

/// Shape and parameters for [`generate_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub hypotheses: usize,
    pub sources: usize,
    pub sensitive_sources: usize,
    pub question_sources: usize,
    pub items_per_source: u32,
    /// Mean probability that an item carries the ground-truth signal.
    pub signal_rate: f64,
    /// Relative spread of per-source signal rates around `signal_rate`, in [0, 1].
    pub signal_spread: f64,
    pub reliability_mean: f64,
    pub generator: GeneratorParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            hypotheses: 3,
            sources: 6,
            sensitive_sources: 1,
            question_sources: 2,
            items_per_source: 10,
            signal_rate: 0.6,
            signal_spread: 0.5,
            reliability_mean: 0.7,
            generator: GeneratorParams::default(),
        }
    }
}

impl ScenarioConfig {
    fn check(&self) -> Result<(), String> {
        if self.hypotheses == 0 || self.sources == 0 || self.items_per_source == 0 {
            return Err("hypothesis, source and item counts must be >= 1".into());
        }
        if self.sensitive_sources + self.question_sources > self.sources {
            return Err("sensitive_sources + question_sources exceeds sources".into());
        }
        check_prob("signal_rate", self.signal_rate)?;
        check_prob("signal_spread", self.signal_spread)?;
        check_prob("reliability_mean", self.reliability_mean)?;
        check_params(&self.generator)
    }
}

const HYPOTHESES: [(&str, &str); 3] = [
    ("attack", "Preparations for an attack"),
    ("espionage", "Espionage"),
    ("false_alarm", "False alarm"),
];

const SOURCE_LABELS: [&str; 8] = [
    "Social media feed",
    "Perimeter camera stream",
    "Local news wire",
    "Airspace radar log",
    "Flight registration records",
    "Hobbyist forum",
    "Port traffic records",
    "Mobile network metadata",
];

/// Builds a synthetic scenario as a pure function of `(config, seed)`.
///
/// Sources are laid out as open-and-discovered first, then sensitive, then the
/// undiscovered sources linked to information questions. Sensitive sources get
/// the highest signal rate the spread allows.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, WorldError> {
    config.check().map_err(WorldError::InvalidConfig)?;
    let mut rng = Lcg::new(seed);

    let hypotheses: Vec<Hypothesis> = (0..config.hypotheses)
        .map(|i| match HYPOTHESES.get(i) {
            Some((id, label)) => Hypothesis {
                id: id.to_string(),
                label: label.to_string(),
            },
            None => Hypothesis {
                id: format!("h{}", i + 1),
                label: format!("Hypothesis {}", i + 1),
            },
        })
        .collect();
    let ground_truth = hypotheses[rng.index(hypotheses.len())].id.clone();

    let p = config.signal_rate;
    let half_width = config.signal_spread * p.min(1.0 - p);
    let first_sensitive = config.sources - config.question_sources - config.sensitive_sources;
    let first_linked = config.sources - config.question_sources;
    let sources = (0..config.sources)
        .map(|i| {
            let offset = rng.uniform_range(-1.0, 1.0);
            let linked = rng.index(hypotheses.len());
            let sensitive = (first_sensitive..first_linked).contains(&i);
            let question = i >= first_linked;
            let signal_rate = if sensitive {
                p + half_width
            } else {
                p + half_width * offset
            };
            Source {
                id: format!("s{}", i + 1),
                label: SOURCE_LABELS
                    .get(i)
                    .map_or_else(|| format!("Source {}", i + 1), |l| l.to_string()),
                sensitivity: if sensitive {
                    Sensitivity::Sensitive
                } else {
                    Sensitivity::Open
                },
                discovered: !question,
                linked_question: question.then(|| hypotheses[linked].id.clone()),
                n_items: config.items_per_source,
                signal_rate: signal_rate.clamp(0.0, 1.0),
                reliability_mean: config.reliability_mean,
            }
        })
        .collect();

    let scenario = Scenario {
        description: "An unknown drone was spotted near a military terrain.".into(),
        hypotheses,
        ground_truth,
        sources,
        generator: config.generator.clone(),
        seed,
        items: None,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Mutable per-session view of a source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStatus {
    pub discovered: bool,
    pub taken: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Processing {
    pub assigned_class: Label,
    pub assessed_reliability: f64,
    pub processed_by: String,
    pub corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoItem {
    pub id: String,
    pub source_id: String,
    pub true_class: Label,
    pub true_reliability: f64,
    pub processing: Option<Processing>,
}

impl InfoItem {
    pub fn is_mislabeled(&self) -> bool {
        self.processing
            .as_ref()
            .is_some_and(|p| p.assigned_class != self.true_class)
    }
}

/// Draws the next item from a source and consumes its slot.
pub fn sample_item(
    scenario: &Scenario,
    source_id: &str,
    status: &mut BTreeMap<String, SourceStatus>,
    rng: &mut Lcg,
) -> Result<InfoItem, WorldError> {
    let source = scenario
        .source(source_id)
        .ok_or_else(|| WorldError::UnknownSource(source_id.into()))?;
    let st = status
        .get_mut(source_id)
        .ok_or_else(|| WorldError::UnknownSource(source_id.into()))?;
    if !st.discovered {
        return Err(WorldError::SourceUndiscovered(source_id.into()));
    }
    if st.taken >= scenario.capacity(source_id) {
        return Err(WorldError::SourceExhausted(source_id.into()));
    }
    let k = st.taken as usize;
    st.taken += 1;

    if let Some(items) = scenario.explicit_items(source_id) {
        let spec = items[k];
        return Ok(InfoItem {
            id: spec.id.clone(),
            source_id: source_id.into(),
            true_class: spec.true_class.clone(),
            true_reliability: spec.true_reliability,
            processing: None,
        });
    }

    let true_class = if rng.chance(source.signal_rate) {
        Label::Hypothesis(scenario.ground_truth.clone())
    } else {
        let others: Vec<Label> = scenario
            .labels()
            .into_iter()
            .filter(|l| l.hypothesis() != Some(scenario.ground_truth.as_str()))
            .collect();
        others[rng.index(others.len())].clone()
    };
    let spread = scenario.generator.reliability_spread;
    let true_reliability =
        (source.reliability_mean + rng.uniform_range(-spread, spread)).clamp(0.0, 1.0);
    Ok(InfoItem {
        id: format!("{source_id}-{}", k + 1),
        source_id: source_id.into(),
        true_class,
        true_reliability,
        processing: None,
    })
}
