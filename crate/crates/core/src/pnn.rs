//! Probabilistic neural network.
//!
//! Three layers:
//!
//! * input: a feature vector `p` of dimension `R`, z-scored with the
//!   model's [`Normalizer`];
//! * radial basis: one neuron per training exemplar (row `W_i`), computing
//!   `a_i = exp(-(‖W_i − p‖ · b_i)²)` with `b_i = sqrt(ln 2) / s`, so each
//!   neuron outputs exactly `0.5` at distance `s` from its exemplar;
//! * competitive: `d = M a` sums activations per class and the largest
//!   entry wins, ties going to the lowest class index.
//!
//! Construction is a single pass over the data; nothing is optimized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Normalizer;

/// Spread constant used when none is configured.
pub const DEFAULT_SPREAD: f64 = 0.1;

/// Radial basis bias for spread `s`.
pub fn bias_for_spread(spread: f64) -> f64 {
    std::f64::consts::LN_2.sqrt() / spread
}

/// `radbas(n) = exp(-n²)`, evaluated from a squared distance.
#[inline]
pub(crate) fn activation(dist2: f64, bias: f64) -> f64 {
    let n = dist2.sqrt() * bias;
    (-(n * n)).exp()
}

/// Index of the largest score, lowest index on ties. `None` when every score
/// is zero (all activations underflowed).
pub(crate) fn competitive(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (c, &s) in scores.iter().enumerate() {
        if s > 0.0 && best.is_none_or(|b| s > scores[b]) {
            best = Some(c);
        }
    }
    best
}

/// Nearest exemplar's class; among equally near exemplars the lowest class
/// index wins so the result does not depend on exemplar order.
pub(crate) fn nearest_class(candidates: impl Iterator<Item = (f64, usize)>) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for (d2, class) in candidates {
        if d2 < best.0 || (d2 == best.0 && class < best.1) {
            best = (d2, class);
        }
    }
    best.1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: usize,
    /// Radial basis layer output, one entry per exemplar.
    pub activations: Vec<f64>,
    /// Competitive layer input `d = M a`, one entry per class.
    pub class_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PnnModelFile", into = "PnnModelFile")]
pub struct PnnModel {
    class_names: Vec<String>,
    spread: f64,
    normalizer: Normalizer,
    /// Training vectors as given, kept so updates can refit the normalizer.
    exemplars: Vec<Vec<f64>>,
    /// `W`: normalized exemplars, one row each.
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    /// Column-wise encoding of `M`: exemplar `i` belongs to class `labels[i]`.
    labels: Vec<usize>,
    config_id: Option<String>,
}

impl PnnModel {
    pub fn train<V: AsRef<[f64]>>(
        vectors: &[V],
        labels: &[usize],
        class_names: Vec<String>,
        spread: f64,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::input("cannot train a PNN on an empty set"));
        }
        if vectors.len() != labels.len() {
            return Err(Error::input(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::input(format!(
                "spread must be positive, got {spread}"
            )));
        }
        if class_names.len() < 2 {
            return Err(Error::input("a PNN needs at least two classes"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::input(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        let dim = vectors[0].as_ref().len();
        if dim == 0 {
            return Err(Error::input("feature vectors are empty"));
        }
        let normalizer = Normalizer::fit_iter(vectors.iter().map(AsRef::as_ref))?;
        let weights = vectors
            .iter()
            .map(|v| normalizer.apply(v.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            class_names,
            spread,
            biases: vec![bias_for_spread(spread); vectors.len()],
            exemplars: vectors.iter().map(|v| v.as_ref().to_vec()).collect(),
            weights,
            normalizer,
            labels: labels.to_vec(),
            config_id: None,
        })
    }

    /// Tag the model with the extraction fingerprint of its inputs.
    pub fn with_config_id(mut self, config_id: impl Into<String>) -> Self {
        self.config_id = Some(config_id.into());
        self
    }

    pub fn config_id(&self) -> Option<&str> {
        self.config_id.as_deref()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of exemplars `Q`.
    pub fn n_exemplars(&self) -> usize {
        self.weights.len()
    }

    /// Feature dimension `R`.
    pub fn dim(&self) -> usize {
        self.normalizer.dim()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// `M` as a dense `K × Q` 0/1 matrix.
    pub fn class_indicator(&self) -> Vec<Vec<u8>> {
        (0..self.n_classes())
            .map(|c| self.labels.iter().map(|&l| u8::from(l == c)).collect())
            .collect()
    }

    pub fn classify(&self, vector: &[f64]) -> Result<Classification> {
        let p = self.normalizer.apply(vector)?;
        let dist2: Vec<f64> = self
            .weights
            .iter()
            .map(|w| squared_distance(w, &p))
            .collect();
        let activations: Vec<f64> = dist2
            .iter()
            .zip(&self.biases)
            .map(|(&d2, &b)| activation(d2, b))
            .collect();
        let mut class_scores = vec![0.0; self.n_classes()];
        for (&a, &l) in activations.iter().zip(&self.labels) {
            class_scores[l] += a;
        }
        let class = competitive(&class_scores).unwrap_or_else(|| {
            nearest_class(dist2.iter().copied().zip(self.labels.iter().copied()))
        });
        Ok(Classification {
            class,
            activations,
            class_scores,
        })
    }

    /// Model extended by one exemplar. A class name not seen before becomes
    /// a new class. The result is identical to training from scratch on the
    /// extended set.
    pub fn add_exemplar(&self, vector: &[f64], class_name: &str) -> Result<Self> {
        if vector.len() != self.dim() {
            return Err(Error::input(format!(
                "feature dimension mismatch: {} vs {}",
                vector.len(),
                self.dim()
            )));
        }
        let mut class_names = self.class_names.clone();
        let label = match class_names.iter().position(|c| c == class_name) {
            Some(i) => i,
            None => {
                class_names.push(class_name.to_string());
                class_names.len() - 1
            }
        };
        let mut exemplars = self.exemplars.clone();
        exemplars.push(vector.to_vec());
        let mut labels = self.labels.clone();
        labels.push(label);
        let mut model = Self::train(&exemplars, &labels, class_names, self.spread)?;
        model.config_id = self.config_id.clone();
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// On-disk layout of a [`PnnModel`].
#[derive(Serialize, Deserialize)]
struct PnnModelFile {
    format_version: u32,
    config_id: Option<String>,
    class_names: Vec<String>,
    spread: f64,
    normalizer: Normalizer,
    exemplars: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    class_indicator: Vec<Vec<u8>>,
}

impl From<PnnModel> for PnnModelFile {
    fn from(m: PnnModel) -> Self {
        Self {
            format_version: 1,
            class_indicator: m.class_indicator(),
            config_id: m.config_id,
            class_names: m.class_names,
            spread: m.spread,
            normalizer: m.normalizer,
            exemplars: m.exemplars,
            weights: m.weights,
            biases: m.biases,
        }
    }
}

impl TryFrom<PnnModelFile> for PnnModel {
    type Error = Error;

    fn try_from(f: PnnModelFile) -> Result<Self> {
        if f.format_version != 1 {
            return Err(Error::input(format!(
                "unsupported model format version {}",
                f.format_version
            )));
        }
        let q = f.weights.len();
        let k = f.class_names.len();
        let r = f.normalizer.dim();
        if q == 0 || k < 2 || r == 0 {
            return Err(Error::input(
                "model must have exemplars, features and 2+ classes",
            ));
        }
        if f.exemplars.len() != q || f.biases.len() != q || f.class_indicator.len() != k {
            return Err(Error::input("model matrices disagree in size"));
        }
        if f.weights
            .iter()
            .chain(&f.exemplars)
            .any(|row| row.len() != r)
        {
            return Err(Error::input(
                "model rows disagree with the feature dimension",
            ));
        }
        let mut labels = Vec::with_capacity(q);
        for i in 0..q {
            let mut ones = (0..k).filter(|&c| f.class_indicator[c].get(i) == Some(&1));
            match (ones.next(), ones.next()) {
                (Some(c), None)
                    if (0..k).all(|c| matches!(f.class_indicator[c].get(i), Some(0 | 1))) =>
                {
                    labels.push(c)
                }
                _ => {
                    return Err(Error::input(format!(
                        "column {i} of the class indicator is not one-hot"
                    )))
                }
            }
        }
        if f.class_indicator.iter().any(|row| row.len() != q) {
            return Err(Error::input(
                "class indicator has the wrong number of columns",
            ));
        }
        Ok(Self {
            class_names: f.class_names,
            spread: f.spread,
            normalizer: f.normalizer,
            exemplars: f.exemplars,
            weights: f.weights,
            biases: f.biases,
            labels,
            config_id: f.config_id,
        })
    }
}
