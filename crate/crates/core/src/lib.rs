//! Test-time augmentation for black-box text classifiers.
//!
//! Each test input is expanded into stochastic transformed variants, the
//! classifier scores the original and every variant, and the per-variant
//! logits are averaged into a single prediction. The [`evaluate`] module
//! measures what that buys on a labelled corpus.
//!
//! Numeric code is written against [`Scalar`] so it runs in `f32` or `f64`;
//! the pipeline itself works in `f64` through the aliases below.

pub mod classifier;
pub mod evaluate;
pub mod error;
pub mod logits;
pub mod policy;
pub mod scalar;
pub mod tokenize;
pub mod transforms;
pub mod types;

pub use error::{Error, Result};
pub use logits::{argmax_label, mean_logits, Aggregation, LogitVector, Prediction};
pub use scalar::Scalar;
pub use tokenize::{detokenize, tokenize, Token, TokenKind, TokenizedText};
pub use transforms::{apply, sample_n, Registry, TransformClass, TransformKind, TransformSpec};
pub use types::{ClassIndex, Document, LabeledExample, Seed};

/// Logits in the pipeline's working precision.
pub type Logits = LogitVector<f64>;
pub type Logits32 = LogitVector<f32>;
pub type TtaPrediction = Prediction<f64>;
pub type Embeddings = transforms::EmbeddingTable<f64>;

pub use classifier::{BuiltinModel, Classifier, ClassifierHandle, PredictionCache};
pub use policy::{tta_predict, Policy, PolicyEntry, Preset};
pub use evaluate::{Dataset, EvaluationReport, Evaluator, OutcomeTable, OverlapMatrix, SignificanceResult};
