//! Soft-attention feature fusion.
//!
//! A shared two-layer scorer (hidden ReLU layer, single linear output)
//! rates each feature vector; the scores are softmax-normalized and the
//! output is the weighted sum of the *raw* input vectors. Standardization
//! feeds only the scorer path, so the fused vector lives in the original
//! feature space.
//!
//! With an all-zero scorer every input receives the same weight and the
//! fusion degenerates to the arithmetic mean.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Epsilon inside the standardization square root; keeps constant vectors
/// finite (they map to all-zero).
pub const STANDARDIZE_EPS: f64 = 1e-5;

/// Hidden width of the default scorer.
pub const DEFAULT_HIDDEN: usize = 128;

/// Shared scorer parameters.
///
/// `w1` is row-major `d x hidden` (row per input element), `b1` and `w2`
/// have length `hidden`, `b2` is the output bias.
#[derive(Clone, Debug, PartialEq)]
pub struct ScorerParams {
    d: usize,
    hidden: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    format_version: u32,
    d: usize,
    hidden: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

pub const PARAMS_FORMAT_VERSION: u32 = 1;

impl ScorerParams {
    pub fn new(d: usize, w1: Vec<f64>, b1: Vec<f64>, w2: Vec<f64>, b2: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadParams("d must be at least 1".into()));
        }
        let hidden = b1.len();
        if hidden == 0 {
            return Err(Error::BadParams("hidden layer must be at least 1 wide".into()));
        }
        if w1.len() != d * hidden {
            return Err(Error::BadParams(format!(
                "w1 has {} values, expected d*hidden = {}",
                w1.len(),
                d * hidden
            )));
        }
        if w2.len() != hidden {
            return Err(Error::BadParams(format!(
                "w2 has {} values, expected hidden = {hidden}",
                w2.len()
            )));
        }
        if w1.iter().chain(&b1).chain(&w2).chain([&b2]).any(|v| !v.is_finite()) {
            return Err(Error::BadParams("parameters must be finite".into()));
        }
        Ok(Self {
            d,
            hidden,
            w1,
            b1,
            w2,
            b2,
        })
    }

    /// Deterministic initializer: every layer drawn uniformly from
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` with a 128-wide hidden layer.
    pub fn seeded(d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadParams("d must be at least 1".into()));
        }
        let hidden = DEFAULT_HIDDEN;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let bound1 = 1.0 / (d as f64).sqrt();
        let bound2 = 1.0 / (hidden as f64).sqrt();
        let w1 = (0..d * hidden).map(|_| rng.gen_range(-bound1..=bound1)).collect();
        let b1 = (0..hidden).map(|_| rng.gen_range(-bound1..=bound1)).collect();
        let w2 = (0..hidden).map(|_| rng.gen_range(-bound2..=bound2)).collect();
        let b2 = rng.gen_range(-bound2..=bound2);
        Self::new(d, w1, b1, w2, b2)
    }

    /// All-zero scorer: forces equal weights (mean fusion).
    pub fn zeros(d: usize, hidden: usize) -> Result<Self> {
        Self::new(d, vec![0.0; d * hidden], vec![0.0; hidden], vec![0.0; hidden], 0.0)
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    pub fn with_output_bias(mut self, b2: f64) -> Self {
        self.b2 = b2;
        self
    }

    pub fn from_json(reader: impl Read) -> Result<Self> {
        let file: ParamsFile = serde_json::from_reader(reader)?;
        if file.format_version != PARAMS_FORMAT_VERSION {
            return Err(Error::BadParams(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        if file.b1.len() != file.hidden {
            return Err(Error::BadParams(format!(
                "b1 has {} values, expected hidden = {}",
                file.b1.len(),
                file.hidden
            )));
        }
        Self::new(file.d, file.w1, file.b1, file.w2, file.b2)
    }

    pub fn to_json(&self, writer: impl Write) -> Result<()> {
        let file = ParamsFile {
            format_version: PARAMS_FORMAT_VERSION,
            d: self.d,
            hidden: self.hidden,
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            w2: self.w2.clone(),
            b2: self.b2,
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }
}

/// Result of fusing `n` feature vectors: the weighted sum plus the
/// attention weights (positive, summing to 1).
#[derive(Clone, Debug, PartialEq)]
pub struct FusionResult {
    pub fused: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Standardize a vector by its own mean and (population) variance:
/// `(v - mean) / sqrt(var + eps)`. Constant vectors map to all-zero.
pub fn standardize(v: &[f64]) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "standardize needs at least 2 elements, got {}",
            v.len()
        )));
    }
    let d = v.len() as f64;
    let mean = v.iter().sum::<f64>() / d;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / d;
    let denom = (var + STANDARDIZE_EPS).sqrt();
    Ok(v.iter().map(|x| (x - mean) / denom).collect())
}

/// Scorer forward pass: `b2 + w2 . relu(w1^T v + b1)`.
pub fn score(v: &[f64], params: &ScorerParams) -> Result<f64> {
    if v.len() != params.d {
        return Err(Error::ShapeMismatch(format!(
            "vector length {} does not match scorer input {}",
            v.len(),
            params.d
        )));
    }
    let hidden = params.hidden;
    let mut pre = params.b1.clone();
    for (i, x) in v.iter().enumerate() {
        let row = &params.w1[i * hidden..(i + 1) * hidden];
        for (p, w) in pre.iter_mut().zip(row) {
            *p += x * w;
        }
    }
    let mut out = params.b2;
    for (p, w) in pre.iter().zip(&params.w2) {
        if *p > 0.0 {
            out += w * p;
        }
    }
    Ok(out)
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Fuse `maps` with the shared scorer.
///
/// Each map is standardized for scoring only; the weighted sum runs over
/// the raw inputs. Requires at least two maps of identical length `d`.
pub fn fuse(maps: &[Vec<f64>], params: &ScorerParams) -> Result<FusionResult> {
    if maps.len() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "fusion needs at least 2 maps, got {}",
            maps.len()
        )));
    }
    let d = params.input_dim();
    for (idx, m) in maps.iter().enumerate() {
        if m.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "map {idx} has length {}, expected {d}",
                m.len()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch(format!("map {idx} contains non-finite values")));
        }
    }
    let scores = maps
        .iter()
        .map(|m| score(&standardize(m)?, params))
        .collect::<Result<Vec<f64>>>()?;
    let weights = softmax(&scores);
    let mut fused = vec![0.0; d];
    for (w, m) in weights.iter().zip(maps) {
        for (f, x) in fused.iter_mut().zip(m) {
            *f += w * x;
        }
    }
    Ok(FusionResult { fused, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Toy scorer used throughout: d=3, hidden=4, values chosen so the
    /// expected outputs below could be worked out by hand.
    fn toy_params() -> ScorerParams {
        ScorerParams::new(
            3,
            vec![
                0.5, -0.25, 0.0, 1.0, //
                -0.5, 0.75, 0.5, 0.0, //
                0.25, 0.0, -1.0, 0.5,
            ],
            vec![0.1, -0.2, 0.0, 0.3],
            vec![1.0, -1.0, 0.5, 0.25],
            0.05,
        )
        .unwrap()
    }

    #[test]
    fn standardize_constant_vector_is_zero() {
        let z = standardize(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn standardize_already_standardized() {
        let z = standardize(&[-1.0, 1.0]).unwrap();
        assert!((z[0] + 1.0).abs() < 1e-4);
        assert!((z[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn standardize_two_point_example() {
        // mean 5, population variance 25
        let z = standardize(&[0.0, 10.0]).unwrap();
        assert!((z[0] + 0.99999980000006006).abs() < 1e-12);
        assert!((z[1] - 0.99999980000006006).abs() < 1e-12);
    }

    #[test]
    fn standardize_rejects_scalars() {
        assert!(standardize(&[3.0]).is_err());
    }

    #[test]
    fn score_zero_input_zero_biases() {
        let p = ScorerParams::zeros(4, 8).unwrap();
        assert_eq!(score(&[0.0; 4], &p).unwrap(), 0.0);
    }

    #[test]
    fn score_toy_vector() {
        // frozen from the hand-evaluated toy scorer
        let s = score(&[1.0, 0.0, 2.0], &toy_params()).unwrap();
        assert!((s - 1.7250000000000001).abs() < 1e-12);
    }

    #[test]
    fn score_dead_relu_returns_output_bias() {
        // large negative biases keep every hidden unit inactive
        let p = ScorerParams::new(2, vec![0.1; 2 * 3], vec![-100.0; 3], vec![5.0; 3], 0.75).unwrap();
        assert_eq!(score(&[1.0, 1.0], &p).unwrap(), 0.75);
    }

    #[test]
    fn score_rejects_wrong_length() {
        assert!(score(&[1.0, 2.0], &toy_params()).is_err());
    }

    #[test]
    fn fuse_identical_maps_returns_the_map() {
        let m = vec![4.0, -2.5, 7.0];
        let result = fuse(&[m.clone(), m.clone()], &toy_params()).unwrap();
        assert!((result.weights[0] - 0.5).abs() < 1e-12);
        assert!((result.weights[1] - 0.5).abs() < 1e-12);
        for (f, x) in result.fused.iter().zip(&m) {
            assert!((f - x).abs() < 1e-9);
        }
    }

    #[test]
    fn fuse_toy_maps_match_hand_oracle() {
        let m1 = vec![1.0, 2.0, 3.0];
        let m2 = vec![3.0, 0.0, 1.5];
        let result = fuse(&[m1, m2], &toy_params()).unwrap();
        assert!((result.weights[0] - 0.14038331761068226).abs() < 1e-12);
        assert!((result.weights[1] - 0.85961668238931777).abs() < 1e-12);
        let expected = [2.7192333647786353, 0.28076663522136452, 1.7105749764160234];
        for (f, e) in result.fused.iter().zip(expected) {
            assert!((f - e).abs() < 1e-12);
        }
    }

    #[test]
    fn fuse_rejects_mismatched_maps() {
        let err = fuse(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0]], &toy_params());
        assert!(err.is_err());
        assert!(fuse(&[vec![1.0, 2.0, 3.0]], &toy_params()).is_err());
    }

    #[test]
    fn seeded_params_are_deterministic_and_bounded() {
        let a = ScorerParams::seeded(17, 99).unwrap();
        let b = ScorerParams::seeded(17, 99).unwrap();
        assert_eq!(a, b);
        let c = ScorerParams::seeded(17, 100).unwrap();
        assert_ne!(a, c);
        let bound = 1.0 / (17f64).sqrt();
        assert!(a.w1.iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn params_json_round_trip() {
        let p = ScorerParams::seeded(5, 7).unwrap();
        let mut buf = Vec::new();
        p.to_json(&mut buf).unwrap();
        let q = ScorerParams::from_json(buf.as_slice()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn params_json_rejects_bad_shapes() {
        let text = r#"{"format_version":1,"d":2,"hidden":3,"w1":[0,0,0],"b1":[0,0,0],"w2":[0,0,0],"b2":0}"#;
        assert!(ScorerParams::from_json(text.as_bytes()).is_err());
        let text = r#"{"format_version":9,"d":1,"hidden":1,"w1":[0],"b1":[0],"w2":[0],"b2":0}"#;
        assert!(ScorerParams::from_json(text.as_bytes()).is_err());
    }

    fn arb_maps() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..=4, 2usize..=24).prop_flat_map(|(n, d)| {
            proptest::collection::vec(
                proptest::collection::vec(-1e3..1e3f64, d),
                n,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weights_sum_to_one(maps in arb_maps(), seed in 0u64..1000) {
            let params = ScorerParams::seeded(maps[0].len(), seed).unwrap();
            let result = fuse(&maps, &params).unwrap();
            let sum: f64 = result.weights.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-6);
            prop_assert!(result.weights.iter().all(|w| *w > 0.0 && *w < 1.0 + 1e-12));
        }

        #[test]
        fn output_bias_shift_leaves_result_unchanged(maps in arb_maps(), seed in 0u64..1000, shift in -50.0..50.0f64) {
            let params = ScorerParams::seeded(maps[0].len(), seed).unwrap();
            let base = fuse(&maps, &params).unwrap();
            let shifted = fuse(&maps, &params.clone().with_output_bias(shift)).unwrap();
            for (a, b) in base.weights.iter().zip(&shifted.weights) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            for (a, b) in base.fused.iter().zip(&shifted.fused) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn permutation_equivariance(maps in arb_maps(), seed in 0u64..1000) {
            let params = ScorerParams::seeded(maps[0].len(), seed).unwrap();
            let base = fuse(&maps, &params).unwrap();
            let mut rotated = maps.clone();
            rotated.rotate_left(1);
            let perm = fuse(&rotated, &params).unwrap();
            let n = maps.len();
            for k in 0..n {
                prop_assert!((base.weights[(k + 1) % n] - perm.weights[k]).abs() < 1e-9);
            }
            for (a, b) in base.fused.iter().zip(&perm.fused) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn replicated_input_is_identity(m in proptest::collection::vec(-1e3..1e3f64, 2..24), n in 2usize..=4, seed in 0u64..1000) {
            let params = ScorerParams::seeded(m.len(), seed).unwrap();
            let maps = vec![m.clone(); n];
            let result = fuse(&maps, &params).unwrap();
            for (f, x) in result.fused.iter().zip(&m) {
                prop_assert!((f - x).abs() < 1e-9 * x.abs().max(1.0));
            }
        }

        #[test]
        fn zero_scorer_degenerates_to_mean(maps in arb_maps()) {
            let d = maps[0].len();
            let params = ScorerParams::zeros(d, 16).unwrap();
            let result = fuse(&maps, &params).unwrap();
            let n = maps.len() as f64;
            for (w, _) in result.weights.iter().zip(&maps) {
                prop_assert!((w - 1.0 / n).abs() < 1e-9);
            }
            for (idx, f) in result.fused.iter().enumerate() {
                let mean: f64 = maps.iter().map(|m| m[idx]).sum::<f64>() / n;
                prop_assert!((f - mean).abs() < 1e-9 * mean.abs().max(1.0));
            }
        }
    }
}
