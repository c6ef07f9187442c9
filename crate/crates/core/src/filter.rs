//! Per-point, per-class static-state binary Bayes filters in log-odds form.
//!
//! Each tracked point carries one log-odds value per class. A scan update
//! adds the log-odds of the current classifier score and subtracts the
//! prior; points without a correspondence restart from the prior. Labels
//! come from the per-point argmax over class log-odds.

use crate::association::Correspondence;
use crate::types::{argmax, ClassScores, LabelVector, MAX_CLASSES};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("invalid filter config: {reason}")]
    InvalidConfig { reason: String },
    #[error("logit input is NaN")]
    NanInput,
    #[error("scores carry {scores} classes, filter expects {expected}")]
    ClassCountMismatch { scores: usize, expected: usize },
    #[error("correspondence covers {correspondence} points, scores cover {scores}")]
    LengthMismatch {
        correspondence: usize,
        scores: usize,
    },
    #[error("point {point} matches previous index {prev_index}, but only {prev_len} tracked")]
    MatchIndexOutOfRange {
        point: usize,
        prev_index: usize,
        prev_len: usize,
    },
    #[error("state length {len} is not a multiple of {classes} classes")]
    StateShape { len: usize, classes: usize },
}

/// Filter parameters. `prior_logodds` holds l₀ per class; `score_epsilon`
/// bounds scores away from 0 and 1 before the logit; `logodds_clamp`
/// saturates accumulated log-odds (use infinity to disable).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    num_classes: usize,
    prior_logodds: Vec<f64>,
    score_epsilon: f64,
    logodds_clamp: f64,
}

pub const DEFAULT_SCORE_EPSILON: f64 = 1e-7;
pub const DEFAULT_LOGODDS_CLAMP: f64 = 50.0;

impl FilterConfig {
    /// Uniform prior (l₀ = 0), ε = 1e-7, clamp = ±50.
    pub fn new(num_classes: usize) -> Result<Self, FilterError> {
        Self::build(
            num_classes,
            vec![0.0; num_classes],
            DEFAULT_SCORE_EPSILON,
            DEFAULT_LOGODDS_CLAMP,
        )
    }

    pub fn build(
        num_classes: usize,
        prior_logodds: Vec<f64>,
        score_epsilon: f64,
        logodds_clamp: f64,
    ) -> Result<Self, FilterError> {
        let fail = |reason: String| Err(FilterError::InvalidConfig { reason });
        if !(2..=MAX_CLASSES).contains(&num_classes) {
            return fail(format!(
                "class count {num_classes} outside 2..={MAX_CLASSES}"
            ));
        }
        if prior_logodds.len() != num_classes {
            return fail(format!(
                "{} priors given for {num_classes} classes",
                prior_logodds.len()
            ));
        }
        if prior_logodds.iter().any(|p| !p.is_finite()) {
            return fail("priors must be finite".to_string());
        }
        let epsilon_ok = score_epsilon > 0.0 && score_epsilon <= 0.01;
        if !epsilon_ok {
            return fail(format!("score epsilon {score_epsilon} outside (0, 0.01]"));
        }
        // NaN and zero both fail; infinity is allowed (clamp disabled).
        let clamp_ok = logodds_clamp > 0.0;
        if !clamp_ok {
            return fail(format!("log-odds clamp {logodds_clamp} must be positive"));
        }
        Ok(Self {
            num_classes,
            prior_logodds,
            score_epsilon,
            logodds_clamp,
        })
    }

    pub fn with_priors(mut self, prior_logodds: Vec<f64>) -> Result<Self, FilterError> {
        if prior_logodds.len() != self.num_classes || prior_logodds.iter().any(|p| !p.is_finite()) {
            return Err(FilterError::InvalidConfig {
                reason: format!("need {} finite priors", self.num_classes),
            });
        }
        self.prior_logodds = prior_logodds;
        Ok(self)
    }

    /// Disable saturation; useful when comparing against unclamped oracles.
    pub fn without_clamp(mut self) -> Self {
        self.logodds_clamp = f64::INFINITY;
        self
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn priors(&self) -> &[f64] {
        &self.prior_logodds
    }

    pub fn score_epsilon(&self) -> f64 {
        self.score_epsilon
    }

    pub fn logodds_clamp(&self) -> f64 {
        self.logodds_clamp
    }
}

/// Log-odds state for the points of the most recent scan, row-major N×C.
/// `last_seen` is the index of the scan whose measurements produced the
/// state (None until the first update).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilterState {
    logodds: Vec<f64>,
    num_classes: usize,
    last_seen: Option<u64>,
}

impl FilterState {
    pub fn empty(num_classes: usize) -> Self {
        Self {
            logodds: Vec::new(),
            num_classes,
            last_seen: None,
        }
    }

    pub fn from_logodds(
        logodds: Vec<f64>,
        num_classes: usize,
        last_seen: Option<u64>,
    ) -> Result<Self, FilterError> {
        if num_classes == 0 || !logodds.len().is_multiple_of(num_classes) {
            return Err(FilterError::StateShape {
                len: logodds.len(),
                classes: num_classes,
            });
        }
        Ok(Self {
            logodds,
            num_classes,
            last_seen,
        })
    }

    pub fn num_points(&self) -> usize {
        self.logodds
            .len()
            .checked_div(self.num_classes)
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.logodds.is_empty()
    }

    pub fn last_seen(&self) -> Option<u64> {
        self.last_seen
    }

    pub fn point_logodds(&self, point: usize) -> &[f64] {
        let c = self.num_classes;
        &self.logodds[point * c..(point + 1) * c]
    }
}

/// Log-odds of `p` after clamping it into [ε, 1−ε].
pub fn logit(p: f64, epsilon: f64) -> Result<f64, FilterError> {
    if p.is_nan() {
        return Err(FilterError::NanInput);
    }
    let p = p.clamp(epsilon, 1.0 - epsilon);
    Ok((p / (1.0 - p)).ln())
}

/// One recursion step. Matched points fuse the new measurement with their
/// previous log-odds; unmatched points restart from the prior, which makes
/// their posterior exactly the measurement log-odds. The previous state is
/// consumed: only current-scan points stay tracked.
pub fn update(
    prev: FilterState,
    scores: &ClassScores,
    corr: &Correspondence,
    cfg: &FilterConfig,
) -> Result<FilterState, FilterError> {
    let c = cfg.num_classes;
    if scores.num_classes() != c {
        return Err(FilterError::ClassCountMismatch {
            scores: scores.num_classes(),
            expected: c,
        });
    }
    if prev.num_classes != c && !prev.is_empty() {
        return Err(FilterError::ClassCountMismatch {
            scores: prev.num_classes,
            expected: c,
        });
    }
    let n = scores.num_points();
    if corr.len() != n {
        return Err(FilterError::LengthMismatch {
            correspondence: corr.len(),
            scores: n,
        });
    }

    let clamp = cfg.logodds_clamp;
    let mut logodds = Vec::with_capacity(n * c);
    for (point, pair) in corr.pairs.iter().enumerate() {
        let row = scores.row(point);
        match pair {
            Some(m) => {
                if m.prev_index >= prev.num_points() {
                    return Err(FilterError::MatchIndexOutOfRange {
                        point,
                        prev_index: m.prev_index,
                        prev_len: prev.num_points(),
                    });
                }
                let previous = prev.point_logodds(m.prev_index);
                for class in 0..c {
                    let measurement = logit(row[class] as f64, cfg.score_epsilon)?;
                    let fused = measurement + previous[class] - cfg.prior_logodds[class];
                    logodds.push(fused.clamp(-clamp, clamp));
                }
            }
            None => {
                for &score in row {
                    let measurement = logit(score as f64, cfg.score_epsilon)?;
                    logodds.push(measurement.clamp(-clamp, clamp));
                }
            }
        }
    }
    Ok(FilterState {
        logodds,
        num_classes: c,
        last_seen: Some(prev.last_seen.map_or(0, |t| t + 1)),
    })
}

/// Per-point argmax over class log-odds; ties go to the lowest class index.
pub fn infer(state: &FilterState) -> LabelVector {
    let labels = (0..state.num_points())
        .map(|i| argmax(state.point_logodds(i)) as u8)
        .collect();
    LabelVector(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::PointMatch;
    use crate::types::ClassScores;

    const LN_9: f64 = 2.1972245773362196;

    fn scores_2c(rows: &[[f32; 2]]) -> ClassScores {
        let flat: Vec<f32> = rows.iter().flatten().copied().collect();
        ClassScores::new(flat, 2, ClassScores::default_names(2)).unwrap()
    }

    fn matched(prev_index: usize) -> Option<PointMatch> {
        Some(PointMatch {
            prev_index,
            distance: 0.0,
        })
    }

    #[test]
    fn logit_of_half_is_zero() {
        assert_eq!(logit(0.5, 1e-7).unwrap(), 0.0);
    }

    #[test]
    fn logit_evaluates_ln_nine_at_point_nine() {
        assert!((logit(0.9, 1e-7).unwrap() - 2.197225).abs() < 1e-6);
    }

    #[test]
    fn logit_clamps_certainty() {
        let l = logit(1.0, 1e-7).unwrap();
        assert!((l - 16.1181).abs() < 1e-3);
        let l = logit(0.0, 1e-7).unwrap();
        assert!((l + 16.1181).abs() < 1e-3);
    }

    #[test]
    fn logit_rejects_nan() {
        assert_eq!(logit(f64::NAN, 1e-7), Err(FilterError::NanInput));
    }

    #[test]
    fn new_point_posterior_is_measurement_logodds() {
        let cfg = FilterConfig::new(2).unwrap();
        let scores = scores_2c(&[[0.9, 0.1]]);
        let corr = Correspondence::all_unmatched(1);
        let state = update(FilterState::empty(2), &scores, &corr, &cfg).unwrap();
        // f32 score storage rounds 0.9 before the logit.
        assert!((state.point_logodds(0)[0] - LN_9).abs() < 1e-6);
        assert!((state.point_logodds(0)[1] + LN_9).abs() < 1e-6);
        assert_eq!(state.last_seen(), Some(0));
    }

    #[test]
    fn two_consistent_observations_double_the_logodds() {
        let cfg = FilterConfig::new(2).unwrap();
        let scores = scores_2c(&[[0.9, 0.1]]);
        let state = update(
            FilterState::empty(2),
            &scores,
            &Correspondence::all_unmatched(1),
            &cfg,
        )
        .unwrap();
        let corr = Correspondence {
            pairs: vec![matched(0)],
        };
        let state = update(state, &scores, &corr, &cfg).unwrap();
        assert!((state.point_logodds(0)[0] - 4.394449).abs() < 1e-6);
        assert_eq!(state.last_seen(), Some(1));
    }

    #[test]
    fn fusion_subtracts_the_prior() {
        // Prior log-odds for probability 0.25, previous belief ln 9,
        // measurement 0.9: posterior = ln 9 + ln 9 + ln 3.
        let prior = logit(0.25, 1e-7).unwrap();
        let cfg = FilterConfig::new(2)
            .unwrap()
            .with_priors(vec![prior, prior])
            .unwrap();
        let prev = FilterState::from_logodds(vec![LN_9, -LN_9], 2, Some(0)).unwrap();
        let scores = scores_2c(&[[0.9, 0.1]]);
        let corr = Correspondence {
            pairs: vec![matched(0)],
        };
        let state = update(prev, &scores, &corr, &cfg).unwrap();
        assert!((state.point_logodds(0)[0] - 5.493062).abs() < 1e-6);
    }

    #[test]
    fn infer_takes_largest_logodds() {
        let state = FilterState::from_logodds(vec![0.5, 2.0, -1.0, -3.0], 4, Some(0)).unwrap();
        assert_eq!(infer(&state).as_slice(), &[1]);
    }

    #[test]
    fn infer_breaks_ties_toward_lowest_class() {
        let state = FilterState::from_logodds(vec![0.0, 0.0, 0.0, 0.0], 4, Some(0)).unwrap();
        assert_eq!(infer(&state).as_slice(), &[0]);
    }

    #[test]
    fn single_update_matches_raw_argmax_under_uniform_prior() {
        let cfg = FilterConfig::new(4).unwrap();
        let flat = vec![
            0.1, 0.6, 0.2, 0.1, //
            0.7, 0.1, 0.1, 0.1, //
            0.2, 0.2, 0.3, 0.3,
        ];
        let scores = ClassScores::new(flat, 4, ClassScores::default_names(4)).unwrap();
        let state = update(
            FilterState::empty(4),
            &scores,
            &Correspondence::all_unmatched(3),
            &cfg,
        )
        .unwrap();
        assert_eq!(infer(&state), scores.argmax_labels());
    }

    #[test]
    fn clamp_keeps_logodds_finite_and_bounded() {
        let cfg = FilterConfig::new(2).unwrap();
        let scores = scores_2c(&[[1.0, 0.0]]);
        let mut state = update(
            FilterState::empty(2),
            &scores,
            &Correspondence::all_unmatched(1),
            &cfg,
        )
        .unwrap();
        for _ in 0..20 {
            let corr = Correspondence {
                pairs: vec![matched(0)],
            };
            state = update(state, &scores, &corr, &cfg).unwrap();
        }
        let l = state.point_logodds(0);
        assert!(l.iter().all(|v| v.is_finite()));
        assert_eq!(l[0], DEFAULT_LOGODDS_CLAMP);
        assert_eq!(l[1], -DEFAULT_LOGODDS_CLAMP);
    }

    #[test]
    fn match_index_out_of_range_is_an_error() {
        let cfg = FilterConfig::new(2).unwrap();
        let prev = FilterState::from_logodds(vec![0.0, 0.0], 2, Some(0)).unwrap();
        let scores = scores_2c(&[[0.5, 0.5]]);
        let corr = Correspondence {
            pairs: vec![matched(5)],
        };
        let err = update(prev, &scores, &corr, &cfg).unwrap_err();
        assert!(matches!(err, FilterError::MatchIndexOutOfRange { .. }));
    }

    #[test]
    fn correspondence_length_mismatch_is_an_error() {
        let cfg = FilterConfig::new(2).unwrap();
        let scores = scores_2c(&[[0.5, 0.5]]);
        let err = update(
            FilterState::empty(2),
            &scores,
            &Correspondence::all_unmatched(3),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, FilterError::LengthMismatch { .. }));
    }

    #[test]
    fn config_bounds_are_enforced() {
        assert!(FilterConfig::new(1).is_err());
        assert!(FilterConfig::build(4, vec![0.0; 3], 1e-7, 50.0).is_err());
        assert!(FilterConfig::build(4, vec![0.0; 4], 0.0, 50.0).is_err());
        assert!(FilterConfig::build(4, vec![0.0; 4], 0.02, 50.0).is_err());
        assert!(FilterConfig::build(4, vec![0.0; 4], 1e-7, 0.0).is_err());
        assert!(FilterConfig::build(4, vec![f64::NAN; 4], 1e-7, 50.0).is_err());
        // Unclamped configs are legal.
        let cfg = FilterConfig::new(4).unwrap().without_clamp();
        assert!(cfg.logodds_clamp().is_infinite());
    }
}
