//! Calibration map from the optimal subsystem squeezing to the A|B linear
//! entropy, its monotone segments, and its inversion.

use crate::analytic::ghz_linear_entropy;
use crate::error::{Error, Result};

/// Differences at or below this are treated as zero when splitting segments
/// and ranking values.
pub const TIE_TOL: f64 = 1e-12;
/// Candidates of an inversion closer than this are merged.
pub const MERGE_TOL: f64 = 1e-3;
/// Queries this far outside the observed range are still accepted.
pub const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub t: f64,
    pub min_xi2: f64,
    pub s_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Both quantities move in the same direction.
    Increasing,
    /// One grows while the other shrinks.
    Decreasing,
    /// At least one quantity is constant.
    Flat,
}

/// Maximal run of consecutive points, `start..=end`, over which both
/// quantities are monotone with fixed directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    points: Vec<CalibrationPoint>,
    segments: Vec<Segment>,
    analytic: bool,
}

fn sign(d: f64) -> i8 {
    if d > TIE_TOL {
        1
    } else if d < -TIE_TOL {
        -1
    } else {
        0
    }
}

impl CalibrationCurve {
    /// Builds the curve from points in increasing `t`. With `analytic` set
    /// the inversion uses the closed-form two-plus-two GHZ relation.
    pub fn new(points: Vec<CalibrationPoint>, analytic: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("calibration needs at least one point".into()));
        }
        if points.iter().any(|p| !p.min_xi2.is_finite() || !p.s_l.is_finite()) {
            return Err(Error::Config("calibration points must be finite".into()));
        }
        let mut segments: Vec<Segment> = Vec::new();
        let mut current: Option<(Segment, (i8, i8))> = None;
        for i in 0..points.len().saturating_sub(1) {
            let dirs = (
                sign(points[i + 1].min_xi2 - points[i].min_xi2),
                sign(points[i + 1].s_l - points[i].s_l),
            );
            match &mut current {
                Some((seg, d)) if *d == dirs => seg.end = i + 1,
                _ => {
                    if let Some((seg, _)) = current.take() {
                        segments.push(seg);
                    }
                    let relation = match dirs.0 * dirs.1 {
                        1 => Relation::Increasing,
                        -1 => Relation::Decreasing,
                        _ => Relation::Flat,
                    };
                    current = Some((Segment { start: i, end: i + 1, relation }, dirs));
                }
            }
        }
        segments.extend(current.map(|(s, _)| s));
        Ok(Self { points, segments, analytic })
    }

    pub fn points(&self) -> &[CalibrationPoint] {
        &self.points
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    /// `(min_xi2, s_l)` pairs sorted by `min_xi2`.
    pub fn sorted_pairs(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = self.points.iter().map(|p| (p.min_xi2, p.s_l)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }

    /// Per point: whether it belongs to a segment where the two quantities
    /// move in opposite directions.
    pub fn nonmonotone_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.points.len()];
        for s in self.segments.iter().filter(|s| s.relation == Relation::Decreasing) {
            flags[s.start..=s.end].iter_mut().for_each(|f| *f = true);
        }
        flags
    }

    fn step_is_decreasing(&self, i: usize) -> bool {
        self.segments
            .iter()
            .any(|s| s.relation == Relation::Decreasing && s.start <= i && i < s.end)
    }

    pub fn range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.min_xi2), hi.max(p.min_xi2))
        })
    }
}

/// Estimated linear entropies for a measured minimal squeezing.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub candidates: Vec<f64>,
    pub ambiguous: bool,
}

pub fn invert(curve: &CalibrationCurve, measured_min_xi2: f64) -> Result<Inversion> {
    let (lo, hi) = curve.range();
    let x = measured_min_xi2;
    if !(x >= lo - RANGE_SLACK && x <= hi + RANGE_SLACK) {
        return Err(Error::Extrapolation { value: x, lo, hi });
    }
    if curve.analytic {
        return Ok(Inversion { candidates: vec![ghz_linear_entropy(x.clamp(0.0, 1.0))], ambiguous: false });
    }
    let pts = &curve.points;
    let mut raw = Vec::new();
    let mut in_flagged = false;
    if pts.len() == 1 {
        raw.push(pts[0].s_l);
    }
    for i in 0..pts.len().saturating_sub(1) {
        let (a, b) = (pts[i], pts[i + 1]);
        let (xl, xh) = (a.min_xi2.min(b.min_xi2), a.min_xi2.max(b.min_xi2));
        if x < xl - RANGE_SLACK || x > xh + RANGE_SLACK {
            continue;
        }
        let dx = b.min_xi2 - a.min_xi2;
        if dx.abs() <= TIE_TOL {
            raw.push(a.s_l);
            raw.push(b.s_l);
        } else {
            let f = ((x - a.min_xi2) / dx).clamp(0.0, 1.0);
            raw.push(a.s_l + f * (b.s_l - a.s_l));
        }
        in_flagged |= curve.step_is_decreasing(i);
    }
    raw.sort_by(f64::total_cmp);
    let mut candidates: Vec<f64> = Vec::new();
    for v in raw {
        if candidates.last().is_none_or(|&l| v - l > MERGE_TOL) {
            candidates.push(v);
        }
    }
    let ambiguous = candidates.len() > 1 || in_flagged;
    Ok(Inversion { candidates, ambiguous })
}

/// Average ranks (1-based) with values within [`TIE_TOL`] of their run
/// neighbours sharing a rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] - v[idx[j]] <= TIE_TOL {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation between `min_xi2` and `s_l` over the curve.
pub fn monotonicity_score(curve: &CalibrationCurve) -> Result<f64> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(Error::UndefinedScore(format!("need at least 3 points, got {}", pts.len())));
    }
    let rx = ranks(&pts.iter().map(|p| p.min_xi2).collect::<Vec<_>>());
    let ry = ranks(&pts.iter().map(|p| p.s_l).collect::<Vec<_>>());
    let n = pts.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedScore("constant input has no rank correlation".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
