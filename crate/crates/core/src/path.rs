//! Target paths described by their curvature as a function of arc length.
//!
//! A [`TargetPath`] is a list of analytic [`CurvatureSegment`]s tiling
//! `[0, L]`. The inertial-frame geometry is recovered by integrating
//! `theta_r' = kappa_r`, `xi_r' = cos theta_r`, `eta_r' = sin theta_r` from the
//! anchored origin.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::invalid;
use crate::math::{cos, sin, sqrt};
use crate::{ode, Error, Result};

/// Default polyline spacing for [`TargetPath::reconstruct`] [m].
pub const DEFAULT_RECONSTRUCTION_STEP: f64 = 0.01;

/// Closed-form curvature law of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentKind {
    Zero,
    /// `c (1 - cos(omega s + phi))`
    RaisedCosine { c: f64, omega: f64, phi: f64 },
    /// `c sin(omega s + phi)`
    Sine { c: f64, omega: f64, phi: f64 },
    Constant { c: f64 },
}

impl SegmentKind {
    /// Curvature at absolute arc length `s` [1/m].
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            SegmentKind::Zero => 0.0,
            SegmentKind::RaisedCosine { c, omega, phi } => c * (1.0 - cos(omega * s + phi)),
            SegmentKind::Sine { c, omega, phi } => c * sin(omega * s + phi),
            SegmentKind::Constant { c } => c,
        }
    }

    /// `d kappa / ds` at absolute arc length `s` [1/m^2].
    pub fn rate(&self, s: f64) -> f64 {
        match *self {
            SegmentKind::Zero | SegmentKind::Constant { .. } => 0.0,
            SegmentKind::RaisedCosine { c, omega, phi } => c * omega * sin(omega * s + phi),
            SegmentKind::Sine { c, omega, phi } => c * omega * cos(omega * s + phi),
        }
    }

    /// Largest `|kappa|` the law can produce, used to scale tolerances.
    pub fn amplitude(&self) -> f64 {
        match *self {
            SegmentKind::Zero => 0.0,
            SegmentKind::RaisedCosine { c, .. } => 2.0 * c.abs(),
            SegmentKind::Sine { c, .. } | SegmentKind::Constant { c } => c.abs(),
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            SegmentKind::Zero => true,
            SegmentKind::RaisedCosine { c, omega, phi } | SegmentKind::Sine { c, omega, phi } => {
                c.is_finite() && omega.is_finite() && phi.is_finite()
            }
            SegmentKind::Constant { c } => c.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSegment {
    pub s_start: f64,
    pub s_end: f64,
    pub kind: SegmentKind,
}

impl CurvatureSegment {
    pub fn new(s_start: f64, s_end: f64, kind: SegmentKind) -> Result<Self> {
        if !(s_start.is_finite() && s_end.is_finite()) || s_start >= s_end {
            return Err(Error::InvalidPath("segment needs finite s_start < s_end"));
        }
        if !kind.is_finite() {
            return Err(Error::InvalidPath("segment coefficients must be finite"));
        }
        Ok(Self { s_start, s_end, kind })
    }
}

/// A sample of the reconstructed path.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathPoint {
    pub s: f64,
    pub xi: f64,
    pub eta: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathId {
    /// Square-like closed loop, `L = 150 m`.
    Path1,
    /// Meandering path, `L = 207 m`.
    Path2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetPath {
    segments: Vec<CurvatureSegment>,
    origin: PathPoint,
}

impl TargetPath {
    /// Builds a path from segments that must tile `[0, L]` in order.
    ///
    /// `origin.s` is ignored and set to zero.
    pub fn new(segments: Vec<CurvatureSegment>, origin: PathPoint) -> Result<Self> {
        let first = segments.first().ok_or(Error::InvalidPath("path needs at least one segment"))?;
        if first.s_start != 0.0 {
            return Err(Error::InvalidPath("first segment must start at s = 0"));
        }
        for seg in &segments {
            CurvatureSegment::new(seg.s_start, seg.s_end, seg.kind)?;
        }
        for pair in segments.windows(2) {
            if pair[0].s_end != pair[1].s_start {
                return Err(Error::InvalidPath("segments must be contiguous and ordered by s_start"));
            }
        }
        if !(origin.xi.is_finite() && origin.eta.is_finite() && origin.theta.is_finite()) {
            return Err(invalid("origin", "must be finite"));
        }
        Ok(Self { segments, origin: PathPoint { s: 0.0, ..origin } })
    }

    pub fn builtin(id: PathId) -> Self {
        let (straight, end, kind) = match id {
            PathId::Path1 => (12.0, 150.0, SegmentKind::RaisedCosine { c: 0.037, omega: 0.15, phi: -1.8 }),
            PathId::Path2 => (10.0, 207.0, SegmentKind::Sine { c: 0.1, omega: 0.06, phi: -0.2 }),
        };
        let segments = alloc::vec![
            CurvatureSegment { s_start: 0.0, s_end: straight, kind: SegmentKind::Zero },
            CurvatureSegment { s_start: straight, s_end: end, kind },
        ];
        Self::new(segments, Self::default_origin()).expect("builtin paths are valid")
    }

    /// Origin placing the plant's initial position `(0, 0)` at `z = 3` on the
    /// left of a path heading along `+x`.
    pub fn default_origin() -> PathPoint {
        PathPoint { s: 0.0, xi: 0.0, eta: -3.0, theta: 0.0 }
    }

    pub fn segments(&self) -> &[CurvatureSegment] {
        &self.segments
    }

    pub fn origin(&self) -> PathPoint {
        self.origin
    }

    /// Total arc length `L` [m].
    pub fn length(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.s_end)
    }

    fn check(&self, s: f64) -> Result<()> {
        let length = self.length();
        if (0.0..=length).contains(&s) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { s, length })
        }
    }

    /// Index of the segment covering `s`; breakpoints belong to the right
    /// segment, `s = L` to the last one.
    fn segment_index(&self, s: f64) -> usize {
        self.segments
            .iter()
            .rposition(|seg| seg.s_start <= s)
            .unwrap_or(0)
    }

    pub fn segment_at(&self, s: f64) -> Result<&CurvatureSegment> {
        self.check(s)?;
        Ok(&self.segments[self.segment_index(s)])
    }

    /// `kappa_r(s)` [1/m].
    pub fn curvature(&self, s: f64) -> Result<f64> {
        Ok(self.segment_at(s)?.kind.value(s))
    }

    /// Right derivative `d kappa_r / ds` [1/m^2]. Curvature jumps at
    /// breakpoints contribute nothing.
    pub fn curvature_rate(&self, s: f64) -> Result<f64> {
        Ok(self.segment_at(s)?.kind.rate(s))
    }

    /// Curvature and its rate with `s` clamped into `[0, L]`.
    ///
    /// Used inside the integrator where an RK stage may probe slightly past
    /// the end of the path. Beyond `L` the rate is zero.
    pub fn curvature_clamped(&self, s: f64) -> (f64, f64) {
        let length = self.length();
        let clamped = s.clamp(0.0, length);
        let kind = self.segments[self.segment_index(clamped)].kind;
        let rate = if s > length || s < 0.0 { 0.0 } else { kind.rate(clamped) };
        (kind.value(clamped), rate)
    }

    /// Samples the path at `s = 0, ds, 2 ds, ..., L` (the last sample is
    /// exactly `L`), integrating heading and position with RK4.
    ///
    /// Each step uses the formula of the segment containing its midpoint, so
    /// curvature jumps on grid points are integrated without smearing.
    pub fn reconstruct(&self, ds: f64) -> Result<Vec<PathPoint>> {
        if !(ds.is_finite() && ds > 0.0) {
            return Err(invalid("ds", "must be positive"));
        }
        let length = self.length();
        let ratio = length / ds;
        let whole = libm::floor(ratio + 1e-9) as usize;
        let ends_on_grid = (ratio - libm::round(ratio)).abs() < 1e-9;
        let steps = if ends_on_grid { libm::round(ratio) as usize } else { whole + 1 };

        let mut points = Vec::with_capacity(steps + 1);
        let mut state = [self.origin.theta, self.origin.xi, self.origin.eta];
        let mut s = 0.0;
        points.push(self.origin);
        for i in 1..=steps {
            let s_next = if i == steps { length } else { i as f64 * ds };
            let kind = self.segments[self.segment_index(0.5 * (s + s_next))].kind;
            state = ode::rk4_step(s, &state, s_next - s, |s, y| {
                Ok::<_, core::convert::Infallible>([kind.value(s), cos(y[0]), sin(y[0])])
            })
            .unwrap_or_else(|never| match never {});
            s = s_next;
            points.push(PathPoint { s, xi: state[1], eta: state[2], theta: state[0] });
        }
        Ok(points)
    }
}

/// Signed perpendicular offset of `(x, y)` from a polyline, searching only the
/// vertex range `window`.
///
/// Positive values lie on the left of the local tangent. Returns `None` when
/// the window holds fewer than two points.
pub fn signed_offset(polyline: &[PathPoint], x: f64, y: f64, window: Range<usize>) -> Option<f64> {
    let end = window.end.min(polyline.len());
    let start = window.start.min(end);
    if end - start < 2 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for pair in polyline[start..end].windows(2) {
        let (ax, ay) = (pair[0].xi, pair[0].eta);
        let (dx, dy) = (pair[1].xi - ax, pair[1].eta - ay);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            continue;
        }
        let t = (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0);
        let (px, py) = (ax + t * dx, ay + t * dy);
        let dist = sqrt((x - px) * (x - px) + (y - py) * (y - py));
        let side = dx * (y - ay) - dy * (x - ax);
        if best.is_none_or(|(d, _)| dist < d) {
            best = Some((dist, if side < 0.0 { -dist } else { dist }));
        }
    }
    best.map(|(_, signed)| signed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::atan2;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn builtin_curvature_examples() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let p2 = TargetPath::builtin(PathId::Path2);
        assert_eq!(p1.curvature(5.0).unwrap(), 0.0);
        assert!(close(p1.curvature(12.0).unwrap(), 0.0, 1e-15));
        assert!(close(p2.curvature(10.0).unwrap(), 0.1 * libm::sin(0.4), 1e-15));
        assert!(close(p2.curvature(10.0).unwrap(), 0.038_942, 5e-7));
    }

    #[test]
    fn builtin_rate_examples() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let p2 = TargetPath::builtin(PathId::Path2);
        assert_eq!(p1.curvature_rate(5.0).unwrap(), 0.0);
        assert!(close(p1.curvature_rate(12.0).unwrap(), 0.0, 1e-15));
        assert!(close(p2.curvature_rate(10.0).unwrap(), 0.1 * 0.06 * libm::cos(0.4), 1e-15));
        assert!(close(p2.curvature_rate(10.0).unwrap(), 0.005_526_4, 5e-8));
    }

    #[test]
    fn builtin_lengths_and_peak() {
        assert_eq!(TargetPath::builtin(PathId::Path1).length(), 150.0);
        assert_eq!(TargetPath::builtin(PathId::Path2).length(), 207.0);
        let p1 = TargetPath::builtin(PathId::Path1);
        let s_peak = (PI + 1.8) / 0.15;
        assert!(close(p1.curvature(s_peak).unwrap(), 0.074, 1e-12));
        // A brute-force scan never exceeds the analytic maximum.
        let scanned = (0..=150_000)
            .map(|i| p1.curvature(i as f64 * 1e-3).unwrap())
            .fold(f64::MIN, f64::max);
        assert!(scanned <= 0.074 + 1e-12 && scanned > 0.074 - 1e-9);
    }

    #[test]
    fn out_of_domain_reports_s() {
        let p1 = TargetPath::builtin(PathId::Path1);
        assert_eq!(p1.curvature(-0.5), Err(Error::OutOfDomain { s: -0.5, length: 150.0 }));
        assert_eq!(p1.curvature_rate(150.5), Err(Error::OutOfDomain { s: 150.5, length: 150.0 }));
        assert!(p1.curvature(150.0).is_ok());
    }

    #[test]
    fn breakpoint_uses_right_segment() {
        let p2 = TargetPath::builtin(PathId::Path2);
        assert_eq!(p2.curvature(10.0 - 1e-12).unwrap(), 0.0);
        assert!(p2.curvature(10.0).unwrap() > 0.03);
    }

    #[test]
    fn path1_is_c1_at_twelve() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let h = 1e-6;
        assert!(p1.curvature(12.0 + h).unwrap().abs() < 1e-12);
        assert!(p1.curvature_rate(12.0 + h).unwrap().abs() < 1e-8);
        assert_eq!(p1.curvature_rate(12.0 - h).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tilings() {
        let o = TargetPath::default_origin();
        let seg = |a, b| CurvatureSegment { s_start: a, s_end: b, kind: SegmentKind::Zero };
        assert!(TargetPath::new(alloc::vec![], o).is_err());
        assert!(TargetPath::new(alloc::vec![seg(1.0, 2.0)], o).is_err());
        assert!(TargetPath::new(alloc::vec![seg(0.0, 2.0), seg(3.0, 4.0)], o).is_err());
        assert!(TargetPath::new(alloc::vec![seg(0.0, 2.0), seg(1.0, 4.0)], o).is_err());
        assert!(TargetPath::new(alloc::vec![seg(0.0, 0.0)], o).is_err());
        assert!(TargetPath::new(alloc::vec![seg(0.0, 2.0), seg(2.0, 4.0)], o).is_ok());
    }

    #[test]
    fn straight_start_reconstructs_as_line() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let pts = p1.reconstruct(0.01).unwrap();
        assert_eq!(pts.len(), 15_001);
        assert_eq!(pts[0], p1.origin());
        for p in pts.iter().take(1201) {
            assert!(close(p.eta, -3.0, 1e-12));
            assert!(close(p.xi, p.s, 1e-9));
            assert_eq!(p.theta, 0.0);
        }
        assert_eq!(pts.last().unwrap().s, 150.0);
    }

    #[test]
    fn path1_closes_into_a_loop() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let pts = p1.reconstruct(0.01).unwrap();
        let (first, last) = (pts[0], *pts.last().unwrap());
        let gap = sqrt((last.xi - first.xi).powi(2) + (last.eta - first.eta).powi(2));
        // Total turning is 0.037 (138 - integral of the cosine): about 279 deg,
        // so the trace ends heading back down towards its start.
        let turning = 0.037 * (138.0 - (libm::sin(0.15 * 150.0 - 1.8) - libm::sin(0.0)) / 0.15);
        assert!(close(last.theta, turning, 1e-9), "theta_end = {}", last.theta);
        assert!(last.theta > 1.5 * PI && last.theta < 2.0 * PI);
        let xs = pts.iter().map(|p| p.xi);
        let width = xs.clone().fold(f64::MIN, f64::max) - xs.fold(f64::MAX, f64::min);
        let ys = pts.iter().map(|p| p.eta);
        let height = ys.clone().fold(f64::MIN, f64::max) - ys.fold(f64::MAX, f64::min);
        assert!(width > 40.0 && height > 40.0 && (width / height - 1.0).abs() < 0.1);
        assert!(gap < 0.5 * width, "end point {gap} m from start");
    }

    #[test]
    fn path2_meanders() {
        let p2 = TargetPath::builtin(PathId::Path2);
        let pts = p2.reconstruct(0.01).unwrap();
        assert_eq!(pts.len(), 20_701);
        assert!(pts.iter().take(1001).all(|p| p.eta == -3.0));
        // Heading is (0.1 / 0.06)(cos 0.4 - cos(0.06 s - 0.2)): it swings out
        // past pi and back twice, so the trace snakes sideways while advancing.
        let theta = |s: f64| 0.1 / 0.06 * (libm::cos(0.4) - libm::cos(0.06 * s - 0.2));
        for p in pts.iter().step_by(500) {
            assert!(close(p.theta, if p.s < 10.0 { 0.0 } else { theta(p.s) }, 1e-9));
        }
        let turns = pts.windows(3).filter(|w| (w[1].xi - w[0].xi) * (w[2].xi - w[1].xi) < 0.0).count();
        assert!(turns >= 3, "{turns} lateral reversals");
        let last = pts.last().unwrap();
        assert!(last.eta - pts[0].eta > 80.0);
    }

    #[test]
    fn reconstruction_handles_uneven_step() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let pts = p1.reconstruct(0.7).unwrap();
        assert_eq!(pts.last().unwrap().s, 150.0);
        assert!(pts.windows(2).all(|w| w[1].s > w[0].s));
        assert!(p1.reconstruct(0.0).is_err());
        assert!(p1.reconstruct(-1.0).is_err());
    }

    #[test]
    fn reconstructed_heading_derivative_matches_curvature() {
        let ds = 0.01;
        for id in [PathId::Path1, PathId::Path2] {
            let path = TargetPath::builtin(id);
            let pts = path.reconstruct(ds).unwrap();
            for w in pts.windows(3).step_by(37) {
                let mid = w[1].s;
                if path.segments().iter().any(|seg| (seg.s_start - mid).abs() < 2.0 * ds) {
                    continue;
                }
                let fd = (w[2].theta - w[0].theta) / (2.0 * ds);
                assert!(close(fd, path.curvature(mid).unwrap(), 1e-6), "s = {mid}");
                // The polyline direction agrees with the integrated heading.
                let chord = atan2(w[2].eta - w[0].eta, w[2].xi - w[0].xi);
                let diff = libm::remainder(chord - w[1].theta, 2.0 * PI);
                assert!(diff.abs() < 1e-6);
            }
        }
    }

    #[test]
    fn clamped_lookup_past_the_end() {
        let p1 = TargetPath::builtin(PathId::Path1);
        let (k, r) = p1.curvature_clamped(151.0);
        assert_eq!(k, p1.curvature(150.0).unwrap());
        assert_eq!(r, 0.0);
        assert_eq!(p1.curvature_clamped(20.0), (p1.curvature(20.0).unwrap(), p1.curvature_rate(20.0).unwrap()));
    }

    #[test]
    fn signed_offset_on_straight_line() {
        let line: Vec<PathPoint> = (0..=10)
            .map(|i| PathPoint { s: i as f64, xi: i as f64, eta: 0.0, theta: 0.0 })
            .collect();
        assert!(close(signed_offset(&line, 3.5, 2.0, 0..11).unwrap(), 2.0, 1e-12));
        assert!(close(signed_offset(&line, 3.5, -1.5, 0..11).unwrap(), -1.5, 1e-12));
        assert!(signed_offset(&line, 0.0, 0.0, 4..5).is_none());
    }

    fn any_kind() -> impl Strategy<Value = SegmentKind> {
        (-0.2f64..0.2, 0.01f64..0.5, -3.0f64..3.0, 0u8..3).prop_map(|(c, omega, phi, tag)| match tag {
            0 => SegmentKind::RaisedCosine { c, omega, phi },
            1 => SegmentKind::Sine { c, omega, phi },
            _ => SegmentKind::Constant { c },
        })
    }

    proptest! {
        #[test]
        fn rate_matches_central_difference(kind in any_kind(), s in 1.0f64..200.0) {
            let h = 1e-4;
            let fd = (kind.value(s + h) - kind.value(s - h)) / (2.0 * h);
            let scale = kind.amplitude().max(1e-12);
            prop_assert!((fd - kind.rate(s)).abs() <= 1e-6 * scale);
        }

        #[test]
        fn every_arc_length_has_one_segment(cuts in proptest::collection::vec(0.5f64..20.0, 1..6), u in 0.0f64..1.0) {
            let mut segs = Vec::new();
            let mut s = 0.0;
            for c in &cuts {
                segs.push(CurvatureSegment { s_start: s, s_end: s + c, kind: SegmentKind::Constant { c: *c } });
                s += c;
            }
            let path = TargetPath::new(segs, TargetPath::default_origin()).unwrap();
            let q = u * path.length();
            let covering = path.segments().iter().filter(|seg| seg.s_start <= q && q < seg.s_end).count();
            prop_assert!(covering == 1 || (q == path.length() && covering == 0));
            let seg = path.segment_at(q).unwrap();
            prop_assert!(seg.s_start <= q && q <= seg.s_end);
        }
    }
}
