//! Profiles of the unified soliton equation
//! `kappa = < lambda x + omega J x + e, n >` and their residuals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::entropy::{gamma_integral, GammaReport, GammaVerdict};
use crate::geometry::{signed_curvature, Curve, Mat2, Topology, Vec2};
use crate::{Error, Result};

/// Curvatures above this magnitude stop the profile integration.
pub const BLOWUP_CURVATURE: f64 = 1e6;

const KIND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum SolitonKind {
    Shrinker,
    Expander,
    Translator,
    Rotator,
    Mixed,
    Custom,
}

/// Vector field `lambda x + omega J x + e` defining a soliton.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolitonSpec {
    pub lambda: f64,
    pub omega: f64,
    pub e: Vec2,
    pub kind: SolitonKind,
}

impl SolitonSpec {
    pub fn shrinker() -> Self {
        SolitonSpec {
            lambda: -0.5,
            omega: 0.0,
            e: Vec2::ZERO,
            kind: SolitonKind::Shrinker,
        }
    }

    pub fn expander() -> Self {
        SolitonSpec {
            lambda: 0.5,
            omega: 0.0,
            e: Vec2::ZERO,
            kind: SolitonKind::Expander,
        }
    }

    pub fn translator(e: Vec2) -> Result<Self> {
        Self::with_kind(0.0, 0.0, e, SolitonKind::Translator)
    }

    pub fn rotator(omega: f64) -> Result<Self> {
        Self::with_kind(0.0, omega, Vec2::ZERO, SolitonKind::Rotator)
    }

    pub fn mixed(lambda: f64, omega: f64) -> Result<Self> {
        Self::with_kind(lambda, omega, Vec2::ZERO, SolitonKind::Mixed)
    }

    /// Any field; the kind is not checked. All zeros is the minimal-curve spec.
    pub fn custom(lambda: f64, omega: f64, e: Vec2) -> Self {
        SolitonSpec {
            lambda,
            omega,
            e,
            kind: SolitonKind::Custom,
        }
    }

    pub fn with_kind(lambda: f64, omega: f64, e: Vec2, kind: SolitonKind) -> Result<Self> {
        let s = SolitonSpec {
            lambda,
            omega,
            e,
            kind,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.omega.is_finite() && self.e.is_finite()) {
            return Err(Error::param("soliton", "non-finite coefficients"));
        }
        let zero = |v: f64| v.abs() <= KIND_TOL;
        let e0 = zero(self.e.norm());
        let ok = match self.kind {
            SolitonKind::Shrinker => self.lambda < 0.0 && zero(self.omega) && e0,
            SolitonKind::Expander => self.lambda > 0.0 && zero(self.omega) && e0,
            SolitonKind::Translator => {
                zero(self.lambda) && zero(self.omega) && (self.e.norm() - 1.0).abs() <= 1e-9
            }
            SolitonKind::Rotator => zero(self.lambda) && e0 && !zero(self.omega),
            SolitonKind::Mixed => !zero(self.lambda) && !zero(self.omega),
            SolitonKind::Custom => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(
                "soliton",
                format!(
                    "coefficients (lambda {}, omega {}, e ({}, {})) do not match kind {:?}",
                    self.lambda, self.omega, self.e.x, self.e.y, self.kind
                ),
            ))
        }
    }

    /// `lambda x + omega J x + e`.
    pub fn field(&self, x: Vec2) -> Vec2 {
        x * self.lambda + x.perp() * self.omega + self.e
    }

    /// Spec solved by `a * c` when `c` solves `self`.
    pub fn scaled(&self, a: f64) -> SolitonSpec {
        SolitonSpec::custom(self.lambda / (a * a), self.omega / (a * a), self.e / a)
    }
}

/// Initial point and tangent angle of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Start {
    pub point: Vec2,
    pub theta: f64,
}

impl Start {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Start {
            point: Vec2::new(x, y),
            theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub curve: Curve,
    /// Arclength at which integration stopped on curvature blow-up.
    pub blowup_arclength: Option<f64>,
}

#[derive(Clone, Copy)]
struct State {
    p: Vec2,
    theta: f64,
}

fn rhs(spec: &SolitonSpec, s: State) -> (Vec2, f64) {
    let t = Vec2::from_angle(s.theta);
    (t, spec.field(s.p).dot(t.perp()))
}

fn rk4(spec: &SolitonSpec, s: State, h: f64) -> State {
    let add = |s: State, (dp, dth): (Vec2, f64), k: f64| State {
        p: s.p + dp * k,
        theta: s.theta + dth * k,
    };
    let k1 = rhs(spec, s);
    let k2 = rhs(spec, add(s, k1, h / 2.0));
    let k3 = rhs(spec, add(s, k2, h / 2.0));
    let k4 = rhs(spec, add(s, k3, h));
    State {
        p: s.p + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0),
        theta: s.theta + (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * (h / 6.0),
    }
}

/// Integrate the profile ODE; returns the sampled points and the blow-up arclength.
fn integrate(spec: &SolitonSpec, start: Start, s_max: f64, ds: f64) -> Result<(Vec<Vec2>, Option<f64>)> {
    spec.validate()?;
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::param("ds", "must be positive"));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::param("s_max", "must be positive"));
    }
    if !(start.point.is_finite() && start.theta.is_finite()) {
        return Err(Error::param("start", "non-finite"));
    }
    let steps = (s_max / ds - 1e-9).ceil().max(1.0) as usize;
    let mut pts = Vec::with_capacity(steps + 1);
    let mut st = State {
        p: start.point,
        theta: start.theta,
    };
    pts.push(st.p);
    let mut s = 0.0;
    for k in 0..steps {
        let h = if k + 1 == steps { s_max - s } else { ds };
        let next = rk4(spec, st, h);
        let kappa = rhs(spec, next).1;
        if !(next.p.is_finite() && kappa.abs() <= BLOWUP_CURVATURE) {
            return Ok((pts, Some(s)));
        }
        st = next;
        s = if k + 1 == steps { s_max } else { s + h };
        pts.push(st.p);
    }
    Ok((pts, None))
}

/// Open profile from `start`, sampled every `ds` in arclength up to `s_max`
/// with the classical Runge–Kutta scheme. A curvature above
/// [`BLOWUP_CURVATURE`] ends the curve early and sets `blowup_arclength`.
pub fn generate(spec: &SolitonSpec, start: Start, s_max: f64, ds: f64) -> Result<Profile> {
    let (pts, blowup) = integrate(spec, start, s_max, ds)?;
    Ok(Profile {
        curve: Curve::open(pts, true)?,
        blowup_arclength: blowup,
    })
}

/// Profile on `[-s_max, s_max]` through `start`; the sample at the start
/// point has index `len / 2` when neither side blows up.
pub fn generate_two_sided(spec: &SolitonSpec, start: Start, s_max: f64, ds: f64) -> Result<Profile> {
    let (fwd, b1) = integrate(spec, start, s_max, ds)?;
    let back_start = Start {
        point: start.point,
        theta: start.theta + core::f64::consts::PI,
    };
    let (mut back, b2) = integrate(spec, back_start, s_max, ds)?;
    back.reverse();
    back.pop();
    back.extend(fwd);
    Ok(Profile {
        curve: Curve::open(back, true)?,
        blowup_arclength: match (b1, b2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
    })
}

/// Closed profile: integrate one period of length `period` with a step that
/// divides it exactly and drop the duplicated endpoint.
pub fn generate_closed(spec: &SolitonSpec, start: Start, period: f64, ds: f64) -> Result<Profile> {
    if !(ds > 0.0) {
        return Err(Error::param("ds", "must be positive"));
    }
    let m = (period / ds).round().max(4.0);
    let (mut pts, blowup) = integrate(spec, start, period, period / m)?;
    if blowup.is_some() {
        return Err(Error::Degenerate("closed profile blew up".into()));
    }
    pts.pop();
    Ok(Profile {
        curve: Curve::closed(pts)?,
        blowup_arclength: None,
    })
}

/// `max |kappa_i - <lambda x_i + omega J x_i + e, n_i>|` over the interior samples.
pub fn residual(curve: &Curve, spec: &SolitonSpec) -> Result<f64> {
    let k = signed_curvature(curve)?;
    Ok(curve
        .interior_range()
        .map(|i| {
            let s = &k[i];
            (s.kappa - spec.field(curve.points()[i]).dot(s.normal)).abs()
        })
        .fold(0.0, f64::max))
}

/// Scale a curve about the origin.
pub fn scale_curve(curve: &Curve, a: f64) -> Result<Curve> {
    curve.with_points(curve.points().iter().map(|&p| p * a).collect())
}

/// Rotate a curve about the origin.
pub fn rotate_curve(curve: &Curve, theta: f64) -> Result<Curve> {
    let r = Mat2::rotation(theta);
    curve.with_points(curve.points().iter().map(|&p| r.mul_vec(p)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// Integrate forward from the start only.
    OneSided,
    /// Integrate both ways from the start, `s_max` per side.
    TwoSided,
    /// Closed curve of total length `s_max`.
    Closed,
}

/// A named profile with its default integration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub spec: SolitonSpec,
    pub start: Start,
    pub s_max: f64,
    pub ds: f64,
    pub layout: Layout,
}

pub const PRESET_NAMES: [&str; 6] = [
    "grim-reaper",
    "shrinker-circle",
    "expander",
    "yin-yang",
    "shrink-rotator",
    "expand-rotator",
];

/// Default parameters for each name in [`PRESET_NAMES`].
///
/// | name | field | start | length |
/// |---|---|---|---|
/// | grim-reaper | `e = (0, 1)` | origin, angle 0 | 40 per side |
/// | shrinker-circle | `lambda = -1/2` | `(sqrt 2, 0)`, angle pi/2 | closed, `2 pi sqrt 2` |
/// | expander | `lambda = 1/2` | `(0, 1)`, angle 0 | 10 per side |
/// | yin-yang | `omega = -1` | origin, angle 0 | 30 per side |
/// | shrink-rotator | `lambda = -1/2, omega = 2` | `(1, 0)`, angle pi/2 | 800 |
/// | expand-rotator | `lambda = 1/2, omega = 2` | `(1, 0)`, angle pi/2 | 120 |
///
/// All use `ds = 1e-3`.
pub fn preset(name: &str) -> Result<Preset> {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let ds = 1e-3;
    let p = match name {
        "grim-reaper" => Preset {
            name: "grim-reaper",
            spec: SolitonSpec::translator(Vec2::new(0.0, 1.0))?,
            start: Start::new(0.0, 0.0, 0.0),
            s_max: 40.0,
            ds,
            layout: Layout::TwoSided,
        },
        "shrinker-circle" => Preset {
            name: "shrinker-circle",
            spec: SolitonSpec::shrinker(),
            start: Start::new(2f64.sqrt(), 0.0, half_pi),
            s_max: 2.0 * core::f64::consts::PI * 2f64.sqrt(),
            ds,
            layout: Layout::Closed,
        },
        "expander" => Preset {
            name: "expander",
            spec: SolitonSpec::expander(),
            start: Start::new(0.0, 1.0, 0.0),
            s_max: 10.0,
            ds,
            layout: Layout::TwoSided,
        },
        "yin-yang" => Preset {
            name: "yin-yang",
            spec: SolitonSpec::rotator(-1.0)?,
            start: Start::new(0.0, 0.0, 0.0),
            s_max: 30.0,
            ds,
            layout: Layout::TwoSided,
        },
        "shrink-rotator" => Preset {
            name: "shrink-rotator",
            spec: SolitonSpec::mixed(-0.5, 2.0)?,
            start: Start::new(1.0, 0.0, half_pi),
            s_max: 800.0,
            ds,
            layout: Layout::OneSided,
        },
        "expand-rotator" => Preset {
            name: "expand-rotator",
            spec: SolitonSpec::mixed(0.5, 2.0)?,
            start: Start::new(1.0, 0.0, half_pi),
            s_max: 120.0,
            ds,
            layout: Layout::OneSided,
        },
        other => {
            let mut known = String::new();
            for (k, n) in PRESET_NAMES.iter().enumerate() {
                if k > 0 {
                    known.push_str(", ");
                }
                known.push_str(n);
            }
            return Err(Error::param(
                "kind",
                format!("unknown preset `{other}` (known: {known})"),
            ));
        }
    };
    Ok(p)
}

impl Preset {
    pub fn generate(&self) -> Result<Profile> {
        self.generate_with(self.s_max, self.ds)
    }

    pub fn generate_with(&self, s_max: f64, ds: f64) -> Result<Profile> {
        match self.layout {
            Layout::OneSided => generate(&self.spec, self.start, s_max, ds),
            Layout::TwoSided => generate_two_sided(&self.spec, self.start, s_max, ds),
            Layout::Closed => generate_closed(&self.spec, self.start, s_max, ds),
        }
    }
}

/// Qualitative properties of a soliton profile relevant to the non-existence
/// results for breathers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CounterexampleReport {
    pub residual: f64,
    /// `kappa` keeps one sign (up to 1e-6) along the sampled window.
    pub weakly_convex: bool,
    /// Same as `weakly_convex` for curves, where `H = kappa`.
    pub weakly_mean_convex: bool,
    pub gamma: f64,
    pub gamma_report: GammaReport,
    pub gamma_ok: bool,
    /// `max |x|` over the outer half of the window is at most 1.05 times the
    /// maximum over the inner half (measured in arclength from the sample
    /// nearest the origin).
    pub bounded_orbit: bool,
}

/// Sign, integrability and boundedness diagnostics of a generated profile.
/// The gamma check uses windows of 1/8, 1/4, 1/2 and all of the longest
/// arclength reach from the sample nearest the origin.
pub fn classify_counterexample(spec: &SolitonSpec, curve: &Curve, gamma: f64) -> Result<CounterexampleReport> {
    let residual = residual(curve, spec)?;
    let k = signed_curvature(curve)?;
    let range = curve.interior_range();
    let kmin = range.clone().map(|i| k[i].kappa).fold(f64::INFINITY, f64::min);
    let kmax = range.map(|i| k[i].kappa).fold(f64::NEG_INFINITY, f64::max);
    let weakly_convex = kmin >= -1e-6 || kmax <= 1e-6;

    let s = curve.arclength_params();
    let pts = curve.points();
    let anchor = nearest_to_origin(pts);
    let reach = match curve.topology() {
        Topology::Open => (s[anchor] - s[0]).max(s[s.len() - 1] - s[anchor]),
        Topology::Closed => curve.length() / 2.0,
    };
    let windows = [reach / 8.0, reach / 4.0, reach / 2.0, reach];
    let gamma_report = gamma_integral(curve, gamma, &windows)?;
    let gamma_ok = gamma_report.verdict == GammaVerdict::Convergent;

    let dist = |i: usize| match curve.topology() {
        Topology::Open => (s[i] - s[anchor]).abs(),
        Topology::Closed => {
            let d = (s[i] - s[anchor]).abs();
            d.min(curve.length() - d)
        }
    };
    let mut inner = 0.0f64;
    let mut outer = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        if dist(i) <= reach / 2.0 {
            inner = inner.max(p.norm());
        } else {
            outer = outer.max(p.norm());
        }
    }
    Ok(CounterexampleReport {
        residual,
        weakly_convex,
        weakly_mean_convex: weakly_convex,
        gamma,
        gamma_report,
        gamma_ok,
        bounded_orbit: outer <= 1.05 * inner,
    })
}

pub(crate) fn nearest_to_origin(pts: &[Vec2]) -> usize {
    let mut best = 0;
    for (i, p) in pts.iter().enumerate() {
        if p.norm_sq() < pts[best].norm_sq() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn kind_consistency() {
        assert!(SolitonSpec::with_kind(0.5, 0.0, Vec2::ZERO, SolitonKind::Shrinker).is_err());
        assert!(SolitonSpec::translator(Vec2::new(0.0, 2.0)).is_err());
        assert!(SolitonSpec::rotator(0.0).is_err());
        assert!(SolitonSpec::mixed(0.0, 1.0).is_err());
        assert!(SolitonSpec::mixed(-0.5, 2.0).is_ok());
    }

    #[test]
    fn grim_reaper_matches_closed_form() {
        let spec = SolitonSpec::translator(Vec2::new(0.0, 1.0)).unwrap();
        let p = generate(&spec, Start::new(0.0, 0.0, 0.0), 2.8, 1e-3).unwrap();
        assert!(p.blowup_arclength.is_none());
        for q in p.curve.points() {
            assert!((q.y + q.x.cos().ln()).abs() < 1e-6, "{q:?}");
        }
        assert!(residual(&p.curve, &spec).unwrap() < 1e-6);
    }

    #[test]
    fn shrinker_closes_on_its_circle() {
        let spec = SolitonSpec::shrinker();
        let l = 2.0 * PI * 2f64.sqrt();
        let p = generate(&spec, Start::new(2f64.sqrt(), 0.0, PI / 2.0), l, 1e-3).unwrap();
        let pts = p.curve.points();
        assert!(pts[pts.len() - 1].distance(pts[0]) < 1e-5);
    }

    #[test]
    fn rk4_endpoint_error_is_fourth_order() {
        let spec = SolitonSpec::shrinker();
        let l = 2.0 * PI * 2f64.sqrt();
        let start = Start::new(2f64.sqrt(), 0.0, PI / 2.0);
        let err = |m: f64| {
            let p = generate(&spec, start, l, l / m).unwrap();
            let pts = p.curve.points();
            pts[pts.len() - 1].distance(pts[0])
        };
        let ratio = err(40.0) / err(80.0);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn residual_of_wrong_circle() {
        let c = Curve::circle(Vec2::ZERO, 1.0, 1024).unwrap();
        let r = residual(&c, &SolitonSpec::shrinker()).unwrap();
        assert!((r - 0.5).abs() < 1e-3);
    }

    #[test]
    fn blowup_is_marked() {
        // kappa = 1.5e6 cos(theta) passes the cap as the tangent turns toward angle 0
        let spec = SolitonSpec::custom(0.0, 0.0, Vec2::new(0.0, 1.5e6));
        let p = generate(&spec, Start::new(0.0, 0.0, -PI / 2.0 + 0.1), 1e-5, 1e-8).unwrap();
        let s = p.blowup_arclength.expect("blow-up marker");
        assert!(s > 0.0 && s < 1e-5);
        assert!(p.curve.len() < 1001);
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(preset("catenary").is_err());
        for name in PRESET_NAMES {
            assert_eq!(preset(name).unwrap().name, name);
        }
    }
}
