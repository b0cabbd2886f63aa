//! Product-form space-time test functions `φ(x, t) = ψ(t) φ(x)`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Point, Vec2};
use crate::math;

use super::kernel::linear_bump_mass;
use super::velocity::bump_of_square;

/// Spatial bump `amplitude · exp(-1/(1 - |x - c|²/r²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpatialBump {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

impl SpatialBump {
    pub fn new(domain: &Domain, center: Point, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("radius", alloc::format!("must be positive, got {radius}")));
        }
        let margin = domain.dist_to_boundary(center) - radius;
        if domain.locate(center) != crate::geometry::Location::Interior || !(margin > 0.0) {
            return Err(Error::SupportViolation {
                what: "test function",
                margin,
            });
        }
        Ok(SpatialBump {
            center,
            radius,
            amplitude,
        })
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        let w = (p - self.center).norm_squared() / (self.radius * self.radius);
        self.amplitude * bump_of_square(w)
    }

    #[inline]
    pub fn gradient(&self, p: Point) -> Vec2 {
        let d = p - self.center;
        let r2 = self.radius * self.radius;
        let w = d.norm_squared() / r2;
        if w >= 1.0 {
            return Vec2::ZERO;
        }
        let q = 1.0 - w;
        d * (-2.0 * self.amplitude * math::exp(-1.0 / q) / (q * q * r2))
    }

    /// Bounding square of the support.
    pub fn support_box(&self) -> Domain {
        Domain::new(
            self.center.x - self.radius,
            self.center.y - self.radius,
            self.center.x + self.radius,
            self.center.y + self.radius,
        )
        .expect("positive radius")
    }

    /// Distance from the support to the boundary of `domain`.
    pub fn margin_in(&self, domain: &Domain) -> f64 {
        domain.dist_to_boundary(self.center) - self.radius
    }
}

/// Temporal factor ψ(t).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TimeProfile {
    /// `(1 - t/T)²`.
    Quadratic { t_final: f64 },
    /// `(1 - t/T)² (1 + 2t/T)`; also has `ψ′(T) = 0`.
    Smoothstep { t_final: f64 },
    /// Unit-mass bump of half-width `width` centred at `center`.
    Pulse { center: f64, width: f64, norm: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Quadratic { t_final } => {
                let s = 1.0 - t / t_final;
                s * s
            }
            TimeProfile::Smoothstep { t_final } => {
                let r = t / t_final;
                let s = 1.0 - r;
                s * s * (1.0 + 2.0 * r)
            }
            TimeProfile::Pulse { center, width, norm } => {
                let z = (t - center) / width;
                norm / width * bump_of_square(z * z)
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Quadratic { t_final } => -2.0 * (1.0 - t / t_final) / t_final,
            TimeProfile::Smoothstep { t_final } => {
                let r = t / t_final;
                -6.0 * r * (1.0 - r) / t_final
            }
            TimeProfile::Pulse { center, width, norm } => {
                let z = (t - center) / width;
                let w = z * z;
                if w >= 1.0 {
                    return 0.0;
                }
                let q = 1.0 - w;
                norm / width * math::exp(-1.0 / q) * (-2.0 * z / (q * q)) / width
            }
        }
    }

    /// `∫ ψ(t) f(t) dt` by fine Simpson quadrature over the support of a
    /// pulse; intended for the Dirac family.
    pub fn smear(&self, f: impl Fn(f64) -> f64) -> f64 {
        match *self {
            TimeProfile::Pulse { center, width, .. } => math::simpson(center - width, center + width, 4000, |t| {
                self.value(t) * f(t)
            }),
            TimeProfile::Quadratic { t_final } | TimeProfile::Smoothstep { t_final } => {
                math::simpson(0.0, t_final, 4000, |t| self.value(t) * f(t))
            }
        }
    }
}

/// `φ(x, t) = ψ(t) φ(x)` with compact support in `Ω × [0, T)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestFunction {
    pub spatial: SpatialBump,
    pub temporal: TimeProfile,
}

impl TestFunction {
    #[inline]
    pub fn eval(&self, p: Point, t: f64) -> f64 {
        self.temporal.value(t) * self.spatial.eval(p)
    }

    #[inline]
    pub fn time_derivative(&self, p: Point, t: f64) -> f64 {
        self.temporal.derivative(t) * self.spatial.eval(p)
    }

    #[inline]
    pub fn gradient(&self, p: Point, t: f64) -> Vec2 {
        self.spatial.gradient(p) * self.temporal.value(t)
    }

    pub fn label(&self) -> alloc::string::String {
        let kind = match self.temporal {
            TimeProfile::Quadratic { .. } => "quadratic",
            TimeProfile::Smoothstep { .. } => "smoothstep",
            TimeProfile::Pulse { .. } => "pulse",
        };
        alloc::format!(
            "bump(c=({},{}),r={})x{kind}",
            self.spatial.center.x,
            self.spatial.center.y,
            self.spatial.radius
        )
    }
}

/// Build a product test function; the ball must sit strictly inside the
/// domain and the temporal factor must vanish at `t_final`.
pub fn make_test_function(
    domain: &Domain,
    center: Point,
    radius: f64,
    profile: TimeProfile,
    t_final: f64,
) -> Result<TestFunction> {
    let spatial = SpatialBump::new(domain, center, radius, 1.0)?;
    if math::abs(profile.value(t_final)) > 1e-14 {
        return Err(invalid("time profile", "must vanish at the final time"));
    }
    Ok(TestFunction {
        spatial,
        temporal: profile,
    })
}

/// Unit-mass pulses at `t0` with half-widths `width, width/2, …`
/// (`levels` members), all supported inside `(0, t_final)`.
pub fn dirac_time_family(t0: f64, width: f64, t_final: f64, levels: usize) -> Result<Vec<TimeProfile>> {
    if !(width > 0.0) || !(t0 - width > 0.0) || !(t0 + width < t_final) {
        return Err(invalid(
            "width",
            alloc::format!("window [{}, {}] must lie inside (0, {t_final})", t0 - width, t0 + width),
        ));
    }
    let norm = 1.0 / linear_bump_mass();
    Ok((0..levels.max(1))
        .map(|l| TimeProfile::Pulse {
            center: t0,
            width: width / (1u64 << l) as f64,
            norm,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_outside_ball() {
        let d = Domain::unit_square();
        let f = make_test_function(&d, Point::new(0.5, 0.5), 0.2, TimeProfile::Quadratic { t_final: 1.0 }, 1.0)
            .unwrap();
        let far = Point::new(0.8, 0.5);
        assert_eq!(f.eval(far, 0.3), 0.0);
        assert_eq!(f.gradient(far, 0.3), Vec2::ZERO);
    }

    #[test]
    fn quadratic_profile_endpoints() {
        let p = TimeProfile::Quadratic { t_final: 2.0 };
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(2.0), 0.0);
    }

    #[test]
    fn support_violation_rejected() {
        let d = Domain::unit_square();
        let r = make_test_function(&d, Point::new(0.1, 0.5), 0.2, TimeProfile::Quadratic { t_final: 1.0 }, 1.0);
        assert!(matches!(r, Err(Error::SupportViolation { .. })));
    }

    #[test]
    fn profile_must_vanish_at_final_time() {
        let d = Domain::unit_square();
        let pulse = dirac_time_family(0.5, 0.1, 1.0, 1).unwrap()[0];
        assert!(make_test_function(&d, Point::new(0.5, 0.5), 0.2, pulse, 1.0).is_ok());
        let wrong = TimeProfile::Quadratic { t_final: 2.0 };
        assert!(make_test_function(&d, Point::new(0.5, 0.5), 0.2, wrong, 1.0).is_err());
    }

    #[test]
    fn time_derivatives_match_finite_differences() {
        let h = 1e-6;
        for p in [
            TimeProfile::Quadratic { t_final: 1.0 },
            TimeProfile::Smoothstep { t_final: 1.0 },
            dirac_time_family(0.5, 0.2, 1.0, 1).unwrap()[0],
        ] {
            for t in [0.37, 0.5, 0.61] {
                let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
                assert!((fd - p.derivative(t)).abs() < 1e-6 * (1.0 + fd.abs()), "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn dirac_family_is_unit_mass_and_recovers_constants() {
        let fam = dirac_time_family(0.5, 0.05, 1.0, 3).unwrap();
        assert_eq!(fam.len(), 3);
        for p in &fam {
            assert!((p.smear(|_| 1.0) - 1.0).abs() < 1e-8);
            assert!((p.smear(|_| 3.5) - 3.5).abs() < 1e-8);
            assert!(p.value(0.5) >= 0.0);
        }
        let p = dirac_time_family(0.5, 0.01, 1.0, 1).unwrap()[0];
        assert!((p.smear(|t| t) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn dirac_window_must_fit() {
        assert!(dirac_time_family(0.05, 0.1, 1.0, 1).is_err());
        assert!(dirac_time_family(0.95, 0.1, 1.0, 1).is_err());
    }
}
