//! Renormalisation nonlinearities β.
//!
//! The admissible class is C¹ with β and β′ bounded. The hard clip
//! [`Beta::Clip`] is not C¹ and is kept as the target that
//! [`Beta::SmoothClip`] approximates.

use crate::error::{invalid, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Beta {
    /// `s` clipped to `[-m, m]`.
    Clip { m: f64 },
    /// Clip with both corners replaced by tangent parabolas of
    /// half-width `min(1/k, m)`.
    SmoothClip { m: f64, k: u32 },
    /// C¹ minorant of `|s|^p ∧ m`, increasing in `k`.
    BoundedPower { p: f64, m: f64, k: u32 },
    Constant(f64),
}

pub fn beta_truncation(m: f64) -> Result<Beta> {
    check_level(m)?;
    Ok(Beta::Clip { m })
}

pub fn beta_smooth_approx(m: f64, k: u32) -> Result<Beta> {
    check_level(m)?;
    check_k(k)?;
    Ok(Beta::SmoothClip { m, k })
}

pub fn beta_bounded_power(p: f64, m: f64, k: u32) -> Result<Beta> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must lie in (1, inf), got {p}")));
    }
    check_level(m)?;
    check_k(k)?;
    Ok(Beta::BoundedPower { p, m, k })
}

fn check_level(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid("M", alloc::format!("must be positive, got {m}")));
    }
    Ok(())
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    Ok(())
}

/// Rounded clip of a value `v` at level `m` with corner half-width `d`:
/// identity below `m - d`, the parabola `m - (m + d - v)²/(4d)` on
/// `[m - d, m + d]`, and `m` above.
#[inline]
fn rounded(v: f64, m: f64, d: f64) -> (f64, f64) {
    if v <= m - d {
        (v, 1.0)
    } else if v >= m + d {
        (m, 0.0)
    } else {
        let e = m + d - v;
        (m - e * e / (4.0 * d), e / (2.0 * d))
    }
}

impl Beta {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Beta::Clip { m } => s.clamp(-m, m),
            Beta::SmoothClip { m, k } => {
                let d = corner_width(m, k);
                let (v, _) = rounded(math::abs(s), m, d);
                if s < 0.0 {
                    -v
                } else {
                    v
                }
            }
            Beta::BoundedPower { p, m, k } => {
                let d = corner_width(m, k);
                rounded(math::pow(math::abs(s), p), m, d).0
            }
            Beta::Constant(c) => c,
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Beta::Clip { m } => {
                if math::abs(s) <= m {
                    1.0
                } else {
                    0.0
                }
            }
            Beta::SmoothClip { m, k } => rounded(math::abs(s), m, corner_width(m, k)).1,
            Beta::BoundedPower { p, m, k } => {
                let a = math::abs(s);
                let (_, dg) = rounded(math::pow(a, p), m, corner_width(m, k));
                let dv = p * math::pow(a, p - 1.0);
                if s < 0.0 {
                    -dg * dv
                } else {
                    dg * dv
                }
            }
            Beta::Constant(_) => 0.0,
        }
    }

    pub fn is_c1(&self) -> bool {
        !matches!(self, Beta::Clip { .. })
    }

    /// Upper bound on `C_β = sup|β| + sup|β′|`.
    pub fn bound(&self) -> f64 {
        match *self {
            Beta::Clip { m } | Beta::SmoothClip { m, .. } => m + 1.0,
            Beta::BoundedPower { p, m, k } => {
                let d = corner_width(m, k);
                m + p * math::pow(m + d, (p - 1.0) / p)
            }
            Beta::Constant(c) => math::abs(c),
        }
    }

    /// Short name used in reports.
    pub fn label(&self) -> alloc::string::String {
        match *self {
            Beta::Clip { m } => alloc::format!("clip(M={m})"),
            Beta::SmoothClip { m, k } => alloc::format!("smooth-clip(M={m},k={k})"),
            Beta::BoundedPower { p, m, k } => alloc::format!("bounded-power(p={p},M={m},k={k})"),
            Beta::Constant(c) => alloc::format!("constant({c})"),
        }
    }
}

#[inline]
fn corner_width(m: f64, k: u32) -> f64 {
    (1.0 / k as f64).min(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_examples() {
        let b = beta_truncation(1.0).unwrap();
        assert_eq!(b.value(2.0), 1.0);
        assert_eq!(b.value(-0.5), -0.5);
        assert_eq!(b.value(-3.0), -1.0);
        assert!(!b.is_c1());
    }

    #[test]
    fn smooth_clip_is_odd_and_zero_at_origin() {
        for (m, k) in [(1.0, 10), (0.3, 1), (5.0, 3)] {
            let b = beta_smooth_approx(m, k).unwrap();
            assert_eq!(b.value(0.0), 0.0);
            for s in [0.1, 0.9, 1.05, 7.0] {
                assert_eq!(b.value(-s), -b.value(s));
            }
        }
    }

    #[test]
    fn smooth_clip_sup_deviation() {
        let b = beta_smooth_approx(1.0, 10).unwrap();
        let clip = beta_truncation(1.0).unwrap();
        let dev = (-40_000..=40_000)
            .map(|i| i as f64 * 1e-4)
            .map(|s| (b.value(s) - clip.value(s)).abs())
            .fold(0.0, f64::max);
        assert!(dev < 0.1);
        assert!((dev - 0.025).abs() < 1e-6);
    }

    #[test]
    fn smooth_clip_derivative_continuous_at_corner_ends() {
        let b = beta_smooth_approx(1.0, 10).unwrap();
        let h = 1e-7;
        for s in [0.9, 1.0, 1.1] {
            let left = (b.value(s) - b.value(s - h)) / h;
            let right = (b.value(s + h) - b.value(s)) / h;
            assert!((left - right).abs() < 1e-6, "jump at {s}: {left} vs {right}");
        }
    }

    #[test]
    fn bounded_power_examples() {
        let b = beta_bounded_power(2.0, 4.0, 1000).unwrap();
        assert_eq!(b.value(0.0), 0.0);
        assert!((b.value(1.0) - 1.0).abs() < 1e-3);
        assert!((b.value(10.0) - 4.0).abs() < 1e-3);
        assert!((b.value(-10.0) - 4.0).abs() < 1e-3);
        assert!(beta_bounded_power(1.0, 4.0, 3).is_err());
    }

    #[test]
    fn bounded_power_increases_with_k() {
        let samples: alloc::vec::Vec<f64> = (0..400).map(|i| i as f64 * 0.01 - 2.0).collect();
        for w in [1u32, 2, 5, 10, 50].windows(2) {
            let lo = beta_bounded_power(2.0, 1.5, w[0]).unwrap();
            let hi = beta_bounded_power(2.0, 1.5, w[1]).unwrap();
            for &s in &samples {
                assert!(lo.value(s) <= hi.value(s) + 1e-15);
                assert!(hi.value(s) <= (s * s).min(1.5) + 1e-15);
            }
        }
    }

    #[test]
    fn bound_dominates_sampled_sup() {
        let betas = [
            beta_smooth_approx(1.0, 10).unwrap(),
            beta_bounded_power(2.0, 4.0, 10).unwrap(),
            beta_bounded_power(3.5, 0.2, 1).unwrap(),
            Beta::Constant(-2.0),
        ];
        for b in betas {
            let mut sv: f64 = 0.0;
            let mut sd: f64 = 0.0;
            for i in -100_000..=100_000 {
                let s = i as f64 * 1e-3;
                sv = sv.max(b.value(s).abs());
                sd = sd.max(b.derivative(s).abs());
            }
            assert!(sv + sd <= b.bound() + 1e-12, "{:?}", b);
        }
    }
}
