//! Standard mollifier `η(x) = Z exp(-1/(1-|x|²))` and its rescalings
//! `η_ε(x) = ε⁻² η(x/ε)`.

use crate::error::{invalid, Result};
use crate::geometry::{Point, Vec2};
use crate::math;

use super::velocity::bump_of_square;

/// `∫_{R²} exp(-1/(1-|x|²)) dx = 2π ∫_0^1 exp(-1/(1-r²)) r dr`.
fn radial_bump_mass() -> f64 {
    2.0 * core::f64::consts::PI * math::simpson(0.0, 1.0, 20_000, |r| bump_of_square(r * r) * r)
}

/// `∫_{-1}^{1} exp(-1/(1-s²)) ds`.
pub(crate) fn linear_bump_mass() -> f64 {
    math::simpson(-1.0, 1.0, 20_000, |s| bump_of_square(s * s))
}

/// Unit-mass base profile; the normalising constant is computed once
/// and shared by every [`Kernel`] built from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpProfile {
    normalization: f64,
}

impl BumpProfile {
    pub fn standard() -> Self {
        BumpProfile {
            normalization: 1.0 / radial_bump_mass(),
        }
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    #[inline]
    pub fn eval(&self, z: Vec2) -> f64 {
        self.normalization * bump_of_square(z.norm_squared())
    }

    #[inline]
    pub fn gradient(&self, z: Vec2) -> Vec2 {
        let w = z.norm_squared();
        if w >= 1.0 {
            return Vec2::ZERO;
        }
        let q = 1.0 - w;
        z * (-2.0 * self.normalization * math::exp(-1.0 / q) / (q * q))
    }
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile::standard()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    profile: BumpProfile,
    eps: f64,
}

impl Kernel {
    pub fn new(profile: BumpProfile, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(invalid("eps", alloc::format!("kernel scale must be positive, got {eps}")));
        }
        Ok(Kernel { profile, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        self.profile.eval(x * (1.0 / self.eps)) / (self.eps * self.eps)
    }

    /// `∇η_ε(x) = ε⁻³ (∇η)(x/ε)`.
    #[inline]
    pub fn gradient(&self, x: Point) -> Vec2 {
        self.profile.gradient(x * (1.0 / self.eps)) * (1.0 / (self.eps * self.eps * self.eps))
    }
}

/// Build `η_ε` from `profile`.
pub fn make_kernel(profile: &BumpProfile, eps: f64) -> Result<Kernel> {
    Kernel::new(*profile, eps)
}
