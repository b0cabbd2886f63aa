#![allow(dead_code)]

use transport_core::fields::{Gaussian, Layer, StreamFunction, VelocityField};
use transport_core::geometry::{Domain, Grid, Point};

pub const CENTER: Point = Point { x: 0.5, y: 0.5 };

pub fn vortex() -> VelocityField {
    let psi = StreamFunction::new(CENTER, 0.3, 0.5).unwrap();
    VelocityField::from_stream_function(Domain::unit_square(), psi).unwrap()
}

pub fn blob() -> Gaussian {
    Gaussian::new(Point::new(0.6, 0.5), 0.08, 1.0).unwrap()
}

pub fn blob_layer(n: usize) -> Layer {
    Layer::sample(Grid::unit_square(n).unwrap(), &blob())
}

/// Angular velocity of the radial vortex at distance `r` from its centre,
/// from ψ = A exp(-1/(1 - r²/R²)) and u = (ψ_y, -ψ_x).
pub fn angular_velocity(r: f64) -> f64 {
    let (a, big_r) = (0.5, 0.3);
    let w = r * r / (big_r * big_r);
    if w >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - w;
    let dpsi_dr = a * (-1.0 / q).exp() * (-2.0 * r / (big_r * big_r)) / (q * q);
    -dpsi_dr / r
}

/// Exact position after time `t` under the autonomous radial vortex.
pub fn rotate(x: Point, t: f64) -> Point {
    let d = x - CENTER;
    let r = d.norm();
    if r == 0.0 {
        return x;
    }
    let th = angular_velocity(r) * t;
    let (s, c) = th.sin_cos();
    Point::new(CENTER.x + c * d.x - s * d.y, CENTER.y + s * d.x + c * d.y)
}
