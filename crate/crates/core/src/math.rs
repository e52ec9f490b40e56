//! Float helpers routed through `libm` so the crate stays `no_std`.

pub const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Wrap an angle into `(-pi, pi]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let mut r = x - TWO_PI * libm::round(x / TWO_PI);
    if r <= -core::f64::consts::PI {
        r += TWO_PI;
    }
    r
}
