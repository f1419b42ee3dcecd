//! Float math shims for `no_std` builds.
//!
//! Exactly-rounded IEEE operations (sqrt, floor, ceil) may use the std
//! intrinsics when available since libm and the intrinsic produce identical
//! bits. Transcendentals always go through libm so that results do not
//! depend on the platform's libm.

#[inline(always)]
pub fn sqrt(x: f64) -> f64 {
    #[cfg(any(test, feature = "std"))]
    {
        x.sqrt()
    }
    #[cfg(not(any(test, feature = "std")))]
    {
        libm::sqrt(x)
    }
}

#[inline(always)]
pub fn floor(x: f64) -> f64 {
    #[cfg(any(test, feature = "std"))]
    {
        x.floor()
    }
    #[cfg(not(any(test, feature = "std")))]
    {
        libm::floor(x)
    }
}

#[inline(always)]
pub fn ceil(x: f64) -> f64 {
    #[cfg(any(test, feature = "std"))]
    {
        x.ceil()
    }
    #[cfg(not(any(test, feature = "std")))]
    {
        libm::ceil(x)
    }
}

#[inline(always)]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline(always)]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline(always)]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline(always)]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline(always)]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline(always)]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline(always)]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline(always)]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[inline(always)]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}
