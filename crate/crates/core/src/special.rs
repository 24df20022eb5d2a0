//! Scalar helpers that stay finite where the textbook forms do not.

/// Below this |x| the Taylor series is used for sinh(x)/x and sin(x)/x.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// sinh(x)/x with sinhc(0) = 1.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// (1 − e^{−x})/x for x ≥ 0, equal to 1 at x = 0.
pub fn one_minus_exp_over(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// asinh(e^{l}) evaluated without forming e^{l} when l is large.
pub fn asinh_exp(l: f64) -> f64 {
    if l > 20.0 {
        l + (1.0 + (1.0 + (-2.0 * l).exp()).sqrt()).ln()
    } else {
        l.exp().asinh()
    }
}

/// ln sinh(x) for x > 0.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

/// asinh(a·sinh(y)/y) for a, y ≥ 0, without overflow for large y.
pub fn asinh_sinhc(a: f64, y: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    if y < 20.0 {
        (a * sinhc(y)).asinh()
    } else {
        asinh_exp(a.ln() - y.ln() + ln_sinh(y))
    }
}

/// Evaluates sums of hyperbolic/exponential terms after dividing everything
/// by e^{m}; ratios of such sums are unchanged.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    m: f64,
}

impl Scaled {
    pub fn new(m: f64) -> Self {
        Scaled { m }
    }

    /// Picks m as the largest |argument|.
    pub fn covering(args: &[f64]) -> Self {
        Scaled { m: args.iter().map(|a| a.abs()).fold(0.0, f64::max) }
    }

    pub fn exp(&self, x: f64) -> f64 {
        (x - self.m).exp()
    }

    pub fn sinh(&self, x: f64) -> f64 {
        0.5 * ((x - self.m).exp() - (-x - self.m).exp())
    }

    pub fn cosh(&self, x: f64) -> f64 {
        0.5 * ((x - self.m).exp() + (-x - self.m).exp())
    }

    /// cosh(x)·e^{y}, scaled.
    pub fn cosh_exp(&self, x: f64, y: f64) -> f64 {
        0.5 * ((x + y - self.m).exp() + (-x + y - self.m).exp())
    }

    /// sinh(x)·e^{y}, scaled.
    pub fn sinh_exp(&self, x: f64, y: f64) -> f64 {
        0.5 * ((x + y - self.m).exp() - (-x + y - self.m).exp())
    }
}
