//! Change of unknowns `f = K^2`, `G = ln f`, `V = G - e^G`, the inverse map
//! `Q(V)` and the extended right-hand side `R(V)`.
//!
//! Every routine here also has an "offset" variant taking `w = V + 1`
//! instead of `V`. The solution approaches the equilibrium `V = -1`
//! exponentially as `s -> -inf`, and `V` itself cannot resolve `V + 1`
//! below ~1e-16; the integrators therefore carry `w` as their state.

use core::fmt;

/// Default residual tolerance for [`q_inverse`].
pub const DEFAULT_Q_TOL: f64 = 1e-13;

/// Below this distance from `V = -1` the Newton seed switches to the
/// quadratic series `V = -1 - G^2/2 + O(G^3)`.
pub const SERIES_SEED_THRESHOLD: f64 = 1e-4;

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformError {
    /// `G` must be strictly negative.
    GOutOfDomain(f64),
    /// `V` must lie strictly below `-1`.
    VOutOfDomain(f64),
    NoConvergence { v: f64, last_g: f64, residual: f64 },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GOutOfDomain(g) => write!(f, "G = {g} is outside (-inf, 0)"),
            Self::VOutOfDomain(v) => write!(f, "V = {v} is outside (-inf, -1)"),
            Self::NoConvergence { v, last_g, residual } => write!(
                f,
                "Q(V) did not converge for V = {v} (last G = {last_g}, residual {residual:e})"
            ),
        }
    }
}

impl core::error::Error for TransformError {}

/// `G = ln(K^2)`, strictly negative on the physical branch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GValue(f64);

impl GValue {
    pub fn new(value: f64) -> Result<Self, TransformError> {
        if value < 0.0 {
            Ok(Self(value))
        } else {
            Err(TransformError::GOutOfDomain(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `K = +sqrt(e^G)`.
    pub fn k(self) -> f64 {
        libm::exp(0.5 * self.0)
    }
}

/// `V = G - e^G`, strictly below `-1` on the physical branch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct VValue(f64);

impl VValue {
    pub fn new(value: f64) -> Result<Self, TransformError> {
        if value < -1.0 {
            Ok(Self(value))
        } else {
            Err(TransformError::VOutOfDomain(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `V(G) = G - e^G`.
pub fn v_of_g(g: GValue) -> VValue {
    VValue(g.0 - libm::exp(g.0))
}

/// `V(G) = G - e^G`, rejecting `G >= 0`.
pub fn try_v_of_g(g: f64) -> Result<VValue, TransformError> {
    GValue::new(g).map(v_of_g)
}

/// `psi(G) = V(G) + 1 = G - expm1(G)`, evaluated without cancellation for
/// small `|G|`.
pub fn offset_of_g(g: f64) -> f64 {
    if g.abs() < 0.1 {
        // -(G^2/2! + G^3/3! + ...); |G|^k/k! < 1e-19 by k = 14.
        let mut term = 0.5 * g * g;
        let mut sum = term;
        let mut k = 3.0;
        while k < 16.0 {
            term *= g / k;
            sum += term;
            k += 1.0;
        }
        -sum
    } else {
        g - libm::expm1(g)
    }
}

/// Inverse `Q(V)` of `G -> G - e^G` on `G < 0`.
///
/// Safeguarded Newton iteration with the bracket `[V - 1, V]`, seeded by the
/// quadratic series close to `V = -1`.
pub fn q_inverse(v: VValue, tol: f64) -> Result<GValue, TransformError> {
    // v + 1 is exact for v in [-2, -1] and rounds harmlessly elsewhere.
    q_of_offset(v.0 + 1.0, tol).map_err(|e| match e {
        TransformError::NoConvergence { last_g, residual, .. } => {
            TransformError::NoConvergence { v: v.0, last_g, residual }
        }
        TransformError::VOutOfDomain(_) => TransformError::VOutOfDomain(v.0),
        other => other,
    })
}

/// `Q` evaluated from the offset `w = V + 1 < 0`.
///
/// Converges to full double precision in `G`; `tol` is the acceptance bound
/// on `|psi(G) - w|`.
pub fn q_of_offset(w: f64, tol: f64) -> Result<GValue, TransformError> {
    if !(w < 0.0) {
        return Err(TransformError::VOutOfDomain(w - 1.0));
    }
    if w == f64::NEG_INFINITY {
        return Ok(GValue(f64::NEG_INFINITY));
    }
    let mut lo = w - 1.0;
    let mut hi = w;
    let mut g = if w > -SERIES_SEED_THRESHOLD {
        -libm::sqrt(-2.0 * w)
    } else {
        let v = w - 1.0;
        v + libm::exp(v)
    };
    if !(g > lo && g < hi) {
        g = 0.5 * (lo + hi);
    }

    for _ in 0..MAX_ITERATIONS {
        let r = offset_of_g(g) - w;
        if r == 0.0 {
            return Ok(GValue(g));
        }
        if r < 0.0 {
            lo = g;
        } else {
            hi = g;
        }
        let slope = -libm::expm1(g);
        let mut next = g - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - g).abs();
        g = next;
        if step <= 2.0 * f64::EPSILON * g.abs() || lo == hi {
            break;
        }
    }

    let residual = (offset_of_g(g) - w).abs();
    if residual < tol.max(4.0 * f64::EPSILON * w.abs()) && g < 0.0 {
        Ok(GValue(g))
    } else {
        Err(TransformError::NoConvergence { v: w - 1.0, last_g: g, residual })
    }
}

/// `G = Q(w - 1)` with the default tolerance, falling back to the
/// asymptotic form if the iteration ever fails.
fn g_of_offset(w: f64) -> f64 {
    match q_of_offset(w, DEFAULT_Q_TOL) {
        Ok(g) => g.0,
        Err(_) if w < -1.0 => w - 1.0,
        Err(_) => -libm::sqrt(-2.0 * w),
    }
}

/// Extended right-hand side
/// `R(V) = -2 (1 - e^{Q(V)})^2` for `V < -1`, `4 (V + 1)` otherwise.
pub fn rhs_r(v: f64) -> f64 {
    rhs_r_offset(v + 1.0)
}

/// [`rhs_r`] as a function of `w = V + 1`.
pub fn rhs_r_offset(w: f64) -> f64 {
    if w >= 0.0 {
        4.0 * w
    } else {
        let e = libm::expm1(g_of_offset(w));
        -2.0 * e * e
    }
}

/// `dR/dV`: `4 e^{Q(V)}` below `-1`, `4` at and above. Positive everywhere.
pub fn derivative_r(v: f64) -> f64 {
    derivative_r_offset(v + 1.0)
}

pub fn derivative_r_offset(w: f64) -> f64 {
    if w >= 0.0 {
        4.0
    } else {
        4.0 * libm::exp(g_of_offset(w))
    }
}
