//! Ordinary least squares on straight lines, used for log-log exponent fits.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals.
    pub rms_residual: f64,
    pub n_points: usize,
    /// Abscissa range actually used.
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitError {
    TooFewPoints { needed: usize, got: usize },
    /// All abscissae coincide.
    Degenerate,
    NonFinite,
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewPoints { needed, got } => {
                write!(f, "fit window has {got} points, need at least {needed}")
            }
            Self::Degenerate => f.write_str("fit abscissae are all equal"),
            Self::NonFinite => f.write_str("non-finite value in fit window"),
        }
    }
}

impl core::error::Error for FitError {}

pub const MIN_FIT_POINTS: usize = 5;

/// Least squares line through `(x, y)` pairs.
pub fn fit_line<I>(points: I) -> Result<LineFit, FitError>
where
    I: IntoIterator<Item = (f64, f64)> + Clone,
{
    let mut n = 0usize;
    let (mut sx, mut sy) = (0.0, 0.0);
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in points.clone() {
        if !x.is_finite() || !y.is_finite() {
            return Err(FitError::NonFinite);
        }
        n += 1;
        sx += x;
        sy += y;
        x_min = x_min.min(x);
        x_max = x_max.max(x);
    }
    if n < MIN_FIT_POINTS {
        return Err(FitError::TooFewPoints { needed: MIN_FIT_POINTS, got: n });
    }
    let mx = sx / n as f64;
    let my = sy / n as f64;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in points.clone() {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in points {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: libm::sqrt(ss / n as f64),
        n_points: n,
        x_min,
        x_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: [(f64, f64); 6] = core::array::from_fn(|i| (i as f64, 3.0 * i as f64 - 2.0));
        let fit = fit_line(pts.iter().copied()).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-14);
        assert!((fit.intercept + 2.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
        assert_eq!((fit.x_min, fit.x_max), (0.0, 5.0));
    }

    #[test]
    fn too_few_and_degenerate() {
        let pts = [(0.0, 1.0), (1.0, 2.0)];
        assert!(matches!(fit_line(pts.iter().copied()), Err(FitError::TooFewPoints { .. })));
        let pts = [(1.0, 1.0); 6];
        assert_eq!(fit_line(pts.iter().copied()), Err(FitError::Degenerate));
        let pts = [(0.0, f64::NAN); 6];
        assert_eq!(fit_line(pts.iter().copied()), Err(FitError::NonFinite));
    }
}
