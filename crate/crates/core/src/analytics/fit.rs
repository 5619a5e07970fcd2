use crate::error::{Error, Result};

/// Least-squares fit of `ln y = intercept + exponent * ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub samples: usize,
}

pub fn fit_power_exponent(samples: &[(f64, f64)]) -> Result<PowerFit> {
    if samples.len() < 3 {
        return Err(Error::param(format!(
            "need at least 3 samples for a power fit, got {}",
            samples.len()
        )));
    }
    if let Some(&(x, y)) = samples
        .iter()
        .find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::param(format!("non-positive sample ({x}, {y})")));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON * m {
        return Err(Error::param("power fit needs distinct x values"));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum();
    let stderr = (sse / (m - 2.0) / sxx).sqrt();
    Ok(PowerFit {
        exponent,
        stderr,
        intercept,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_law() {
        let s: Vec<_> = (1..=5).map(|x| (x as f64, (x * x) as f64)).collect();
        let fit = fit_power_exponent(&s).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-7);
    }

    #[test]
    fn inverse_root() {
        let s: Vec<_> = [1.0, 10.0, 100.0, 1e4].iter().map(|&x: &f64| (x, 3.0 / x.sqrt())).collect();
        assert!((fit_power_exponent(&s).unwrap().exponent + 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_power_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_exponent(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(fit_power_exponent(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_planted_exponent(k in -3.0f64..3.0, c in 0.01f64..100.0, x0 in 0.1f64..10.0) {
            let s: Vec<_> = (0..8).map(|i| {
                let x = x0 * 1.7f64.powi(i);
                (x, c * x.powf(k))
            }).collect();
            let fit = fit_power_exponent(&s).unwrap();
            prop_assert!((fit.exponent - k).abs() < 1e-6);
            prop_assert!((fit.intercept - c.ln()).abs() < 1e-6);
        }
    }
}
