use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::FrontPoint;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const STEP_TOL: f64 = 1e-10;

/// Parameters of `y = a1 * exp(-x / t1) + y0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a1: f64,
    pub t1: f64,
    pub y0: f64,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ExpFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a1 * (-x / self.t1).exp() + self.y0
    }
}

fn sse(xs: &[f64], ys: &[f64], p: &Vector3<f64>) -> f64 {
    let t1 = p[1].exp();
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = p[0] * (-x / t1).exp() + p[2] - y;
            r * r
        })
        .sum()
}

/// Damped Gauss-Newton (Levenberg-Marquardt) least-squares fit of an
/// exponential decay through the points `(g1, g2)`. The time constant is
/// optimized in log space so it stays positive.
pub fn fit_exp_decay(points: &[FrontPoint]) -> Result<ExpFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.g[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.g[1]).collect();
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let (ymin, ymax) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let t_init = if xmax > xmin {
        (xmax - xmin) / 2.0
    } else {
        1.0
    };

    let mut p = Vector3::new(ymax - ymin, t_init.ln(), ymin);
    let mut cost = sse(&xs, &ys, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITER {
        iterations += 1;
        let t1 = p[1].exp();
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (&x, &y) in xs.iter().zip(&ys) {
            let e = (-x / t1).exp();
            let r = p[0] * e + p[2] - y;
            // d/d(ln t1) of a1*exp(-x/t1) = a1*exp(-x/t1)*x/t1
            let j = Vector3::new(e, p[0] * e * x / t1, 1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        if jtr.amax() == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for d in 0..3 {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = p + delta;
            let c = sse(&xs, &ys, &candidate);
            if c.is_finite() && c <= cost {
                let small = delta.amax() < STEP_TOL;
                p = candidate;
                cost = c;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if small {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no descent direction left at any damping: a stationary point
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    Ok(ExpFit {
        a1: p[0],
        t1: p[1].exp(),
        y0: p[2],
        rmse: (cost / xs.len() as f64).sqrt(),
        iterations,
        converged,
    })
}

/// The `k` points with the smallest vertical distance to the fitted curve,
/// ties broken by smaller `g1`, returned sorted by `g1`.
pub fn select_representatives(
    points: &[FrontPoint],
    fit: &ExpFit,
    k: usize,
) -> Result<Vec<FrontPoint>> {
    if points.len() < k {
        return Err(Error::Selection(format!(
            "need at least {k} points, got {}",
            points.len()
        )));
    }
    let mut ranked: Vec<(f64, FrontPoint)> = points
        .iter()
        .map(|p| ((p.g[1] - fit.eval(p.g[0])).abs(), *p))
        .collect();
    ranked.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.g[0].total_cmp(&b.1.g[0]))
            .then(a.1.origin.cmp(&b.1.origin))
    });
    let mut chosen: Vec<FrontPoint> = ranked.into_iter().take(k).map(|(_, p)| p).collect();
    chosen.sort_by(|a, b| a.g[0].total_cmp(&b.g[0]).then(a.origin.cmp(&b.origin)));
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_points(a1: f64, t1: f64, y0: f64, n: usize) -> Vec<FrontPoint> {
        (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                FrontPoint::new(x, a1 * (-x / t1).exp() + y0, i)
            })
            .collect()
    }

    #[test]
    fn recovers_noiseless_parameters() {
        let fit = fit_exp_decay(&curve_points(1.0, 0.5, 0.1, 10)).unwrap();
        assert!((fit.a1 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.t1 - 0.5).abs() < 1e-6, "{fit:?}");
        assert!((fit.y0 - 0.1).abs() < 1e-6, "{fit:?}");
        assert!(fit.rmse < 1e-8);
    }

    #[test]
    fn flat_data() {
        let pts: Vec<_> = (0..6)
            .map(|i| FrontPoint::new(i as f64 / 5.0, 0.3, i))
            .collect();
        let fit = fit_exp_decay(&pts).unwrap();
        assert!((fit.y0 - 0.3).abs() < 1e-9);
        assert!(fit.a1.abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        let pts = curve_points(1.0, 0.5, 0.0, 3);
        assert!(matches!(fit_exp_decay(&pts[..2]), Err(Error::Fit(_))));
        let fit = fit_exp_decay(&pts).unwrap();
        assert!(matches!(
            select_representatives(&pts, &fit, 5),
            Err(Error::Selection(_))
        ));
    }

    #[test]
    fn tie_prefers_smaller_g1() {
        let fit = ExpFit {
            a1: 0.0,
            t1: 1.0,
            y0: 0.5,
            rmse: 0.0,
            iterations: 0,
            converged: true,
        };
        let mut pts: Vec<_> = (0..4)
            .map(|i| FrontPoint::new(i as f64 * 0.1, 0.5, i))
            .collect();
        pts.push(FrontPoint::new(0.9, 0.6, 4));
        pts.push(FrontPoint::new(0.8, 0.4, 5));
        let chosen = select_representatives(&pts, &fit, 5).unwrap();
        assert_eq!(
            chosen.iter().map(|p| p.origin).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 5]
        );
    }
}
