use super::curve::{fit_exp_decay, select_representatives};
use super::{pareto_front, FrontPoint};
use crate::error::{Error, Result};

pub const REFERENCE_POINT: [f64; 2] = [1.0, 1.0];
const REPRESENTATIVES: usize = 5;

fn check_box(points: &[FrontPoint], reference: [f64; 2]) -> Result<()> {
    for p in points {
        if !(p.g[0] <= reference[0] && p.g[1] <= reference[1]) || p.g.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies outside the reference box ({}, {})",
                p.g[0], p.g[1], reference[0], reference[1]
            )));
        }
    }
    Ok(())
}

/// Sum of the boxes between each point and the reference, overlaps counted
/// as many times as they occur.
pub fn box_sum(points: &[FrontPoint], reference: [f64; 2]) -> Result<f64> {
    check_box(points, reference)?;
    Ok(points
        .iter()
        .map(|p| (reference[0] - p.g[0]) * (reference[1] - p.g[1]))
        .sum())
}

/// Box-sum hypervolume over representative points: with more than five
/// points, an exponential curve is fitted and the five points closest to it are
/// summed; otherwise all points are summed.
pub fn hypervolume_paper(points: &[FrontPoint], reference: [f64; 2]) -> Result<f64> {
    check_box(points, reference)?;
    if points.len() > REPRESENTATIVES {
        let fit = fit_exp_decay(points)?;
        let reps = select_representatives(points, &fit, REPRESENTATIVES)?;
        box_sum(&reps, reference)
    } else {
        box_sum(points, reference)
    }
}

/// Exact area of the union of dominated boxes.
pub fn hypervolume_exact2d(points: &[FrontPoint], reference: [f64; 2]) -> Result<f64> {
    check_box(points, reference)?;
    let mut front = pareto_front(points);
    front.sort_by(|a, b| a.g[0].total_cmp(&b.g[0]).then(a.g[1].total_cmp(&b.g[1])));
    front.dedup_by(|a, b| a.g == b.g);
    let mut area = 0.0;
    for (i, p) in front.iter().enumerate() {
        let right = front.get(i + 1).map_or(reference[0], |q| q.g[0]);
        area += (right - p.g[0]) * (reference[1] - p.g[1]);
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let p = [FrontPoint::new(0.4, 0.4, 0)];
        assert_eq!(hypervolume_paper(&p, REFERENCE_POINT).unwrap(), 0.36);
        assert_eq!(hypervolume_exact2d(&p, REFERENCE_POINT).unwrap(), 0.36);
    }

    #[test]
    fn duplicate_point_counts_twice_in_box_sum_once_in_union() {
        let p = [FrontPoint::new(0.5, 0.5, 0), FrontPoint::new(0.5, 0.5, 1)];
        assert_eq!(hypervolume_paper(&p, REFERENCE_POINT).unwrap(), 0.5);
        assert_eq!(hypervolume_exact2d(&p, REFERENCE_POINT).unwrap(), 0.25);
    }

    #[test]
    fn outside_box_is_domain_error() {
        let p = [FrontPoint::new(1.2, 0.1, 0)];
        assert!(matches!(
            hypervolume_exact2d(&p, REFERENCE_POINT),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hypervolume_paper(&p, REFERENCE_POINT),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn reference_corner_contributes_nothing() {
        let p = [FrontPoint::new(1.0, 1.0, 0)];
        assert_eq!(hypervolume_exact2d(&p, REFERENCE_POINT).unwrap(), 0.0);
    }
}
