//! Tensor-product cubature on axis-aligned boxes.

use rayon::prelude::*;

use crate::error::QuadError;
use crate::rules::{composite_weights, node, IntegrationRequest, QuadratureResult};
use crate::summation::NeumaierSum;

/// Largest supported number of axes.
pub const MAX_DIMS: usize = 4;

/// A real function of `k` real variables.
///
/// Evaluation may happen from several threads at once.
pub trait MultiIntegrand: Sync {
    fn eval(&self, point: &[f64]) -> Result<f64, QuadError>;

    /// Closed interval on which axis `axis` is defined.
    fn domain(&self, _axis: usize) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync + ?Sized> MultiIntegrand for F {
    fn eval(&self, point: &[f64]) -> Result<f64, QuadError> {
        Ok(self(point))
    }
}

/// One axis of a box: interval, subdivisions and rule order.
pub type AxisSpec = IntegrationRequest;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxRequest {
    axes: Vec<AxisSpec>,
}

impl BoxRequest {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self, QuadError> {
        if axes.is_empty() || axes.len() > MAX_DIMS {
            return Err(QuadError::Dimension {
                dims: axes.len(),
                max: MAX_DIMS,
            });
        }
        Ok(BoxRequest { axes })
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }
}

struct Axis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn prepare_axis(spec: &AxisSpec) -> Result<Axis, QuadError> {
    let w = composite_weights(spec.degree, spec.n)?;
    let h = spec.step();
    let nodes = (w.first()..=w.last()).map(|i| node(spec.a, h, i)).collect();
    let weights = w.values().iter().map(|wk| h * wk).collect();
    Ok(Axis { nodes, weights })
}

/// Integrates `f` over the box with the per-cell `T^p` weights on each axis.
///
/// Outermost-axis slabs are evaluated in parallel; each slab is a compensated sum
/// over the remaining axes in lexicographic order, and slabs are combined in index
/// order, so the result does not depend on scheduling. On failure the error from
/// the lowest slab is returned.
pub fn integrate_box<F: MultiIntegrand + ?Sized>(
    f: &F,
    req: &BoxRequest,
) -> Result<QuadratureResult, QuadError> {
    let axes = req
        .axes
        .iter()
        .map(prepare_axis)
        .collect::<Result<Vec<_>, _>>()?;
    let bounds: Vec<(f64, f64)> = (0..axes.len()).map(|d| f.domain(d)).collect();
    for (d, axis) in axes.iter().enumerate() {
        let (lo, hi) = bounds[d];
        for &x in [axis.nodes[0], *axis.nodes.last().expect("non-empty")].iter() {
            if !(x >= lo && x <= hi) {
                return Err(QuadError::OutsideDomain { x, lo, hi });
            }
        }
    }

    let (outer, inner) = axes.split_first().expect("at least one axis");
    let slabs: Vec<Result<f64, QuadError>> = (0..outer.nodes.len())
        .into_par_iter()
        .map(|i| slab_sum(f, outer.nodes[i], inner))
        .collect();

    let mut total = NeumaierSum::new();
    for (i, s) in slabs.into_iter().enumerate() {
        total.add(outer.weights[i] * s?);
    }
    let evaluations = axes.iter().map(|a| a.nodes.len()).product();
    Ok(QuadratureResult {
        value: total.total(),
        evaluations,
    })
}

fn slab_sum<F: MultiIntegrand + ?Sized>(f: &F, x0: f64, inner: &[Axis]) -> Result<f64, QuadError> {
    let mut point = vec![x0; inner.len() + 1];
    let mut idx = vec![0usize; inner.len()];
    let mut sum = NeumaierSum::new();
    loop {
        let mut w = 1.0;
        for (d, axis) in inner.iter().enumerate() {
            point[d + 1] = axis.nodes[idx[d]];
            w *= axis.weights[idx[d]];
        }
        let v = f.eval(&point)?;
        if !v.is_finite() {
            return Err(QuadError::NonFinite {
                x: point[0],
                value: v,
            });
        }
        sum.add(w * v);

        // Advance the multi-index, last axis fastest.
        let mut d = inner.len();
        loop {
            if d == 0 {
                return Ok(sum.total());
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < inner[d].nodes.len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{integrate_composite, CompositePath};
    use crate::spline::SplineDegree;

    fn axis(a: f64, b: f64, n: usize, p: usize) -> AxisSpec {
        IntegrationRequest::new(a, b, n, SplineDegree::new(p).unwrap()).unwrap()
    }

    const F1_REF: f64 = 1.4626517459071815;

    #[test]
    fn constant_on_unit_square() {
        for (n, p) in [(1, 1), (3, 2), (10, 5), (7, 7)] {
            let req =
                BoxRequest::new(vec![axis(0.0, 1.0, n, p), axis(0.0, 1.0, n + 2, p)]).unwrap();
            let r = integrate_box(&|_: &[f64]| 1.0, &req).unwrap();
            assert!((r.value - 1.0).abs() < 1e-14, "n = {n}, p = {p}");
        }
    }

    #[test]
    fn separable_cubic() {
        let req = BoxRequest::new(vec![axis(0.0, 1.0, 12, 3), axis(0.0, 1.0, 12, 3)]).unwrap();
        let r = integrate_box(&|v: &[f64]| v[0].powi(3) * v[1].powi(3), &req).unwrap();
        assert!((r.value - 1.0 / 16.0).abs() < 1e-12);
        assert_eq!(r.evaluations, 17 * 17);
    }

    #[test]
    fn separable_gaussian_growth() {
        let req = BoxRequest::new(vec![axis(0.0, 1.0, 80, 2), axis(0.0, 1.0, 80, 2)]).unwrap();
        let r =
            integrate_box(&|v: &[f64]| (v[0] * v[0]).exp() * (v[1] * v[1]).exp(), &req).unwrap();
        let exact = F1_REF * F1_REF;
        assert!((r.value - exact).abs() < 2.0 * 2.7197e-08 * exact);
        assert_eq!(r.evaluations, 85 * 85);
    }

    #[test]
    fn product_of_one_dimensional_rules() {
        let g = |x: f64| (x * 1.3).cos() + 2.0;
        let r = |y: f64| (-y).exp();
        let ax = axis(-0.5, 1.0, 20, 4);
        let ay = axis(0.0, 2.0, 15, 3);
        let req = BoxRequest::new(vec![ax, ay]).unwrap();
        let v = integrate_box(&|p: &[f64]| g(p[0]) * r(p[1]), &req)
            .unwrap()
            .value;
        let gx = integrate_composite(&g, &ax, CompositePath::PerCell)
            .unwrap()
            .value;
        let ry = integrate_composite(&r, &ay, CompositePath::PerCell)
            .unwrap()
            .value;
        assert!((v - gx * ry).abs() <= 1e-13 * v.abs());
    }

    #[test]
    fn dimension_limits() {
        assert!(matches!(
            BoxRequest::new(vec![]),
            Err(QuadError::Dimension { dims: 0, .. })
        ));
        let a = axis(0.0, 1.0, 2, 1);
        assert!(matches!(
            BoxRequest::new(vec![a; 5]),
            Err(QuadError::Dimension { dims: 5, max: 4 })
        ));
        let req = BoxRequest::new(vec![a; 4]).unwrap();
        let r = integrate_box(&|v: &[f64]| v.iter().sum::<f64>(), &req).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        assert_eq!(r.evaluations, 81);
    }

    #[test]
    fn reports_non_finite() {
        let req = BoxRequest::new(vec![axis(0.0, 1.0, 4, 1), axis(0.0, 1.0, 4, 1)]).unwrap();
        let err = integrate_box(&|v: &[f64]| 1.0 / (v[0] + v[1]), &req).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }));
    }
}
