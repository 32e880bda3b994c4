//! Composite Gauss–Legendre rules on the circle.
//!
//! The circle is cut at a set of break angles. Between two breaks the interval
//! is split at its midpoint and each half is covered either by uniform panels
//! or, when the adjacent break is a registered singularity, by a geometric
//! mesh (ratio 1/2) that stops at a minimum width. The innermost piece next to
//! a singular break is not sampled; it is returned as a [`TailPiece`] so that
//! the caller can integrate it in closed form.
//!
//! Every quadrature point is stored as a `(center, offset)` pair. Near a
//! singularity the offset carries the full relative precision of the distance
//! to the singular angle, which a plain `center + offset` sum would destroy.

use std::f64::consts::{PI, TAU};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..(order + 1) / 2 {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A cut of the circle. Graded breaks get a geometric mesh on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Break {
    pub angle: f64,
    pub graded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub center: f64,
    pub offset: f64,
    pub weight: f64,
}

impl GridPoint {
    pub fn angle(&self) -> f64 {
        wrap_angle(self.center + self.offset)
    }
}

/// Unsampled piece `offset ∈ [0, h]` (or `[h, 0]` when `h < 0`) next to a
/// graded break.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPiece {
    pub center: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Largest panel width anywhere on the circle.
    pub max_width: f64,
    /// Geometric grading stops once a panel would be narrower than this.
    pub min_width: f64,
    pub order: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BoundaryGrid {
    pub points: Vec<GridPoint>,
    pub tails: Vec<TailPiece>,
}

impl BoundaryGrid {
    pub fn build(breaks: &[Break], spec: &GridSpec) -> Self {
        let rule = GaussLegendre::new(spec.order);
        let mut grid = BoundaryGrid::default();
        let breaks = normalize_breaks(breaks);
        if breaks.is_empty() {
            grid.uniform(&rule, 0.0, 0.0, TAU, spec.max_width);
            return grid;
        }
        let m = breaks.len();
        for i in 0..m {
            let left = breaks[i];
            let (right_angle, right) = if i + 1 < m {
                (breaks[i + 1].angle, breaks[i + 1])
            } else {
                (breaks[0].angle + TAU, breaks[0])
            };
            let half = 0.5 * (right_angle - left.angle);
            if half <= 0.0 {
                continue;
            }
            // Left half, measured from the left break.
            if left.graded {
                grid.graded(&rule, left.angle, half, 1.0, spec);
            } else {
                grid.uniform(&rule, left.angle, 0.0, half, spec.max_width);
            }
            // Right half, measured (negatively) from the right break.
            if right.graded {
                grid.graded(&rule, right.angle, half, -1.0, spec);
            } else {
                grid.uniform(&rule, right.angle, -half, 0.0, spec.max_width);
            }
        }
        grid
    }

    fn uniform(&mut self, rule: &GaussLegendre, center: f64, lo: f64, hi: f64, max_width: f64) {
        let count = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let width = (hi - lo) / count as f64;
        for j in 0..count {
            let a = lo + width * j as f64;
            let b = if j + 1 == count { hi } else { a + width };
            for (x, w) in rule.mapped(a, b) {
                self.points.push(GridPoint {
                    center,
                    offset: x,
                    weight: w,
                });
            }
        }
    }

    fn graded(&mut self, rule: &GaussLegendre, center: f64, half: f64, sign: f64, spec: &GridSpec) {
        let mut outer = half;
        while 0.5 * outer > spec.min_width {
            let inner = 0.5 * outer;
            if sign > 0.0 {
                self.uniform(rule, center, inner, outer, spec.max_width);
            } else {
                self.uniform(rule, center, -outer, -inner, spec.max_width);
            }
            outer = inner;
        }
        self.tails.push(TailPiece {
            center,
            h: sign * outer,
        });
    }
}

/// Sort, wrap into `[0, 2π)` and merge coincident breaks (graded wins).
fn normalize_breaks(breaks: &[Break]) -> Vec<Break> {
    let mut out: Vec<Break> = breaks
        .iter()
        .map(|b| Break {
            angle: wrap_angle(b.angle),
            graded: b.graded,
        })
        .collect();
    out.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let mut merged: Vec<Break> = Vec::with_capacity(out.len());
    for b in out {
        match merged.last_mut() {
            Some(last) if (b.angle - last.angle).abs() <= 1e-14 => last.graded |= b.graded,
            _ => merged.push(b),
        }
    }
    if merged.len() > 1 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if TAU - last.angle + first.angle <= 1e-14 {
            merged[0].graded |= last.graded;
            merged.pop();
        }
    }
    merged
}

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(20);
        for p in 0..40 {
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(p));
            assert!((got - exact).abs() < 1e-14, "p = {p}: {got} vs {exact}");
        }
    }

    #[test]
    fn odd_order_rule_has_center_node() {
        let rule = GaussLegendre::new(5);
        let total: f64 = rule.mapped(0.0, 3.0).map(|(_, w)| w).sum();
        assert!((total - 3.0).abs() < 1e-14);
        assert_eq!(rule.order(), 5);
    }

    #[test]
    fn grid_weights_cover_the_circle() {
        let breaks = [
            Break { angle: 0.0, graded: true },
            Break { angle: 2.0, graded: false },
            Break { angle: TAU, graded: false },
        ];
        let spec = GridSpec {
            max_width: 0.3,
            min_width: 1e-12,
            order: 12,
        };
        let grid = BoundaryGrid::build(&breaks, &spec);
        let sampled: f64 = grid.points.iter().map(|p| p.weight).sum();
        let tails: f64 = grid.tails.iter().map(|t| t.h.abs()).sum();
        assert!((sampled + tails - TAU).abs() < 1e-13);
        assert_eq!(grid.tails.len(), 2);
        assert!(grid.tails.iter().all(|t| t.h.abs() <= 2e-12));
    }

    #[test]
    fn wrap_angle_stays_in_range() {
        assert_eq!(wrap_angle(TAU), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!(wrap_angle(-1e-300) < TAU);
    }
}
