//! Gauss-Legendre quadrature on the reference interval [0, 1].
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from Chebyshev initial guesses; an n-point rule integrates
//! polynomials up to degree 2n - 1 exactly.

/// Quadrature rule on [0, 1]: `sum_q weights[q] * f(nodes[q])` approximates
/// `int_0^1 f`. Weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// n-point rule, exact for polynomials of degree <= 2n - 1.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Work on [-1, 1]; exploit root symmetry and map at the end.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate a function over [0, 1].
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate over [0,1]^2 with the tensor product of this rule.
    pub fn integrate_2d(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (&x, &wx) in self.nodes.iter().zip(&self.weights) {
            for (&y, &wy) in self.nodes.iter().zip(&self.weights) {
                acc += wx * wy * f(x, y);
            }
        }
        acc
    }
}

/// Legendre polynomial P_n and its derivative at x, by the three-term
/// recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
