//! Reference computations shared by the integration tests.
#![allow(dead_code)]

use fracpois::path_sim::CountingPath;
use fracpois::quadrature::{integrate_nodes, Node, QuadSpec};
use fracpois::special_fn::{ml3, MLSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn e3(alpha: f64, beta: f64, gamma: f64, z: f64) -> f64 {
    ml3(&MLSpec::new(alpha, beta, gamma), z).unwrap_or_else(|e| panic!("E^{gamma}_{{{alpha},{beta}}}({z}): {e}"))
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `∫_0^x (x-t)^{β-1} E^γ_{α,β}(a(x-t)^α) t^{ζ-1} E^σ_{α,ζ}(a t^α) dt`
pub fn convolution_lhs(alpha: f64, beta: f64, zeta: f64, gamma: f64, sigma: f64, a: f64, x: f64) -> f64 {
    let mut spec = QuadSpec::with_tol(1e-11, 1e-300);
    if zeta < 1.0 {
        spec = spec.left_singular(zeta);
    }
    if beta < 1.0 {
        spec = spec.right_singular(beta);
    }
    let f = |n: Node| {
        let (t, u) = (n.from_a, n.from_b);
        u.powf(beta - 1.0)
            * e3(alpha, beta, gamma, a * u.powf(alpha))
            * t.powf(zeta - 1.0)
            * e3(alpha, zeta, sigma, a * t.powf(alpha))
    };
    integrate_nodes(f, 0.0, x, &spec).unwrap().value
}

/// One convolution-identity case: a description, the quadrature side and the
/// closed side `x^{β+ζ-1} E^{γ+σ}_{α,β+ζ}(a x^α)`.
pub struct ConvolutionCase {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// 25 seeded parameter draws, each at x ∈ {0.5, 1, 2}.
pub fn convolution_cases() -> Vec<ConvolutionCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_241);
    let mut out = Vec::new();
    for draw in 0..25 {
        let alpha = rng.random_range(0.3..=1.0);
        let beta = rng.random_range(0.3..2.5);
        let zeta = rng.random_range(0.3..2.5);
        let gamma = f64::from(rng.random_range(1..=3u32));
        let sigma = f64::from(rng.random_range(1..=3u32));
        let lambda = rng.random_range(0.2..3.0);
        for &x in &[0.5, 1.0, 2.0] {
            out.push(ConvolutionCase {
                label: format!("draw {draw}: α={alpha} β={beta} ζ={zeta} γ={gamma} σ={sigma} λ={lambda} x={x}"),
                lhs: convolution_lhs(alpha, beta, zeta, gamma, sigma, -lambda, x),
                rhs: x.powf(beta + zeta - 1.0) * e3(alpha, beta + zeta, gamma + sigma, -lambda * x.powf(alpha)),
            });
        }
    }
    out
}

/// `∫_0^t ∫_0^{s₂} N(s₁) ds₁ ds₂` by nested trapezoid rules on a uniform
/// grid of `points` nodes merged with the jump times.
pub fn nested_trapezoid(path: &CountingPath, t: f64, points: usize) -> f64 {
    let mut grid: Vec<f64> = (0..points).map(|i| t * i as f64 / (points - 1) as f64).collect();
    grid.extend(path.jump_times().iter().copied().filter(|&x| x < t));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut inner = 0.0;
    let mut outer = 0.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        // N is constant on (a, b); use its value at the midpoint for both ends
        let level = path.count_at(0.5 * (a + b)) as f64;
        let next = inner + (b - a) * level;
        outer += 0.5 * (b - a) * (inner + next);
        inner = next;
    }
    outer
}
