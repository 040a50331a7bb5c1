//! Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the `q`-point Gauss–Legendre rule on `[0, 1]`, nodes ascending.
///
/// Roots of `P_q` are found by Newton iteration from the Tricomi initial guess; the
/// three-term recurrence gives `P_q` and its derivative.
pub fn gauss_legendre_unit(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "need at least one node");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1, 1]
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[q - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if q == 0 { 1.0 } else { p1 };
    let d = q as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre_unit(2);
        let s = 0.5 / 3f64.sqrt();
        assert!((x[0] - (0.5 - s)).abs() < 1e-15);
        assert!((x[1] - (0.5 + s)).abs() < 1e-15);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2q_minus_1() {
        for q in [3usize, 8, 17, 32, 64] {
            let (x, w) = gauss_legendre_unit(q);
            for deg in 0..(2 * q) {
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((s - exact).abs() < 1e-13, "q={q} deg={deg}: {s} vs {exact}");
            }
        }
    }

    #[test]
    fn large_rule_integrates_oscillation() {
        let (x, w) = gauss_legendre_unit(512);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let omega = 300.0f64;
        let s: f64 = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * (omega * xi).cos())
            .sum();
        assert!((s - omega.sin() / omega).abs() < 1e-13);
    }
}
