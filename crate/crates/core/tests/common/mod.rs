#![allow(dead_code)]

use hypercent::generate::{random_connected_hypergraph, seeded_rng, RandomSpec};
use hypercent::{CentralityModel, CentralitySolution, Hypergraph, NonlinearMap};
use nalgebra::DMatrix;
use rand::Rng;

/// Small weighted instances: n = 10, m = 8, edge sizes 2..=4.
pub fn small_weighted(seed: u64) -> Hypergraph {
    random_connected_hypergraph(&RandomSpec::new(10, 8).weighted(), &mut seeded_rng(seed)).unwrap()
}

pub fn three_uniform(seed: u64) -> Hypergraph {
    random_connected_hypergraph(&RandomSpec::new(10, 8).uniform(3), &mut seeded_rng(seed)).unwrap()
}

/// f = g = phi = id, psi = x^delta, so rho = delta.
pub fn half_model(delta: f64) -> CentralityModel {
    CentralityModel::new(
        "sqrt",
        NonlinearMap::IDENTITY,
        NonlinearMap::IDENTITY,
        NonlinearMap::IDENTITY,
        NonlinearMap::power(delta).unwrap(),
    )
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(s, t)| (s - t).abs())
        .fold(0.0, f64::max)
}

pub fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    v.iter().map(|t| t / n).collect()
}

pub fn positive_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.01..10.0)).collect()
}

/// Local contraction factor of the damped iteration around a converged
/// solution of [`half_model`], and the top eigenvalue of the linearized
/// two-step map (which should be 1).
///
/// In log coordinates the sweep linearizes to
/// `J = 1/2 [[I, P], [delta Q, I]]` with row-stochastic
/// `P = D(BWy)^-1 B W Dy` and `Q = Dz^-1 B^T N Dx`, `z = B^T N x`. The
/// eigenvalues of `J` are `(1 +- sqrt(delta sigma)) / 2` over the eigenvalues
/// `sigma` of `P Q`. `sigma = 1` is a pure rescaling removed by
/// normalization, so the rate is set by the second eigenvalue. `P Q` is
/// `D1 K D2` with symmetric `K = B W Dy Dz^-1 B^T`, hence similar to the
/// symmetric `sqrt(D1 D2) K sqrt(D1 D2)`.
pub fn predicted_half_model_rate(
    h: &Hypergraph,
    sol: &CentralitySolution,
    delta: f64,
) -> (f64, f64) {
    let n = h.num_nodes();
    let bw = h.apply_bw(&sol.y).unwrap();
    let z = h.apply_btn(&sol.x).unwrap();
    let nu = h.node_weights();
    let w = h.edge_weights();
    let d: Vec<f64> = (0..n).map(|i| (nu[i] * sol.x[i] / bw[i]).sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for e in 0..h.num_edges() {
        let c = w[e] * sol.y[e] / z[e];
        for &i in h.edge(e) {
            for &j in h.edge(e) {
                s[(i, j)] += c * d[i] * d[j];
            }
        }
    }
    let mut eig: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sigma2 = eig.get(1).copied().unwrap_or(0.0).max(0.0);
    (eig[0], 0.5 * (1.0 + (delta * sigma2).sqrt()))
}
