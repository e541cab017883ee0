//! Central finite-difference checks of the hand-written network derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::nn::FeedForwardNet;

pub const FD_STEP: f64 = 1e-5;
pub const GRAD_TOL: f64 = 1e-4;
pub const MIXED_TOL: f64 = 1e-3;
/// Denominator floor so entries that are zero up to round-off do not count
/// as large relative errors.
pub const REL_FLOOR: f64 = 1e-6;

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

fn param_mut(net: &mut FeedForwardNet, mut idx: usize) -> &mut f64 {
    for layer in net.layers_mut() {
        let nw = layer.weights.len();
        if idx < nw {
            return &mut layer.weights[idx];
        }
        idx -= nw;
        let nb = layer.biases.len();
        if idx < nb {
            return &mut layer.biases[idx];
        }
        idx -= nb;
    }
    panic!("parameter index out of range");
}

fn central_param_diff(net: &FeedForwardNet, idx: usize, h: f64, mut f: impl FnMut(&FeedForwardNet) -> f64) -> f64 {
    let mut probe = net.clone();
    let orig = *param_mut(&mut probe, idx);
    *param_mut(&mut probe, idx) = orig + h;
    let plus = f(&probe);
    *param_mut(&mut probe, idx) = orig - h;
    let minus = f(&probe);
    (plus - minus) / (2.0 * h)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Worst relative error of `grad_params(input, cot)` against finite
/// differences of `cotᵀ·forward(input)`.
pub fn check_grad_params(net: &FeedForwardNet, input: &[f64], cot: &[f64], h: f64) -> Result<f64> {
    let analytic: Vec<f64> = net.grad_params(input, cot)?.flat().collect();
    let mut worst: f64 = 0.0;
    for (idx, a) in analytic.iter().enumerate() {
        let fd = central_param_diff(net, idx, h, |n| dot(cot, &n.forward(input).unwrap()));
        worst = worst.max(rel_err(*a, fd));
    }
    Ok(worst)
}

/// Worst relative error of the Jacobian `grad_input(input)`.
pub fn check_grad_input(net: &FeedForwardNet, input: &[f64], h: f64) -> Result<f64> {
    let jac = net.grad_input(input)?;
    let mut worst: f64 = 0.0;
    let mut x = input.to_vec();
    for k in 0..input.len() {
        x[k] = input[k] + h;
        let plus = net.forward(&x)?;
        x[k] = input[k] - h;
        let minus = net.forward(&x)?;
        x[k] = input[k];
        for (o, row) in jac.iter().enumerate() {
            worst = worst.max(rel_err(row[k], (plus[o] - minus[o]) / (2.0 * h)));
        }
    }
    Ok(worst)
}

/// Worst relative error of the parameter gradient from
/// `directional_grad_params` against finite differences, in the parameters,
/// of `value_cotᵀ·y + slope_cotᵀ·(grad_input · direction)`.
pub fn check_mixed(
    net: &FeedForwardNet,
    input: &[f64],
    direction: &[f64],
    value_cot: &[f64],
    slope_cot: &[f64],
    h: f64,
) -> Result<f64> {
    let (_, _, grads) = net.directional_grad_params(input, direction, value_cot, slope_cot)?;
    let analytic: Vec<f64> = grads.flat().collect();
    let objective = |n: &FeedForwardNet| {
        let y = n.forward(input).unwrap();
        let jac = n.grad_input(input).unwrap();
        let slope: Vec<f64> = jac.iter().map(|row| dot(row, direction)).collect();
        dot(value_cot, &y) + dot(slope_cot, &slope)
    };
    let mut worst: f64 = 0.0;
    for (idx, a) in analytic.iter().enumerate() {
        worst = worst.max(rel_err(*a, central_param_diff(net, idx, h, objective)));
    }
    Ok(worst)
}

/// Worst errors over one net shape and several seeded nets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradReport {
    pub params: f64,
    pub input: f64,
    /// `None` when the mixed check was not requested.
    pub mixed: Option<f64>,
}

impl GradReport {
    pub fn passed(&self) -> bool {
        self.params <= GRAD_TOL && self.input <= GRAD_TOL && self.mixed.is_none_or(|m| m <= MIXED_TOL)
    }
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Runs every check on `nets` seeded networks of shape `sizes`.
pub fn run_shape(sizes: &[usize], nets: usize, seed: u64, with_mixed: bool) -> Result<GradReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradReport {
        params: 0.0,
        input: 0.0,
        mixed: with_mixed.then_some(0.0),
    };
    for _ in 0..nets {
        let net = FeedForwardNet::new_random(sizes, &mut rng);
        let n_in = net.input_dim();
        let n_out = net.output_dim();
        let input = uniform(&mut rng, n_in);
        let cot = uniform(&mut rng, n_out);
        report.params = report.params.max(check_grad_params(&net, &input, &cot, FD_STEP)?);
        report.input = report.input.max(check_grad_input(&net, &input, FD_STEP)?);
        if let Some(m) = report.mixed.as_mut() {
            let dir = uniform(&mut rng, n_in);
            let vc = uniform(&mut rng, n_out);
            let sc = uniform(&mut rng, n_out);
            *m = m.max(check_mixed(&net, &input, &dir, &vc, &sc, FD_STEP)?);
        }
    }
    Ok(report)
}
