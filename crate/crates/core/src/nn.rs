//! Dense feed-forward networks with hand-written derivatives.
//!
//! Hidden layers use `tanh`, the output layer is linear. Besides the usual
//! weight gradients the network exposes its input Jacobian and, for the
//! deviation-function update, the gradient with respect to the weights of a
//! directional input derivative `∇ₓy · v` (forward-mode tangent propagation
//! followed by a reverse sweep over both the primal and the tangent).
//!
//! Binary layout (little endian): `u32` layer count, `u32` per layer size,
//! then for each layer its weights row-major (`out × in`) and its biases as
//! `f64`.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major `n_out × n_in`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            biases: vec![0.0; n_out],
        }
    }

    #[inline]
    fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.n_in..(o + 1) * self.n_in]
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n_out).map(|o| dot(self.row(o), input) + self.biases[o]));
    }

    fn linear(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n_out).map(|o| dot(self.row(o), input)));
    }

    /// `Wᵀ g`
    fn transpose_mul(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_in];
        for (o, &go) in g.iter().enumerate() {
            if go == 0.0 {
                continue;
            }
            for (acc, w) in out.iter_mut().zip(self.row(o)) {
                *acc += go * w;
            }
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradients shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NetGradients {
    pub layers: Vec<Dense>,
}

impl NetGradients {
    pub fn zeros_like(net: &FeedForwardNet) -> Self {
        Self {
            layers: net.layers.iter().map(|l| Dense::zeros(l.n_in, l.n_out)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.flat().all(f64::is_finite)
    }

    /// Weights then biases, layer by layer.
    pub fn flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()).copied())
    }

    pub fn scale(&mut self, k: f64) {
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w *= k);
            l.biases.iter_mut().for_each(|b| *b *= k);
        }
    }
}

/// Per-layer activations of one forward pass. `acts[0]` is the input,
/// `acts[l]` the output of layer `l` (post-activation for hidden layers).
#[derive(Debug, Clone)]
pub struct Trace {
    acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("trace has at least the input")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardNet {
    layer_sizes: Vec<usize>,
    layers: Vec<Dense>,
}

impl FeedForwardNet {
    /// All-zero parameters.
    pub fn zeros(layer_sizes: &[usize]) -> Self {
        assert!(layer_sizes.len() >= 2, "need at least input and output sizes");
        let layers = layer_sizes
            .windows(2)
            .map(|w| Dense::zeros(w[0], w[1]))
            .collect();
        Self {
            layer_sizes: layer_sizes.to_vec(),
            layers,
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn new_random<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(layer_sizes);
        for l in &mut net.layers {
            let bound = (6.0 / (l.n_in + l.n_out) as f64).sqrt();
            for w in &mut l.weights {
                *w = rng.gen_range(-bound..bound);
            }
        }
        net
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let mut sizes = vec![layers.first().ok_or_else(|| Error::CorruptNet("no layers".into()))?.n_in];
        for l in &layers {
            if l.n_in != *sizes.last().unwrap() {
                return Err(Error::Shape {
                    expected: *sizes.last().unwrap(),
                    got: l.n_in,
                });
            }
            if l.weights.len() != l.n_in * l.n_out || l.biases.len() != l.n_out {
                return Err(Error::Shape {
                    expected: l.n_in * l.n_out,
                    got: l.weights.len(),
                });
            }
            sizes.push(l.n_out);
        }
        Ok(Self {
            layer_sizes: sizes,
            layers,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameters flattened in [`NetGradients::flat`] order.
    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()).copied())
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape {
                expected: self.param_count(),
                got: flat.len(),
            });
        }
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.biases.iter_mut()) {
                *w = it.next().unwrap();
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::Shape {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        Ok(())
    }

    fn check_output(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.output_dim() {
            return Err(Error::Shape {
                expected: self.output_dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    fn is_hidden(&self, layer: usize) -> bool {
        layer + 1 < self.layers.len()
    }

    pub fn trace(&self, input: &[f64]) -> Result<Trace> {
        self.check_input(input)?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.n_out);
            layer.affine(acts.last().unwrap(), &mut out);
            if self.is_hidden(i) {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(out);
        }
        Ok(Trace { acts })
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.trace(input)?.acts.pop().unwrap())
    }

    /// Returns `(∂(cᵀy)/∂θ, ∂(cᵀy)/∂x)` for cotangent `c`.
    fn backward(&self, trace: &Trace, cotangent: &[f64], want_params: bool) -> (Option<NetGradients>, Vec<f64>) {
        let mut grads = want_params.then(|| NetGradients::zeros_like(self));
        let mut g = cotangent.to_vec();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let a_prev = &trace.acts[l];
            if let Some(grads) = grads.as_mut() {
                let gl = &mut grads.layers[l];
                for (o, &go) in g.iter().enumerate() {
                    gl.biases[o] = go;
                    let row = &mut gl.weights[o * layer.n_in..(o + 1) * layer.n_in];
                    for (w, a) in row.iter_mut().zip(a_prev) {
                        *w = go * a;
                    }
                }
            }
            let mut ga = layer.transpose_mul(&g);
            if l > 0 {
                // a_prev came out of a tanh
                for (gi, a) in ga.iter_mut().zip(a_prev) {
                    *gi *= 1.0 - a * a;
                }
            }
            g = ga;
        }
        (grads, g)
    }

    /// Gradient of `cotangentᵀ · forward(input)` with respect to every parameter.
    pub fn grad_params(&self, input: &[f64], cotangent: &[f64]) -> Result<NetGradients> {
        self.check_output(cotangent)?;
        let trace = self.trace(input)?;
        Ok(self.backward(&trace, cotangent, true).0.unwrap())
    }

    /// Vector-Jacobian product with respect to the input.
    pub fn vjp_input(&self, input: &[f64], cotangent: &[f64]) -> Result<Vec<f64>> {
        self.check_output(cotangent)?;
        let trace = self.trace(input)?;
        Ok(self.backward(&trace, cotangent, false).1)
    }

    /// Output value and input gradient of a scalar-output net.
    pub fn value_and_input_grad(&self, input: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_output(&[0.0])?;
        let trace = self.trace(input)?;
        let y = trace.output()[0];
        Ok((y, self.backward(&trace, &[1.0], false).1))
    }

    /// Jacobian `∂y/∂x`, `outputs × inputs`.
    pub fn grad_input(&self, input: &[f64]) -> Result<Vec<Vec<f64>>> {
        let trace = self.trace(input)?;
        let n_out = self.output_dim();
        Ok((0..n_out)
            .map(|o| {
                let mut c = vec![0.0; n_out];
                c[o] = 1.0;
                self.backward(&trace, &c, false).1
            })
            .collect())
    }

    /// For `S = value_cotᵀ·y(x) + slope_cotᵀ·(∂y/∂x · direction)` returns
    /// `(y, ∂y/∂x · direction, ∂S/∂θ)`.
    pub fn directional_grad_params(
        &self,
        input: &[f64],
        direction: &[f64],
        value_cot: &[f64],
        slope_cot: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>, NetGradients)> {
        self.check_input(direction)?;
        self.check_output(value_cot)?;
        self.check_output(slope_cot)?;
        let trace = self.trace(input)?;

        // tangents[l] is the tangent of acts[l]; pre_tangents[l] of layer l's pre-activation
        let mut tangents: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        tangents.push(direction.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut zdot = Vec::with_capacity(layer.n_out);
            layer.linear(tangents.last().unwrap(), &mut zdot);
            if self.is_hidden(i) {
                for (t, a) in zdot.iter_mut().zip(&trace.acts[i + 1]) {
                    *t *= 1.0 - a * a;
                }
            }
            tangents.push(zdot);
        }
        // pre-activation tangent of hidden layer l equals tangents[l+1] / (1 − a²);
        // keep ż explicitly since the reverse sweep needs it.
        let pre_tangent = |l: usize| -> Vec<f64> {
            let layer = &self.layers[l];
            let mut z = Vec::with_capacity(layer.n_out);
            layer.linear(&tangents[l], &mut z);
            z
        };

        let y = trace.output().to_vec();
        let ydot = tangents.last().unwrap().clone();

        let mut grads = NetGradients::zeros_like(self);
        let mut pz = value_cot.to_vec();
        let mut tz = slope_cot.to_vec();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let a_prev = &trace.acts[l];
            let t_prev = &tangents[l];
            let gl = &mut grads.layers[l];
            for o in 0..layer.n_out {
                gl.biases[o] = pz[o];
                let row = &mut gl.weights[o * layer.n_in..(o + 1) * layer.n_in];
                for ((w, a), t) in row.iter_mut().zip(a_prev).zip(t_prev) {
                    *w = pz[o] * a + tz[o] * t;
                }
            }
            if l == 0 {
                break;
            }
            let pa = layer.transpose_mul(&pz);
            let ta = layer.transpose_mul(&tz);
            let zdot = pre_tangent(l - 1);
            let mut new_pz = Vec::with_capacity(a_prev.len());
            let mut new_tz = Vec::with_capacity(a_prev.len());
            for k in 0..a_prev.len() {
                let a = a_prev[k];
                let d1 = 1.0 - a * a;
                let d2 = -2.0 * a * d1;
                new_pz.push(d1 * pa[k] + d2 * zdot[k] * ta[k]);
                new_tz.push(d1 * ta[k]);
            }
            pz = new_pz;
            tz = new_tz;
        }
        Ok((y, ydot, grads))
    }

    /// `θ ← θ − lr·∇θ`. Non-finite gradients leave the net untouched.
    pub fn sgd_step(&mut self, grads: &NetGradients, learning_rate: f64) -> Result<()> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(Error::LearningRate(learning_rate));
        }
        if grads.layers.len() != self.layers.len() {
            return Err(Error::Shape {
                expected: self.layers.len(),
                got: grads.layers.len(),
            });
        }
        for (l, g) in self.layers.iter().zip(&grads.layers) {
            if l.weights.len() != g.weights.len() || l.biases.len() != g.biases.len() {
                return Err(Error::Shape {
                    expected: l.weights.len(),
                    got: g.weights.len(),
                });
            }
        }
        if !grads.is_finite() {
            return Err(Error::NonFiniteGradient);
        }
        for (l, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, gw) in l.weights.iter_mut().zip(&g.weights) {
                *w -= learning_rate * gw;
            }
            for (b, gb) in l.biases.iter_mut().zip(&g.biases) {
                *b -= learning_rate * gb;
            }
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.layer_sizes.len() as u32).to_le_bytes())?;
        for &s in &self.layer_sizes {
            w.write_all(&(s as u32).to_le_bytes())?;
        }
        for l in &self.layers {
            for v in l.weights.iter().chain(&l.biases) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(4 * (1 + self.layer_sizes.len()) + 8 * self.param_count());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let corrupt = |what: &str| Error::CorruptNet(what.to_string());
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf).map_err(|_| corrupt("missing header"))?;
        let count = u32::from_le_bytes(u32buf) as usize;
        if !(2..=64).contains(&count) {
            return Err(corrupt(&format!("implausible layer count {count}")));
        }
        let mut sizes = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut u32buf).map_err(|_| corrupt("truncated header"))?;
            let s = u32::from_le_bytes(u32buf) as usize;
            if s == 0 || s > 1 << 16 {
                return Err(corrupt(&format!("implausible layer size {s}")));
            }
            sizes.push(s);
        }
        let mut net = Self::zeros(&sizes);
        let mut f64buf = [0u8; 8];
        for l in &mut net.layers {
            for v in l.weights.iter_mut().chain(l.biases.iter_mut()) {
                r.read_exact(&mut f64buf).map_err(|_| corrupt("truncated parameters"))?;
                *v = f64::from_le_bytes(f64buf);
            }
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra).map_err(|_| corrupt("read failure"))? != 0 {
            return Err(corrupt("trailing bytes"));
        }
        if !net.is_finite() {
            return Err(corrupt("non-finite parameter"));
        }
        Ok(net)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_layer(n: usize) -> FeedForwardNet {
        let mut net = FeedForwardNet::zeros(&[n, n]);
        for i in 0..n {
            net.layers[0].weights[i * n + i] = 1.0;
        }
        net
    }

    #[test]
    fn identity_and_zero_nets() {
        let net = identity_layer(3);
        assert_eq!(net.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![1.0, -2.0, 0.5]);
        assert_eq!(
            net.grad_input(&[0.3, 0.1, 0.2]).unwrap(),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );

        let zero = FeedForwardNet::zeros(&[4, 8, 8, 2]);
        assert_eq!(zero.forward(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![0.0, 0.0]);

        // composition of two identity layers (with tanh in between the
        // derivative at the origin is still the identity)
        let mut two = FeedForwardNet::zeros(&[2, 2, 2]);
        for l in two.layers_mut() {
            l.weights = vec![1.0, 0.0, 0.0, 1.0];
        }
        assert_eq!(
            two.grad_input(&[0.0, 0.0]).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn hand_built_two_one_net() {
        // y = 0.5·tanh(0.3·x₁ − 0.7·x₂ + 0.1) − 0.2
        let net = FeedForwardNet::from_layers(vec![
            Dense {
                n_in: 2,
                n_out: 1,
                weights: vec![0.3, -0.7],
                biases: vec![0.1],
            },
            Dense {
                n_in: 1,
                n_out: 1,
                weights: vec![0.5],
                biases: vec![-0.2],
            },
        ])
        .unwrap();
        let y = net.forward(&[1.0, 2.0]).unwrap()[0];
        // tanh(-1.0) = -0.7615941559557649
        let expected = 0.5 * -0.761_594_155_955_764_9 - 0.2;
        assert!((y - expected).abs() < 1e-15, "{y}");
    }

    #[test]
    fn linear_layer_gradients() {
        let mut net = FeedForwardNet::zeros(&[3, 2]);
        net.layers[0].weights = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = [0.5, -1.0, 2.0];
        let g = net.grad_params(&x, &[1.0, 0.0]).unwrap();
        assert_eq!(&g.layers[0].weights[..3], &x);
        assert_eq!(&g.layers[0].weights[3..], &[0.0; 3]);
        assert_eq!(g.layers[0].biases, vec![1.0, 0.0]);
        assert_eq!(
            net.grad_input(&x).unwrap(),
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]
        );

        let zero = net.grad_params(&x, &[0.0, 0.0]).unwrap();
        assert!(zero.flat().all(|v| v == 0.0));
    }

    #[test]
    fn shape_errors() {
        let net = FeedForwardNet::zeros(&[3, 4, 2]);
        assert!(matches!(net.forward(&[1.0]), Err(Error::Shape { expected: 3, got: 1 })));
        assert!(net.grad_params(&[0.0; 3], &[1.0]).is_err());
        assert!(net.directional_grad_params(&[0.0; 3], &[0.0; 2], &[0.0; 2], &[0.0; 2]).is_err());
        let mut other = FeedForwardNet::zeros(&[3, 2]);
        let g = NetGradients::zeros_like(&net);
        assert!(other.sgd_step(&g, 0.1).is_err());
    }

    #[test]
    fn sgd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut net = FeedForwardNet::new_random(&[3, 5, 2], &mut rng);
        let before = net.clone();
        net.sgd_step(&NetGradients::zeros_like(&net), 0.1).unwrap();
        assert_eq!(net, before);

        let mut scalar = FeedForwardNet::zeros(&[1, 1]);
        scalar.layers[0].biases[0] = 1.0;
        let mut g = NetGradients::zeros_like(&scalar);
        g.layers[0].biases[0] = 2.0;
        scalar.sgd_step(&g, 0.1).unwrap();
        assert!((scalar.layers[0].biases[0] - 0.8).abs() < 1e-15);

        assert!(matches!(scalar.sgd_step(&g, 0.0), Err(Error::LearningRate(_))));
        g.layers[0].weights[0] = f64::NAN;
        let snapshot = scalar.clone();
        assert!(matches!(scalar.sgd_step(&g, 0.1), Err(Error::NonFiniteGradient)));
        assert_eq!(scalar, snapshot);
    }

    #[test]
    fn quadratic_descent_converges() {
        // loss (p − 3)² on the bias of a 1-1 net with zero weight
        let mut net = FeedForwardNet::zeros(&[1, 1]);
        for _ in 0..100 {
            let p = net.forward(&[0.0]).unwrap()[0];
            let g = net.grad_params(&[0.0], &[2.0 * (p - 3.0)]).unwrap();
            net.sgd_step(&g, 0.1).unwrap();
        }
        let p = net.layers[0].biases[0];
        // closed form: 3·(1 − 0.8¹⁰⁰)
        assert!((p - 3.0).abs() < 1e-6);
        assert!((p - 3.0 * (1.0 - 0.8f64.powi(100))).abs() < 1e-12);
    }

    #[test]
    fn seeded_init_is_reproducible() {
        let a = FeedForwardNet::new_random(&[18, 64, 64, 9], &mut ChaCha8Rng::seed_from_u64(3));
        let b = FeedForwardNet::new_random(&[18, 64, 64, 9], &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a.to_bytes(), b.to_bytes());
        let bound = (6.0f64 / (18.0 + 64.0)).sqrt();
        assert!(a.layers[0].weights.iter().all(|w| w.abs() <= bound));
        assert!(a.layers.iter().all(|l| l.biases.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn serialization_layout() {
        let mut net = FeedForwardNet::zeros(&[2, 1]);
        net.layers[0].weights = vec![1.5, -2.0];
        net.layers[0].biases = vec![0.25];
        let bytes = net.to_bytes();
        let mut expected = Vec::new();
        for v in [2u32, 2, 1] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        for v in [1.5f64, -2.0, 0.25] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(bytes, expected);
        assert!(FeedForwardNet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(FeedForwardNet::from_bytes(&longer).is_err());
        assert!(FeedForwardNet::from_bytes(&[1, 0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(seed in 0u64..1000, hidden in 1usize..12) {
            let net = FeedForwardNet::new_random(&[4, hidden, 3], &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(FeedForwardNet::from_bytes(&net.to_bytes()).unwrap(), net);
        }

        #[test]
        fn odd_activation_makes_bias_free_nets_odd(seed in 0u64..1000, x in prop::array::uniform3(-2.0f64..2.0)) {
            let net = FeedForwardNet::new_random(&[3, 6, 6, 2], &mut ChaCha8Rng::seed_from_u64(seed));
            let y = net.forward(&x).unwrap();
            let yn = net.forward(&x.map(|v| -v)).unwrap();
            for k in 0..2 {
                prop_assert!((y[k] + yn[k]).abs() < 1e-12);
            }
        }
    }
}
