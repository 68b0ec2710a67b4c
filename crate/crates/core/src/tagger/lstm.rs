//! Unidirectional LSTM with hand-written backward pass.
//!
//! Gate layout in the `4H` pre-activation vector: input, forget, output,
//! candidate. `h_0 = c_0 = 0`.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use super::params::LstmWeights;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub struct LstmCache {
    /// `[x_t; h_{t-1}]` per step, `T x (D + H)`.
    joint: Array2<f64>,
    gates: Array2<f64>,
    cells: Array2<f64>,
    /// Outputs `h_t`, `T x H`.
    pub hidden: Array2<f64>,
}

pub fn forward(weights: &LstmWeights, inputs: ArrayView2<f64>) -> LstmCache {
    let (len, dim) = inputs.dim();
    let h = weights.hidden();
    let mut joint = Array2::zeros((len, dim + h));
    let mut gates = Array2::zeros((len, 4 * h));
    let mut cells = Array2::zeros((len, h));
    let mut hidden = Array2::zeros((len, h));
    let mut h_prev = Array1::<f64>::zeros(h);
    let mut c_prev = Array1::<f64>::zeros(h);
    for t in 0..len {
        {
            let mut row = joint.row_mut(t);
            row.slice_mut(s![..dim]).assign(&inputs.row(t));
            row.slice_mut(s![dim..]).assign(&h_prev);
        }
        let z = weights.w.dot(&joint.row(t)) + &weights.b;
        let mut g = gates.row_mut(t);
        for u in 0..h {
            let i = sigmoid(z[u]);
            let f = sigmoid(z[h + u]);
            let o = sigmoid(z[2 * h + u]);
            let cand = z[3 * h + u].tanh();
            let c = f * c_prev[u] + i * cand;
            g[u] = i;
            g[h + u] = f;
            g[2 * h + u] = o;
            g[3 * h + u] = cand;
            cells[[t, u]] = c;
            hidden[[t, u]] = o * c.tanh();
        }
        h_prev = hidden.row(t).to_owned();
        c_prev = cells.row(t).to_owned();
    }
    LstmCache { joint, gates, cells, hidden }
}

pub struct LstmGrad {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub inputs: Array2<f64>,
}

/// Backpropagate `d_hidden` (`T x H`, gradient of the loss w.r.t. each
/// output) through the recurrence.
pub fn backward(weights: &LstmWeights, cache: &LstmCache, d_hidden: ArrayView2<f64>) -> LstmGrad {
    let (len, h) = cache.hidden.dim();
    let dim = cache.joint.ncols() - h;
    let mut dw = Array2::zeros(weights.w.dim());
    let mut db = Array1::zeros(4 * h);
    let mut d_inputs = Array2::zeros((len, dim));
    let mut dh_next = Array1::<f64>::zeros(h);
    let mut dc_next = Array1::<f64>::zeros(h);
    let mut dz = Array1::<f64>::zeros(4 * h);
    for t in (0..len).rev() {
        let g = cache.gates.row(t);
        for u in 0..h {
            let (i, f, o, cand) = (g[u], g[h + u], g[2 * h + u], g[3 * h + u]);
            let c = cache.cells[[t, u]];
            let c_prev = if t > 0 { cache.cells[[t - 1, u]] } else { 0.0 };
            let tc = c.tanh();
            let dh = d_hidden[[t, u]] + dh_next[u];
            let dc = dh * o * (1.0 - tc * tc) + dc_next[u];
            dz[u] = dc * cand * i * (1.0 - i);
            dz[h + u] = dc * c_prev * f * (1.0 - f);
            dz[2 * h + u] = dh * tc * o * (1.0 - o);
            dz[3 * h + u] = dc * i * (1.0 - cand * cand);
            dc_next[u] = dc * f;
        }
        let joint = cache.joint.row(t);
        dw += &dz.view().insert_axis(Axis(1)).dot(&joint.insert_axis(Axis(0)));
        db += &dz;
        let d_joint = weights.w.t().dot(&dz);
        d_inputs.row_mut(t).assign(&d_joint.slice(s![..dim]));
        dh_next.assign(&d_joint.slice(s![dim..]));
    }
    LstmGrad { w: dw, b: db, inputs: d_inputs }
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_weights(rng: &mut ChaCha8Rng, dim: usize, h: usize) -> LstmWeights {
        LstmWeights {
            w: Array2::from_shape_fn((4 * h, dim + h), |_| rng.gen_range(-0.5..0.5)),
            b: Array1::from_shape_fn(4 * h, |_| rng.gen_range(-0.5..0.5)),
        }
    }

    #[test]
    fn zero_weights_give_zero_states() {
        let w = LstmWeights { w: Array2::zeros((8, 5)), b: Array1::zeros(8) };
        let x = Array2::from_elem((4, 3), 1.0);
        let c = forward(&w, x.view());
        // i = f = o = 0.5, candidate = 0 so c = 0 and h = 0.5 * tanh(0) = 0
        assert!(c.hidden.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (t, dim, h) = (4, 3, 2);
        let w = random_weights(&mut rng, dim, h);
        let x = Array2::from_shape_fn((t, dim), |_| rng.gen_range(-1.0..1.0));
        let proj = Array2::from_shape_fn((t, h), |_| rng.gen_range(-1.0..1.0));
        let loss = |w: &LstmWeights, x: &Array2<f64>| (forward(w, x.view()).hidden * &proj).sum();
        let g = backward(&w, &forward(&w, x.view()), proj.view());
        let eps = 1e-6;
        for idx in 0..w.w.len() {
            let (r, c) = (idx / w.w.ncols(), idx % w.w.ncols());
            let mut p = w.clone();
            p.w[[r, c]] += eps;
            let mut m = w.clone();
            m.w[[r, c]] -= eps;
            let fd = (loss(&p, &x) - loss(&m, &x)) / (2.0 * eps);
            assert!((fd - g.w[[r, c]]).abs() < 1e-7);
        }
        for r in 0..t {
            for c in 0..dim {
                let mut p = x.clone();
                p[[r, c]] += eps;
                let mut m = x.clone();
                m[[r, c]] -= eps;
                let fd = (loss(&w, &p) - loss(&w, &m)) / (2.0 * eps);
                assert!((fd - g.inputs[[r, c]]).abs() < 1e-7);
            }
        }
    }
}
