//! Linear hinge-loss classifier trained by stochastic subgradient descent,
//! followed by a fitted logistic calibration of its margins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    /// L2 regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub initial_step: f64,
    /// Reweights the hinge loss so both classes carry equal total weight.
    pub balance_classes: bool,
}

impl Default for LinearConfig {
    fn default() -> Self {
        LinearConfig {
            lambda: 1e-3,
            epochs: 60,
            initial_step: 0.1,
            balance_classes: true,
        }
    }
}

/// `p = 1 / (1 + exp(a * margin + b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigmoid {
    pub a: f64,
    pub b: f64,
}

impl Sigmoid {
    pub fn apply(&self, margin: f64) -> f64 {
        let z = self.a * margin + self.b;
        if z >= 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        }
    }

    /// Platt's method with the regularized targets of Lin, Lin and Weng,
    /// solved by Newton iterations with backtracking.
    pub fn fit(margins: &[f64], labels: &[bool]) -> Sigmoid {
        let n_pos = labels.iter().filter(|l| **l).count() as f64;
        let n_neg = labels.len() as f64 - n_pos;
        let hi = (n_pos + 1.0) / (n_pos + 2.0);
        let lo = 1.0 / (n_neg + 2.0);
        let targets: Vec<f64> = labels.iter().map(|&l| if l { hi } else { lo }).collect();

        let objective = |a: f64, b: f64| -> f64 {
            margins
                .iter()
                .zip(&targets)
                .map(|(&f, &t)| {
                    let z = a * f + b;
                    // t * log(1 + e^z) + (1 - t) * log(1 + e^-z), written stably
                    if z >= 0.0 {
                        t * z + (1.0 + (-z).exp()).ln()
                    } else {
                        (t - 1.0) * z + (1.0 + z.exp()).ln()
                    }
                })
                .sum()
        };

        let mut a = 0.0;
        let mut b = ((n_neg + 1.0) / (n_pos + 1.0)).ln();
        let mut f = objective(a, b);
        for _ in 0..100 {
            let (mut h11, mut h22, mut h21, mut g1, mut g2) = (1e-12, 1e-12, 0.0, 0.0, 0.0);
            for (&m, &t) in margins.iter().zip(&targets) {
                let sig = Sigmoid { a, b };
                let p = sig.apply(m);
                let q = 1.0 - p;
                let d2 = p * q;
                h11 += m * m * d2;
                h22 += d2;
                h21 += m * d2;
                let d1 = t - p;
                g1 += m * d1;
                g2 += d1;
            }
            if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
                break;
            }
            let det = h11 * h22 - h21 * h21;
            let da = -(h22 * g1 - h21 * g2) / det;
            let db = -(-h21 * g1 + h11 * g2) / det;
            let gd = g1 * da + g2 * db;
            let mut step = 1.0;
            let mut improved = false;
            while step >= 1e-10 {
                let (na, nb) = (a + step * da, b + step * db);
                let nf = objective(na, nb);
                if nf < f + 1e-4 * step * gd {
                    a = na;
                    b = nb;
                    f = nf;
                    improved = true;
                    break;
                }
                step /= 2.0;
            }
            if !improved {
                break;
            }
        }
        Sigmoid { a, b }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature mean and scale applied before the dot product.
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub calibration: Sigmoid,
}

impl LinearModel {
    pub fn margin(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .zip(&self.weights)
            .map(|(((v, m), s), w)| (v - m) / s * w)
            .sum::<f64>()
            + self.bias
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.calibration.apply(self.margin(x))
    }

    pub fn fit(xs: &[Vec<f64>], ys: &[bool], config: &LinearConfig, seed: u64) -> LinearModel {
        let d = xs[0].len();
        let n = xs.len() as f64;
        let mut mean = vec![0.0; d];
        for x in xs {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for x in xs {
            for ((s, v), m) in scale.iter_mut().zip(x).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
        }
        let zs: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| x.iter().zip(&mean).zip(&scale).map(|((v, m), s)| (v - m) / s).collect())
            .collect();

        let n_pos = ys.iter().filter(|y| **y).count() as f64;
        let n_neg = n - n_pos;
        let (c_pos, c_neg) = if config.balance_classes {
            (n / (2.0 * n_pos), n / (2.0 * n_neg))
        } else {
            (1.0, 1.0)
        };

        let mut w = vec![0.0; d];
        let mut bias = 0.0;
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = 0.0;
        for _ in 0..config.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let eta = config.initial_step / (1.0 + config.initial_step * config.lambda * t);
                t += 1.0;
                let y = if ys[i] { 1.0 } else { -1.0 };
                let c = if ys[i] { c_pos } else { c_neg };
                let m = y * (dot(&w, &zs[i]) + bias);
                for wj in &mut w {
                    *wj *= 1.0 - eta * config.lambda;
                }
                if m < 1.0 {
                    for (wj, zj) in w.iter_mut().zip(&zs[i]) {
                        *wj += eta * c * y * zj;
                    }
                    bias += eta * c * y;
                }
            }
        }

        let margins: Vec<f64> = zs.iter().map(|z| dot(&w, z) + bias).collect();
        let calibration = Sigmoid::fit(&margins, ys);
        LinearModel {
            weights: w,
            bias,
            mean,
            scale,
            calibration,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_calibration_midpoint() {
        let s = Sigmoid { a: -1.7, b: 0.0 };
        assert_eq!(s.apply(0.0), 0.5);
        assert!(s.apply(3.0) > 0.5);
        assert!(s.apply(-3.0) < 0.5);
    }

    #[test]
    fn separable_toy_set() {
        let xs = vec![
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0],
            vec![3.0, 0.0],
        ];
        let ys = vec![true, true, false, false, false, false];
        let m = LinearModel::fit(&xs, &ys, &LinearConfig::default(), 7);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.margin(x) > 0.0, *y, "{x:?}");
            assert_eq!(m.predict_proba(x) > 0.5, *y);
        }
    }

    #[test]
    fn calibration_orders_margins() {
        let margins = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
        let labels = [false, false, true, false, true, true];
        let s = Sigmoid::fit(&margins, &labels);
        assert!(s.a < 0.0);
        assert!(s.apply(2.0) > s.apply(-2.0));
    }
}
