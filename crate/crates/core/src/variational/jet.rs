/// Truncated Taylor series c_0 + c_1 t + … + c_K t^K, used to carry exact derivatives
/// through compositions of smooth functions.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Jet(Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The affine map t ↦ x0 + slope·t.
    pub fn affine(x0: f64, slope: f64, order: usize) -> Self {
        let mut v = Jet::constant(x0, order).0;
        if order > 0 {
            v[1] = slope;
        }
        Jet(v)
    }

    fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let k = self.order();
        Jet((0..=k)
            .map(|n| (0..=n).map(|m| self.0[m] * other.0[n - m]).sum())
            .collect())
    }

    pub fn recip(&self) -> Jet {
        let b = &self.0;
        let mut c = vec![0.0; b.len()];
        c[0] = 1.0 / b[0];
        for n in 1..b.len() {
            let s: f64 = (1..=n).map(|m| b[m] * c[n - m]).sum();
            c[n] = -s * c[0];
        }
        Jet(c)
    }

    /// From y' = a'y: n·y_n = Σ_{m=1}^n m a_m y_{n−m}.
    pub fn exp(&self) -> Jet {
        let a = &self.0;
        let mut y = vec![0.0; a.len()];
        y[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|m| m as f64 * a[m] * y[n - m]).sum();
            y[n] = s / n as f64;
        }
        Jet(y)
    }

    /// f^{(k)} = k!·c_k.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_square_matches_hermite() {
        // d^k/dt^k e^{−t²} = (−1)^k H_k(t) e^{−t²}.
        let t = 0.3;
        let x = Jet::affine(t, 1.0, 4);
        let d = x.mul(&x).scale(-1.0).exp().derivatives();
        let g = (-t * t).exp();
        let h = [
            1.0,
            2.0 * t,
            4.0 * t * t - 2.0,
            8.0 * t.powi(3) - 12.0 * t,
            16.0 * t.powi(4) - 48.0 * t * t + 12.0,
        ];
        for k in 0..=4 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((d[k] - sign * h[k] * g).abs() < 1e-13, "order {k}");
        }
    }

    #[test]
    fn reciprocal_series() {
        let d = Jet::affine(2.0, 1.0, 3).recip().derivatives();
        let expected = [0.5, -0.25, 0.25, -0.375];
        for (a, b) in d.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let one = Jet::affine(2.0, 1.0, 3).mul(&Jet::affine(2.0, 1.0, 3).recip());
        assert_eq!(one, Jet::constant(1.0, 3));
    }
}
