//! Truncated Taylor expansions ("jets") in the spatial variable.
//!
//! A jet of order `d` centred at `x₀` stores `f^(k)(x₀) / k!` for
//! `k = 0..=d`. Products are truncated Cauchy products, so every
//! derivative the solvers need comes out exact to machine precision.

use thiserror::Error;

/// Arguments of `csch` closer to zero than this are reported as poles.
pub const CSCH_POLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet mismatch: ({left_center}, order {left_order}) vs ({right_center}, order {right_order})")]
    Mismatch { left_center: f64, left_order: usize, right_center: f64, right_order: usize },
    #[error("pole at x = {center}")]
    Pole { center: f64 },
    #[error("derivative of order {requested} needs a jet of at least that order, got {available}")]
    InsufficientOrder { requested: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    Exp,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Csch,
    Reciprocal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    center: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet of the identity `f(x) = x` at `x0`.
    pub fn lift(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Self { center: x0, coeffs }
    }

    pub fn constant(x0: f64, order: usize, value: f64) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { center: x0, coeffs }
    }

    pub fn zero(x0: f64, order: usize) -> Self {
        Self::constant(x0, order, 0.0)
    }

    /// Build a jet from scaled Taylor coefficients `f^(k)(x₀)/k!`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(x0: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value coefficient");
        Self { center: x0, coeffs }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The k-th derivative value `f^(k)(x₀)`.
    pub fn derivative_value(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial_ratio(k, 0)
    }

    fn check_compatible(&self, other: &Jet) -> Result<(), JetError> {
        if self.center == other.center && self.order() == other.order() {
            Ok(())
        } else {
            Err(JetError::Mismatch {
                left_center: self.center,
                left_order: self.order(),
                right_center: other.center,
                right_order: other.order(),
            })
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Jet { center: self.center, coeffs })
    }

    /// `self + c·other`, the workhorse of linear combinations.
    pub fn add_scaled(&mut self, c: f64, other: &Jet) -> Result<(), JetError> {
        self.check_compatible(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet { center: self.center, coeffs: self.coeffs.iter().map(|a| c * a).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for (k, out) in coeffs.iter_mut().enumerate() {
            *out = (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum();
        }
        Ok(Jet { center: self.center, coeffs })
    }

    /// Drop coefficients above `order`.
    ///
    /// # Panics
    /// If `order` exceeds the jet's order.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order(), "cannot truncate a jet to a higher order");
        Jet { center: self.center, coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Jet of `f^(k)`, of order `self.order() - k`.
    pub fn derivative(&self, k: usize) -> Result<Jet, JetError> {
        if k > self.order() {
            return Err(JetError::InsufficientOrder { requested: k, available: self.order() });
        }
        let coeffs = (0..=self.order() - k).map(|i| self.coeffs[i + k] * factorial_ratio(i + k, i)).collect();
        Ok(Jet { center: self.center, coeffs })
    }

    pub fn exp(&self) -> Jet {
        // g = exp(f), g' = f'g  =>  k g_k = Σ_{j=1..k} j f_j g_{k-j}
        let n = self.coeffs.len();
        let mut g = vec![0.0; n];
        g[0] = self.coeffs[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * g[k - j]).sum();
            g[k] = s / k as f64;
        }
        Jet { center: self.center, coeffs: g }
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let f0 = self.coeffs[0];
        if f0 == 0.0 || !f0.is_finite() {
            return Err(JetError::Pole { center: self.center });
        }
        let n = self.coeffs.len();
        let mut g = vec![0.0; n];
        g[0] = 1.0 / f0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * g[k - j]).sum();
            g[k] = -s / f0;
        }
        Ok(Jet { center: self.center, coeffs: g })
    }

    fn sinh_cosh(&self) -> (Jet, Jet) {
        let ep = self.exp();
        let em = self.scale(-1.0).exp();
        let sinh =
            Jet { center: self.center, coeffs: ep.coeffs.iter().zip(&em.coeffs).map(|(a, b)| 0.5 * (a - b)).collect() };
        let cosh =
            Jet { center: self.center, coeffs: ep.coeffs.iter().zip(&em.coeffs).map(|(a, b)| 0.5 * (a + b)).collect() };
        (sinh, cosh)
    }

    /// Compose an elementary function with this jet.
    pub fn elementary(&self, kind: Elementary) -> Result<Jet, JetError> {
        match kind {
            Elementary::Exp => Ok(self.exp()),
            Elementary::Sinh => Ok(self.sinh_cosh().0),
            Elementary::Cosh => Ok(self.sinh_cosh().1),
            Elementary::Tanh => {
                let (s, c) = self.sinh_cosh();
                s.mul(&c.recip()?)
            }
            Elementary::Sech => self.sinh_cosh().1.recip(),
            Elementary::Csch => {
                if self.coeffs[0].abs() < CSCH_POLE_TOLERANCE {
                    return Err(JetError::Pole { center: self.center });
                }
                self.sinh_cosh().0.recip()
            }
            Elementary::Reciprocal => self.recip(),
        }
    }
}

/// n! / m! for m ≤ n.
fn factorial_ratio(n: usize, m: usize) -> f64 {
    ((m + 1)..=n).fold(1.0, |acc, i| acc * i as f64)
}
