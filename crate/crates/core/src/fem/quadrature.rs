//! Symmetric quadrature rules on simplices, in barycentric coordinates.
//!
//! Weights are normalized to sum to one; multiply by the element volume.

#![allow(clippy::excessive_precision)]

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    degree: usize,
    points: Vec<[f64; 4]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// A rule on `dim`-simplices exact for polynomials of degree `order`.
    ///
    /// Order 2 selects the `(d+1)`-point rules; orders 3 and 4 select a
    /// higher rule (Gauss 3-point in 1D, 6 points in 2D, 14 points in 3D).
    pub fn simplex(dim: usize, order: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid("quadrature dimension must be 1, 2 or 3"));
        }
        match order {
            2 => Ok(Self::degree_two(dim)),
            3 | 4 => Ok(Self::degree_four(dim)),
            _ => Err(Error::invalid("quadrature order must be 2, 3 or 4")),
        }
    }

    fn degree_two(dim: usize) -> Self {
        let mut rule = QuadratureRule {
            dim,
            degree: 2,
            points: Vec::new(),
            weights: Vec::new(),
        };
        match dim {
            1 => {
                let s = 0.5 / 3f64.sqrt();
                rule.push(&[0.5 + s, 0.5 - s], 0.5);
                rule.push(&[0.5 - s, 0.5 + s], 0.5);
            }
            2 => rule.orbit(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
            _ => {
                let a = (5.0 - 5f64.sqrt()) / 20.0;
                let b = 1.0 - 3.0 * a;
                rule.orbit(&[b, a, a, a], 0.25);
            }
        }
        rule
    }

    fn degree_four(dim: usize) -> Self {
        let mut rule = QuadratureRule {
            dim,
            degree: 4,
            points: Vec::new(),
            weights: Vec::new(),
        };
        match dim {
            1 => {
                rule.degree = 5;
                let s = 0.5 * (0.6f64).sqrt();
                rule.push(&[0.5 + s, 0.5 - s], 5.0 / 18.0);
                rule.push(&[0.5, 0.5], 8.0 / 18.0);
                rule.push(&[0.5 - s, 0.5 + s], 5.0 / 18.0);
            }
            2 => {
                let a = 0.445_948_490_915_964_886_32;
                rule.orbit(&[1.0 - 2.0 * a, a, a], 0.223_381_589_678_011_465_7);
                let a = 0.091_576_213_509_770_743_46;
                rule.orbit(&[1.0 - 2.0 * a, a, a], 0.109_951_743_655_321_867_64);
            }
            _ => {
                rule.degree = 5;
                let a = 0.092_735_250_310_891_226_402;
                rule.orbit(&[1.0 - 3.0 * a, a, a, a], 0.073_493_043_116_361_949_544);
                let a = 0.310_885_919_263_300_609_8;
                rule.orbit(&[1.0 - 3.0 * a, a, a, a], 0.112_687_925_718_015_850_8);
                let a = 0.045_503_704_125_649_649_492;
                rule.orbit(&[0.5 - a, 0.5 - a, a, a], 0.042_546_020_777_081_466_438);
            }
        }
        rule
    }

    fn push(&mut self, lambda: &[f64], weight: f64) {
        let mut p = [0.0; 4];
        p[..lambda.len()].copy_from_slice(lambda);
        self.points.push(p);
        self.weights.push(weight);
    }

    /// Adds every distinct permutation of `lambda`, each with `weight`.
    fn orbit(&mut self, lambda: &[f64], weight: f64) {
        let n = lambda.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut seen: Vec<[f64; 4]> = Vec::new();
        loop {
            let mut p = [0.0; 4];
            for (slot, &i) in perm.iter().enumerate() {
                p[slot] = lambda[i];
            }
            if !seen.contains(&p) {
                seen.push(p);
                self.push(&p[..n], weight);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(barycentric point, normalized weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 4], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Exact average of `prod lambda_a^alpha_a` over a d-simplex.
    fn exact_moment(dim: usize, alpha: &[usize]) -> f64 {
        let total: usize = alpha.iter().sum();
        factorial(dim) * alpha.iter().map(|&a| factorial(a)).product::<f64>() / factorial(dim + total)
    }

    fn check_exactness(dim: usize, order: usize) {
        let rule = QuadratureRule::simplex(dim, order).unwrap();
        let mut alpha = [0usize; 4];
        let limit = rule.degree() + 1;
        let count = limit.pow(dim as u32 + 1);
        for code in 0..count {
            let mut c = code;
            for a in alpha.iter_mut().take(dim + 1) {
                *a = c % limit;
                c /= limit;
            }
            if alpha[..=dim].iter().sum::<usize>() > rule.degree() {
                continue;
            }
            let approx: f64 = rule
                .iter()
                .map(|(p, w)| {
                    w * (0..=dim)
                        .map(|a| p[a].powi(alpha[a] as i32))
                        .product::<f64>()
                })
                .sum();
            let exact = exact_moment(dim, &alpha[..=dim]);
            assert!(
                (approx - exact).abs() < 1e-15,
                "d={dim} order={order} alpha={alpha:?}: {approx} vs {exact}"
            );
        }
    }

    #[test]
    fn rules_integrate_their_degree_exactly() {
        for dim in 1..=3 {
            for order in [2, 4] {
                check_exactness(dim, order);
            }
        }
    }

    #[test]
    fn point_counts() {
        assert_eq!(QuadratureRule::simplex(1, 2).unwrap().len(), 2);
        assert_eq!(QuadratureRule::simplex(2, 2).unwrap().len(), 3);
        assert_eq!(QuadratureRule::simplex(3, 2).unwrap().len(), 4);
        assert_eq!(QuadratureRule::simplex(2, 4).unwrap().len(), 6);
        assert_eq!(QuadratureRule::simplex(3, 4).unwrap().len(), 14);
        assert!(QuadratureRule::simplex(2, 1).is_err());
    }
}
