//! Test-only statistics and numerical oracles. Nothing here calls into the
//! code paths it is used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = cdf(v);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic, using the Kolmogorov
/// distribution with the usual small-sample correction.
pub fn ks_two_sample_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    kolmogorov_survival(lambda)
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// One-sided F test of `var(larger) > var(smaller)`; returns the p-value.
pub fn variance_ratio_p_value(smaller: &[f64], larger: &[f64]) -> f64 {
    let f = variance(larger) / variance(smaller);
    let dist = FisherSnedecor::new((larger.len() - 1) as f64, (smaller.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(f)
}

/// One-sided Welch t test of `mean(larger) > mean(smaller)`; returns the p-value.
pub fn welch_p_value(smaller: &[f64], larger: &[f64]) -> f64 {
    let (n1, n2) = (smaller.len() as f64, larger.len() as f64);
    let (v1, v2) = (variance(smaller) / n1, variance(larger) / n2);
    let t = (mean(larger) - mean(smaller)) / (v1 + v2).sqrt();
    let df = (v1 + v2).powi(2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
    1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t)
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Eigenvalues of a symmetric 2x2 or 3x3 matrix from closed forms, ascending.
pub fn closed_form_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    match m.nrows() {
        1 => vec![m[(0, 0)]],
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let r = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
            vec![(a + c - r) / 2.0, (a + c + r) / 2.0]
        }
        3 => {
            // Trigonometric solution of the characteristic cubic.
            let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
            let q = (m[(0, 0)] + m[(1, 1)] + m[(2, 2)]) / 3.0;
            let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
            let p = (p2 / 6.0).sqrt();
            if p == 0.0 {
                return vec![q; 3];
            }
            let b = (m - DMatrix::identity(3, 3) * q) / p;
            let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
            let e2 = 3.0 * q - e1 - e3;
            let mut v = vec![e1, e2, e3];
            v.sort_by(f64::total_cmp);
            v
        }
        n => panic!("no closed form for dimension {n}"),
    }
}

/// Finite-difference Jacobian check of `U -> U U^t` on a chordal pattern.
///
/// `children[a]` lists the later positions that row `a` of the factor may
/// use. The factor is charted by those entries (the diagonal being
/// `sqrt(1 - |x_a|^2)`), the image by the upper-triangular entries on arcs.
pub struct JacobianOracle {
    pub children: Vec<Vec<usize>>,
    pub parents: Vec<usize>,
}

impl JacobianOracle {
    pub fn new(children: Vec<Vec<usize>>) -> Self {
        let p = children.len();
        let mut parents = vec![0; p];
        for ch in &children {
            for &c in ch {
                parents[c] += 1;
            }
        }
        Self { children, parents }
    }

    pub fn p(&self) -> usize {
        self.children.len()
    }

    pub fn dim(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    fn factor(&self, x: &[f64]) -> DMatrix<f64> {
        let p = self.p();
        let mut u = DMatrix::zeros(p, p);
        let mut k = 0;
        for a in 0..p {
            let row = &x[k..k + self.children[a].len()];
            k += row.len();
            u[(a, a)] = (1.0 - row.iter().map(|v| v * v).sum::<f64>()).sqrt();
            for (&c, &v) in self.children[a].iter().zip(row) {
                u[(a, c)] = v;
            }
        }
        u
    }

    fn image(&self, x: &[f64]) -> Vec<f64> {
        let u = self.factor(x);
        let m = &u * u.transpose();
        self.children
            .iter()
            .enumerate()
            .flat_map(|(a, ch)| ch.iter().map(move |&c| (a, c)))
            .map(|(a, c)| m[(a, c)])
            .collect()
    }

    /// `|det d(image)/dx|` by central differences.
    pub fn chart_determinant(&self, x: &[f64], h: f64) -> f64 {
        let d = self.dim();
        let mut jac = DMatrix::zeros(d, d);
        let mut xp = x.to_vec();
        for k in 0..d {
            xp[k] = x[k] + h;
            let fp = self.image(&xp);
            xp[k] = x[k] - h;
            let fm = self.image(&xp);
            xp[k] = x[k];
            for r in 0..d {
                jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        jac.determinant().abs()
    }

    /// Area element of the chart of each hemisphere row, `sqrt(det(T^t T))`
    /// with `T` the finite-difference Jacobian of `x_a -> (u_aa(x_a), x_a)`.
    pub fn area_element(&self, x: &[f64], h: f64) -> f64 {
        let mut total = 1.0;
        let mut k = 0;
        for ch in &self.children {
            let n = ch.len();
            let row = &x[k..k + n];
            k += n;
            if n == 0 {
                continue;
            }
            let head = |y: &[f64]| (1.0 - y.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let mut t = DMatrix::zeros(n + 1, n);
            let mut y = row.to_vec();
            for j in 0..n {
                y[j] = row[j] + h;
                let fp = head(&y);
                y[j] = row[j] - h;
                let fm = head(&y);
                y[j] = row[j];
                t[(0, j)] = (fp - fm) / (2.0 * h);
                t[(j + 1, j)] = 1.0;
            }
            total *= (t.transpose() * &t).determinant().sqrt();
        }
        total
    }

    /// `prod_a u_aa^(|pa(a)| + exponent_offset)`.
    pub fn diagonal_power(&self, x: &[f64], exponent_offset: i32) -> f64 {
        let u = self.factor(x);
        (0..self.p())
            .map(|a| u[(a, a)].powi(self.parents[a] as i32 + exponent_offset))
            .product()
    }
}

pub fn coefficient_of_variation(x: &[f64]) -> f64 {
    variance(x).sqrt() / mean(x).abs()
}
