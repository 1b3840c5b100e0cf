//! Univariate basis functions: Bernstein polynomials, Bézier extraction of
//! B-splines, two-node Hermite polynomials and Gauss–Legendre rules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Values and first/second derivatives of a univariate basis at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis1d {
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Bernstein polynomials `B_k = C(p,k) ξ^k (1−ξ)^(p−k)` on `[0, 1]`.
pub fn bernstein_eval(degree: usize, xi: f64) -> Result<Basis1d> {
    if degree == 0 {
        return Err(Error::InvalidKnots("Bernstein degree must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    // Triangle of Bernstein values for all degrees up to `degree`.
    let mut levels: Vec<Vec<f64>> = vec![vec![1.0]];
    for q in 1..=degree {
        let prev = &levels[q - 1];
        let mut cur = vec![0.0; q + 1];
        for k in 0..=q {
            let left = if k >= 1 { prev[k - 1] * xi } else { 0.0 };
            let right = if k < q { prev[k] * (1.0 - xi) } else { 0.0 };
            cur[k] = left + right;
        }
        levels.push(cur);
    }
    let at = |q: usize, k: isize| -> f64 {
        if k < 0 || k as usize > q {
            0.0
        } else {
            levels[q][k as usize]
        }
    };
    let p = degree;
    let pf = p as f64;
    let mut d1 = vec![0.0; p + 1];
    let mut d2 = vec![0.0; p + 1];
    for k in 0..=p {
        let ki = k as isize;
        d1[k] = pf * (at(p - 1, ki - 1) - at(p - 1, ki));
        if p >= 2 {
            d2[k] = pf
                * (pf - 1.0)
                * (at(p - 2, ki - 2) - 2.0 * at(p - 2, ki - 1) + at(p - 2, ki));
        }
    }
    Ok(Basis1d {
        values: levels[p].clone(),
        d1,
        d2,
    })
}

/// Checks that a knot vector is nondecreasing and clamped at both ends.
pub fn validate_knots(knots: &[f64], degree: usize) -> Result<()> {
    let m = knots.len();
    if degree == 0 {
        return Err(Error::InvalidKnots("degree must be >= 1".into()));
    }
    if m < 2 * (degree + 1) {
        return Err(Error::InvalidKnots(format!(
            "{m} knots are too few for degree {degree}"
        )));
    }
    if knots.iter().any(|k| !k.is_finite()) {
        return Err(Error::InvalidKnots("non-finite knot".into()));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidKnots("knots must be nondecreasing".into()));
    }
    let first = knots[0];
    let last = knots[m - 1];
    if knots[..=degree].iter().any(|&k| k != first) || knots[m - degree - 1..].iter().any(|&k| k != last)
    {
        return Err(Error::InvalidKnots(
            "knot vector must be open (clamped) at both ends".into(),
        ));
    }
    if last <= first {
        return Err(Error::InvalidKnots("knot vector has no nonzero span".into()));
    }
    Ok(())
}

/// Nonzero knot spans `(span index i, [U_i, U_{i+1}])`; basis functions
/// `i−p ..= i` are supported on span `i`.
pub fn knot_spans(knots: &[f64], degree: usize) -> Vec<(usize, f64, f64)> {
    let m = knots.len();
    (degree..m - degree - 1)
        .filter(|&i| knots[i + 1] > knots[i])
        .map(|i| (i, knots[i], knots[i + 1]))
        .collect()
}

/// Element extraction operators `C^e` such that `N^e(ξ) = C^e B(ξ̃)`, with
/// `ξ̃ ∈ [0,1]` the element-local coordinate and `N^e` the `p+1` B-splines
/// supported on element `e`.
pub fn bezier_extraction(knots: &[f64], degree: usize) -> Result<Vec<DMatrix<f64>>> {
    validate_knots(knots, degree)?;
    let p = degree;
    let m = knots.len();
    let n_el = knot_spans(knots, p).len();

    let mut ops: Vec<DMatrix<f64>> = vec![DMatrix::identity(p + 1, p + 1)];
    let mut alphas = vec![0.0; p + 1];
    let mut a = p;
    let mut b = p + 1;
    let mut nb = 0;
    while b < m - 1 {
        ops.push(DMatrix::identity(p + 1, p + 1));
        let i = b;
        while b < m - 1 && knots[b + 1] == knots[b] {
            b += 1;
        }
        let mult = b - i + 1;
        if mult < p {
            let numer = knots[b] - knots[a];
            for j in (mult + 1..=p).rev() {
                alphas[j - mult - 1] = numer / (knots[a + j] - knots[a]);
            }
            let r = p - mult;
            for j in 1..=r {
                let save = r - j;
                let s = mult + j;
                for k in (s..=p).rev() {
                    let alpha = alphas[k - s];
                    let (left, right) = (ops[nb].column(k).clone_owned(), ops[nb].column(k - 1).clone_owned());
                    ops[nb].set_column(k, &(left * alpha + right * (1.0 - alpha)));
                }
                if b < m - 1 {
                    for row in 0..=j {
                        ops[nb + 1][(save + row, save)] = ops[nb][(p - j + row, p)];
                    }
                }
            }
        }
        nb += 1;
        if b < m - 1 {
            a = b;
            b += 1;
        }
    }
    ops.truncate(n_el);
    Ok(ops)
}

/// Evaluates the B-splines supported on element `e` at the local coordinate
/// `t ∈ [0,1]`; derivatives are with respect to the global knot coordinate.
pub fn extracted_bspline(op: &DMatrix<f64>, degree: usize, t: f64, span_length: f64) -> Result<Basis1d> {
    let b = bernstein_eval(degree, t.clamp(0.0, 1.0))?;
    let apply = |v: &[f64], scale: f64| -> Vec<f64> {
        let bv = DVector::from_column_slice(v);
        (op * bv).iter().map(|x| x * scale).collect()
    };
    Ok(Basis1d {
        values: apply(&b.values, 1.0),
        d1: apply(&b.d1, 1.0 / span_length),
        d2: apply(&b.d2, 1.0 / (span_length * span_length)),
    })
}

/// Two-node Hermite polynomials on `ξ ∈ [−1, 1]`, ordered `(N₁, N₂, H₁, H₂)`:
/// `N_A` interpolate nodal positions and `H_A` nodal derivatives `x_{A,ξ}`.
pub fn hermite_basis(xi: f64) -> Result<Basis1d> {
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let (m, p) = (1.0 - xi, 1.0 + xi);
    let values = vec![
        0.25 * m * m * (2.0 + xi),
        0.25 * p * p * (2.0 - xi),
        0.25 * m * m * p,
        -0.25 * p * p * m,
    ];
    let d1 = vec![
        0.75 * (xi * xi - 1.0),
        0.75 * (1.0 - xi * xi),
        0.25 * (3.0 * xi * xi - 2.0 * xi - 1.0),
        0.25 * (3.0 * xi * xi + 2.0 * xi - 1.0),
    ];
    let d2 = vec![1.5 * xi, -1.5 * xi, 0.25 * (6.0 * xi - 2.0), 0.25 * (6.0 * xi + 2.0)];
    Ok(Basis1d { values, d1, d2 })
}

/// Gauss–Legendre points and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        points[i] = -x;
        points[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (points, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bernstein_examples() {
        let b = bernstein_eval(2, 0.0).unwrap();
        assert_eq!(b.values, vec![1.0, 0.0, 0.0]);
        let b = bernstein_eval(2, 0.5).unwrap();
        assert_eq!(b.values, vec![0.25, 0.5, 0.25]);
        let b = bernstein_eval(3, 0.3).unwrap();
        for (got, want) in b.values.iter().zip([0.343, 0.441, 0.189, 0.027]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        assert!(bernstein_eval(3, 1.2).is_err());
        assert!(bernstein_eval(3, -1e-9).is_err());
    }

    #[test]
    fn extraction_single_segment_is_identity() {
        let ops = bezier_extraction(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0], DMatrix::identity(3, 3));
    }

    #[test]
    fn extraction_two_quadratic_elements() {
        let ops = bezier_extraction(&[0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0], 2).unwrap();
        assert_eq!(ops.len(), 2);
        let c1 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 0.5]);
        assert_relative_eq!(ops[0], c1, epsilon = 1e-15);
        let c2 = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_relative_eq!(ops[1], c2, epsilon = 1e-15);
    }

    #[test]
    fn extraction_rejects_bad_knots() {
        assert!(bezier_extraction(&[0.0, 0.0, 1.0, 0.5, 1.0, 1.0], 2).is_err());
        assert!(bezier_extraction(&[0.0, 0.1, 0.2, 1.0, 1.0, 1.0], 2).is_err());
    }

    #[test]
    fn hermite_endpoint_interpolation() {
        let h = hermite_basis(-1.0).unwrap();
        assert_eq!(h.values, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(h.d1, vec![0.0, 0.0, 1.0, 0.0]);
        let h = hermite_basis(1.0).unwrap();
        assert_eq!(h.values, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(h.d1, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..=20 {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            // exact up to degree 2n−1
            let deg = 2 * n - 1;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert_relative_eq!(integral, exact, epsilon = 1e-13);
        }
    }
}
