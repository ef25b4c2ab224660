//! Dense real eigenvalues: balancing, reduction to Hessenberg form by
//! stabilized elimination, and Francis double-shift QR. Eigenvectors come
//! from inverse iteration on the original matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_DIM: usize = 64;

type Dense = Vec<Vec<f64>>;

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn balance(a: &mut Dense) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut Dense) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut pivot = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                pivot = j;
            }
        }
        if pivot != m {
            a.swap(pivot, m);
            for row in a.iter_mut() {
                row.swap(pivot, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut() {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix, destroying it.
fn hqr(a: &mut Dense) -> Result<Vec<Complex64>> {
    let n = a.len();
    let limit = 100 * n.max(1);
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut total = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if total >= limit {
                return Err(Error::EigenNoConvergence { iterations: total });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let s = y - z;
                p = (rr * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - s;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = nu.min(k + 3);
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// All eigenvalues, sorted by real part then imaginary part.
pub fn eigenvalues(a: &Matrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.ensure_square()?;
    if n > MAX_DIM {
        return Err(Error::Dimension {
            expected: MAX_DIM,
            found: n,
        });
    }
    if a.to_rows().iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let mut dense = a.to_rows();
    balance(&mut dense);
    hessenberg(&mut dense);
    let mut values = hqr(&mut dense)?;
    values.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    Ok(values)
}

fn complex_solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Vec<Complex64> {
    let n = b.len();
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    let tiny = f64::EPSILON * a.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap_or(k);
        a.swap(k, p);
        x.swap(k, p);
        if a[k][k].norm() < tiny {
            a[k][k] = Complex64::new(tiny, 0.0);
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
            let v = x[k];
            x[i] -= f * v;
        }
    }
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / a[k][k];
    }
    x
}

/// Eigenpairs with unit-norm eigenvectors, by inverse iteration.
pub fn eigenpairs(a: &Matrix<f64>) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let n = a.ensure_square()?;
    let values = eigenvalues(a)?;
    let scale = a.inf_norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for lambda in values {
        let shift = lambda + Complex64::new(scale * 1e-10, scale * 1e-10);
        let shifted: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = Complex64::new(a[(i, j)], 0.0);
                        if i == j {
                            v - shift
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64))
            .collect();
        for _ in 0..3 {
            v = complex_solve(&shifted, &v);
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::EigenNoConvergence { iterations: 3 });
            }
            v.iter_mut().for_each(|c| *c /= norm);
        }
        out.push((lambda, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &Matrix<f64>, lambda: Complex64, v: &[Complex64]) -> f64 {
        let n = v.len();
        (0..n)
            .map(|i| {
                let av: Complex64 = (0..n).map(|j| a[(i, j)] * v[j]).sum();
                (av - lambda * v[i]).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal() {
        let a = Matrix::diagonal(&[3.0, 1.0, 2.0]);
        let ev = eigenvalues(&a).unwrap();
        assert_eq!(ev.iter().map(|c| c.re).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        assert!(ev.iter().all(|c| c.im == 0.0));
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = Matrix::from_rows(vec![vec![0.0, -2.0], vec![2.0, 0.0]]);
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let a = Matrix::from_rows(vec![
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let ev = eigenvalues(&a).unwrap();
        for (k, c) in ev.iter().enumerate() {
            assert!((c.re - (k + 1) as f64).abs() < 1e-10, "{ev:?}");
            assert!(c.im.abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let a = Matrix::from_rows(vec![
            vec![-2.0, 1.0, 0.0, 0.3],
            vec![0.5, -3.0, 1.0, 0.0],
            vec![0.0, 4.0, -1.0, 2.0],
            vec![7.0, 0.0, -1.0, -5.0],
        ]);
        let norm = a.inf_norm();
        for (lambda, v) in eigenpairs(&a).unwrap() {
            assert!(residual(&a, lambda, &v) < 1e-8 * norm);
        }
    }

    #[test]
    fn trivial_sizes() {
        assert!(eigenvalues(&Matrix::<f64>::zeros(0, 0)).unwrap().is_empty());
        let ev = eigenvalues(&Matrix::from_rows(vec![vec![-4.5]])).unwrap();
        assert_eq!(ev, vec![Complex64::new(-4.5, 0.0)]);
        assert!(eigenvalues(&Matrix::<f64>::zeros(2, 3)).is_err());
        assert_eq!(eigenvalues(&Matrix::<f64>::zeros(3, 3)).unwrap().len(), 3);
    }
}
