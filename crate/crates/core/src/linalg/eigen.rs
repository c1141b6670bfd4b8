//! Eigenvalues of small real matrices.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis double-shift QR iteration with alternating exceptional shifts. Working arrays
//! are 1-based internally to keep the deflation bookkeeping readable.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use super::Matrix;
use crate::{Error, Result};

pub type ComplexVector = Vec<Complex64>;

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;
const MAX_DIMENSION: usize = 64;

/// All eigenvalues of `a`, with multiplicity, sorted by descending magnitude
/// and then by ascending phase.
pub fn eigenvalues(a: &Matrix) -> Result<ComplexVector> {
    assert!(a.is_square(), "eigenvalues of non-square matrix");
    let n = a.rows();
    assert!(n <= MAX_DIMENSION, "matrix too large for dense QR ({n})");

    let mut h = vec![vec![0.0; n + 1]; n + 1];
    for r in 0..n {
        for c in 0..n {
            h[r + 1][c + 1] = a[(r, c)];
        }
    }
    balance(&mut h, n);
    hessenberg(&mut h, n);
    let mut eig = hqr(&mut h, n)?;
    sort_eigenvalues(&mut eig);
    Ok(eig)
}

/// Descending magnitude; magnitudes equal to 1e-12 relative are ordered by
/// ascending phase in (-π, π].
pub fn sort_eigenvalues(eig: &mut [Complex64]) {
    eig.sort_by(|x, y| {
        let (mx, my) = (x.norm(), y.norm());
        if (mx - my).abs() <= 1e-12 * mx.max(my).max(1e-300) {
            x.arg().total_cmp(&y.arg())
        } else {
            my.total_cmp(&mx)
        }
    });
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
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
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(a: &mut [Vec<f64>], n: usize) {
    for k in 1..n.saturating_sub(1) {
        let norm: f64 = (k + 1..=n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n + 1];
        for i in k + 1..=n {
            v[i] = a[i][k];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..=n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← (I − 2vvᵀ/vᵀv) A (I − 2vvᵀ/vᵀv)
        for j in 1..=n {
            let dot: f64 = (k + 1..=n).map(|i| v[i] * a[i][j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k + 1..=n {
                a[i][j] -= f * v[i];
            }
        }
        for row in a.iter_mut().take(n + 1).skip(1) {
            let dot: f64 = (k + 1..=n).map(|j| row[j] * v[j]).sum();
            let f = 2.0 * dot / vnorm2;
            for j in k + 1..=n {
                row[j] -= f * v[j];
            }
        }
        a[k + 1][k] = alpha;
        for row in a.iter_mut().take(n + 1).skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<ComplexVector> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut nn = n as isize;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w);
    let mut total_iterations = 0;

    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Look for a single small subdiagonal element.
            let mut l = nu;
            while l >= 2 {
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
            x = a[nu][nu];
            if l == nu {
                wr[nu] = x;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            y = a[nu - 1][nu - 1];
            w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
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

            if its == MAX_ITERATIONS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { iterations: total_iterations });
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift, alternating between the top and the bottom
                // of the active block so that a stagnating cycle is broken.
                let (s, h) = if its % 20 == 10 {
                    (a[l + 1][l].abs() + a[l + 2][l + 1].abs(), a[l][l])
                } else {
                    (a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs(), a[nu][nu])
                };
                x = 0.75 * s + h;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iterations += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
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
            // Double QR step on rows l..nn and columns m..nn.
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nu - 1 {
                        r = a[k + 2][k - 1];
                    }
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
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        p = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k + 1] -= p * q;
                        row[k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nu - 1 {
                break;
            }
        }
    }

    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of the complex `n × n` matrix stored row-major in `a`,
/// sorted as [`eigenvalues`] sorts them.
///
/// Householder reduction to Hessenberg form, then single-shift QR with
/// Wilkinson shifts. Unlike the real double-shift iteration this is not
/// confused by conjugate pairs of equal magnitude.
pub fn complex_eigenvalues(n: usize, a: &[Complex64]) -> Result<ComplexVector> {
    assert_eq!(a.len(), n * n, "complex_eigenvalues: expected {n}x{n} entries");
    assert!(n <= MAX_DIMENSION, "matrix too large for dense QR ({n})");
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|r| a[r * n..(r + 1) * n].to_vec()).collect();
    complex_hessenberg(&mut h);
    let mut eig = complex_qr(&mut h)?;
    sort_eigenvalues(&mut eig);
    Ok(eig)
}

fn complex_hessenberg(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[k + 1][k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        // H ← P H P with the Hermitian reflector P = I − 2vvᴴ/vᴴv.
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[k + 1 + i][j]).sum();
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                h[k + 1 + i][j] -= vi * f;
            }
        }
        for row in h.iter_mut() {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| row[k + 1 + i] * vi).sum();
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                row[k + 1 + i] -= f * vi.conj();
            }
        }
        for row in h.iter_mut().skip(k + 2) {
            row[k] = Complex64::new(0.0, 0.0);
        }
    }
}

fn trailing_pair(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    (mean + disc, mean - disc)
}

fn complex_qr(h: &mut [Vec<Complex64>]) -> Result<ComplexVector> {
    let n = h.len();
    let mut eig = Vec::with_capacity(n);
    let anorm: f64 = h.iter().flatten().map(|z| z.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut total_iterations = 0;
    let mut hi = n;
    let mut its = 0;
    while hi > 0 {
        let top = hi - 1;
        let mut l = top;
        while l > 0 {
            let mut s = h[l - 1][l - 1].norm() + h[l][l].norm();
            if s == 0.0 {
                s = anorm;
            }
            if h[l][l - 1].norm() <= f64::EPSILON * s {
                h[l][l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == top {
            eig.push(h[top][top]);
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == top {
            let (e1, e2) = trailing_pair(h[l][l], h[l][top], h[top][l], h[top][top]);
            eig.extend([e1, e2]);
            hi -= 2;
            its = 0;
            continue;
        }
        if its == MAX_ITERATIONS_PER_EIGENVALUE {
            return Err(Error::NoConvergence { iterations: total_iterations });
        }
        its += 1;
        total_iterations += 1;

        let d = h[top][top];
        let shift = if its % 10 == 0 {
            d + 0.75 * h[top][top - 1].norm()
        } else {
            let (e1, e2) = trailing_pair(h[top - 1][top - 1], h[top - 1][top], h[top][top - 1], d);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        // Explicit step on the active block: H − σI = QR, H ← RQ + σI.
        for i in l..=top {
            h[i][i] -= shift;
        }
        let mut rotations = Vec::with_capacity(top - l);
        for k in l..top {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, Complex64::new(0.0, 0.0))
            } else if x.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                (x.norm() / r, x / x.norm() * y.conj() / r)
            };
            for j in k..=top {
                let (u, w) = (h[k][j], h[k + 1][j]);
                h[k][j] = u * c + s * w;
                h[k + 1][j] = -s.conj() * u + w * c;
            }
            rotations.push((c, s));
        }
        for (k, (c, s)) in (l..top).zip(rotations) {
            for row in h.iter_mut().take((k + 2).min(top) + 1).skip(l) {
                let (u, w) = (row[k], row[k + 1]);
                row[k] = u * c + s.conj() * w;
                row[k + 1] = -s * u + w * c;
            }
        }
        for i in l..=top {
            h[i][i] += shift;
        }
    }
    Ok(eig)
}
