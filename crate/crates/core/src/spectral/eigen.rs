//! Dense eigensolvers for small real matrices.
//!
//! General matrices go through Householder reduction to upper Hessenberg form
//! followed by the Francis double-shift QR iteration; symmetric matrices use
//! cyclic Jacobi rotations. Both operate on row-major `n * n` slices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_QR_SWEEPS: usize = 120;

/// All eigenvalues of a real square matrix, in no particular order.
pub fn general_eigenvalues<T: Real>(n: usize, data: &[T]) -> Result<Vec<Complex<T>>> {
    debug_assert_eq!(data.len(), n * n);
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![Complex::new(data[0], T::zero())]),
        _ => {
            let mut h = data.to_vec();
            hessenberg(n, &mut h);
            francis_qr(n, h)
        }
    }
}

/// Reduces `a` in place to upper Hessenberg form by Householder similarity transforms.
fn hessenberg<T: Real>(n: usize, a: &mut [T]) {
    let two = T::lit(2.0);
    let mut v = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let norm = (k + 1..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a[i * n + k];
        }
        v[0] = v[0] - alpha;
        let vtv = v[..len].iter().map(|&x| x * x).sum::<T>();
        if vtv == T::zero() {
            continue;
        }
        // H = I - 2 v v^T / (v^T v), applied from the left then the right
        for j in k..n {
            let s = (0..len).map(|t| v[t] * a[(k + 1 + t) * n + j]).sum::<T>();
            let f = two * s / vtv;
            for t in 0..len {
                a[(k + 1 + t) * n + j] = a[(k + 1 + t) * n + j] - f * v[t];
            }
        }
        for i in 0..n {
            let s = (0..len).map(|t| a[i * n + k + 1 + t] * v[t]).sum::<T>();
            let f = two * s / vtv;
            for t in 0..len {
                a[i * n + k + 1 + t] = a[i * n + k + 1 + t] - f * v[t];
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (the classical
/// `hqr` iteration with exceptional shifts every ten sweeps).
fn francis_qr<T: Real>(n: usize, h: Vec<T>) -> Result<Vec<Complex<T>>> {
    // 1-based copy keeps the index arithmetic of the iteration readable
    let w1 = n + 1;
    let mut a = vec![T::zero(); w1 * w1];
    for i in 0..n {
        for j in 0..n {
            a[(i + 1) * w1 + j + 1] = h[i * n + j];
        }
    }
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) * w1 + ($j)]
        };
    }

    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let half = T::lit(0.5);

    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm = anorm + at!(i, j).abs();
        }
    }

    let mut nn = n;
    let mut t = T::zero();
    let mut exceptional = 0usize;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l >= 2 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                // relative test, plus an absolute one so clusters of
                // near-zero eigenvalues still deflate
                if at!(l, l - 1).abs() + s == s || at!(l, l - 1).abs() <= T::epsilon() * anorm {
                    at!(l, l - 1) = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = T::zero();
                nn -= 1;
                break;
            }
            let mut y = at!(nn - 1, nn - 1);
            let mut w = at!(nn, nn - 1) * at!(nn - 1, nn);
            if l == nn - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x = x + t;
                if q >= T::zero() {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != T::zero() {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = T::zero();
                    wi[nn] = T::zero();
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == MAX_QR_SWEEPS {
                return Err(Error::NoConvergence(n));
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift, perturbed a little on every use to avoid cycles
                exceptional += 1;
                t = t + x;
                for i in 1..=nn {
                    at!(i, i) = at!(i, i) - x;
                }
                let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                let bump = T::lit(0.75) + T::lit(0.05) * T::from_int((exceptional % 5) as i64);
                x = bump * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;

            // look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = at!(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / at!(m + 1, m) + at!(m, m + 1);
                q = at!(m + 1, m + 1) - z - rr - ss;
                r = at!(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                at!(i, i - 2) = T::zero();
                if i != m + 2 {
                    at!(i, i - 3) = T::zero();
                }
            }
            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nn {
                if k != m {
                    p = at!(k, k - 1);
                    q = at!(k + 1, k - 1);
                    r = T::zero();
                    if k != nn - 1 {
                        r = at!(k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            at!(k, k - 1) = -at!(k, k - 1);
                        }
                    } else {
                        at!(k, k - 1) = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nn {
                        let mut pp = at!(k, j) + q * at!(k + 1, j);
                        if k != nn - 1 {
                            pp = pp + r * at!(k + 2, j);
                            at!(k + 2, j) = at!(k + 2, j) - pp * z;
                        }
                        at!(k + 1, j) = at!(k + 1, j) - pp * y;
                        at!(k, j) = at!(k, j) - pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * at!(i, k) + y * at!(i, k + 1);
                        if k != nn - 1 {
                            pp = pp + z * at!(i, k + 2);
                            at!(i, k + 2) = at!(i, k + 2) - pp * r;
                        }
                        at!(i, k + 1) = at!(i, k + 1) - pp * q;
                        at!(i, k) = at!(i, k) - pp;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Real>(n: usize, data: &[T]) -> Result<Vec<T>> {
    debug_assert_eq!(data.len(), n * n);
    let mut a = data.to_vec();
    let off = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let scale = a.iter().map(|&x| x * x).sum::<T>();
    let target = T::epsilon() * T::epsilon() * scale;
    let hundred = T::lit(100.0);
    for sweep in 0..100 {
        if off(&a) <= target {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = hundred * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = sign(T::one(), theta) / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                // exact in theory; clearing the rounding residue keeps sweeps converging
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
            }
        }
    }
    Err(Error::NoConvergence(n))
}

/// A real eigenvector for the (approximately known) real eigenvalue `lambda`,
/// by inverse iteration with a slightly perturbed shift. Normalised to unit
/// Euclidean length with a positive largest-magnitude entry.
pub fn real_eigenvector<T: Real>(n: usize, data: &[T], lambda: T) -> Result<Vec<T>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = data.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
    let shift = lambda + T::lit(1e-9) * scale;
    let mut shifted = data.to_vec();
    for i in 0..n {
        shifted[i * n + i] = shifted[i * n + i] - shift;
    }
    let lu = Lu::factor(n, shifted, T::epsilon() * scale);
    let mut x: Vec<T> = (0..n)
        .map(|i| T::one() + T::lit(0.1) * T::from_int((i % 7) as i64))
        .collect();
    for _ in 0..6 {
        x = lu.solve(&x);
        let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if !norm.is_finite() || norm == T::zero() {
            return Err(Error::NoConvergence(n));
        }
        for v in &mut x {
            *v = *v / norm;
        }
    }
    let big = x
        .iter()
        .copied()
        .fold(T::zero(), |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if big < T::zero() {
        for v in &mut x {
            *v = -*v;
        }
    }
    Ok(x)
}

/// LU factorisation with partial pivoting; tiny pivots are replaced by `floor`.
struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> Lu<T> {
    fn factor(n: usize, mut a: Vec<T>, floor: T) -> Self {
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().partial_cmp(&a[j * n + k].abs()).unwrap())
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            if a[k * n + k].abs() < floor {
                a[k * n + k] = if a[k * n + k] < T::zero() { -floor } else { floor };
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] = a[i * n + j] - f * a[k * n + j];
                }
            }
        }
        Self { n, lu: a, piv }
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[i * n + j] * x[j];
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex<f64>>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.iter().map(|c| c.re).collect()
    }

    #[test]
    fn triangular_and_diagonal() {
        let ev = general_eigenvalues(3, &[2.0, 1.0, 5.0, 0.0, -1.0, 3.0, 0.0, 0.0, 4.0]).unwrap();
        let re = sorted_re(ev.clone());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 2.0).abs() < 1e-12 && (re[2] - 4.0).abs() < 1e-12);
        assert!(ev.iter().all(|c| c.im.abs() < 1e-12));
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let ev = general_eigenvalues::<f64>(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        for c in ev {
            assert!(c.re.abs() < 1e-14);
            assert!((c.im.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cyclic_permutations_converge() {
        // unit-modulus spectra defeat the plain Francis shift; exceptional shifts must kick in
        for n in 2..=12 {
            let mut a = vec![0.0f64; n * n];
            for i in 0..n {
                a[i * n + (i + 1) % n] = 1.0;
            }
            let ev = general_eigenvalues(n, &a).unwrap();
            assert_eq!(ev.len(), n);
            for c in &ev {
                assert!((c.norm() - 1.0).abs() < 1e-10, "n={n}: {c}");
                // each eigenvalue is an n-th root of unity
                let k = c.arg() * n as f64 / std::f64::consts::TAU;
                assert!((k - k.round()).abs() < 1e-8, "n={n}: {c}");
            }
        }
    }

    #[test]
    fn hessenberg_preserves_trace() {
        let a: Vec<f64> = (0..25).map(|k| ((k * 7 + 3) % 11) as f64 - 4.0).collect();
        let ev = general_eigenvalues(5, &a).unwrap();
        let trace: f64 = (0..5).map(|i| a[i * 5 + i]).sum();
        let sum: Complex<f64> = ev.iter().sum();
        assert!((sum.re - trace).abs() < 1e-10);
        assert!(sum.im.abs() < 1e-10);
    }

    #[test]
    fn jacobi_on_symmetric_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let mut ev = symmetric_eigenvalues::<f64>(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_iteration_finds_eigenvector() {
        let a = [1.0, 1.0, 0.0, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0];
        let v = real_eigenvector(3, &a, -1.0).unwrap();
        for i in 0..3 {
            let av: f64 = (0..3).map(|j| a[i * 3 + j] * v[j]).sum();
            assert!((av + v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn single_precision_works() {
        let ev = general_eigenvalues(2, &[0.0f32, 1.0, 1.0, 0.0]).unwrap();
        let mut re: Vec<f32> = ev.iter().map(|c| c.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-6 && (re[1] - 1.0).abs() < 1e-6);
    }
}
