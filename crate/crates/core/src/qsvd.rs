//! Quaternion SVD and the spectral operators built on it.
//!
//! The QSVD is read off the SVD of the complex adjoint. Every quaternion
//! singular value appears twice in the adjoint spectrum, and a complex
//! singular vector `[top; bottom]` maps back to the quaternion vector with
//! Cayley–Dickson halves `(top, -conj(bottom))`. Taking one vector per pair
//! gives the quaternion factors; inside clusters of (near) equal singular
//! values the picked vectors are re-orthogonalized with quaternion
//! Gram–Schmidt, applying the same right-multipliers to the left vectors so
//! that `Q v = u sigma` keeps holding.

use faer::Mat;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quat::{Quaternion, QuaternionMatrix};
use crate::scalar::{lit, ComplexSvd, Real};

type QVec<T> = Vec<Quaternion<T>>;

/// `Q = U diag(sigma) V^H` with unitary `U` (`M x M`) and `V` (`N x N`).
#[derive(Debug, Clone)]
pub struct QSvd<T> {
    pub u: QuaternionMatrix<T>,
    pub sigma: Vec<T>,
    pub v: QuaternionMatrix<T>,
}

/// Leading singular vectors, conjugate-transposed into rows.
///
/// `a` is `r x M`, `b` is `r x N`, and `a a^H = b b^H = I_r`.
#[derive(Debug, Clone)]
pub struct TruncatedFactors<T> {
    pub a: QuaternionMatrix<T>,
    pub b: QuaternionMatrix<T>,
    pub r: usize,
}

impl<T: Real> TruncatedFactors<T> {
    /// The `r = 0` factors (no truncation): `a^H b` is the zero matrix.
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            a: QuaternionMatrix::zeros(0, rows),
            b: QuaternionMatrix::zeros(0, cols),
            r: 0,
        }
    }

    /// `A^H B`, the `M x N` term of the H-update.
    pub fn ah_b(&self) -> QuaternionMatrix<T> {
        self.a
            .conj_transpose()
            .matmul(&self.b)
            .expect("factor shapes agree by construction")
    }
}

impl<T: Real> QSvd<T> {
    /// `U diag(sigma) V^H`.
    pub fn reconstruct(&self) -> QuaternionMatrix<T> {
        let (m, n) = (self.u.rows(), self.v.rows());
        let k = self.sigma.len();
        let us = scale_columns(&self.u.leading_columns(k), &self.sigma);
        let vk = self.v.leading_columns(k);
        let out = us.matmul(&vk.conj_transpose()).expect("shapes agree");
        debug_assert_eq!(out.shape(), (m, n));
        out
    }
}

fn scale_columns<T: Real>(m: &QuaternionMatrix<T>, s: &[T]) -> QuaternionMatrix<T> {
    QuaternionMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).scale(s[j]))
}

#[inline]
fn qdot<T: Real>(a: &[Quaternion<T>], b: &[Quaternion<T>]) -> Quaternion<T> {
    a.iter()
        .zip(b)
        .fold(Quaternion::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

#[inline]
fn qnorm<T: Real>(a: &[Quaternion<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// `v -= basis * c` with `c` a right quaternion multiplier.
#[inline]
fn sub_scaled<T: Real>(v: &mut [Quaternion<T>], basis: &[Quaternion<T>], c: Quaternion<T>) {
    for (x, b) in v.iter_mut().zip(basis) {
        *x -= *b * c;
    }
}

/// Complex column `k` of `mat` (length `2K`) as a quaternion `K`-vector.
fn quaternion_column<T: Real>(mat: &Mat<Complex<T>>, k: usize) -> QVec<T> {
    let half = mat.nrows() / 2;
    (0..half)
        .map(|i| Quaternion::from_complex_pair(mat[(i, k)], -mat[(i + half, k)].conj()))
        .collect()
}

struct Paired<T> {
    /// Complex-spectrum value attached to each accepted pair.
    values: Vec<T>,
    v: Vec<QVec<T>>,
    /// `None` for numerically zero singular values.
    u: Vec<Option<QVec<T>>>,
}

fn spectrum_tolerances<T: Real>(s: &[T], m: usize, n: usize) -> (T, T) {
    let smax = s.first().copied().unwrap_or(T::zero());
    let zero_tol = smax * T::epsilon() * lit::<T>(4.0 * m.max(n) as f64);
    let cluster_tol = smax * lit::<T>(1e-7) + zero_tol;
    (zero_tol, cluster_tol)
}

/// Walk the complex right singular vectors in order and keep one quaternion
/// vector per adjoint pair, stopping after `want` vectors.
fn pair_vectors<T: Real>(svd: &ComplexSvd<T>, m: usize, n: usize, want: usize) -> Paired<T> {
    let p = svd.s.len();
    let (zero_tol, cluster_tol) = spectrum_tolerances(&svd.s, m, n);
    let mut out = Paired {
        values: Vec::with_capacity(want),
        v: Vec::with_capacity(want),
        u: Vec::with_capacity(want),
    };
    let half = lit::<T>(0.5);
    for k in 0..svd.v.ncols() {
        if out.v.len() >= want {
            break;
        }
        let sk = if k < p { svd.s[k] } else { T::zero() };
        let mut v = quaternion_column(&svd.v, k);
        let mut u = (k < p && sk > zero_tol).then(|| quaternion_column(&svd.u, k));
        let mates: Vec<usize> = (0..out.v.len())
            .filter(|i: &usize| {
                let i = *i;
                num_traits::Float::abs(out.values[i] - sk) <= cluster_tol
            })
            .collect();
        for _ in 0..2 {
            for &i in &mates {
                let c = qdot(&out.v[i], &v);
                sub_scaled(&mut v, &out.v[i], c);
                if let (Some(u), Some(ui)) = (u.as_mut(), out.u[i].as_ref()) {
                    sub_scaled(u, ui, c);
                }
            }
        }
        let nv = qnorm(&v);
        if nv <= half {
            continue;
        }
        let inv = T::one() / nv;
        v.iter_mut().for_each(|x| *x = x.scale(inv));
        if let Some(u) = u.as_mut() {
            u.iter_mut().for_each(|x| *x = x.scale(inv));
        }
        out.values.push(sk);
        out.v.push(v);
        out.u.push(u);
    }
    out
}

/// Extend orthonormal `basis` (vectors of length `dim`) to `dim` vectors,
/// drawing candidates from `extra` first and the unit vectors after.
fn complete_basis<T: Real>(
    basis: &mut Vec<QVec<T>>,
    dim: usize,
    extra: impl Iterator<Item = QVec<T>>,
) {
    let units = (0..dim).map(|i| {
        let mut e = vec![Quaternion::zero(); dim];
        e[i] = Quaternion::one();
        e
    });
    let half = lit::<T>(0.5);
    for mut cand in extra.chain(units) {
        if basis.len() >= dim {
            break;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let c = qdot(b, &cand);
                sub_scaled(&mut cand, b, c);
            }
        }
        let nc = qnorm(&cand);
        if nc > half {
            let inv = T::one() / nc;
            cand.iter_mut().for_each(|x| *x = x.scale(inv));
            basis.push(cand);
        }
    }
}

fn adjoint_svd<T: Real>(q: &QuaternionMatrix<T>) -> Result<ComplexSvd<T>> {
    let adj = q.to_adjoint();
    T::complex_svd(adj.data.as_ref())
}

/// Quaternion singular values (non-increasing), without vectors.
pub fn singular_values<T: Real>(q: &QuaternionMatrix<T>) -> Result<Vec<T>> {
    let adj = q.to_adjoint();
    let s = T::complex_singular_values(adj.data.as_ref())?;
    Ok(collapse_pairs(&s, q.rows().min(q.cols())))
}

/// Adjoint singular values come in pairs; keep every second one.
fn collapse_pairs<T: Real>(s: &[T], count: usize) -> Vec<T> {
    s.iter().step_by(2).take(count).copied().collect()
}

/// Full quaternion SVD.
pub fn qsvd<T: Real>(q: &QuaternionMatrix<T>) -> Result<QSvd<T>> {
    let (m, n) = q.shape();
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: "non-empty matrix".into(),
            found: format!("{m}x{n}"),
        });
    }
    let svd = adjoint_svd(q)?;
    let kmin = m.min(n);
    let sigma = collapse_pairs(&svd.s, kmin);
    let paired = pair_vectors(&svd, m, n, n);
    let mut v_cols = paired.v;
    if v_cols.len() < n {
        let extra = (0..svd.v.ncols()).map(|k| quaternion_column(&svd.v, k));
        complete_basis(&mut v_cols, n, extra);
    }
    let mut u_cols: Vec<QVec<T>> = paired.u.into_iter().take(kmin).map_while(|u| u).collect();
    let rank = u_cols.len();
    let extra = (2 * rank..svd.u.ncols())
        .chain(0..2 * rank)
        .map(|k| quaternion_column(&svd.u, k));
    complete_basis(&mut u_cols, m, extra);
    let mut sigma = sigma;
    for s in sigma.iter_mut().skip(rank) {
        // below the zero threshold the pairing is not tracked; report the
        // values anyway since they bound the reconstruction error
        *s = s.max(T::zero());
    }
    Ok(QSvd {
        u: QuaternionMatrix::from_columns(m, &u_cols),
        sigma,
        v: QuaternionMatrix::from_columns(n, &v_cols),
    })
}

/// Quaternion nuclear norm: the sum of all singular values.
pub fn nuclear_norm<T: Real>(q: &QuaternionMatrix<T>) -> Result<T> {
    Ok(singular_values(q)?
        .into_iter()
        .fold(T::zero(), |a, b| a + b))
}

/// Truncated nuclear norm: the sum of all but the `r` largest singular values.
pub fn qtnn<T: Real>(q: &QuaternionMatrix<T>, r: usize) -> Result<T> {
    let (m, n) = q.shape();
    if r > m.min(n) {
        return Err(Error::TruncationOutOfRange {
            r,
            rows: m,
            cols: n,
        });
    }
    Ok(singular_values(q)?
        .into_iter()
        .skip(r)
        .fold(T::zero(), |a, b| a + b))
}

/// Result of singular value shrinkage together with its spectrum.
#[derive(Debug, Clone)]
pub struct Shrunk<T> {
    pub matrix: QuaternionMatrix<T>,
    /// `max(sigma_i - tau, 0)` for every singular value of the input.
    pub sigma: Vec<T>,
}

/// Singular value thresholding `U diag(max(sigma - tau, 0)) V^H`.
pub fn svt<T: Real>(q: &QuaternionMatrix<T>, tau: T) -> Result<QuaternionMatrix<T>> {
    Ok(svt_with_spectrum(q, tau)?.matrix)
}

pub fn svt_with_spectrum<T: Real>(q: &QuaternionMatrix<T>, tau: T) -> Result<Shrunk<T>> {
    if tau < T::zero() {
        return Err(Error::NegativeThreshold(tau.as_f64()));
    }
    let (m, n) = q.shape();
    let svd = adjoint_svd(q)?;
    let all = collapse_pairs(&svd.s, m.min(n));
    let shrunk: Vec<T> = all.iter().map(|&s| (s - tau).max(T::zero())).collect();
    let keep = shrunk.iter().take_while(|&&s| s > T::zero()).count();
    let paired = pair_vectors(&svd, m, n, keep);
    let mut u_cols = Vec::with_capacity(keep);
    let mut v_cols = Vec::with_capacity(keep);
    let mut weights = Vec::with_capacity(keep);
    for ((u, v), s) in paired.u.into_iter().zip(paired.v).zip(shrunk.iter()) {
        // numerically null directions carry no energy
        if let Some(u) = u {
            u_cols.push(u);
            v_cols.push(v);
            weights.push(*s);
        }
    }
    let matrix = if u_cols.is_empty() {
        QuaternionMatrix::zeros(m, n)
    } else {
        let us = scale_columns(&QuaternionMatrix::from_columns(m, &u_cols), &weights);
        let v = QuaternionMatrix::from_columns(n, &v_cols);
        us.matmul(&v.conj_transpose())?
    };
    Ok(Shrunk {
        matrix,
        sigma: shrunk,
    })
}

/// Entrywise quaternion soft-thresholding: `q / |q| * max(|q| - tau, 0)`,
/// with zero entries mapped to zero.
pub fn soft_threshold<T: Real>(q: &QuaternionMatrix<T>, tau: T) -> Result<QuaternionMatrix<T>> {
    if tau < T::zero() {
        return Err(Error::NegativeThreshold(tau.as_f64()));
    }
    Ok(q.map(|e| soft_threshold_scalar(e, tau)))
}

#[inline]
pub fn soft_threshold_scalar<T: Real>(q: Quaternion<T>, tau: T) -> Quaternion<T> {
    let r = q.norm();
    if r <= tau || r == T::zero() {
        Quaternion::zero()
    } else {
        q.scale((r - tau) / r)
    }
}

/// Rows `A = (u_1..u_r)^H`, `B = (v_1..v_r)^H` from a QSVD.
pub fn truncated_factors<T: Real>(f: &QSvd<T>, r: usize) -> Result<TruncatedFactors<T>> {
    let (m, n) = (f.u.rows(), f.v.rows());
    if r == 0 || r >= m.min(n) {
        return Err(Error::TruncationOutOfRange {
            r,
            rows: m,
            cols: n,
        });
    }
    Ok(TruncatedFactors {
        a: f.u.leading_columns(r).conj_transpose(),
        b: f.v.leading_columns(r).conj_transpose(),
        r,
    })
}

/// Quaternion-valued `tr(A Q B^H)`.
pub fn trace_product<T: Real>(
    a: &QuaternionMatrix<T>,
    q: &QuaternionMatrix<T>,
    b: &QuaternionMatrix<T>,
) -> Result<Quaternion<T>> {
    if a.rows() == 0 {
        return Ok(Quaternion::zero());
    }
    if b.rows() != a.rows() || b.cols() != q.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.rows(), q.cols()),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let aq = a.matmul(q)?;
    let mut t = Quaternion::zero();
    for i in 0..aq.rows() {
        for j in 0..aq.cols() {
            t += aq.get(i, j) * b.get(i, j).conj();
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::complex_frobenius;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type QM = QuaternionMatrix<f64>;
    type Q = Quaternion<f64>;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn unitary_defect(m: &QM) -> f64 {
        let g = m.conj_transpose().matmul(m).unwrap();
        (&g - &QM::identity(m.cols())).frobenius_norm()
    }

    fn check_factors(q: &QM, f: &QSvd<f64>) {
        let rel = (q - &f.reconstruct()).frobenius_norm() / q.frobenius_norm().max(1e-300);
        assert!(rel <= 1e-10, "reconstruction {rel:e}");
        assert!(
            unitary_defect(&f.u) <= 1e-10,
            "U defect {:e}",
            unitary_defect(&f.u)
        );
        assert!(
            unitary_defect(&f.v) <= 1e-10,
            "V defect {:e}",
            unitary_defect(&f.v)
        );
        assert!(f.sigma.iter().all(|&s| s >= 0.0));
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn diagonal_real_matrix() {
        let q = QM::from_real_diagonal(2, 2, &[3.0, 1.0]);
        let f = qsvd(&q).unwrap();
        assert!((f.sigma[0] - 3.0).abs() < 1e-14 && (f.sigma[1] - 1.0).abs() < 1e-14);
        check_factors(&q, &f);
        // singular vectors are unique up to a unit quaternion phase
        for i in 0..2 {
            assert!((f.u.get(i, i).norm() - 1.0).abs() < 1e-12);
            assert!((f.v.get(i, i).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_shapes_reconstruct() {
        let mut r = rng(1);
        for &(m, n) in &[(1, 1), (1, 5), (5, 1), (3, 3), (6, 4), (4, 6), (20, 15)] {
            let q = QM::random_normal(m, n, &mut r);
            check_factors(&q, &qsvd(&q).unwrap());
        }
    }

    #[test]
    fn pairs_match_adjoint_spectrum() {
        let mut r = rng(2);
        let q = QM::random_normal(6, 4, &mut r);
        let sigma = qsvd(&q).unwrap().sigma;
        // independent route: full SVD of the adjoint through nalgebra-free faer call
        let adj = q.to_adjoint().data;
        let s = f64::complex_singular_values(adj.as_ref()).unwrap();
        for (i, &sv) in sigma.iter().enumerate() {
            assert!((s[2 * i] - sv).abs() < 1e-10);
            assert!((s[2 * i + 1] - sv).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let mut r = rng(3);
        let mut u = QM::random_normal(5, 1, &mut r);
        let mut v = QM::random_normal(4, 1, &mut r);
        u = u.scale(1.0 / u.frobenius_norm());
        v = v.scale(1.0 / v.frobenius_norm());
        let q = u.matmul(&v.conj_transpose()).unwrap();
        let f = qsvd(&q).unwrap();
        assert!((f.sigma[0] - 1.0).abs() < 1e-12);
        assert!(f.sigma[1..].iter().all(|&s| s < 1e-12));
        check_factors(&q, &f);
    }

    #[test]
    fn rank_deficient_and_zero() {
        let mut r = rng(4);
        let p = QM::random_normal(8, 2, &mut r);
        let w = QM::random_normal(2, 7, &mut r);
        let q = p.matmul(&w).unwrap();
        check_factors(&q, &qsvd(&q).unwrap());
        let z = QM::zeros(3, 4);
        let f = qsvd(&z).unwrap();
        assert!(f.sigma.iter().all(|&s| s == 0.0));
        assert!(unitary_defect(&f.u) < 1e-12 && unitary_defect(&f.v) < 1e-12);
    }

    #[test]
    fn repeated_singular_values() {
        // identity has one singular value of multiplicity n
        let q = QM::identity(5).scale(2.0);
        let f = qsvd(&q).unwrap();
        check_factors(&q, &f);
        let mut r = rng(5);
        let u = qsvd(&QM::random_normal(6, 6, &mut r)).unwrap().u;
        let v = qsvd(&QM::random_normal(6, 6, &mut r)).unwrap().v;
        let d = QM::from_real_diagonal(6, 6, &[4.0, 4.0, 4.0, 1.0, 1.0, 0.0]);
        let q = u.matmul(&d).unwrap().matmul(&v.conj_transpose()).unwrap();
        let f = qsvd(&q).unwrap();
        check_factors(&q, &f);
        for (a, b) in f.sigma.iter().zip([4.0, 4.0, 4.0, 1.0, 1.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn norms() {
        let q = QM::from_real_diagonal(2, 2, &[3.0, 1.0]);
        assert!((nuclear_norm(&q).unwrap() - 4.0).abs() < 1e-14);
        assert!((qtnn(&q, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!(qtnn(&q, 2).unwrap().abs() < 1e-14);
        assert!(matches!(
            qtnn(&q, 3),
            Err(Error::TruncationOutOfRange { .. })
        ));

        let mut r = rng(6);
        let q = QM::random_normal(6, 4, &mut r);
        assert_eq!(qtnn(&q, 0).unwrap(), nuclear_norm(&q).unwrap());
        let f = qsvd(&q).unwrap();
        let lhs = qtnn(&q, 2).unwrap();
        let rhs = nuclear_norm(&q).unwrap() - f.sigma[0] - f.sigma[1];
        assert!((lhs - rhs).abs() < 1e-10);
        let adj = f64::complex_singular_values(q.to_adjoint().data.as_ref()).unwrap();
        let adj_tail: f64 = adj[4..].iter().sum::<f64>() / 2.0;
        assert!((lhs - adj_tail).abs() < 1e-10);
    }

    #[test]
    fn svt_examples() {
        let mut r = rng(7);
        let q = QM::random_normal(5, 4, &mut r);
        let same = svt(&q, 0.0).unwrap();
        assert!((&same - &q).frobenius_norm() <= 1e-10 * q.frobenius_norm());

        let d = QM::from_real_diagonal(2, 2, &[3.0, 1.0]);
        let out = svt(&d, 2.0).unwrap();
        let expect = QM::from_real_diagonal(2, 2, &[1.0, 0.0]);
        assert!((&out - &expect).frobenius_norm() < 1e-12);

        let shr = svt_with_spectrum(&q, 0.7).unwrap();
        let after = singular_values(&shr.matrix).unwrap();
        for (a, b) in after.iter().zip(&shr.sigma) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(svt(&q, -1.0).is_err());
    }

    #[test]
    fn svt_beats_random_probes() {
        let mut r = rng(8);
        let q = QM::random_normal(6, 5, &mut r);
        let tau = 1.3;
        let obj = |x: &QM| tau * nuclear_norm(x).unwrap() + 0.5 * (x - &q).frobenius_norm_sqr();
        let x = svt(&q, tau).unwrap();
        let best = obj(&x);
        for k in 0..200 {
            let scale = [1e-3, 1e-2, 1e-1][k % 3];
            let p = x.axpy(scale, &QM::random_normal(6, 5, &mut r));
            assert!(obj(&p) >= best - 1e-10, "probe {k} improved the objective");
        }
    }

    #[test]
    fn svt_is_nonexpansive() {
        let mut r = rng(9);
        for _ in 0..10 {
            let p = QM::random_normal(5, 5, &mut r);
            let q = QM::random_normal(5, 5, &mut r);
            let lhs = (&svt(&p, 0.8).unwrap() - &svt(&q, 0.8).unwrap()).frobenius_norm();
            assert!(lhs <= (&p - &q).frobenius_norm() + 1e-10);
        }
    }

    #[test]
    fn soft_threshold_examples() {
        let one = QM::from_fn(1, 1, |_, _| Q::new(0.0, 3.0, 0.0, 0.0));
        assert_eq!(
            soft_threshold(&one, 2.0).unwrap().get(0, 0),
            Q::new(0.0, 1.0, 0.0, 0.0)
        );
        let two = QM::from_fn(1, 1, |_, _| Q::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(
            soft_threshold(&two, 1.0).unwrap().get(0, 0),
            Q::new(0.5, 0.5, 0.5, 0.5)
        );
        assert_eq!(soft_threshold_scalar(Q::zero(), 0.0), Q::zero());
        let mut r = rng(10);
        let m = QM::random_normal(3, 4, &mut r);
        let s = soft_threshold(&m, 0.9).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), soft_threshold_scalar(m.get(i, j), 0.9));
            }
        }
        assert!(soft_threshold(&m, -0.1).is_err());
    }

    #[test]
    fn scalar_prox_threshold_constant() {
        // lambda |x| + |y - x|^2 is minimized by S_{lambda/2}; S_{2 lambda}
        // minimizes lambda |x| + 1/4 |y - x|^2 instead.
        let mut r = rng(13);
        let lambda = 0.8;
        let f = |x: Q, y: Q, w: f64| lambda * x.norm() + w * (y - x).norm_sqr();
        for _ in 0..50 {
            let y = Q::new(
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
            );
            let half = soft_threshold_scalar(y, lambda / 2.0);
            let twice = soft_threshold_scalar(y, 2.0 * lambda);
            for _ in 0..20 {
                let d = Q::new(
                    r.random_range(-0.1..0.1),
                    r.random_range(-0.1..0.1),
                    r.random_range(-0.1..0.1),
                    r.random_range(-0.1..0.1),
                );
                assert!(f(half + d, y, 1.0) >= f(half, y, 1.0) - 1e-12);
                assert!(f(twice + d, y, 0.25) >= f(twice, y, 0.25) - 1e-12);
            }
            if y.norm() > lambda / 2.0 {
                assert!(f(twice, y, 1.0) > f(half, y, 1.0));
            }
        }
    }

    #[test]
    fn truncated_factor_examples() {
        let q = QM::from_real_diagonal(3, 3, &[3.0, 2.0, 1.0]);
        let tf = truncated_factors(&qsvd(&q).unwrap(), 2).unwrap();
        let t = trace_product(&tf.a, &q, &tf.b).unwrap();
        assert!((t.norm() - 5.0).abs() < 1e-12);
        assert!((t.w - 5.0).abs() < 1e-12);

        let mut r = rng(11);
        let q = QM::random_normal(8, 6, &mut r);
        let tf = truncated_factors(&qsvd(&q).unwrap(), 3).unwrap();
        let aa = tf.a.matmul(&tf.a.conj_transpose()).unwrap();
        let bb = tf.b.matmul(&tf.b.conj_transpose()).unwrap();
        assert!((&aa - &QM::identity(3)).frobenius_norm() < 1e-10);
        assert!((&bb - &QM::identity(3)).frobenius_norm() < 1e-10);

        let q = QM::random_normal(6, 6, &mut r);
        let f = qsvd(&q).unwrap();
        let tf = truncated_factors(&f, 2).unwrap();
        let t = trace_product(&tf.a, &q, &tf.b).unwrap();
        let target = f.sigma[0] + f.sigma[1];
        assert!((t.w.abs() - target).abs() <= 1e-8 * target);

        assert!(truncated_factors(&f, 0).is_err());
        assert!(truncated_factors(&f, 6).is_err());
    }

    #[test]
    fn adjoint_frobenius_consistency() {
        let mut r = rng(12);
        let q = QM::random_normal(4, 3, &mut r);
        let s: f64 = singular_values(&q).unwrap().iter().map(|s| s * s).sum();
        let n = complex_frobenius(&q.to_adjoint().data);
        assert!((2.0 * s - n * n).abs() < 1e-10 * n * n);
    }
}
