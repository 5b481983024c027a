//! Small fixed-size helpers shared by every module: the Lorentz form
//! J = diag(1,1,-1), a complex cubic eigenvalue solver, and row-major
//! serde for `Matrix3`.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

pub fn j21() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
}

/// h(u,v) for the standard form J.
pub fn lorentz_dot(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
}

/// Inverse of an O(2,1) matrix: J Bᵗ J.
pub fn lorentz_inverse(b: &Matrix3<f64>) -> Matrix3<f64> {
    let j = j21();
    j * b.transpose() * j
}

pub fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

pub fn symmetrize(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

pub fn is_finite(m: &Matrix3<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn mat(rows: [[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::new(
        rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
        rows[2][1], rows[2][2],
    )
}

pub fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = m[(i, j)];
        }
    }
    r
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(c: [Vector3<f64>; 3]) -> Matrix3<f64> {
    Matrix3::from_columns(&c)
}

/// Roots of λ³ − t λ² + s λ − d, i.e. the eigenvalues of a 3×3 matrix with
/// trace t, second invariant s and determinant d. Closed form (trigonometric
/// for three real roots, Cardano otherwise) followed by Newton polishing.
/// Sorted by real part, then imaginary part; complex roots come as an exact
/// conjugate pair.
pub fn cubic_roots(t: f64, s: f64, d: f64) -> [Complex64; 3] {
    let shift = t / 3.0;
    let p = s - t * t / 3.0;
    let q = -2.0 * t * t * t / 27.0 + t * s / 3.0 - d;
    let f = |x: Complex64| ((x - t) * x + s) * x - d;
    let fp = |x: Complex64| (x * 3.0 - 2.0 * t) * x + s;

    let disc = 4.0 * p * p * p + 27.0 * q * q;
    let mut roots: [Complex64; 3];
    if p == 0.0 && q == 0.0 {
        roots = [Complex64::new(shift, 0.0); 3];
    } else if disc <= 0.0 {
        // three real roots; p < 0 here
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        roots = [0.0, 1.0, 2.0].map(|k| {
            Complex64::new(m * (phi - 2.0 * std::f64::consts::PI * k / 3.0).cos() + shift, 0.0)
        });
    } else {
        let sq = (disc / 108.0).sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let x1 = u + v;
        let re = -x1 / 2.0;
        let im = (u - v) * 3f64.sqrt() / 2.0;
        roots = [
            Complex64::new(x1 + shift, 0.0),
            Complex64::new(re + shift, im.abs()),
            Complex64::new(re + shift, -im.abs()),
        ];
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let g = fp(*r);
            if g.norm() == 0.0 {
                break;
            }
            let next = *r - f(*r) / g;
            if next.is_finite() && f(next).norm() < f(*r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    if roots[1].im != 0.0 {
        roots[2] = roots[1].conj();
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Eigenvalues via [`cubic_roots`], computed on the trace-free part so that
/// (near-)scalar matrices do not lose precision to the cube root.
pub fn eigenvalues(m: &Matrix3<f64>) -> [Complex64; 3] {
    let shift = m.trace() / 3.0;
    let b = m - Matrix3::identity() * shift;
    let s = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)] + b[(0, 0)] * b[(2, 2)]
        - b[(0, 2)] * b[(2, 0)]
        + b[(1, 1)] * b[(2, 2)]
        - b[(1, 2)] * b[(2, 1)];
    cubic_roots(b.trace(), s, b.determinant()).map(|r| r + shift)
}

/// Symmetric 2×2 eigen-decomposition: (eigenvalues ascending, eigenvector matrix).
pub fn sym2_eigen(m: &Matrix2<f64>) -> ([f64; 2], Matrix2<f64>) {
    let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (s, c) = theta.sin_cos();
    let l1 = a * c * c + 2.0 * b * s * c + d * s * s;
    let l2 = a * s * s - 2.0 * b * s * c + d * c * c;
    let v = Matrix2::new(c, -s, s, c);
    if l1 <= l2 {
        ([l1, l2], v)
    } else {
        ([l2, l1], Matrix2::new(-s, c, c, s))
    }
}

/// Singular values of a 3×3 matrix, descending.
pub fn singular_values(m: &Matrix3<f64>) -> [f64; 3] {
    let sv = m.svd(false, false).singular_values;
    let mut v = [sv[0], sv[1], sv[2]];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Unit vectors spanning the null space of `m`, taken as the right singular
/// vectors of its `k` smallest singular values.
pub fn null_vectors(m: &Matrix3<f64>, k: usize) -> Vec<Vector3<f64>> {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.into_iter()
        .take(k)
        .map(|i| vt.row(i).transpose())
        .collect()
}

/// Row-major `[[f64;3];3]` (de)serialisation for `Matrix3<f64>`.
pub mod mat3_rows {
    use nalgebra::Matrix3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix3<f64>, s: S) -> Result<S::Ok, S::Error> {
        super::rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix3<f64>, D::Error> {
        let r = <[[f64; 3]; 3]>::deserialize(d)?;
        Ok(super::mat(r))
    }
}
