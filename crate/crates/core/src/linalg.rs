//! Fixed-size helpers for the 3x3 plane systems.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO3: Mat3 = [[0.0; 3]; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn mat_vec(m: &Mat3, x: &Vec3) -> Vec3 {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

/// `acc += s * m`
#[inline]
pub fn add_scaled(acc: &mut Mat3, m: &Mat3, s: f64) {
    for r in 0..3 {
        for c in 0..3 {
            acc[r][c] += s * m[r][c];
        }
    }
}

#[inline]
pub fn outer(x: &Vec3) -> Mat3 {
    let mut m = ZERO3;
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = x[r] * x[c];
        }
    }
    m
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve3(mut a: Mat3, mut b: Vec3) -> Option<Vec3> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
