//! Minimal 2-vector / symmetric 2x2 matrix helpers used throughout.

/// Lateral 2-vector (slowness or position).
pub type Vec2 = [f64; 2];

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: Vec2) -> f64 {
    dot(a, a)
}

pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(a: Vec2, t: f64) -> Vec2 {
    [a[0] * t, a[1] * t]
}

/// Counterclockwise perpendicular: (-a2, a1).
pub fn perp(a: Vec2) -> Vec2 {
    [-a[1], a[0]]
}

/// Symmetric 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, b)
    }

    /// a*I + t * (v ⊗ v)
    pub fn scaled_identity_plus_outer(a: f64, t: f64, v: Vec2) -> Self {
        Mat2::new(
            a + t * v[0] * v[0],
            t * v[0] * v[1],
            t * v[1] * v[0],
            a + t * v[1] * v[1],
        )
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        Mat2 { m: r }
    }

    pub fn scale(&self, t: f64) -> Mat2 {
        Mat2::new(
            self.m[0][0] * t,
            self.m[0][1] * t,
            self.m[1][0] * t,
            self.m[1][1] * t,
        )
    }

    /// vᵀ M v
    pub fn quad_form(&self, v: Vec2) -> f64 {
        dot(v, self.mul_vec(v))
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    /// Max |entry| difference to another matrix, relative to the larger Frobenius norm.
    pub fn rel_diff(&self, o: &Mat2) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                num = num.max((self.m[i][j] - o.m[i][j]).abs());
                den = den.max(self.m[i][j].abs().max(o.m[i][j].abs()));
            }
        }
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// Eigen-decomposition of a symmetric matrix: ((λ1, e1), (λ2, e2)), λ1 ≥ λ2,
    /// eigenvectors unit length.
    pub fn eigs_sym(&self) -> ((f64, Vec2), (f64, Vec2)) {
        let a = self.m[0][0];
        let b = 0.5 * (self.m[0][1] + self.m[1][0]);
        let c = self.m[1][1];
        let tr = a + c;
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let l1 = 0.5 * tr + disc;
        let l2 = 0.5 * tr - disc;
        let e1 = if b.abs() > 1e-300 {
            let v = [l1 - c, b];
            scale(v, 1.0 / norm(v))
        } else if a >= c {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let e2 = perp(e1);
        ((l1, e1), (l2, e2))
    }
}

/// SplitMix64 mixing step; used to derive independent per-realization seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a 64-bit hash of a byte stream.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
