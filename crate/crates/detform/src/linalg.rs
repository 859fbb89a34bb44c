//! Minimal fixed-size vector/matrix arithmetic for dimensions 2 and 3.

pub type Vec2 = [f64; 2];
pub type Vec3 = [f64; 3];

pub fn dot2(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm2(a: Vec2) -> f64 {
    dot2(a, a).sqrt()
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale3(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// General 2x2 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Self::new(a, 0.0, 0.0, d)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
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
}

/// Symmetric positive-definite 2x2 matrix; the shape of a Gaussian atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a: f64, // (0,0)
    pub b: f64, // (0,1) = (1,0)
    pub d: f64, // (1,1)
}

impl Sym2 {
    pub fn new(a: f64, b: f64, d: f64) -> Self {
        Self { a, b, d }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.b
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.det() > 0.0
    }

    /// Smallest eigenvalue; positive iff the matrix is positive definite.
    pub fn min_eigenvalue(&self) -> f64 {
        let t = self.trace();
        let disc = (t * t - 4.0 * self.det()).max(0.0).sqrt();
        0.5 * (t - disc)
    }

    pub fn inverse(&self) -> Option<Sym2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Sym2::new(self.d / det, -self.b / det, self.a / det))
    }

    pub fn quad_form(&self, v: Vec2) -> f64 {
        self.a * v[0] * v[0] + 2.0 * self.b * v[0] * v[1] + self.d * v[1] * v[1]
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [self.a * v[0] + self.b * v[1], self.b * v[0] + self.d * v[1]]
    }

    pub fn add(&self, o: &Sym2) -> Sym2 {
        Sym2::new(self.a + o.a, self.b + o.b, self.d + o.d)
    }

    pub fn scale(&self, s: f64) -> Sym2 {
        Sym2::new(self.a * s, self.b * s, self.d * s)
    }

    /// Congruence transform `Aᵀ S A`, the shape of a Gaussian after the
    /// substitution `x -> A x`.
    pub fn congruence(&self, a: &Mat2) -> Sym2 {
        let s = Mat2::new(self.a, self.b, self.b, self.d);
        let r = a.transpose().mul_mat(&s).mul_mat(a);
        // Symmetrize against rounding.
        Sym2::new(r.m[0][0], 0.5 * (r.m[0][1] + r.m[1][0]), r.m[1][1])
    }
}

/// General 3x3 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub fn new(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Block-diagonal `diag(1, L)` embedding of a 2x2 matrix.
    pub fn block_diag(l: &Mat2) -> Self {
        Self::new([
            [1.0, 0.0, 0.0],
            [0.0, l.m[0][0], l.m[0][1]],
            [0.0, l.m[1][0], l.m[1][1]],
        ])
    }

    pub fn det(&self) -> f64 {
        det3_rows(self.m[0], self.m[1], self.m[2])
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        [
            dot3(self.m[0], v),
            dot3(self.m[1], v),
            dot3(self.m[2], v),
        ]
    }
}

pub fn det3_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> f64 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// det(1 1 1; x y z) for three points of the plane: the determinantal kernel
/// denominator, equal to twice the signed area of the triangle (x, y, z).
pub fn det_ones(x: Vec2, y: Vec2, z: Vec2) -> f64 {
    det3_rows([1.0, 1.0, 1.0], [x[0], y[0], z[0]], [x[1], y[1], z[1]])
}
