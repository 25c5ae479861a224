use std::fmt;

/// Integer 2x2 matrix; column `j` holds the coordinates of the transported
/// basis vector `j` in the initial basis `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonodromyMatrix {
    pub entries: [[i64; 2]; 2],
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl MonodromyMatrix {
    pub const IDENTITY: Self = Self {
        entries: [[1, 0], [0, 1]],
    };

    pub fn new(entries: [[i64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn trace(&self) -> i64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Inverse in `GL(2, Z)`; `None` unless `det = +-1`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.abs() != 1 {
            return None;
        }
        let [[a, b], [c, d]] = self.entries;
        Some(Self::new([[d * det, -b * det], [-c * det, a * det]]))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let x = &self.entries;
        let y = &other.entries;
        let mut out = [[0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        Self::new(out)
    }

    /// `k` such that the matrix is `GL(2, Z)`-conjugate to `[[1, k], [0, 1]]`,
    /// `k >= 1`; `None` for the identity or a non-unipotent matrix.
    pub fn parabolic_index(&self) -> Option<i64> {
        if self.det() != 1 || self.trace() != 2 || self.is_identity() {
            return None;
        }
        let [[a, b], [c, d]] = self.entries;
        Some(gcd(gcd(a - 1, b), gcd(c, d - 1)))
    }

    /// Conjugate to `[[1, 1], [0, 1]]`: a defect of index one.
    pub fn is_unit_defect(&self) -> bool {
        self.parabolic_index() == Some(1)
    }

    /// Conjugacy in `GL(2, Z)`, decided for the identity and unipotent
    /// classes by the index and otherwise by searching conjugators with
    /// entries in `[-4, 4]`.
    pub fn is_conjugate(&self, other: &Self) -> bool {
        if self.is_identity() || other.is_identity() {
            return self == other;
        }
        if let (Some(p), Some(q)) = (self.parabolic_index(), other.parabolic_index()) {
            return p == q;
        }
        if self.det() != other.det() || self.trace() != other.trace() {
            return false;
        }
        for a in -4..=4 {
            for b in -4..=4 {
                for c in -4..=4 {
                    for d in -4..=4 {
                        let p = Self::new([[a, b], [c, d]]);
                        if let Some(pi) = p.inverse() {
                            if p.mul(self).mul(&pi) == *other {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

impl fmt::Display for MonodromyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}
