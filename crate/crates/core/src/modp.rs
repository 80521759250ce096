//! Word-size prime field kernel for large rank computations.

/// Arithmetic modulo a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModP {
    p: u64,
}

impl ModP {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < 1 << 63, "modulus out of range");
        ModP { p }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn reduce_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }
}

/// Rank of a growing set of vectors, kept as an echelon basis.
///
/// Each stored row is normalized to 1 at its pivot and is zero at the pivots
/// of all rows stored before it, so reduction in insertion order is exact.
#[derive(Clone, Debug)]
pub struct IncrementalRank {
    f: ModP,
    len: usize,
    basis: Vec<(usize, Vec<u64>)>,
}

impl IncrementalRank {
    pub fn new(f: ModP, len: usize) -> Self {
        IncrementalRank { f, len, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.len
    }

    /// Adds a sparse vector given as `(position, residue)` pairs; returns
    /// whether it was independent of the vectors seen so far.
    pub fn push_sparse(&mut self, entries: &[(usize, u64)]) -> bool {
        let mut v = vec![0u64; self.len];
        for &(i, x) in entries {
            v[i] = self.f.add(v[i], x % self.f.modulus());
        }
        self.push(v)
    }

    pub fn push(&mut self, mut v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.len);
        let f = self.f;
        for (piv, row) in &self.basis {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[piv]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.basis.push((piv, v));
        true
    }
}

/// Rank of a dense matrix of residues.
pub fn rank_mod_p(f: ModP, rows: &[Vec<u64>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut acc = IncrementalRank::new(f, first.len());
    for r in rows {
        acc.push(r.clone());
        if acc.is_full() {
            break;
        }
    }
    acc.rank()
}
