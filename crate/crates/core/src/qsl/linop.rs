//! Sparse linear operators with exact rational entries.
//!
//! Row-major sparse storage; zero entries are never materialized, so
//! structural equality is semantic equality. Operators on tensor products
//! index pairs as (a, b) -> a * dim_b + b, first factor major.

use crate::scalars::Rat;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq)]
pub struct LinOp {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rat>>,
}

impl LinOp {
    pub fn zero(rows: usize, cols: usize) -> LinOp {
        LinOp { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> LinOp {
        let mut m = LinOp::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn diagonal(entries: Vec<Rat>) -> LinOp {
        let mut m = LinOp::zero(entries.len(), entries.len());
        for (i, v) in entries.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of bounds");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rat) {
        let cur = self.entry(r, c);
        self.set(r, c, cur + v);
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Rat> {
        self.data[r].get(&c)
    }

    /// Entry as a value, zero when absent.
    pub fn entry(&self, r: usize, c: usize) -> Rat {
        self.data[r].get(&c).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// Sum of absolute values of all entries; zero iff the operator is zero.
    /// Used as the exact residual of matrix identities.
    pub fn abs_sum(&self) -> Rat {
        self.iter().map(|(_, _, v)| v.abs()).sum()
    }

    pub fn scale(&self, s: &Rat) -> LinOp {
        let mut out = LinOp::zero(self.rows, self.cols);
        if s.is_zero() {
            return out;
        }
        for (r, c, v) in self.iter() {
            out.set(r, c, v * s);
        }
        out
    }

    pub fn add(&self, other: &LinOp) -> LinOp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in other.iter() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &LinOp) -> LinOp {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn matmul(&self, other: &LinOp) -> LinOp {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = LinOp::zero(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    out.add_to(r, *c, &(a * b));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &LinOp) -> LinOp {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Rat::zero(); self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (c, a) in row {
                if !v[*c].is_zero() {
                    out[r] += &(a * &v[*c]);
                }
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.rows];
        for (r, row) in self.data.iter().enumerate() {
            if let Some(v) = row.get(&c) {
                out[r] = v.clone();
            }
        }
        out
    }

    /// Tensor product, pair (a, b) indexed as a * dim_b + b.
    pub fn kron(&self, other: &LinOp) -> LinOp {
        let mut out = LinOp::zero(self.rows * other.rows, self.cols * other.cols);
        for (ra, ca, va) in self.iter() {
            for (rb, cb, vb) in other.iter() {
                out.set(ra * other.rows + rb, ca * other.cols + cb, va * vb);
            }
        }
        out
    }

    /// Conjugates an operator on A tensor B by the leg swap, producing the
    /// corresponding operator on B tensor A.
    pub fn flip_tensor(&self, dim_a: usize, dim_b: usize) -> LinOp {
        assert_eq!(self.rows, dim_a * dim_b);
        assert_eq!(self.cols, dim_a * dim_b);
        let perm = |i: usize| (i % dim_b) * dim_a + i / dim_b;
        let mut out = LinOp::zero(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.set(perm(r), perm(c), v.clone());
        }
        out
    }

    /// Embeds a two-leg operator into legs (a, b) of a triple tensor
    /// product, identity on the remaining leg. Legs are 1-indexed and
    /// strictly increasing.
    pub fn embed_in_triple(&self, dims: [usize; 3], legs: (usize, usize)) -> LinOp {
        let (p, r) = legs;
        assert!(p < r && (1..=3).contains(&p) && (1..=3).contains(&r), "bad legs {legs:?}");
        let spectator = 6 - p - r;
        assert_eq!(self.rows, dims[p - 1] * dims[r - 1], "operator shape vs legs");
        assert_eq!(self.cols, self.rows);
        let total: usize = dims.iter().product();
        let unpack = |i: usize| {
            let x2 = i % dims[2];
            let x1 = (i / dims[2]) % dims[1];
            let x0 = i / (dims[1] * dims[2]);
            [x0, x1, x2]
        };
        let pack = |x: [usize; 3]| (x[0] * dims[1] + x[1]) * dims[2] + x[2];
        let mut out = LinOp::zero(total, total);
        for col in 0..total {
            let xs = unpack(col);
            let opcol = xs[p - 1] * dims[r - 1] + xs[r - 1];
            for (row2, c2, v) in self.iter() {
                if c2 != opcol {
                    continue;
                }
                let mut ys = xs;
                ys[p - 1] = row2 / dims[r - 1];
                ys[r - 1] = row2 % dims[r - 1];
                ys[spectator - 1] = xs[spectator - 1];
                out.add_to(pack(ys), col, v);
            }
        }
        out
    }
}

impl std::fmt::Debug for LinOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LinOp {}x{} ({} nonzero)", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(f, "  ({r},{c}) = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(n: usize, r: usize, c: usize) -> LinOp {
        let mut m = LinOp::zero(n, n);
        m.set(r, c, Rat::one());
        m
    }

    #[test]
    fn product_of_matrix_units() {
        // E_{ab} E_{cd} = delta_{bc} E_{ad}.
        let e12 = elem(3, 0, 1);
        let e23 = elem(3, 1, 2);
        assert_eq!(e12.matmul(&e23), elem(3, 0, 2));
        assert!(e23.matmul(&e12).is_zero());
    }

    #[test]
    fn identity_is_neutral_and_assoc_holds() {
        let a = {
            let mut m = LinOp::zero(2, 2);
            m.set(0, 0, Rat::new(1, 2));
            m.set(0, 1, Rat::from_int(3));
            m.set(1, 0, Rat::from_int(-1));
            m
        };
        let id = LinOp::identity(2);
        assert_eq!(a.matmul(&id), a);
        assert_eq!(id.matmul(&a), a);
        let b = a.scale(&Rat::new(2, 7));
        let c = a.add(&id);
        assert_eq!(a.matmul(&b).matmul(&c), a.matmul(&b.matmul(&c)));
    }

    #[test]
    fn zero_entries_are_pruned() {
        let mut m = LinOp::zero(2, 2);
        m.set(0, 0, Rat::one());
        m.add_to(0, 0, &-Rat::one());
        assert!(m.is_zero());
        assert_eq!(m, LinOp::zero(2, 2));
    }

    #[test]
    fn kron_and_flip() {
        let a = elem(2, 0, 1);
        let b = elem(3, 2, 0);
        let t = a.kron(&b);
        assert_eq!(t.entry(0 * 3 + 2, 1 * 3 + 0), Rat::one());
        assert_eq!(t.nnz(), 1);
        // Flip conjugation sends a kron b on A x B to b kron a on B x A.
        assert_eq!(t.flip_tensor(2, 3), b.kron(&a));
    }

    #[test]
    fn triple_embeddings_commute_on_disjoint_legs() {
        let a = elem(2, 0, 1).kron(&elem(2, 1, 0));
        let dims = [2, 2, 2];
        let a12 = a.embed_in_triple(dims, (1, 2));
        let a23 = a.embed_in_triple(dims, (2, 3));
        let a13 = a.embed_in_triple(dims, (1, 3));
        // Embedding at (1,2) is op kron id, at (2,3) is id kron op.
        assert_eq!(a12, a.kron(&LinOp::identity(2)));
        assert_eq!(a23, LinOp::identity(2).kron(&a));
        // The (1,3) embedding is the flip-13 conjugate of the (1,2) one;
        // spot-check one entry: acts on legs 1 and 3, identity on leg 2.
        let idx = |x: [usize; 3]| (x[0] * 2 + x[1]) * 2 + x[2];
        assert_eq!(a13.entry(idx([0, 0, 1]), idx([1, 0, 0])), Rat::one());
        assert_eq!(a13.entry(idx([0, 1, 1]), idx([1, 1, 0])), Rat::one());
        assert_eq!(a13.nnz(), 2);
    }

    #[test]
    fn apply_matches_column_extraction() {
        let mut m = LinOp::zero(3, 3);
        m.set(0, 1, Rat::from_int(2));
        m.set(2, 1, Rat::new(-1, 3));
        let mut v = vec![Rat::zero(); 3];
        v[1] = Rat::one();
        assert_eq!(m.apply(&v), m.column(1));
    }
}
