//! Small square matrices over cyclotomic fields: the 2×2 Kleinian blocks and
//! the 4×4 symplectic elements, with exact characteristic-polynomial data.

use crate::cyclotomic::CycloNum;
use crate::error::Error;
use crate::rational::Rat;
use crate::Result;

/// N×N matrix over Q(ζ_conductor), row-major. All entries share the
/// conductor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareMat<const N: usize> {
    conductor: u32,
    entries: Vec<CycloNum>,
}

pub type Mat2 = SquareMat<2>;
pub type Mat4 = SquareMat<4>;

impl<const N: usize> SquareMat<N> {
    pub fn from_entries(conductor: u32, entries: Vec<CycloNum>) -> Result<Self> {
        if entries.len() != N * N {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                N * N,
                entries.len()
            )));
        }
        let entries = entries
            .into_iter()
            .map(|e| e.lift_to(conductor))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareMat { conductor, entries })
    }

    pub fn from_fn(conductor: u32, f: impl Fn(usize, usize) -> CycloNum) -> Self {
        let mut entries = Vec::with_capacity(N * N);
        for i in 0..N {
            for j in 0..N {
                let e = f(i, j);
                assert_eq!(e.conductor(), conductor, "entry conductor mismatch");
                entries.push(e);
            }
        }
        SquareMat { conductor, entries }
    }

    pub fn identity(conductor: u32) -> Self {
        Self::from_fn(conductor, |i, j| {
            if i == j {
                CycloNum::one(conductor)
            } else {
                CycloNum::zero(conductor)
            }
        })
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNum {
        &self.entries[i * N + j]
    }

    pub fn lift_to(&self, m: u32) -> Result<Self> {
        if m == self.conductor {
            return Ok(self.clone());
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift_to(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareMat {
            conductor: m,
            entries,
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor, "lift matrices first");
        Self::from_fn(self.conductor, |i, j| {
            let mut acc = CycloNum::zero(self.conductor);
            for k in 0..N {
                let a = self.get(i, k);
                if a.term_count() == 0 {
                    continue;
                }
                let b = other.get(k, j);
                if b.term_count() == 0 {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor);
        Self::from_fn(self.conductor, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor);
        Self::from_fn(self.conductor, |i, j| self.get(i, j).sub(other.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.conductor, |i, j| self.get(i, j).neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::from_fn(self.conductor, |i, j| self.get(i, j).scale(r))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.conductor, |i, j| self.get(j, i).clone())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.conductor, |i, j| self.get(j, i).conjugate())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.conductor)
    }

    /// Determinant of the submatrix on the given rows and columns (Laplace
    /// expansion; fine for N <= 4).
    fn det_sub(&self, rows: &[usize], cols: &[usize]) -> CycloNum {
        debug_assert_eq!(rows.len(), cols.len());
        match rows.len() {
            0 => CycloNum::one(self.conductor),
            1 => self.get(rows[0], cols[0]).clone(),
            _ => {
                let mut acc = CycloNum::zero(self.conductor);
                let rest: Vec<usize> = rows[1..].to_vec();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(rows[0], c);
                    if a.term_count() == 0 {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, &x)| x)
                        .collect();
                    let minor = self.det_sub(&rest, &sub_cols);
                    let term = a.mul(&minor);
                    if k % 2 == 0 {
                        acc = acc.add(&term);
                    } else {
                        acc = acc.sub(&term);
                    }
                }
                acc
            }
        }
    }

    pub fn det(&self) -> CycloNum {
        let idx: Vec<usize> = (0..N).collect();
        self.det_sub(&idx, &idx)
    }

    /// Sum of the k×k principal minors: the k-th elementary symmetric
    /// function of the eigenvalues, also the trace on the k-th wedge power.
    pub fn principal_minor_sum(&self, k: usize) -> CycloNum {
        let mut acc = CycloNum::zero(self.conductor);
        for subset in combinations(N, k) {
            acc = acc.add(&self.det_sub(&subset, &subset));
        }
        acc
    }

    pub fn trace(&self) -> CycloNum {
        let mut acc = CycloNum::zero(self.conductor);
        for i in 0..N {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Inverse via the adjugate; errors when the determinant is zero.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let det_inv = det.inverse()?;
        let all: Vec<usize> = (0..N).collect();
        Ok(Self::from_fn(self.conductor, |i, j| {
            // cofactor expansion: adj[i][j] = (-1)^{i+j} * minor(j, i)
            let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
            let minor = self.det_sub(&rows, &cols);
            let signed = if (i + j) % 2 == 0 { minor } else { minor.neg() };
            signed.mul(&det_inv)
        }))
    }

    pub fn is_unitary(&self) -> bool {
        self.conjugate_transpose().mul(self) == Self::identity(self.conductor)
    }

    /// det(Id − M), the quantity whose vanishing detects eigenvalue 1.
    pub fn det_id_minus(&self) -> CycloNum {
        Self::identity(self.conductor).sub(self).det()
    }

    /// Monomial form, if each row and column carries exactly one nonzero
    /// entry and that entry is ±(root of unity).
    pub fn monomial_form(&self) -> Option<MonomialForm<N>> {
        let n = self.conductor;
        let mut col_of_row = [usize::MAX; N];
        let mut exp2 = [0u32; N];
        let mut col_used = [false; N];
        for i in 0..N {
            for j in 0..N {
                let e = self.get(i, j);
                if e.term_count() == 0 {
                    continue;
                }
                let (exp, coeff) = e.as_single_term()?;
                if col_of_row[i] != usize::MAX || col_used[j] {
                    return None;
                }
                // value is coeff * ζ_n^exp with coeff = ±1; encode over 2n
                let doubled = if coeff == &Rat::one() {
                    2 * exp
                } else if coeff == &Rat::from_int(-1) {
                    (2 * exp + n) % (2 * n)
                } else {
                    return None;
                };
                col_of_row[i] = j;
                exp2[i] = doubled;
                col_used[j] = true;
            }
        }
        if col_of_row.iter().any(|&c| c == usize::MAX) {
            return None;
        }
        Some(MonomialForm {
            conductor: n,
            col_of_row,
            exp2,
        })
    }
}

/// A monomial matrix: row i has its only nonzero entry in column
/// `col_of_row[i]`, with value ζ_{2·conductor}^{exp2[i]}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialForm<const N: usize> {
    pub conductor: u32,
    pub col_of_row: [usize; N],
    pub exp2: [u32; N],
}

impl<const N: usize> MonomialForm<N> {
    /// Product, in integer arithmetic on exponents: row i of a·b picks up
    /// a's entry at (i, π_a(i)) times b's entry at (π_a(i), π_b(π_a(i))).
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.conductor, other.conductor);
        let two_n = 2 * self.conductor;
        let mut col_of_row = [0usize; N];
        let mut exp2 = [0u32; N];
        for i in 0..N {
            let mid = self.col_of_row[i];
            col_of_row[i] = other.col_of_row[mid];
            exp2[i] = (self.exp2[i] + other.exp2[mid]) % two_n;
        }
        MonomialForm {
            conductor: self.conductor,
            col_of_row,
            exp2,
        }
    }

    /// The elementary symmetric function e_p as a multiset of exponents over
    /// ζ_{2·conductor} (a term with a negative sign is folded into the
    /// exponent via −1 = ζ^{conductor·…}): one term per π-invariant
    /// p-subset of indices, carrying the sign of the restricted permutation.
    /// Sorted for comparison.
    pub fn elementary_exponent_multiset(&self, p: usize) -> Vec<u32> {
        let two_n = 2 * self.conductor;
        let mut out = Vec::new();
        for subset in combinations(N, p) {
            // invariant under the permutation?
            if subset.iter().any(|&i| !subset.contains(&self.col_of_row[i])) {
                continue;
            }
            // sign of the restricted permutation and the entry product
            let mut exp: u64 = 0;
            for &i in &subset {
                exp += self.exp2[i] as u64;
            }
            if restricted_permutation_is_odd(&subset, &self.col_of_row) {
                exp += self.conductor as u64; // multiply by −1
            }
            out.push((exp % two_n as u64) as u32);
        }
        out.sort_unstable();
        out
    }
}

fn restricted_permutation_is_odd<const N: usize>(subset: &[usize], col_of_row: &[usize; N]) -> bool {
    // parity by cycle counting on the restriction
    let mut seen = vec![false; subset.len()];
    let mut transpositions = 0usize;
    for start in 0..subset.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut pos = start;
        loop {
            seen[pos] = true;
            len += 1;
            let image = col_of_row[subset[pos]];
            pos = subset.iter().position(|&x| x == image).expect("invariant subset");
            if pos == start {
                break;
            }
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 1
}

impl MonomialForm<4> {
    /// Eigenvalue exponents over conductor 4·N (the canonical embedding of
    /// the eigenvalues as roots of unity), from the permutation cycles.
    /// Returns None when a cycle longer than 2 appears.
    pub fn eigenvalue_exponents(&self) -> Option<[u32; 4]> {
        let m = 4 * self.conductor; // eigenvalue conductor
        let two_n = 2 * self.conductor;
        // permutation: basis vector e_j maps to val * e_{row(j)}
        let mut row_of_col = [usize::MAX; 4];
        for (i, &c) in self.col_of_row.iter().enumerate() {
            row_of_col[c] = i;
        }
        let mut seen = [false; 4];
        let mut out = Vec::with_capacity(4);
        for start in 0..4 {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut prod: u64 = 0; // exponent over 2n of the cycle product
            let mut j = start;
            loop {
                seen[j] = true;
                let i = row_of_col[j]; // e_j ↦ val(i) e_i where col_of_row[i] = j
                prod += self.exp2[i] as u64;
                len += 1;
                j = i;
                if j == start {
                    break;
                }
            }
            let prod = (prod % two_n as u64) as u32;
            match len {
                1 => out.push(2 * prod), // ζ_{2n}^p = ζ_{4n}^{2p}
                2 => {
                    out.push(prod);
                    out.push(prod + two_n);
                }
                _ => return None,
            }
        }
        debug_assert_eq!(out.len(), 4);
        let mut arr = [0u32; 4];
        for (slot, v) in arr.iter_mut().zip(out) {
            *slot = v % m;
        }
        Some(arr)
    }

    /// Split the eigenvalue multiset into the two inverse-closed pairs
    /// {ζ^a, ζ^{−a}}, {ζ^b, ζ^{−b}}, reported as canonical exponents
    /// min(a, 4N−a) over conductor 4N. None if the multiset is not
    /// inverse-closed (the matrix was not symplectic).
    pub fn eigen_pairs(&self) -> Option<(u32, u32)> {
        let m = 4 * self.conductor;
        let exps = self.eigenvalue_exponents()?;
        let mut pool: Vec<u32> = exps.to_vec();
        let mut pairs = Vec::with_capacity(2);
        while let Some(a) = pool.pop() {
            let partner = (m - a % m) % m;
            let pos = pool.iter().position(|&x| x == partner)?;
            pool.swap_remove(pos);
            pairs.push(a.min(partner));
        }
        debug_assert_eq!(pairs.len(), 2);
        pairs.sort_unstable();
        Some((pairs[0], pairs[1]))
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// The symplectic structure
// ---------------------------------------------------------------------------

/// The fixed symplectic form: block diagonal of two copies of [[0,1],[−1,0]].
pub fn symplectic_form_j(conductor: u32) -> Mat4 {
    let one = CycloNum::one(conductor);
    Mat4::from_fn(conductor, |i, j| match (i, j) {
        (0, 1) | (2, 3) => one.clone(),
        (1, 0) | (3, 2) => one.neg(),
        _ => CycloNum::zero(conductor),
    })
}

/// Mᵀ J M = J, exactly.
pub fn is_symplectic(m: &Mat4) -> bool {
    let j = symplectic_form_j(m.conductor());
    m.transpose().mul(&j).mul(m) == j
}

/// The extension matrix T_{n,k}: swaps the two symplectic planes with a
/// twist by ξ_n^k.
pub fn t_matrix(n: u32, k: u32) -> Mat4 {
    assert!(n >= 1 && k >= 1 && k <= n, "require 1 <= k <= n");
    let zero = CycloNum::zero(n);
    let one = CycloNum::one(n);
    let xi = CycloNum::root(n, k % n);
    let xi_inv = CycloNum::root(n, (n - k % n) % n);
    Mat4::from_entries(
        n,
        vec![
            zero.clone(), zero.clone(), one.clone(), zero.clone(),
            zero.clone(), zero.clone(), zero.clone(), one,
            xi,           zero.clone(), zero.clone(), zero.clone(),
            zero.clone(), xi_inv,       zero.clone(), zero,
        ],
    )
    .unwrap()
}

/// diag(A, B) as a 4×4 matrix.
pub fn block_diag(a: &Mat2, b: &Mat2) -> Mat4 {
    assert_eq!(a.conductor(), b.conductor());
    let n = a.conductor();
    Mat4::from_fn(n, |i, j| match (i / 2, j / 2) {
        (0, 0) => a.get(i, j).clone(),
        (1, 1) => b.get(i - 2, j - 2).clone(),
        _ => CycloNum::zero(n),
    })
}

/// Is the matrix block-diagonal with 2×2 blocks?
pub fn is_block_diagonal(m: &Mat4) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            if (i / 2 != j / 2) && m.get(i, j).term_count() > 0 && !m.get(i, j).is_zero() {
                return false;
            }
        }
    }
    true
}

/// The two diagonal blocks of a block-diagonal matrix.
pub fn diagonal_blocks(m: &Mat4) -> (Mat2, Mat2) {
    let n = m.conductor();
    let a = Mat2::from_fn(n, |i, j| m.get(i, j).clone());
    let b = Mat2::from_fn(n, |i, j| m.get(i + 2, j + 2).clone());
    (a, b)
}

/// Signed characteristic-polynomial coefficients (e1, e2, e3, e4) so that
/// det(t·Id − M) = t⁴ − e1·t³ + e2·t² − e3·t + e4.
pub fn char_poly_elementary(m: &Mat4) -> [CycloNum; 4] {
    [
        m.principal_minor_sum(1),
        m.principal_minor_sum(2),
        m.principal_minor_sum(3),
        m.principal_minor_sum(4),
    ]
}
