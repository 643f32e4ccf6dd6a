//! Finite matrix groups: Kleinian subgroups of SU(2), their diagonal
//! embeddings into Sp(4), and the index-2 extensions by T_{n,k}.

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycloNum;
use crate::error::Error;
use crate::matrix::{
    block_diag, diagonal_blocks, is_block_diagonal, is_symplectic, t_matrix, Mat2, Mat4,
    MonomialForm, SquareMat,
};
use crate::rational::Rat;
use crate::Result;

/// Default closure cap, comfortably above twice the largest admissible
/// local group order (1424).
pub const DEFAULT_ELEMENT_CAP: usize = 20_000;

// ---------------------------------------------------------------------------
// Canonical element keys
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum EntryKey {
    Zero,
    Mono { exp: u32, coeff: Rat },
    Dense(Vec<Rat>),
}

fn entry_key(e: &CycloNum, mono_mode: bool) -> EntryKey {
    if mono_mode {
        // products of monomial entries stay single-term; single-term forms
        // are canonical per field element
        match e.as_single_term() {
            None => EntryKey::Zero,
            Some((exp, coeff)) => EntryKey::Mono {
                exp,
                coeff: coeff.clone(),
            },
        }
    } else {
        // reduce to the power basis: stored terms may cancel
        let coeffs = e.canonical_coeffs();
        if coeffs.iter().all(Rat::is_zero) {
            EntryKey::Zero
        } else {
            EntryKey::Dense(coeffs)
        }
    }
}

fn element_key<const N: usize>(m: &SquareMat<N>, mono_mode: bool) -> Vec<EntryKey> {
    let mut key = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            key.push(entry_key(m.get(i, j), mono_mode));
        }
    }
    key
}

fn is_monomial<const N: usize>(m: &SquareMat<N>) -> bool {
    m.monomial_like()
}

impl<const N: usize> SquareMat<N> {
    fn monomial_like(&self) -> bool {
        // cheap pre-test used to pick the closure key mode
        for i in 0..N {
            let mut nonzero = 0;
            for j in 0..N {
                let e = self.get(i, j);
                match e.as_single_term() {
                    Some((_, c)) if c == &Rat::one() || c == &Rat::from_int(-1) => nonzero += 1,
                    Some(_) => return false,
                    None if e.term_count() == 0 => {}
                    None => return false,
                }
            }
            if nonzero != 1 {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// MatrixGroup
// ---------------------------------------------------------------------------

/// A finite group of N×N matrices over one cyclotomic field, closed under
/// multiplication, with the identity at index 0. Immutable once built.
#[derive(Clone)]
pub struct MatrixGroup<const N: usize> {
    conductor: u32,
    elements: Vec<SquareMat<N>>,
    generators: Vec<usize>,
    key_index: HashMap<Vec<EntryKey>, usize>,
    mono_mode: bool,
}

pub type KleinianGroup = MatrixGroup<2>;
pub type SymplecticGroup = MatrixGroup<4>;

impl<const N: usize> MatrixGroup<N> {
    /// Close a generating set under multiplication (work queue, canonical
    /// matrix keys). Errors when the closure passes `cap` elements.
    pub fn close(gens: Vec<SquareMat<N>>, cap: usize) -> Result<Self> {
        let conductor = gens
            .iter()
            .map(|g| g.conductor())
            .fold(1u32, |a, b| a.lcm(&b));
        let gens: Vec<SquareMat<N>> = gens
            .into_iter()
            .map(|g| g.lift_to(conductor))
            .collect::<Result<_>>()?;
        let mono_mode = gens.iter().all(is_monomial);
        let id = SquareMat::<N>::identity(conductor);
        let mut elements = vec![id];
        let mut key_index = HashMap::new();
        key_index.insert(element_key(&elements[0], mono_mode), 0usize);
        let mut generators = Vec::with_capacity(gens.len());
        for g in &gens {
            let key = element_key(g, mono_mode);
            let next = elements.len();
            let idx = *key_index.entry(key).or_insert_with(|| {
                elements.push(g.clone());
                next
            });
            generators.push(idx);
        }
        let mut cursor = 0;
        while cursor < elements.len() {
            let current = elements[cursor].clone();
            for g in &gens {
                let prod = current.mul(g);
                let key = element_key(&prod, mono_mode);
                if !key_index.contains_key(&key) {
                    if elements.len() >= cap {
                        return Err(Error::OrderCapExceeded { cap });
                    }
                    key_index.insert(key, elements.len());
                    elements.push(prod);
                }
            }
            cursor += 1;
        }
        Ok(MatrixGroup {
            conductor,
            elements,
            generators,
            key_index,
            mono_mode,
        })
    }

    /// Build from a full element list already closed under multiplication
    /// (checked). `generator_hints` indexes a generating subset.
    pub fn from_elements(
        elements: Vec<SquareMat<N>>,
        generator_hints: Vec<usize>,
    ) -> Result<Self> {
        let conductor = elements
            .iter()
            .map(|g| g.conductor())
            .fold(1u32, |a, b| a.lcm(&b));
        let mut lifted: Vec<SquareMat<N>> = elements
            .into_iter()
            .map(|g| g.lift_to(conductor))
            .collect::<Result<_>>()?;
        let mono_mode = lifted.iter().all(is_monomial);
        // identity to the front
        let id = SquareMat::<N>::identity(conductor);
        let id_key = element_key(&id, mono_mode);
        let pos = lifted
            .iter()
            .position(|m| element_key(m, mono_mode) == id_key)
            .ok_or_else(|| Error::InvalidInput("element list lacks the identity".into()))?;
        lifted.swap(0, pos);
        let mut key_index = HashMap::new();
        for (i, m) in lifted.iter().enumerate() {
            if key_index.insert(element_key(m, mono_mode), i).is_some() {
                return Err(Error::InvalidInput("duplicate elements in list".into()));
            }
        }
        let generators = generator_hints
            .into_iter()
            .map(|i| if i == pos { 0 } else if i == 0 { pos } else { i })
            .collect();
        let g = MatrixGroup {
            conductor,
            elements: lifted,
            generators,
            key_index,
            mono_mode,
        };
        // spot closure check: products of generators with everything
        for &t in &g.generators {
            for i in 0..g.order() {
                let prod = g.elements[i].mul(&g.elements[t]);
                if g.index_of(&prod).is_none() {
                    return Err(Error::InvalidInput("element list is not closed".into()));
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn elements(&self) -> &[SquareMat<N>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &SquareMat<N> {
        &self.elements[i]
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn is_monomial_group(&self) -> bool {
        self.mono_mode
    }

    pub fn index_of(&self, m: &SquareMat<N>) -> Option<usize> {
        let m = m.lift_to(self.conductor).ok()?;
        if self.mono_mode && !m.monomial_like() {
            // the query may be a dense representation of a monomial value;
            // keys would not match, so fall back to field equality
            return self.elements.iter().position(|cand| *cand == m);
        }
        self.key_index.get(&element_key(&m, self.mono_mode)).copied()
    }

    /// i·j → index of the product. O(order²) products; integer arithmetic
    /// on exponents when the group is monomial.
    pub fn mult_table(&self) -> Vec<Vec<u32>> {
        if self.mono_mode {
            if let Some(monos) = self
                .elements
                .iter()
                .map(SquareMat::monomial_form)
                .collect::<Option<Vec<_>>>()
            {
                let index: HashMap<(Vec<usize>, Vec<u32>), u32> = monos
                    .iter()
                    .enumerate()
                    .map(|(i, m)| ((m.col_of_row.to_vec(), m.exp2.to_vec()), i as u32))
                    .collect();
                return monos
                    .iter()
                    .map(|a| {
                        monos
                            .iter()
                            .map(|b| {
                                let p = a.mul(b);
                                index[&(p.col_of_row.to_vec(), p.exp2.to_vec())]
                            })
                            .collect()
                    })
                    .collect();
            }
        }
        (0..self.order())
            .map(|i| {
                (0..self.order())
                    .map(|j| {
                        let prod = self.elements[i].mul(&self.elements[j]);
                        self.index_of(&prod).expect("group not closed") as u32
                    })
                    .collect()
            })
            .collect()
    }

    pub fn element_orders(table: &[Vec<u32>]) -> Vec<u32> {
        (0..table.len())
            .map(|i| {
                let mut k = 1u32;
                let mut cur = i as u32;
                while cur != 0 {
                    cur = table[cur as usize][i];
                    k += 1;
                }
                k
            })
            .collect()
    }
}

impl SymplecticGroup {
    /// Index of −Id, when present.
    pub fn minus_identity_index(&self) -> Option<usize> {
        let m = Mat4::identity(self.conductor).neg();
        self.index_of(&m)
    }

    pub fn monomial_forms(&self) -> Option<Vec<MonomialForm<4>>> {
        if !self.mono_mode {
            return None;
        }
        self.elements.iter().map(Mat4::monomial_form).collect()
    }
}

// ---------------------------------------------------------------------------
// Kleinian groups
// ---------------------------------------------------------------------------

/// The A-D-E families of finite subgroups of SU(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KleinianFamily {
    #[serde(rename = "cyclic")]
    Cyclic,
    #[serde(rename = "binary_dihedral")]
    BinaryDihedral,
    #[serde(rename = "2T")]
    BinaryTetrahedral,
    #[serde(rename = "2O")]
    BinaryOctahedral,
    #[serde(rename = "2I")]
    BinaryIcosahedral,
}

impl KleinianFamily {
    pub fn parametric(self) -> bool {
        matches!(self, KleinianFamily::Cyclic | KleinianFamily::BinaryDihedral)
    }
}

fn mat2(conductor: u32, entries: [CycloNum; 4]) -> Mat2 {
    Mat2::from_entries(conductor, entries.to_vec()).unwrap()
}

/// [[0,1],[−1,0]], the rotation P (the quaternion j).
fn rotation_p(conductor: u32) -> Mat2 {
    let one = CycloNum::one(conductor);
    mat2(
        conductor,
        [CycloNum::zero(conductor), one.clone(), one.neg(), CycloNum::zero(conductor)],
    )
}

/// Matrix of the unit quaternion a + bi + cj + dk in SU(2):
/// [[a+bi, c+di], [−c+di, a−bi]].
fn quaternion_mat(conductor: u32, a: CycloNum, b: CycloNum, c: CycloNum, d: CycloNum) -> Mat2 {
    let i = imaginary_unit(conductor);
    let bi = b.mul(&i);
    let di = d.mul(&i);
    mat2(
        conductor,
        [
            a.add(&bi),
            c.add(&di),
            c.neg().add(&di),
            a.sub(&bi),
        ],
    )
}

fn imaginary_unit(conductor: u32) -> CycloNum {
    assert_eq!(conductor % 4, 0, "need 4 | conductor for i");
    CycloNum::root(conductor, conductor / 4)
}

/// √5 = ζ_5 + ζ_5⁴ − ζ_5² − ζ_5³ (the quadratic Gauss sum), lifted.
fn sqrt5(conductor: u32) -> CycloNum {
    assert_eq!(conductor % 5, 0);
    let f = conductor / 5;
    CycloNum::from_terms(
        conductor,
        [
            (f, Rat::one()),
            (4 * f, Rat::one()),
            (2 * f, Rat::from_int(-1)),
            (3 * f, Rat::from_int(-1)),
        ],
    )
}

/// Construct a Kleinian group from its standard generators:
/// cyclic ⟨diag(ζ_n, ζ_n^{−1})⟩; binary dihedral ⟨diag(ζ_{2n}, ζ_{2n}^{−1}), P⟩;
/// 2T = Hurwitz units over Q(ζ_4); 2O = 2T plus diag(ζ_8, ζ_8^{−1}) over
/// Q(ζ_8); 2I = 2T plus the icosian (φ + φ^{−1}i + j)/2 over Q(ζ_20).
pub fn kleinian_group(family: KleinianFamily, n: Option<u32>) -> Result<KleinianGroup> {
    kleinian_group_capped(family, n, DEFAULT_ELEMENT_CAP)
}

pub fn kleinian_group_capped(
    family: KleinianFamily,
    n: Option<u32>,
    cap: usize,
) -> Result<KleinianGroup> {
    let gens: Vec<Mat2> = match family {
        KleinianFamily::Cyclic => {
            let n = n.ok_or_else(|| Error::InvalidInput("cyclic family needs n".into()))?;
            if n < 1 {
                return Err(Error::InvalidInput("cyclic family needs n >= 1".into()));
            }
            vec![mat2(
                n,
                [
                    CycloNum::root(n, 1 % n),
                    CycloNum::zero(n),
                    CycloNum::zero(n),
                    CycloNum::root(n, (n - 1 % n) % n),
                ],
            )]
        }
        KleinianFamily::BinaryDihedral => {
            let n = n.ok_or_else(|| Error::InvalidInput("binary dihedral family needs n".into()))?;
            if n < 2 {
                return Err(Error::InvalidInput("binary dihedral needs n >= 2".into()));
            }
            let m = 2 * n;
            let b = mat2(
                m,
                [
                    CycloNum::root(m, 1),
                    CycloNum::zero(m),
                    CycloNum::zero(m),
                    CycloNum::root(m, m - 1),
                ],
            );
            vec![b, rotation_p(m)]
        }
        KleinianFamily::BinaryTetrahedral => binary_tetrahedral_gens(4),
        KleinianFamily::BinaryOctahedral => {
            let mut g = binary_tetrahedral_gens(8);
            g.push(mat2(
                8,
                [
                    CycloNum::root(8, 1),
                    CycloNum::zero(8),
                    CycloNum::zero(8),
                    CycloNum::root(8, 7),
                ],
            ));
            g
        }
        KleinianFamily::BinaryIcosahedral => {
            let n = 20;
            let mut g = binary_tetrahedral_gens(n);
            let half = Rat::frac(1, 2);
            let s5 = sqrt5(n);
            // φ = (1+√5)/2, φ^{−1} = (√5−1)/2
            let phi = CycloNum::one(n).add(&s5).scale(&half);
            let phi_inv = s5.sub(&CycloNum::one(n)).scale(&half);
            // (φ + φ^{−1}·i + 1·j + 0·k)/2
            g.push(quaternion_mat(
                n,
                phi.scale(&half),
                phi_inv.scale(&half),
                CycloNum::from_rat(n, half),
                CycloNum::zero(n),
            ));
            g
        }
    };
    MatrixGroup::close(gens, cap)
}

fn binary_tetrahedral_gens(conductor: u32) -> Vec<Mat2> {
    // quaternions i, j, and ω = (−1+i+j+k)/2
    let half = Rat::frac(1, 2);
    let zero = CycloNum::zero(conductor);
    let one = CycloNum::one(conductor);
    let qi = quaternion_mat(conductor, zero.clone(), one.clone(), zero.clone(), zero.clone());
    let qj = rotation_p(conductor);
    let h = CycloNum::from_rat(conductor, half);
    let omega = quaternion_mat(conductor, h.neg(), h.clone(), h.clone(), h);
    vec![qi, qj, omega]
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// A group automorphism as an explicit permutation of element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub map: Vec<usize>,
}

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Automorphism {
            map: (0..order).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Verify bijectivity and multiplicativity against a mult table.
    pub fn verify(&self, table: &[Vec<u32>]) -> Result<()> {
        let m = table.len();
        if self.map.len() != m {
            return Err(Error::NotAutomorphism(format!(
                "table length {} does not match group order {m}",
                self.map.len()
            )));
        }
        let mut seen = vec![false; m];
        for &v in &self.map {
            if v >= m || seen[v] {
                return Err(Error::NotAutomorphism("not a bijection".into()));
            }
            seen[v] = true;
        }
        if self.map[0] != 0 {
            return Err(Error::NotAutomorphism("does not fix the identity".into()));
        }
        for i in 0..m {
            for j in 0..m {
                let lhs = self.map[table[i][j] as usize];
                let rhs = table[self.map[i]][self.map[j]] as usize;
                if lhs != rhs {
                    return Err(Error::NotAutomorphism(format!(
                        "θ({i}·{j}) ≠ θ({i})·θ({j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Named or explicit automorphism choices accepted by the constructors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Named(String),
    Table(Vec<usize>),
}

impl Default for Theta {
    fn default() -> Self {
        Theta::Named("id".into())
    }
}

pub fn resolve_theta(h: &KleinianGroup, theta: &Theta) -> Result<Automorphism> {
    if matches!(theta, Theta::Named(name) if name == "id") {
        return Ok(Automorphism::identity(h.order()));
    }
    let table = h.mult_table();
    let auto = match theta {
        Theta::Named(name) if name == "inversion" => {
            let mut map = vec![usize::MAX; h.order()];
            for (i, slot) in map.iter_mut().enumerate() {
                let inv = (0..h.order())
                    .find(|&j| table[i][j] == 0)
                    .expect("every element has an inverse");
                *slot = inv;
            }
            Automorphism { map }
        }
        Theta::Named(other) => {
            return Err(Error::NotAutomorphism(format!("unknown theta name {other:?}")))
        }
        Theta::Table(map) => Automorphism { map: map.clone() },
    };
    auto.verify(&table)?;
    Ok(auto)
}

/// θ(A) = R·A·R^{−1} as an automorphism table, when conjugation by R maps
/// the group into itself. All comparisons happen in the compositum field to
/// avoid a descent.
pub fn conjugation_automorphism(h: &KleinianGroup, r: &Mat2) -> Result<Automorphism> {
    let l = h.conductor().lcm(&r.conductor());
    let r = r.lift_to(l)?;
    let r_inv = r.inverse()?;
    let lifted: Vec<Mat2> = h
        .elements()
        .iter()
        .map(|g| g.lift_to(l))
        .collect::<Result<_>>()?;
    let mono = lifted.iter().all(is_monomial);
    let index: HashMap<Vec<EntryKey>, usize> = lifted
        .iter()
        .enumerate()
        .map(|(i, m)| (element_key(m, mono), i))
        .collect();
    let mut map = Vec::with_capacity(h.order());
    for g in &lifted {
        let conj = r.mul(g).mul(&r_inv);
        let idx = if mono && !conj.monomial_like() {
            lifted.iter().position(|cand| *cand == conj)
        } else {
            index.get(&element_key(&conj, mono)).copied()
        };
        let idx =
            idx.ok_or_else(|| Error::NotAutomorphism("conjugation leaves the group".into()))?;
        map.push(idx);
    }
    Ok(Automorphism { map })
}

/// All automorphisms of a (small) group, by brute-force search over images
/// of the generators with matching orders.
pub fn automorphisms(h: &KleinianGroup) -> Vec<Automorphism> {
    let table = h.mult_table();
    let orders = MatrixGroup::<2>::element_orders(&table);
    let order = h.order();
    // generator set: drop duplicates and the identity
    let mut gens: Vec<usize> = Vec::new();
    for &g in h.generator_indices() {
        if g != 0 && !gens.contains(&g) {
            gens.push(g);
        }
    }
    if gens.is_empty() {
        return vec![Automorphism::identity(order)];
    }
    // spanning structure: element -> (parent, generator slot)
    let mut parent = vec![None; order];
    let mut bfs_order = vec![0usize];
    parent[0] = Some((0usize, usize::MAX));
    let mut cursor = 0;
    while cursor < bfs_order.len() {
        let i = bfs_order[cursor];
        for (t, &g) in gens.iter().enumerate() {
            let j = table[i][g] as usize;
            if parent[j].is_none() {
                parent[j] = Some((i, t));
                bfs_order.push(j);
            }
        }
        cursor += 1;
    }
    debug_assert_eq!(bfs_order.len(), order, "generators must generate");

    let mut out = Vec::new();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            (0..order)
                .filter(|&c| orders[c] == orders[g])
                .collect()
        })
        .collect();
    let mut pick = vec![0usize; gens.len()];
    'outer: loop {
        let images: Vec<usize> = pick
            .iter()
            .zip(&candidates)
            .map(|(&p, c)| c[p])
            .collect();
        // build the map along the spanning structure
        let mut map = vec![usize::MAX; order];
        map[0] = 0;
        for &j in &bfs_order[1..] {
            let (p, t) = parent[j].unwrap();
            map[j] = table[map[p]][images[t]] as usize;
        }
        let auto = Automorphism { map };
        if auto.verify(&table).is_ok() {
            out.push(auto);
        }
        // advance the odometer
        for slot in 0..pick.len() {
            pick[slot] += 1;
            if pick[slot] < candidates[slot].len() {
                continue 'outer;
            }
            pick[slot] = 0;
        }
        break;
    }
    out
}

// ---------------------------------------------------------------------------
// Diagonal embeddings and index-2 extensions
// ---------------------------------------------------------------------------

/// The group of block matrices diag(A, θ(A)) for A in H. θ must be a
/// bijection fixing the identity; multiplicativity is equivalent to the
/// embedded element set being closed, which the construction checks (every
/// element times every embedded generator), so a non-automorphism is
/// rejected without the quadratic table verification.
pub fn diagonal_embed(h: &KleinianGroup, theta: &Automorphism) -> Result<SymplecticGroup> {
    if theta.map.len() != h.order() {
        return Err(Error::NotAutomorphism("length mismatch".into()));
    }
    let mut seen = vec![false; h.order()];
    for &v in &theta.map {
        if v >= h.order() || seen[v] {
            return Err(Error::NotAutomorphism("not a bijection".into()));
        }
        seen[v] = true;
    }
    if theta.map[0] != 0 {
        return Err(Error::NotAutomorphism("does not fix the identity".into()));
    }
    let elements: Vec<Mat4> = (0..h.order())
        .map(|i| block_diag(h.element(i), h.element(theta.map[i])))
        .collect();
    let gens: Vec<usize> = h.generator_indices().to_vec();
    let g = MatrixGroup::from_elements(elements, gens).map_err(|e| match e {
        Error::InvalidInput(_) => Error::NotAutomorphism(
            "theta is not multiplicative (embedded set is not closed)".into(),
        ),
        other => other,
    })?;
    debug_assert!(g.elements().iter().all(is_symplectic));
    Ok(g)
}

/// Result of an index-2 extension: the closed group together with its
/// block-diagonal subgroup G′ and the coset representative, so that
/// G = G′ ∪ T·G′.
#[derive(Clone)]
pub struct IndexTwoExtension {
    pub group: SymplecticGroup,
    pub subgroup_indices: Vec<usize>,
    pub coset_rep: usize,
}

/// Adjoin T_{n,k} to a block-diagonal symplectic group and close. The
/// closure must split as G′ ∪ T·G′ with G′ its block-diagonal part and
/// [G′ : Gp] ≤ 2; otherwise T generates a larger extension and the call
/// fails with "not index 2".
pub fn extend_by_t(gp: &SymplecticGroup, n: u32, k: u32) -> Result<IndexTwoExtension> {
    extend_by_t_capped(gp, n, k, DEFAULT_ELEMENT_CAP)
}

pub fn extend_by_t_capped(
    gp: &SymplecticGroup,
    n: u32,
    k: u32,
    cap: usize,
) -> Result<IndexTwoExtension> {
    for (i, m) in gp.elements().iter().enumerate() {
        if !is_block_diagonal(m) {
            return Err(Error::NotBlockDiagonal(i));
        }
    }
    let t = t_matrix(n, k);
    let mut gens: Vec<Mat4> = gp
        .generator_indices()
        .iter()
        .map(|&i| gp.element(i).clone())
        .collect();
    gens.push(t.clone());
    let closure = MatrixGroup::close(gens, cap)?;
    let subgroup_indices: Vec<usize> = (0..closure.order())
        .filter(|&i| is_block_diagonal(closure.element(i)))
        .collect();
    let g_prime = subgroup_indices.len();
    if closure.order() != 2 * g_prime || g_prime > 2 * gp.order() {
        return Err(Error::NotIndexTwo {
            index: if gp.order() > 0 { g_prime / gp.order().max(1) } else { g_prime },
        });
    }
    let coset_rep = closure
        .index_of(&t)
        .expect("T belongs to its own closure");
    Ok(IndexTwoExtension {
        group: closure,
        subgroup_indices,
        coset_rep,
    })
}

// ---------------------------------------------------------------------------
// Freeness and projections
// ---------------------------------------------------------------------------

/// True iff no non-identity element has eigenvalue 1, decided exactly via
/// det(Id − g) ≠ 0 (eigenvalue exponents on the monomial fast path).
pub fn acts_freely(g: &SymplecticGroup) -> bool {
    free_check(g).is_ok()
}

/// Like [`acts_freely`] but reports which element fixes a vector.
pub fn free_check(g: &SymplecticGroup) -> Result<()> {
    if let Some(monos) = g.monomial_forms() {
        for (i, m) in monos.iter().enumerate() {
            if i == 0 {
                continue;
            }
            match m.eigenvalue_exponents() {
                Some(exps) => {
                    if exps.iter().any(|&e| e == 0) {
                        return Err(Error::NonFreeAction { element: i });
                    }
                }
                None => {
                    if g.element(i).det_id_minus().is_zero() {
                        return Err(Error::NonFreeAction { element: i });
                    }
                }
            }
        }
        return Ok(());
    }
    for i in 1..g.order() {
        if g.element(i).det_id_minus().is_zero() {
            return Err(Error::NonFreeAction { element: i });
        }
    }
    Ok(())
}

/// Result of projecting a block-diagonal group to its two SU(2) factors.
pub struct SplitProjections {
    pub h1: KleinianGroup,
    pub h2: KleinianGroup,
    /// theta[i] = index in h2 of the partner of h1's element i, present
    /// exactly when both projections are injective.
    pub theta: Option<Vec<usize>>,
}

/// Project a block-diagonal group onto its two 2×2 factors; recover
/// θ = P2 ∘ P1^{−1} when both projections are injective.
pub fn split_projections(g: &SymplecticGroup) -> Result<SplitProjections> {
    let mut a_parts: Vec<Mat2> = Vec::new();
    let mut b_parts: Vec<Mat2> = Vec::new();
    for (i, m) in g.elements().iter().enumerate() {
        if !is_block_diagonal(m) {
            return Err(Error::NotBlockDiagonal(i));
        }
        let (a, b) = diagonal_blocks(m);
        a_parts.push(a);
        b_parts.push(b);
    }
    let dedup = |parts: &[Mat2]| -> Result<(KleinianGroup, Vec<usize>)> {
        let mut elems: Vec<Mat2> = Vec::new();
        let mut keys: HashMap<Vec<EntryKey>, usize> = HashMap::new();
        let mono = parts.iter().all(is_monomial);
        let mut index_map = Vec::with_capacity(parts.len());
        for p in parts {
            let key = element_key(p, mono);
            let next = elems.len();
            let idx = *keys.entry(key).or_insert_with(|| {
                elems.push(p.clone());
                next
            });
            index_map.push(idx);
        }
        let n = elems.len();
        let group = MatrixGroup::from_elements(elems, (0..n).collect())?;
        // from_elements may move the identity to the front; remap
        let remap: Vec<usize> = parts
            .iter()
            .map(|p| group.index_of(p).expect("projection element present"))
            .collect();
        let _ = index_map;
        Ok((group, remap))
    };
    let (h1, map1) = dedup(&a_parts)?;
    let (h2, map2) = dedup(&b_parts)?;
    let injective = h1.order() == g.order() && h2.order() == g.order();
    let theta = if injective {
        // theta[h1-index of A] = h2-index of B for the element diag(A, B)
        let mut t = vec![usize::MAX; h1.order()];
        for i in 0..g.order() {
            t[map1[i]] = map2[i];
        }
        Some(t)
    } else {
        None
    };
    Ok(SplitProjections { h1, h2, theta })
}

// ---------------------------------------------------------------------------
// Group specifications (the JSON interface)
// ---------------------------------------------------------------------------

/// JSON group description:
/// `{"family": ..., "n": ..., "theta": "id"|"inversion"|[table], "extend": {"n":..,"k":..}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: KleinianFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Theta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extend: Option<ExtendSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExtendSpec {
    pub n: u32,
    pub k: u32,
}

impl GroupSpec {
    pub fn new(family: KleinianFamily, n: Option<u32>) -> Self {
        GroupSpec {
            family,
            n,
            theta: None,
            extend: None,
        }
    }

    /// Build the symplectic group: diagonal embedding of the Kleinian
    /// family (with θ), then the optional T_{n,k} extension.
    pub fn build(&self) -> Result<SymplecticGroup> {
        let h = kleinian_group(self.family, self.n)?;
        let theta = resolve_theta(&h, self.theta.as_ref().unwrap_or(&Theta::default()))?;
        let embedded = diagonal_embed(&h, &theta)?;
        match &self.extend {
            None => Ok(embedded),
            Some(ext) => Ok(extend_by_t(&embedded, ext.n, ext.k)?.group),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::char_poly_elementary;

    #[test]
    fn kleinian_orders_ade() {
        assert_eq!(kleinian_group(KleinianFamily::Cyclic, Some(7)).unwrap().order(), 7);
        assert_eq!(kleinian_group(KleinianFamily::Cyclic, Some(1)).unwrap().order(), 1);
        for n in 2..=6 {
            assert_eq!(
                kleinian_group(KleinianFamily::Cyclic, Some(n)).unwrap().order(),
                n as usize
            );
            assert_eq!(
                kleinian_group(KleinianFamily::BinaryDihedral, Some(n)).unwrap().order(),
                4 * n as usize
            );
        }
        // the binary dihedral group of order 12
        assert_eq!(
            kleinian_group(KleinianFamily::BinaryDihedral, Some(3)).unwrap().order(),
            12
        );
        assert_eq!(
            kleinian_group(KleinianFamily::BinaryTetrahedral, None).unwrap().order(),
            24
        );
        assert_eq!(
            kleinian_group(KleinianFamily::BinaryOctahedral, None).unwrap().order(),
            48
        );
        // E8 has order 120
        assert_eq!(
            kleinian_group(KleinianFamily::BinaryIcosahedral, None).unwrap().order(),
            120
        );
    }

    #[test]
    fn kleinian_elements_are_special_unitary() {
        for (fam, n) in [
            (KleinianFamily::Cyclic, Some(5)),
            (KleinianFamily::BinaryDihedral, Some(3)),
            (KleinianFamily::BinaryTetrahedral, None),
            (KleinianFamily::BinaryIcosahedral, None),
        ] {
            let h = kleinian_group(fam, n).unwrap();
            for m in h.elements() {
                assert!(m.is_unitary());
                assert_eq!(m.det().to_rational().unwrap(), Rat::one());
            }
        }
    }

    #[test]
    fn diagonal_embed_cyclic3_identity_and_inversion() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(3)).unwrap();
        let id = resolve_theta(&h, &Theta::Named("id".into())).unwrap();
        let g = diagonal_embed(&h, &id).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.elements().iter().all(is_symplectic));
        let inv = resolve_theta(&h, &Theta::Named("inversion".into())).unwrap();
        let g2 = diagonal_embed(&h, &inv).unwrap();
        assert_eq!(g2.order(), 3);
        // inversion embedding: diag(ω, ω², ω², ω) for the generator
        let gen = g2.element(g2.generator_indices()[0]);
        assert_eq!(gen.get(0, 0), &CycloNum::root(3, 1));
        assert_eq!(gen.get(2, 2), &CycloNum::root(3, 2));
    }

    #[test]
    fn diagonal_embed_dihedral_all_symplectic() {
        let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(3)).unwrap();
        let id = Automorphism::identity(h.order());
        let g = diagonal_embed(&h, &id).unwrap();
        assert_eq!(g.order(), 12);
        assert!(g.elements().iter().all(is_symplectic));
    }

    #[test]
    fn extend_trivial_by_t21_gives_order_four() {
        let trivial = diagonal_embed(
            &kleinian_group(KleinianFamily::Cyclic, Some(1)).unwrap(),
            &Automorphism::identity(1),
        )
        .unwrap();
        let ext = extend_by_t(&trivial, 2, 1).unwrap();
        assert_eq!(ext.group.order(), 4);
        assert_eq!(ext.subgroup_indices.len(), 2);
        // T² = −Id
        let t = t_matrix(2, 1);
        assert_eq!(t.mul(&t), Mat4::identity(2).neg());
        let ext = extend_by_t(&trivial, 1, 1).unwrap();
        assert_eq!(ext.group.order(), 2);
    }

    #[test]
    fn extend_cyclic3_by_t31_gives_order_six() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(3)).unwrap();
        let g = diagonal_embed(&h, &Automorphism::identity(3)).unwrap();
        let ext = extend_by_t(&g, 3, 1).unwrap();
        assert_eq!(ext.group.order(), 6);
    }

    #[test]
    fn extension_that_blows_up_reports_not_index_two() {
        // C5 embedded with inversion is not normalized into index 2 by T_{5,1}
        let h = kleinian_group(KleinianFamily::Cyclic, Some(5)).unwrap();
        let inv = resolve_theta(&h, &Theta::Named("inversion".into())).unwrap();
        let g = diagonal_embed(&h, &inv).unwrap();
        match extend_by_t(&g, 5, 1) {
            Err(Error::NotIndexTwo { .. }) => {}
            other => panic!("expected NotIndexTwo, got {:?}", other.map(|e| e.group.order())),
        }
    }

    #[test]
    fn freeness_examples() {
        let c5 = diagonal_embed(
            &kleinian_group(KleinianFamily::Cyclic, Some(5)).unwrap(),
            &Automorphism::identity(5),
        )
        .unwrap();
        assert!(acts_freely(&c5));
        // ⟨T_{1,1}⟩: T² = Id with trace 0 forces eigenvalues {1,1,−1,−1}
        let trivial = diagonal_embed(
            &kleinian_group(KleinianFamily::Cyclic, Some(1)).unwrap(),
            &Automorphism::identity(1),
        )
        .unwrap();
        let t11 = extend_by_t(&trivial, 1, 1).unwrap();
        assert!(!acts_freely(&t11.group));
        // ⟨diag(−1,−1,1,1)⟩ has eigenvalue 1
        let m = Mat4::from_fn(2, |i, j| {
            if i != j {
                CycloNum::zero(2)
            } else if i < 2 {
                CycloNum::from_int(2, -1)
            } else {
                CycloNum::one(2)
            }
        });
        let g = MatrixGroup::close(vec![m], 10).unwrap();
        assert!(!acts_freely(&g));
    }

    #[test]
    fn split_projections_round_trips() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(4)).unwrap();
        let g = diagonal_embed(&h, &Automorphism::identity(4)).unwrap();
        let split = split_projections(&g).unwrap();
        assert_eq!(split.h1.order(), 4);
        assert_eq!(split.h2.order(), 4);
        let theta = split.theta.expect("projections injective");
        // θ = id up to the identification of h1 and h2
        for (i, &t) in theta.iter().enumerate() {
            assert_eq!(
                element_key(split.h1.element(i), split.h1.mono_mode),
                element_key(split.h2.element(t), split.h2.mono_mode)
            );
        }
    }

    #[test]
    fn split_projections_non_injective_for_product_group() {
        // closure of {diag(A, Id), diag(Id, A)} for A of order 2
        let minus = mat2(
            2,
            [
                CycloNum::from_int(2, -1),
                CycloNum::zero(2),
                CycloNum::zero(2),
                CycloNum::from_int(2, -1),
            ],
        );
        let id2 = Mat2::identity(2);
        let g = MatrixGroup::close(
            vec![block_diag(&minus, &id2), block_diag(&id2, &minus)],
            16,
        )
        .unwrap();
        assert_eq!(g.order(), 4);
        let split = split_projections(&g).unwrap();
        assert!(split.theta.is_none());
        assert!(!acts_freely(&g));
    }

    #[test]
    fn split_recovers_conjugation_automorphism() {
        let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(2)).unwrap();
        // conjugation by P is an automorphism (P ∈ H)
        let p = rotation_p(4);
        let theta = conjugation_automorphism(&h, &p).unwrap();
        let g = diagonal_embed(&h, &theta).unwrap();
        let split = split_projections(&g).unwrap();
        let recovered = split.theta.expect("injective");
        // same permutation once h1/h2 indices are matched with h's
        for i in 0..h.order() {
            let a = split.h1.element(i);
            let hi = h.index_of(a).unwrap();
            let b = split.h2.element(recovered[i]);
            assert_eq!(h.index_of(b).unwrap(), theta.map[hi]);
        }
    }

    #[test]
    fn automorphism_search_on_cyclic_groups() {
        let c5 = kleinian_group(KleinianFamily::Cyclic, Some(5)).unwrap();
        let autos = automorphisms(&c5);
        assert_eq!(autos.len(), 4); // (Z/5)* has order 4
        let c6 = kleinian_group(KleinianFamily::Cyclic, Some(6)).unwrap();
        assert_eq!(automorphisms(&c6).len(), 2);
    }

    #[test]
    fn automorphism_search_on_quaternion_group() {
        // D̃_2 = Q8 has automorphism group S4 of order 24
        let q8 = kleinian_group(KleinianFamily::BinaryDihedral, Some(2)).unwrap();
        assert_eq!(automorphisms(&q8).len(), 24);
    }

    #[test]
    fn theta_inversion_rejected_for_nonabelian() {
        let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(3)).unwrap();
        assert!(resolve_theta(&h, &Theta::Named("inversion".into())).is_err());
    }

    #[test]
    fn t_extension_elements_are_symplectic() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(6)).unwrap();
        let g = diagonal_embed(&h, &Automorphism::identity(6)).unwrap();
        let ext = extend_by_t(&g, 6, 1).unwrap();
        assert_eq!(ext.group.order(), 12);
        for m in ext.group.elements() {
            assert!(is_symplectic(m));
        }
        // coset elements have trace 0
        let t_idx = ext.coset_rep;
        let e = char_poly_elementary(ext.group.element(t_idx));
        assert!(e[0].is_zero());
    }

    #[test]
    fn closure_cap_is_enforced() {
        match kleinian_group_capped(KleinianFamily::BinaryIcosahedral, None, 50) {
            Err(Error::OrderCapExceeded { cap: 50 }) => {}
            other => panic!("expected OrderCapExceeded, got order {:?}", other.map(|g| g.order())),
        }
    }

    #[test]
    fn group_spec_round_trip() {
        let spec: GroupSpec = serde_json::from_str(
            r#"{"family":"binary_dihedral","n":3,"theta":"id","extend":null}"#,
        )
        .unwrap();
        assert_eq!(spec.family, KleinianFamily::BinaryDihedral);
        let g = spec.build().unwrap();
        assert_eq!(g.order(), 12);
        let spec2: GroupSpec =
            serde_json::from_str(r#"{"family":"cyclic","n":6,"extend":{"n":6,"k":1}}"#).unwrap();
        assert_eq!(spec2.build().unwrap().order(), 12);
    }
}
