//! Free resolutions, `Ext^i` for `i ≤ 2`, and the dictionary between
//! extension classes and explicit exact sequences.
//!
//! Cochains `F_i → P` are stored as `p × n_i` matrices (columns are images
//! of the free basis, in the generators of `P`); the cochain module is
//! `P^{n_i}` in column-major order, with coboundary `d_{i+1}^T ⊗ I_p`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fgmod::{
    cokernel, direct_sum, induced_on_quotient, is_exact, kernel, lift_through_mono, pair,
    pullback, ModuleError, ModuleMorphism, PresentedModule, Quotient, ShortExactSequence,
    Subobject,
};
use crate::linalg::{self, ExactMatrix, Int, LinearSystem, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("argument mismatch: {0}")]
    ArgumentMismatch(String),
    #[error("end objects of the sequences differ")]
    EndsMismatch,
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("degree {0} is outside 0..=2")]
    Degree(usize),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `F2 → F1 → F0 → M → 0` with free `F_i`, plus one more differential
/// `d3` so that degree-2 cocycles can be recognised.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    target: PresentedModule,
    ranks: [usize; 4],
    d1: ExactMatrix,
    d2: ExactMatrix,
    d3: ExactMatrix,
}

impl FreeResolution {
    pub fn target(&self) -> &PresentedModule {
        &self.target
    }

    pub fn ring(&self) -> RingSpec {
        self.target.ring()
    }

    /// Rank of `F_i` for `i ≤ 3`.
    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    /// `d_i: F_i → F_{i-1}` for `i ∈ 1..=3`.
    pub fn differential(&self, i: usize) -> &ExactMatrix {
        match i {
            1 => &self.d1,
            2 => &self.d2,
            3 => &self.d3,
            _ => panic!("differential d{i} is not stored"),
        }
    }

    /// The augmentation `F0 → M`; the identity on coordinates.
    pub fn augmentation(&self) -> ModuleMorphism {
        ModuleMorphism::new(
            self.free(0),
            self.target.clone(),
            ExactMatrix::identity(self.ring(), self.ranks[0]),
        )
        .expect("augmentation")
    }

    pub fn free(&self, i: usize) -> PresentedModule {
        PresentedModule::free(self.ring(), self.ranks[i])
    }
}

pub fn free_resolution(m: &PresentedModule) -> FreeResolution {
    let ring = m.ring();
    let g = m.generators();
    let rel = m.relations();
    match ring.modulus_int() {
        None => {
            let s = linalg::snf(rel);
            let rv = rel.mul(&s.v);
            let idx: Vec<usize> = (0..s.rank).collect();
            let d1 = rv.select_columns(&idx);
            FreeResolution {
                target: m.clone(),
                ranks: [g, s.rank, 0, 0],
                d2: ExactMatrix::zeros(ring, s.rank, 0),
                d3: ExactMatrix::zeros(ring, 0, 0),
                d1,
            }
        }
        Some(modulus) => {
            let s = linalg::snf_integer(&m.integer_relations());
            let diag: Vec<Int> = (0..g).map(|i| s.d.get(i, i).clone()).collect();
            let f1: Vec<usize> = (0..g).filter(|&i| diag[i] != modulus).collect();
            let f2: Vec<usize> = f1
                .iter()
                .copied()
                .filter(|&i| !diag[i].is_one())
                .collect();
            let mut cols = Vec::new();
            for &i in &f1 {
                let col: Vec<Int> = (0..g).map(|r| s.u_inv.get(r, i) * &diag[i]).collect();
                cols.push(col);
            }
            let d1 = ExactMatrix::from_columns(ring, g, &cols);
            let mut d2 = ExactMatrix::zeros(ring, f1.len(), f2.len());
            let mut d3 = ExactMatrix::zeros(ring, f2.len(), f2.len());
            for (k, &i) in f2.iter().enumerate() {
                let pos = f1.iter().position(|&x| x == i).expect("f2 ⊆ f1");
                d2.set(pos, k, ring.reduce(&(&modulus / &diag[i])));
                d3.set(k, k, diag[i].clone());
            }
            FreeResolution {
                target: m.clone(),
                ranks: [g, f1.len(), f2.len(), f2.len()],
                d1,
                d2,
                d3,
            }
        }
    }
}

struct ExtData {
    degree: usize,
    q: PresentedModule,
    p: PresentedModule,
    resolution: Arc<FreeResolution>,
    cycles: Subobject,
    quotient: Quotient,
    orders: Vec<Int>,
}

/// `Ext^i(Q, P)` as the homology of `Hom(F•, P)`.
#[derive(Clone)]
pub struct ExtModule(Arc<ExtData>);

impl fmt::Debug for ExtModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ext^{}({}, {}) ≅ {}",
            self.0.degree,
            self.0.q,
            self.0.p,
            self.presentation()
        )
    }
}

impl PartialEq for ExtModule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.degree == other.0.degree && self.0.q == other.0.q && self.0.p == other.0.p)
    }
}

impl Eq for ExtModule {}

/// Matrix of the coboundary `Hom(F_i, P) → Hom(F_{i+1}, P)`.
fn coboundary(res: &FreeResolution, p: &PresentedModule, i: usize) -> ExactMatrix {
    let ring = p.ring();
    let d = res.differential(i + 1);
    d.transpose().kron(&ExactMatrix::identity(ring, p.generators()))
}

fn cochain_module(p: &PresentedModule, n: usize) -> PresentedModule {
    let mut rel = ExactMatrix::zeros(p.ring(), 0, 0);
    for _ in 0..n {
        rel = rel.block_diag(p.relations());
    }
    PresentedModule::new(p.ring(), p.generators() * n, rel).expect("block presentation")
}

pub fn ext_module(degree: usize, q: &PresentedModule, p: &PresentedModule) -> Result<ExtModule, ExtError> {
    if degree > 2 {
        return Err(ExtError::Degree(degree));
    }
    if q.ring() != p.ring() {
        return Err(ExtError::ArgumentMismatch(format!(
            "rings {} and {}",
            q.ring(),
            p.ring()
        )));
    }
    Ok(ExtModule::build(degree, Arc::new(free_resolution(q)), p))
}

impl ExtModule {
    pub fn build(degree: usize, resolution: Arc<FreeResolution>, p: &PresentedModule) -> Self {
        let ring = p.ring();
        let n = |i: usize| resolution.rank(i);
        let c_here = cochain_module(p, n(degree));
        let c_next = cochain_module(p, n(degree + 1));
        let delta = ModuleMorphism::new(c_here.clone(), c_next, coboundary(&resolution, p, degree))
            .expect("coboundary is a morphism");
        let cycles = kernel(&delta);
        let boundaries = if degree == 0 {
            ModuleMorphism::zero(&PresentedModule::zero(ring), &cycles.module)
        } else {
            let c_prev = cochain_module(p, n(degree - 1));
            let prev = ModuleMorphism::new(c_prev, c_here, coboundary(&resolution, p, degree - 1))
                .expect("coboundary is a morphism");
            lift_through_mono(&prev, &cycles.inclusion).expect("δ∘δ = 0")
        };
        let quotient = cokernel(&boundaries);
        let orders = quotient.module.invariant_factors();
        ExtModule(Arc::new(ExtData {
            degree,
            q: resolution.target().clone(),
            p: p.clone(),
            resolution,
            cycles,
            quotient,
            orders,
        }))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// The contravariant argument.
    pub fn q(&self) -> &PresentedModule {
        &self.0.q
    }

    /// The coefficient argument.
    pub fn p(&self) -> &PresentedModule {
        &self.0.p
    }

    pub fn ring(&self) -> RingSpec {
        self.0.p.ring()
    }

    pub fn resolution(&self) -> &Arc<FreeResolution> {
        &self.0.resolution
    }

    /// Diagonal presentation; generator `k` is the class of `basis_cocycle(k)`.
    pub fn presentation(&self) -> &PresentedModule {
        &self.0.quotient.module
    }

    pub fn orders(&self) -> &[Int] {
        &self.0.orders
    }

    pub fn order(&self) -> Option<Int> {
        self.presentation().order()
    }

    pub fn is_zero_module(&self) -> bool {
        self.presentation().is_zero_module()
    }

    pub fn generators(&self) -> usize {
        self.0.orders.len()
    }

    fn cochain_shape(&self) -> (usize, usize) {
        (self.0.p.generators(), self.0.resolution.rank(self.0.degree))
    }

    /// Representing cocycle `F_degree → P` of generator `k`.
    pub fn basis_cocycle(&self, k: usize) -> ExactMatrix {
        let z: Vec<Int> = self.0.quotient.section.column(k);
        let v = self.0.cycles.inclusion.apply(&z);
        let (p, n) = self.cochain_shape();
        ExactMatrix::from_column_major(self.ring(), p, n, &v)
    }

    fn normalize(&self, coords: Vec<Int>) -> Vec<Int> {
        coords
            .into_iter()
            .zip(&self.0.orders)
            .map(|(x, o)| if o.is_zero() { x } else { x.mod_floor(o) })
            .collect()
    }

    pub fn class(&self, coords: &[Int]) -> ExtClass {
        assert_eq!(coords.len(), self.generators(), "class coordinate count");
        ExtClass {
            parent: self.clone(),
            coords: self.normalize(coords.to_vec()),
        }
    }

    pub fn zero(&self) -> ExtClass {
        self.class(&vec![Int::zero(); self.generators()])
    }

    pub fn generator(&self, k: usize) -> ExtClass {
        let mut c = vec![Int::zero(); self.generators()];
        c[k] = Int::from(1);
        self.class(&c)
    }

    /// Every class, when the module is finite.
    pub fn classes(&self) -> Option<Vec<ExtClass>> {
        if self.0.orders.iter().any(|o| o.is_zero()) {
            return None;
        }
        let mut out = Vec::new();
        let mut digits = vec![Int::zero(); self.generators()];
        loop {
            out.push(self.class(&digits));
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return Some(out);
                }
                digits[k] += 1;
                if digits[k] == self.0.orders[k] {
                    digits[k] = Int::zero();
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Class of a cocycle given as a `p × n_degree` matrix; `None` when the
    /// matrix is not a cocycle.
    pub fn class_of_cocycle(&self, c: &ExactMatrix) -> Option<ExtClass> {
        let (p, n) = self.cochain_shape();
        assert_eq!((c.rows(), c.cols()), (p, n), "cocycle shape");
        let v = c.reduce_to(self.ring()).vec_column_major();
        let z = self.0.cycles.inclusion.preimage(&v)?;
        Some(self.class(&self.0.quotient.projection.apply(&z)))
    }

    pub fn is_cocycle(&self, c: &ExactMatrix) -> bool {
        self.class_of_cocycle(c).is_some()
    }

    /// Degree-0 classes are morphisms `Q → P`.
    pub fn class_of_morphism(&self, f: &ModuleMorphism) -> Result<ExtClass, ExtError> {
        if self.degree() != 0 || f.source() != self.q() || f.target() != self.p() {
            return Err(ExtError::ArgumentMismatch("morphism does not belong to Hom(Q, P)".into()));
        }
        Ok(self.class_of_cocycle(f.matrix()).expect("a morphism is a 0-cocycle"))
    }

    pub fn morphism_of_class(&self, c: &ExtClass) -> ModuleMorphism {
        assert_eq!(self.degree(), 0, "only degree-0 classes are morphisms");
        ModuleMorphism::new(self.q().clone(), self.p().clone(), c.cocycle())
            .expect("0-cocycles are morphisms")
    }

    /// The linear map between presentations whose generator images are
    /// given by `image`.
    fn induced(&self, target: &ExtModule, image: impl Fn(&ExtClass) -> ExtClass) -> ModuleMorphism {
        let cols: Vec<Vec<Int>> = (0..self.generators())
            .map(|k| image(&self.generator(k)).coords)
            .collect();
        ModuleMorphism::new(
            self.presentation().clone(),
            target.presentation().clone(),
            ExactMatrix::from_columns(self.ring(), target.generators(), &cols),
        )
        .expect("induced map on Ext is well defined")
    }
}

/// An element of an `ExtModule`, with normalized coordinates.
#[derive(Clone)]
pub struct ExtClass {
    parent: ExtModule,
    coords: Vec<Int>,
}

impl fmt::Debug for ExtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {:?}", self.coords, self.parent)
    }
}

impl PartialEq for ExtClass {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.coords == other.coords
    }
}

impl Eq for ExtClass {}

impl ExtClass {
    pub fn parent(&self) -> &ExtModule {
        &self.parent
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &ExtClass) -> ExtClass {
        assert!(self.parent == other.parent, "adding classes of different Ext modules");
        let c: Vec<Int> = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        self.parent.class(&c)
    }

    pub fn neg(&self) -> ExtClass {
        let c: Vec<Int> = self.coords.iter().map(|a| -a).collect();
        self.parent.class(&c)
    }

    pub fn sub(&self, other: &ExtClass) -> ExtClass {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Int) -> ExtClass {
        let c: Vec<Int> = self.coords.iter().map(|a| a * s).collect();
        self.parent.class(&c)
    }

    /// A representing cocycle: the matching combination of basis cocycles.
    pub fn cocycle(&self) -> ExactMatrix {
        let (p, n) = self.parent.cochain_shape();
        let ring = self.parent.ring();
        let mut acc = ExactMatrix::zeros(ring, p, n);
        for (k, x) in self.coords.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add(&self.parent.basis_cocycle(k).scale(x));
            }
        }
        acc
    }
}

/// Preimages of the generators of `target` under a surjection, as columns.
fn lift_generators(onto: &ModuleMorphism) -> Result<ExactMatrix, ExtError> {
    let t = onto.target();
    let mut cols = Vec::with_capacity(t.generators());
    for j in 0..t.generators() {
        cols.push(
            onto.preimage(&t.generator(j))
                .ok_or_else(|| ExtError::NotExact("projection is not surjective".into()))?,
        );
    }
    Ok(ExactMatrix::from_columns(onto.ring(), onto.source().generators(), &cols))
}

/// Columns of `rhs` written through a monomorphism.
fn through_mono(mono: &ModuleMorphism, rhs: &ExactMatrix) -> Result<ExactMatrix, ExtError> {
    let mut cols = Vec::with_capacity(rhs.cols());
    for c in 0..rhs.cols() {
        cols.push(
            mono.preimage(&rhs.column(c))
                .ok_or_else(|| ExtError::NotExact("kernel is larger than the image".into()))?,
        );
    }
    Ok(ExactMatrix::from_columns(mono.ring(), mono.source().generators(), &cols))
}

/// `X` solving `A X = B` column by column over the ring of `A`.
fn solve_columns(a: &ExactMatrix, b: &ExactMatrix) -> Option<ExactMatrix> {
    let sys = LinearSystem::new(a);
    let mut cols = Vec::with_capacity(b.cols());
    for c in 0..b.cols() {
        cols.push(sys.solve(&b.column(c))?);
    }
    Some(ExactMatrix::from_columns(a.ring(), a.cols(), &cols))
}

pub fn class_of_ses(ext1: &ExtModule, s: &ShortExactSequence) -> Result<ExtClass, ExtError> {
    if ext1.degree() != 1 || s.left() != ext1.p() || s.right() != ext1.q() {
        return Err(ExtError::ArgumentMismatch(
            "sequence ends do not match Ext¹(Q, P)".into(),
        ));
    }
    let res = ext1.resolution();
    let l0 = lift_generators(s.project())?;
    let gamma = through_mono(s.inject(), &l0.mul(res.differential(1)))?;
    Ok(ext1
        .class_of_cocycle(&gamma)
        .expect("a lifted extension gives a cocycle"))
}

/// `0 → P → (P ⊕ F0)/⟨rel_P, (γ_j; −d1_j)⟩ → Q → 0`.
pub fn ses_of_class(c: &ExtClass) -> ShortExactSequence {
    let ext = c.parent();
    assert_eq!(ext.degree(), 1, "ses_of_class needs a degree-1 class");
    ses_of_cocycle(ext, &c.cocycle())
}

pub fn ses_of_cocycle(ext: &ExtModule, gamma: &ExactMatrix) -> ShortExactSequence {
    let ring = ext.ring();
    let p = ext.p();
    let q = ext.q();
    let res = ext.resolution();
    let (pg, g) = (p.generators(), res.rank(0));
    let d1 = res.differential(1);
    let twisted = gamma.vcat(&d1.neg());
    let rel = p
        .relations()
        .vcat(&ExactMatrix::zeros(ring, g, p.relations().cols()))
        .hcat(&twisted);
    let x = PresentedModule::new(ring, pg + g, rel).expect("middle presentation");
    let inject = ModuleMorphism::new(
        p.clone(),
        x.clone(),
        ExactMatrix::identity(ring, pg).vcat(&ExactMatrix::zeros(ring, g, pg)),
    )
    .expect("injection");
    let project = ModuleMorphism::new(
        x,
        q.clone(),
        ExactMatrix::zeros(ring, g, pg).hcat(&ExactMatrix::identity(ring, g)),
    )
    .expect("projection");
    ShortExactSequence::trusted(inject, project)
}

/// Chain map `F(Q') → F(Q)` over `g: Q' → Q`, degrees 0..=2.
pub fn lift_chain_map(
    g: &ModuleMorphism,
    src: &FreeResolution,
    tgt: &FreeResolution,
) -> [ExactMatrix; 3] {
    let g0 = g.matrix().clone();
    let g1 = solve_columns(tgt.differential(1), &g0.mul(src.differential(1)))
        .expect("image of d1' lies in ker(aug)");
    let g2 = solve_columns(tgt.differential(2), &g1.mul(src.differential(2)))
        .expect("image lies in ker(d1)");
    [g0, g1, g2]
}

/// Pull a class of `Ext^i(Q, P)` back along `g: Q' → Q` into `target = Ext^i(Q', P)`.
pub fn transport_contravariant(
    c: &ExtClass,
    g: &ModuleMorphism,
    target: &ExtModule,
) -> Result<ExtClass, ExtError> {
    let src = c.parent();
    if g.target() != src.q() || g.source() != target.q() || src.p() != target.p()
        || src.degree() != target.degree()
    {
        return Err(ExtError::ArgumentMismatch("contravariant transport".into()));
    }
    let maps = lift_chain_map(g, target.resolution(), src.resolution());
    let cocycle = c.cocycle().mul(&maps[src.degree()]);
    Ok(target
        .class_of_cocycle(&cocycle)
        .expect("pulled-back cocycle is a cocycle"))
}

/// Push a class of `Ext^i(Q, P)` forward along `h: P → P'` into `target = Ext^i(Q, P')`.
pub fn transport_covariant(
    c: &ExtClass,
    h: &ModuleMorphism,
    target: &ExtModule,
) -> Result<ExtClass, ExtError> {
    let src = c.parent();
    if h.source() != src.p() || h.target() != target.p() || src.q() != target.q()
        || src.degree() != target.degree()
    {
        return Err(ExtError::ArgumentMismatch("covariant transport".into()));
    }
    let cocycle = h.matrix().mul(&c.cocycle());
    Ok(target
        .class_of_cocycle(&cocycle)
        .expect("pushed cocycle is a cocycle"))
}

/// `g^*: Ext^i(Q, P) → Ext^i(Q', P)` as a morphism of presentations.
pub fn induced_contravariant(src: &ExtModule, g: &ModuleMorphism, target: &ExtModule) -> ModuleMorphism {
    src.induced(target, |c| transport_contravariant(c, g, target).expect("matching arguments"))
}

/// `h_*: Ext^i(Q, P) → Ext^i(Q, P')` as a morphism of presentations.
pub fn induced_covariant(src: &ExtModule, h: &ModuleMorphism, target: &ExtModule) -> ModuleMorphism {
    src.induced(target, |c| transport_covariant(c, h, target).expect("matching arguments"))
}

/// Explicit pullback-then-pushout Baer sum of two extensions of `Q` by `P`.
pub fn baer_sum_explicit(
    s1: &ShortExactSequence,
    s2: &ShortExactSequence,
) -> Result<ShortExactSequence, ExtError> {
    if s1.left() != s2.left() || s1.right() != s2.right() {
        return Err(ExtError::EndsMismatch);
    }
    let pb = pullback(s1.project(), s2.project());
    let skew = pair(&pb.sum, &[s1.inject().clone(), s2.inject().neg()]);
    let skew = lift_through_mono(&skew, &pb.inclusion).expect("skew diagonal lies in the pullback");
    let q = cokernel(&skew);
    let first = pair(
        &pb.sum,
        &[
            s1.inject().clone(),
            ModuleMorphism::zero(s1.left(), s2.middle()),
        ],
    );
    let first = lift_through_mono(&first, &pb.inclusion).expect("(ι1 p, 0) lies in the pullback");
    let inject = q.projection.compose(&first);
    let project = induced_on_quotient(&q, &s1.project().compose(&pb.to_first))
        .expect("projection kills the skew diagonal");
    Ok(ShortExactSequence::new(inject, project)?)
}

/// Cocycle-level Yoneda product `Ext¹(S, P) × Ext¹(Q, S) → Ext²(Q, P)`.
pub fn yoneda_product(e: &ExtClass, g: &ExtClass, target: &ExtModule) -> Result<ExtClass, ExtError> {
    let (ee, ge) = (e.parent(), g.parent());
    if ee.degree() != 1 || ge.degree() != 1 || target.degree() != 2 {
        return Err(ExtError::ArgumentMismatch("yoneda product degrees".into()));
    }
    if ee.q() != ge.p() || ee.p() != target.p() || ge.q() != target.q() {
        return Err(ExtError::ArgumentMismatch("yoneda product arguments".into()));
    }
    let gamma = g.cocycle();
    let rs = ee.resolution();
    let rq = target.resolution();
    let gamma1 = solve_columns(rs.differential(1), &gamma.mul(rq.differential(2)))
        .expect("γ∘d2 lies in ker(aug_S)");
    let product = e.cocycle().mul(&gamma1);
    Ok(target
        .class_of_cocycle(&product)
        .expect("product is a 2-cocycle"))
}

/// `0 → P → X2 → X1 → Q → 0`.
#[derive(Clone, Debug)]
pub struct YonedaTwoExtension {
    pub a: ModuleMorphism,
    pub b: ModuleMorphism,
    pub c: ModuleMorphism,
}

impl YonedaTwoExtension {
    pub fn new(a: ModuleMorphism, b: ModuleMorphism, c: ModuleMorphism) -> Result<Self, ExtError> {
        let report = is_exact(&[a.clone(), b.clone(), c.clone()], true, true)?;
        if !report.is_exact() {
            return Err(ExtError::NotExact(format!("positions {:?}", report.failures())));
        }
        Ok(YonedaTwoExtension { a, b, c })
    }

    /// Splice `0 → P → E → S → 0` with `0 → S → G → Q → 0`.
    pub fn splice(left: &ShortExactSequence, right: &ShortExactSequence) -> Result<Self, ExtError> {
        if left.right() != right.left() {
            return Err(ExtError::ArgumentMismatch("splice through different objects".into()));
        }
        Self::new(
            left.inject().clone(),
            right.inject().compose(left.project()),
            right.project().clone(),
        )
    }

    pub fn p(&self) -> &PresentedModule {
        self.a.source()
    }

    pub fn q(&self) -> &PresentedModule {
        self.c.target()
    }

    /// Class in `Ext²(Q, P)` obtained by lifting the resolution of `Q`.
    pub fn class(&self, ext2: &ExtModule) -> Result<ExtClass, ExtError> {
        if ext2.degree() != 2 || ext2.p() != self.p() || ext2.q() != self.q() {
            return Err(ExtError::ArgumentMismatch("Ext² arguments".into()));
        }
        let res = ext2.resolution();
        let l0 = lift_generators(&self.c)?;
        let l1 = through_b(&self.b, &l0.mul(res.differential(1)))?;
        let l2 = through_mono(&self.a, &l1.mul(res.differential(2)))?;
        Ok(ext2.class_of_cocycle(&l2).expect("lifted 2-cocycle"))
    }
}

fn through_b(b: &ModuleMorphism, rhs: &ExactMatrix) -> Result<ExactMatrix, ExtError> {
    let mut cols = Vec::with_capacity(rhs.cols());
    for c in 0..rhs.cols() {
        cols.push(
            b.preimage(&rhs.column(c))
                .ok_or_else(|| ExtError::NotExact("middle of the 2-extension".into()))?,
        );
    }
    Ok(ExactMatrix::from_columns(b.ring(), b.source().generators(), &cols))
}

/// Global sign relating the cocycle product to the splice class:
/// `yoneda_product(e, g) = SIGMA · δ¹(e)` with `δ¹` taken along the
/// sequence of `g`.
pub const SIGMA: i64 = 1;

/// The Hom/Ext long exact sequence of `0 → A → B → C → 0` against `P`.
#[derive(Clone, Debug)]
pub struct ConnectingHomomorphisms {
    /// `Ext^i(C, P)`, `Ext^i(B, P)`, `Ext^i(A, P)` for `i = 0, 1, 2`.
    pub modules: Vec<[ExtModule; 3]>,
    pub alpha: ModuleMorphism,
    pub delta1: ModuleMorphism,
    /// The nine-term chain starting at `Hom(C, P)`.
    pub ladder: Vec<ModuleMorphism>,
    /// Cocycle `F1(C) → A` of the sequence.
    pub gamma: ExactMatrix,
}

impl ConnectingHomomorphisms {
    pub fn alpha_of(&self, lambda: &ModuleMorphism) -> ExtClass {
        let hom = &self.modules[0][2];
        let cls = hom.class_of_morphism(lambda).expect("λ ∈ Hom(A, P)");
        let ext1 = &self.modules[1][0];
        ext1.class(&self.alpha.apply(cls.coords()))
    }
}

/// `δ¹(e)` as the class of the splice of `e` with `s` (no cocycle product).
pub fn delta1_by_splice(e: &ExtClass, s: &ShortExactSequence, ext2: &ExtModule) -> Result<ExtClass, ExtError> {
    let left = ses_of_class(e);
    YonedaTwoExtension::splice(&left, s)?.class(ext2)
}

pub fn connecting_hom(s: &ShortExactSequence, p: &PresentedModule) -> Result<ConnectingHomomorphisms, ExtError> {
    let (a, b, c) = (s.left(), s.middle(), s.right());
    let res = [
        Arc::new(free_resolution(c)),
        Arc::new(free_resolution(b)),
        Arc::new(free_resolution(a)),
    ];
    let modules: Vec<[ExtModule; 3]> = (0..3)
        .map(|i| {
            [
                ExtModule::build(i, res[0].clone(), p),
                ExtModule::build(i, res[1].clone(), p),
                ExtModule::build(i, res[2].clone(), p),
            ]
        })
        .collect();
    let ext1_c = &modules[1][0];
    let gamma = class_of_ses(&ExtModule::build(1, res[0].clone(), a), s)?.cocycle();
    let hom_a = &modules[0][2];
    let alpha = hom_a.induced(ext1_c, |lam| {
        ext1_c
            .class_of_cocycle(&lam.cocycle().mul(&gamma))
            .expect("λ∘γ is a cocycle")
    });
    let ext1_a = &modules[1][2];
    let ext2_c = &modules[2][0];
    let delta1 = ext1_a.induced(ext2_c, |e| {
        delta1_by_splice(e, s, ext2_c).expect("splice of exact sequences")
    });
    let mut ladder = Vec::new();
    for i in 0..3 {
        let [mc, mb, ma] = &modules[i];
        ladder.push(induced_contravariant(mc, s.project(), mb));
        ladder.push(induced_contravariant(mb, s.inject(), ma));
        if i == 0 {
            ladder.push(alpha.clone());
        } else if i == 1 {
            ladder.push(delta1.clone());
        }
    }
    Ok(ConnectingHomomorphisms {
        modules,
        alpha,
        delta1,
        ladder,
        gamma,
    })
}

/// Whether the ladder of `connecting_hom` is exact at every position
/// from `Hom(C, P)` through `Ext²(B, P)`.
pub fn ladder_is_exact(h: &ConnectingHomomorphisms) -> Result<bool, ExtError> {
    Ok(is_exact(&h.ladder, true, false)?.is_exact())
}

/// `0 → P → P ⊕ Q → Q → 0` as a class check helper.
pub fn split_sequence(p: &PresentedModule, q: &PresentedModule) -> ShortExactSequence {
    let s = direct_sum(p, q);
    ShortExactSequence::trusted(s.injections[0].clone(), s.projections[1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    fn r4() -> RingSpec {
        RingSpec::IntegersMod(4)
    }
    fn z() -> RingSpec {
        RingSpec::Integers
    }
    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }
    fn mor(s: &PresentedModule, t: &PresentedModule, rows: &[Vec<i64>]) -> ModuleMorphism {
        ModuleMorphism::new(s.clone(), t.clone(), ExactMatrix::from_rows(s.ring(), rows)).unwrap()
    }
    /// 0 → Z/2 → Z/4 → Z/2 → 0 over Z/4.
    fn nonsplit4() -> ShortExactSequence {
        let z2 = PresentedModule::cyclic(r4(), 2);
        let z4 = PresentedModule::free(r4(), 1);
        ShortExactSequence::new(mor(&z2, &z4, &[vec![2]]), mor(&z4, &z2, &[vec![1]])).unwrap()
    }
    fn times_n_over_z(n: i64) -> ShortExactSequence {
        let zz = PresentedModule::free(z(), 1);
        let zn = PresentedModule::cyclic(z(), n);
        ShortExactSequence::new(mor(&zz, &zz, &[vec![n]]), mor(&zz, &zn, &[vec![1]])).unwrap()
    }

    #[test]
    fn resolution_examples() {
        let r = free_resolution(&PresentedModule::cyclic(z(), 5));
        assert_eq!((r.rank(0), r.rank(1), r.rank(2)), (1, 1, 0));
        assert_eq!(r.differential(1).get(0, 0).magnitude().clone(), num_bigint::BigUint::from(5u32));
        let r = free_resolution(&PresentedModule::free(r4(), 2));
        assert_eq!((r.rank(1), r.rank(2)), (0, 0));
        let r = free_resolution(&PresentedModule::cyclic(r4(), 2));
        assert_eq!((r.rank(0), r.rank(1), r.rank(2)), (1, 1, 1));
        assert_eq!(r.differential(1).get(0, 0), &int(2));
        assert_eq!(r.differential(2).get(0, 0), &int(2));
    }

    #[test]
    fn ext_examples() {
        let z6 = PresentedModule::cyclic(z(), 6);
        let zz = PresentedModule::free(z(), 1);
        assert_eq!(ext_module(1, &z6, &zz).unwrap().orders(), &ints(&[6])[..]);
        let a = PresentedModule::diagonal(z(), &ints(&[4, 0]));
        assert!(ext_module(1, &zz, &a).unwrap().is_zero_module());
        let z2 = PresentedModule::cyclic(r4(), 2);
        assert_eq!(ext_module(2, &z2, &z2).unwrap().orders(), &ints(&[2])[..]);
        assert_eq!(ext_module(0, &z6, &zz).unwrap().generators(), 0);
        assert_eq!(ext_module(0, &zz, &z6).unwrap().orders(), &ints(&[6])[..]);
        assert_eq!(ext_module(3, &zz, &zz).unwrap_err(), ExtError::Degree(3));
    }

    #[test]
    fn class_of_ses_examples() {
        let z2 = PresentedModule::cyclic(r4(), 2);
        let e = ext_module(1, &z2, &z2).unwrap();
        assert!(class_of_ses(&e, &split_sequence(&z2, &z2)).unwrap().is_zero());
        let c = class_of_ses(&e, &nonsplit4()).unwrap();
        assert_eq!(c.coords(), &ints(&[1])[..]);

        let s = times_n_over_z(6);
        let e = ext_module(1, s.right(), s.left()).unwrap();
        let c = class_of_ses(&e, &s).unwrap();
        // a generator of Z/6
        let x = &c.coords()[0];
        assert!(x.gcd(&int(6)) == int(1));
    }

    #[test]
    fn ses_of_class_examples() {
        let z2 = PresentedModule::cyclic(r4(), 2);
        let e = ext_module(1, &z2, &z2).unwrap();
        let s0 = ses_of_class(&e.zero());
        assert_eq!(s0.middle().invariant_factors(), ints(&[2, 2]));
        let s1 = ses_of_class(&e.generator(0));
        assert_eq!(s1.middle().invariant_factors(), ints(&[4]));
        for c in e.classes().unwrap() {
            assert_eq!(class_of_ses(&e, &ses_of_class(&c)).unwrap(), c);
        }

        let zz = PresentedModule::free(z(), 1);
        let z2 = PresentedModule::cyclic(z(), 2);
        let e = ext_module(1, &z2, &zz).unwrap();
        let s = ses_of_class(&e.generator(0));
        assert_eq!(s.middle().invariant_factors(), ints(&[0]));
    }

    #[test]
    fn transport_examples() {
        let s = nonsplit4();
        let z2 = s.left().clone();
        let e = ext_module(1, &z2, &z2).unwrap();
        let c = class_of_ses(&e, &s).unwrap();
        let id = ModuleMorphism::identity(&z2);
        assert_eq!(transport_contravariant(&c, &id, &e).unwrap(), c);
        assert_eq!(transport_covariant(&c, &id, &e).unwrap(), c);
        let zero = ModuleMorphism::zero(&z2, &z2);
        assert!(transport_contravariant(&c, &zero, &e).unwrap().is_zero());

        let zz = PresentedModule::free(z(), 1);
        let z4 = PresentedModule::cyclic(z(), 4);
        let z2 = PresentedModule::cyclic(z(), 2);
        let src = ext_module(1, &z4, &zz).unwrap();
        let tgt = ext_module(1, &z4, &z2).unwrap();
        assert_eq!(tgt.orders(), &ints(&[2])[..]);
        let red = mor(&zz, &z2, &[vec![1]]);
        assert!(!transport_covariant(&src.generator(0), &red, &tgt).unwrap().is_zero());
    }

    #[test]
    fn transport_matches_explicit_pullback() {
        // pull Z/4-extension of Z/2 by Z/2 back along Z/2 ⊕ Z/2 → Z/2, (a, b) ↦ a + b
        let s = nonsplit4();
        let z2 = s.left().clone();
        let q2 = PresentedModule::diagonal(r4(), &ints(&[2, 2]));
        let g = mor(&q2, &z2, &[vec![1, 1]]);
        let e = ext_module(1, &z2, &z2).unwrap();
        let e2 = ext_module(1, &q2, &z2).unwrap();
        let c = class_of_ses(&e, &s).unwrap();
        let pulled = transport_contravariant(&c, &g, &e2).unwrap();
        let pb = pullback(s.project(), &g);
        let inject = lift_through_mono(
            &pair(&pb.sum, &[s.inject().clone(), ModuleMorphism::zero(&z2, &q2)]),
            &pb.inclusion,
        )
        .unwrap();
        let explicit = ShortExactSequence::new(inject, pb.to_second.clone()).unwrap();
        assert_eq!(class_of_ses(&e2, &explicit).unwrap(), pulled);
        assert!(!pulled.is_zero());
    }

    #[test]
    fn baer_sum_examples() {
        let s = nonsplit4();
        let z2 = s.left().clone();
        let e = ext_module(1, &z2, &z2).unwrap();
        let sum = baer_sum_explicit(&s, &s).unwrap();
        assert!(class_of_ses(&e, &sum).unwrap().is_zero());
        assert_eq!(sum.middle().invariant_factors(), ints(&[2, 2]));
        let with_split = baer_sum_explicit(&s, &split_sequence(&z2, &z2)).unwrap();
        assert_eq!(class_of_ses(&e, &with_split).unwrap(), e.generator(0));

        let zz = PresentedModule::free(z(), 1);
        let z4 = PresentedModule::cyclic(z(), 4);
        let e = ext_module(1, &z4, &zz).unwrap();
        let g = ses_of_class(&e.generator(0));
        let sum = baer_sum_explicit(&g, &g).unwrap();
        assert_eq!(class_of_ses(&e, &sum).unwrap(), e.generator(0).scale(&int(2)));
        assert_eq!(sum.middle().invariant_factors(), ints(&[2, 0]));
    }

    #[test]
    fn yoneda_examples() {
        let s = nonsplit4();
        let z2 = s.left().clone();
        let e1 = ext_module(1, &z2, &z2).unwrap();
        let e2 = ext_module(2, &z2, &z2).unwrap();
        let c = class_of_ses(&e1, &s).unwrap();
        let prod = yoneda_product(&c, &c, &e2).unwrap();
        assert!(!prod.is_zero());
        assert!(yoneda_product(&e1.zero(), &c, &e2).unwrap().is_zero());
        assert!(yoneda_product(&c, &e1.zero(), &e2).unwrap().is_zero());
        let spliced = YonedaTwoExtension::splice(&s, &s).unwrap().class(&e2).unwrap();
        assert_eq!(spliced.scale(&int(SIGMA)), prod);

        let zz = PresentedModule::free(z(), 1);
        let z4 = PresentedModule::cyclic(z(), 4);
        let a = ext_module(1, &z4, &zz).unwrap();
        let b = ext_module(1, &z4, &z4).unwrap();
        let t = ext_module(2, &z4, &zz).unwrap();
        assert!(t.is_zero_module());
        assert!(yoneda_product(&b.generator(0), &a.generator(0), &ext_module(2, &zz, &z4).unwrap()).is_err());
        let _ = b;
    }

    #[test]
    fn connecting_examples() {
        let s = times_n_over_z(2);
        let zz = s.left().clone();
        let h = connecting_hom(&s, &zz).unwrap();
        let a = h.alpha_of(&ModuleMorphism::identity(&zz));
        assert_eq!(a.coords(), &ints(&[1])[..]);
        assert!(h.alpha.is_surjective());
        assert!(ladder_is_exact(&h).unwrap());

        let z2 = PresentedModule::cyclic(r4(), 2);
        let h = connecting_hom(&nonsplit4(), &z2).unwrap();
        assert!(ladder_is_exact(&h).unwrap());

        let h = connecting_hom(&split_sequence(&z2, &z2), &z2).unwrap();
        assert!(h.alpha.is_zero());
        assert!(h.delta1.is_zero());
        assert!(ladder_is_exact(&h).unwrap());
    }
}
