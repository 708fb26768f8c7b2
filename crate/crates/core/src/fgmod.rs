//! Finitely presented modules over `Z` and `Z/m`, their morphisms, and the
//! constructions the diagram code is built from.
//!
//! A module is `R^g / span(relations)`; over `Z/m` the relation lattice is
//! implicitly enlarged by `m·Z^g`, so every computation happens on integer
//! lattices. Constructions return simplified (diagonal) presentations
//! together with the structural morphism.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, int, ExactMatrix, Int, LinearSystem, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingSpec, RingSpec),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix does not define a morphism: relation column {column} is not sent into the target relations")]
    NotWellDefined { column: usize },
    #[error("morphisms at positions {position} and {next} are not composable", next = position + 1)]
    NonComposable { position: usize },
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("ladder does not commute: {0}")]
    LadderNotCommuting(String),
    #[error("element is not in the image")]
    NotInImage,
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

struct Structure {
    // Rows of U from the integer Smith form of [rel | mI], restricted to
    // non-unit diagonal positions; maps coordinates to canonical ones.
    to_canonical: ExactMatrix,
    // Matching columns of U^{-1}.
    from_canonical: ExactMatrix,
    // Orders of the canonical cyclic summands; zero marks a free summand.
    orders: Vec<Int>,
    canonical: OnceLock<Canonical>,
}

struct ModuleData {
    ring: RingSpec,
    gens: usize,
    relations: ExactMatrix,
    structure: OnceLock<Structure>,
}

/// `R^g` modulo the column span of a `g × r` relation matrix.
#[derive(Clone)]
pub struct PresentedModule(Arc<ModuleData>);

impl PartialEq for PresentedModule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ring == other.0.ring
                && self.0.gens == other.0.gens
                && self.0.relations == other.0.relations)
    }
}

impl Eq for PresentedModule {}

impl fmt::Debug for PresentedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PresentedModule({} gens over {}, rel {:?}) ≅ {}",
            self.0.gens, self.0.ring, self.0.relations, self
        )
    }
}

impl fmt::Display for PresentedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders = self.invariant_factors();
        if orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = orders
            .iter()
            .map(|o| {
                if o.is_zero() {
                    match self.ring() {
                        RingSpec::Integers => "Z".to_string(),
                        RingSpec::IntegersMod(m) => format!("Z/{m}"),
                    }
                } else {
                    format!("Z/{o}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A module isomorphic to the original, presented by a diagonal matrix
/// with divisibility-chain entries, plus the isomorphisms both ways.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub module: PresentedModule,
    pub to: ModuleMorphism,
    pub from: ModuleMorphism,
}

impl PresentedModule {
    pub fn new(ring: RingSpec, gens: usize, relations: ExactMatrix) -> Result<Self, ModuleError> {
        if relations.ring() != ring {
            return Err(ModuleError::RingMismatch(ring, relations.ring()));
        }
        if relations.rows() != gens {
            return Err(ModuleError::Dimension(format!(
                "relation matrix has {} rows for {} generators",
                relations.rows(),
                gens
            )));
        }
        Ok(Self::from_parts(ring, gens, relations))
    }

    fn from_parts(ring: RingSpec, gens: usize, relations: ExactMatrix) -> Self {
        PresentedModule(Arc::new(ModuleData {
            ring,
            gens,
            relations,
            structure: OnceLock::new(),
        }))
    }

    pub fn from_relation_columns(ring: RingSpec, gens: usize, columns: &[Vec<Int>]) -> Self {
        Self::from_parts(ring, gens, ExactMatrix::from_columns(ring, gens, columns))
    }

    pub fn zero(ring: RingSpec) -> Self {
        Self::from_parts(ring, 0, ExactMatrix::zeros(ring, 0, 0))
    }

    pub fn free(ring: RingSpec, rank: usize) -> Self {
        Self::from_parts(ring, rank, ExactMatrix::zeros(ring, rank, 0))
    }

    /// `R/(n)`; `n = 0` gives the free module of rank one.
    pub fn cyclic(ring: RingSpec, n: i64) -> Self {
        Self::diagonal(ring, &[int(n)])
    }

    /// One generator per entry, the entry being its annihilator (0 = free).
    pub fn diagonal(ring: RingSpec, orders: &[Int]) -> Self {
        let mut cols = Vec::new();
        for (i, o) in orders.iter().enumerate() {
            if ring.reduce(o).is_zero() {
                continue;
            }
            let mut c = vec![Int::zero(); orders.len()];
            c[i] = o.clone();
            cols.push(c);
        }
        Self::from_relation_columns(ring, orders.len(), &cols)
    }

    pub fn ring(&self) -> RingSpec {
        self.0.ring
    }

    pub fn generators(&self) -> usize {
        self.0.gens
    }

    pub fn relations(&self) -> &ExactMatrix {
        &self.0.relations
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Integer relation lattice: the relations plus `m·I` over `Z/m`.
    pub fn integer_relations(&self) -> ExactMatrix {
        let rel = self.0.relations.lift();
        match self.ring().modulus_int() {
            None => rel,
            Some(m) => rel.hcat(&ExactMatrix::identity(RingSpec::Integers, self.0.gens).scale(&m)),
        }
    }

    fn structure(&self) -> &Structure {
        self.0.structure.get_or_init(|| {
            let s = linalg::snf_integer(&self.integer_relations());
            let g = self.0.gens;
            let mut kept = Vec::new();
            let mut orders = Vec::new();
            for i in 0..g {
                let d = if i < s.rank {
                    s.d.get(i, i).clone()
                } else {
                    Int::zero()
                };
                if !d.is_one() {
                    kept.push(i);
                    orders.push(d);
                }
            }
            let to_canonical = s.u.select_rows(&kept);
            let from_canonical = s.u_inv.select_columns(&kept);
            Structure {
                to_canonical,
                from_canonical,
                orders,
                canonical: OnceLock::new(),
            }
        })
    }

    /// Orders of the canonical cyclic decomposition, `d1 | d2 | ...`, with
    /// free summands (zeros) last. Two modules over the same ring are
    /// isomorphic iff these lists agree.
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.structure().orders.clone()
    }

    /// Cardinality, or `None` when the module is infinite.
    pub fn order(&self) -> Option<Int> {
        let mut n = Int::one();
        for o in &self.structure().orders {
            if o.is_zero() {
                return None;
            }
            n *= o;
        }
        Some(n)
    }

    pub fn is_zero_module(&self) -> bool {
        self.structure().orders.is_empty()
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.ring() == other.ring() && self.invariant_factors() == other.invariant_factors()
    }

    /// Canonical coordinates of an element, each reduced by its order.
    pub fn canonical_coords(&self, v: &[Int]) -> Vec<Int> {
        let st = self.structure();
        let lifted: Vec<Int> = v.to_vec();
        let raw = st.to_canonical.mul_vec(&lifted);
        raw.into_iter()
            .zip(&st.orders)
            .map(|(x, o)| if o.is_zero() { x } else { x.mod_floor(o) })
            .collect()
    }

    /// Membership of `v` in the relation span.
    pub fn element_is_zero(&self, v: &[Int]) -> bool {
        assert_eq!(v.len(), self.generators(), "element length");
        self.canonical_coords(v).iter().all(|x| x.is_zero())
    }

    pub fn elements_equal(&self, a: &[Int], b: &[Int]) -> bool {
        let d: Vec<Int> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.element_is_zero(&d)
    }

    pub fn reduce_element(&self, v: &[Int]) -> Vec<Int> {
        v.iter().map(|x| self.ring().reduce(x)).collect()
    }

    pub fn generator(&self, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); self.generators()];
        v[i] = Int::one();
        v
    }

    /// Diagonal presentation isomorphic to `self`.
    pub fn canonical(&self) -> Canonical {
        let st = self.structure();
        st.canonical
            .get_or_init(|| {
                let ring = self.ring();
                let module = PresentedModule::diagonal(ring, &st.orders);
                let to = ModuleMorphism::from_parts(
                    self.clone(),
                    module.clone(),
                    st.to_canonical.reduce_to(ring),
                );
                let from = ModuleMorphism::from_parts(
                    module.clone(),
                    self.clone(),
                    st.from_canonical.reduce_to(ring),
                );
                Canonical { module, to, from }
            })
            .clone()
    }

    /// All elements of a finite module, as coordinate vectors in the
    /// module's own generators. `None` if infinite.
    pub fn enumerate_elements(&self) -> Option<Vec<Vec<Int>>> {
        let orders = self.invariant_factors();
        if orders.iter().any(|o| o.is_zero()) {
            return None;
        }
        let from = self.canonical().from;
        let mut out = Vec::new();
        let mut digits = vec![Int::zero(); orders.len()];
        loop {
            out.push(from.apply(&digits));
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return Some(out);
                }
                digits[k] += 1;
                if digits[k] == orders[k] {
                    digits[k] = Int::zero();
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }
}

/// A morphism given by its matrix on generators (target gens × source gens).
#[derive(Clone)]
pub struct ModuleMorphism {
    source: PresentedModule,
    target: PresentedModule,
    matrix: ExactMatrix,
    image_solver: Arc<OnceLock<LinearSystem>>,
}

impl fmt::Debug for ModuleMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleMorphism({} -> {}, {:?})", self.source, self.target, self.matrix)
    }
}

/// First relation column of the source that the matrix fails to send into
/// the target's relation span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub column: usize,
}

pub fn check_well_defined(
    source: &PresentedModule,
    target: &PresentedModule,
    matrix: &ExactMatrix,
) -> Result<(), Rejection> {
    let rel = source.relations();
    let lifted = matrix.lift();
    for c in 0..rel.cols() {
        let img = lifted.mul_vec(&rel.column(c));
        if !target.element_is_zero(&img) {
            return Err(Rejection { column: c });
        }
    }
    Ok(())
}

impl ModuleMorphism {
    pub fn new(
        source: PresentedModule,
        target: PresentedModule,
        matrix: ExactMatrix,
    ) -> Result<Self, ModuleError> {
        if source.ring() != target.ring() {
            return Err(ModuleError::RingMismatch(source.ring(), target.ring()));
        }
        let matrix = if matrix.ring() == source.ring() {
            matrix
        } else if matrix.ring().is_integers() {
            matrix.reduce_to(source.ring())
        } else {
            return Err(ModuleError::RingMismatch(source.ring(), matrix.ring()));
        };
        if matrix.rows() != target.generators() || matrix.cols() != source.generators() {
            return Err(ModuleError::Dimension(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators(),
                source.generators()
            )));
        }
        check_well_defined(&source, &target, &matrix)
            .map_err(|r| ModuleError::NotWellDefined { column: r.column })?;
        Ok(Self::from_parts(source, target, matrix))
    }

    pub(crate) fn from_parts(
        source: PresentedModule,
        target: PresentedModule,
        matrix: ExactMatrix,
    ) -> Self {
        debug_assert_eq!(matrix.rows(), target.generators());
        debug_assert_eq!(matrix.cols(), source.generators());
        let matrix = if matrix.ring() == source.ring() {
            matrix
        } else {
            matrix.reduce_to(source.ring())
        };
        ModuleMorphism {
            source,
            target,
            matrix,
            image_solver: Arc::new(OnceLock::new()),
        }
    }

    /// Like `from_parts`, but verified when debug assertions are on.
    pub(crate) fn trusted(
        source: PresentedModule,
        target: PresentedModule,
        matrix: ExactMatrix,
    ) -> Self {
        let f = Self::from_parts(source, target, matrix);
        debug_assert!(
            check_well_defined(&f.source, &f.target, &f.matrix).is_ok(),
            "internally constructed morphism is not well defined: {f:?}"
        );
        f
    }

    pub fn identity(m: &PresentedModule) -> Self {
        Self::from_parts(
            m.clone(),
            m.clone(),
            ExactMatrix::identity(m.ring(), m.generators()),
        )
    }

    pub fn zero(source: &PresentedModule, target: &PresentedModule) -> Self {
        Self::from_parts(
            source.clone(),
            target.clone(),
            ExactMatrix::zeros(source.ring(), target.generators(), source.generators()),
        )
    }

    pub fn source(&self) -> &PresentedModule {
        &self.source
    }

    pub fn target(&self) -> &PresentedModule {
        &self.target
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn ring(&self) -> RingSpec {
        self.source.ring()
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.matrix.lift().mul_vec(v).iter().map(|x| self.ring().reduce(x)).collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ModuleMorphism) -> ModuleMorphism {
        assert!(
            inner.target == self.source,
            "compose: {} -> {} after {} -> {}",
            self.source,
            self.target,
            inner.source,
            inner.target
        );
        Self::from_parts(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }

    pub fn try_compose(&self, inner: &ModuleMorphism) -> Result<ModuleMorphism, ModuleError> {
        if inner.target != self.source {
            return Err(ModuleError::NonComposable { position: 0 });
        }
        Ok(self.compose(inner))
    }

    fn same_ends(&self, other: &ModuleMorphism) {
        assert!(
            self.source == other.source && self.target == other.target,
            "morphisms have different ends"
        );
    }

    pub fn add(&self, other: &ModuleMorphism) -> ModuleMorphism {
        self.same_ends(other);
        Self::from_parts(
            self.source.clone(),
            self.target.clone(),
            self.matrix.add(&other.matrix),
        )
    }

    pub fn sub(&self, other: &ModuleMorphism) -> ModuleMorphism {
        self.same_ends(other);
        Self::from_parts(
            self.source.clone(),
            self.target.clone(),
            self.matrix.sub(&other.matrix),
        )
    }

    pub fn neg(&self) -> ModuleMorphism {
        Self::from_parts(self.source.clone(), self.target.clone(), self.matrix.neg())
    }

    pub fn scale(&self, s: &Int) -> ModuleMorphism {
        Self::from_parts(self.source.clone(), self.target.clone(), self.matrix.scale(s))
    }

    /// Every generator goes to zero.
    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols()).all(|c| self.target.element_is_zero(&self.matrix.column(c)))
    }

    /// `f = g` iff `f − g` sends every generator into the target relations.
    pub fn equals(&self, other: &ModuleMorphism) -> bool {
        self.source == other.source && self.target == other.target && self.sub(other).is_zero()
    }

    fn solver(&self) -> &LinearSystem {
        self.image_solver.get_or_init(|| {
            // canonical(target) coordinates: T·F x ≡ y mod orders
            let canon = self.target.structure();
            let tf = canon.to_canonical.mul(&self.matrix.lift());
            let orders = &canon.orders;
            let diag_cols: Vec<usize> = (0..orders.len()).filter(|&i| !orders[i].is_zero()).collect();
            let mut diag = ExactMatrix::zeros(RingSpec::Integers, orders.len(), diag_cols.len());
            for (j, &i) in diag_cols.iter().enumerate() {
                diag.set(i, j, orders[i].clone());
            }
            LinearSystem::new(&tf.hcat(&diag))
        })
    }

    /// Some `x` in the source with `self(x) = y`.
    pub fn preimage(&self, y: &[Int]) -> Option<Vec<Int>> {
        let rhs = self.target.structure().to_canonical.mul_vec(y);
        let z = self.solver().solve(&rhs)?;
        Some(
            z.into_iter()
                .take(self.source.generators())
                .map(|v| self.ring().reduce(&v))
                .collect(),
        )
    }

    pub fn image_contains(&self, y: &[Int]) -> bool {
        let rhs = self.target.structure().to_canonical.mul_vec(y);
        self.solver().is_solvable(&rhs)
    }

    /// Generators of the preimage lattice of zero, in source coordinates.
    fn kernel_lattice(&self) -> Vec<Vec<Int>> {
        let k = self.solver().kernel();
        let a = self.source.generators();
        let mut cols = Vec::new();
        for c in 0..k.cols() {
            let col: Vec<Int> = (0..a).map(|r| self.ring().reduce(k.get(r, c))).collect();
            if col.iter().any(|x| !x.is_zero()) {
                cols.push(col);
            }
        }
        cols
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).module.is_zero_module()
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.target.generators()).all(|i| self.image_contains(&self.target.generator(i)))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Inverse of an isomorphism, solved generator by generator.
    pub fn inverse(&self) -> Option<ModuleMorphism> {
        if !self.is_injective() {
            return None;
        }
        let mut cols = Vec::with_capacity(self.target.generators());
        for i in 0..self.target.generators() {
            cols.push(self.preimage(&self.target.generator(i))?);
        }
        let inv = ModuleMorphism::from_parts(
            self.target.clone(),
            self.source.clone(),
            ExactMatrix::from_columns(self.ring(), self.source.generators(), &cols),
        );
        debug_assert!(check_well_defined(&inv.source, &inv.target, &inv.matrix).is_ok());
        Some(inv)
    }
}

/// A submodule given by an explicit presentation and its inclusion.
#[derive(Clone, Debug)]
pub struct Subobject {
    pub module: PresentedModule,
    pub inclusion: ModuleMorphism,
}

/// A quotient with its projection and a lift of each quotient generator.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: PresentedModule,
    pub projection: ModuleMorphism,
    /// Column `k` is a preimage of quotient generator `k`.
    pub section: ExactMatrix,
}

#[derive(Clone, Debug)]
pub struct Image {
    pub module: PresentedModule,
    pub inclusion: ModuleMorphism,
    pub corestriction: ModuleMorphism,
}

#[derive(Clone, Debug)]
pub struct KernelImageCokernel {
    pub kernel: Subobject,
    pub image: Image,
    pub cokernel: Quotient,
}

pub fn kernel(f: &ModuleMorphism) -> Subobject {
    let ring = f.ring();
    let source = f.source();
    let lattice = f.kernel_lattice();
    let k = lattice.len();
    let l = ExactMatrix::from_columns(ring, source.generators(), &lattice);
    // relations among the lattice generators: L c ∈ relations(source)
    let incl0 = ModuleMorphism::from_parts(
        PresentedModule::free(ring, k),
        source.clone(),
        l.clone(),
    );
    let rel = incl0.kernel_lattice();
    let k0 = PresentedModule::from_relation_columns(ring, k, &rel);
    let canon = k0.canonical();
    let inclusion = ModuleMorphism::trusted(
        canon.module.clone(),
        source.clone(),
        l.mul(canon.from.matrix()),
    );
    Subobject {
        module: canon.module,
        inclusion,
    }
}

pub fn image(f: &ModuleMorphism) -> Image {
    let ring = f.ring();
    let a = f.source().generators();
    let rel = f.kernel_lattice();
    let i0 = PresentedModule::from_relation_columns(ring, a, &rel);
    let canon = i0.canonical();
    let inclusion = ModuleMorphism::trusted(
        canon.module.clone(),
        f.target().clone(),
        f.matrix().mul(canon.from.matrix()),
    );
    let corestriction =
        ModuleMorphism::trusted(f.source().clone(), canon.module.clone(), canon.to.matrix().clone());
    Image {
        module: canon.module,
        inclusion,
        corestriction,
    }
}

pub fn cokernel(f: &ModuleMorphism) -> Quotient {
    let target = f.target();
    let rel = target.relations().hcat(f.matrix());
    let c0 = PresentedModule::from_parts(f.ring(), target.generators(), rel);
    let canon = c0.canonical();
    let projection =
        ModuleMorphism::trusted(target.clone(), canon.module.clone(), canon.to.matrix().clone());
    Quotient {
        module: canon.module,
        projection,
        section: canon.from.matrix().clone(),
    }
}

pub fn kernel_image_cokernel(f: &ModuleMorphism) -> KernelImageCokernel {
    KernelImageCokernel {
        kernel: kernel(f),
        image: image(f),
        cokernel: cokernel(f),
    }
}

/// Factor `f: X → B` through a monomorphism `mono: K → B`, if `im f ⊆ im mono`.
pub fn lift_through_mono(f: &ModuleMorphism, mono: &ModuleMorphism) -> Option<ModuleMorphism> {
    assert!(f.target() == mono.target(), "lift_through_mono: different targets");
    let mut cols = Vec::with_capacity(f.source().generators());
    for c in 0..f.matrix().cols() {
        cols.push(mono.preimage(&f.matrix().column(c))?);
    }
    let m = ModuleMorphism::from_parts(
        f.source().clone(),
        mono.source().clone(),
        ExactMatrix::from_columns(f.ring(), mono.source().generators(), &cols),
    );
    if check_well_defined(m.source(), m.target(), m.matrix()).is_err() {
        return None;
    }
    Some(m)
}

/// The map `Q → Z` induced by `f: B → Z` on a quotient `Q` of `B`, when
/// `f` vanishes on the kernel of the projection.
pub fn induced_on_quotient(q: &Quotient, f: &ModuleMorphism) -> Option<ModuleMorphism> {
    assert!(f.source() == q.projection.source(), "induced_on_quotient: wrong source");
    let matrix = f.matrix().mul(&q.section.reduce_to(f.ring()));
    let g = ModuleMorphism::from_parts(q.module.clone(), f.target().clone(), matrix);
    if check_well_defined(g.source(), g.target(), g.matrix()).is_err() {
        return None;
    }
    // f must factor: f = g ∘ projection
    if !g.compose(&q.projection).equals(f) {
        return None;
    }
    Some(g)
}

#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: PresentedModule,
    pub injections: Vec<ModuleMorphism>,
    pub projections: Vec<ModuleMorphism>,
}

pub fn direct_sum_many(parts: &[PresentedModule]) -> DirectSum {
    assert!(!parts.is_empty(), "direct sum of nothing");
    let ring = parts[0].ring();
    assert!(parts.iter().all(|p| p.ring() == ring), "direct sum over different rings");
    let total: usize = parts.iter().map(|p| p.generators()).sum();
    let mut rel = ExactMatrix::zeros(ring, 0, 0);
    for p in parts {
        rel = rel.block_diag(p.relations());
    }
    let module = PresentedModule::from_parts(ring, total, rel);
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let mut offset = 0;
    for p in parts {
        let g = p.generators();
        let mut inj = ExactMatrix::zeros(ring, total, g);
        for i in 0..g {
            inj.set(offset + i, i, Int::one());
        }
        let proj = inj.transpose();
        injections.push(ModuleMorphism::from_parts(p.clone(), module.clone(), inj));
        projections.push(ModuleMorphism::from_parts(module.clone(), p.clone(), proj));
        offset += g;
    }
    DirectSum {
        module,
        injections,
        projections,
    }
}

pub fn direct_sum(a: &PresentedModule, b: &PresentedModule) -> DirectSum {
    direct_sum_many(&[a.clone(), b.clone()])
}

/// `(f g): A ⊕ B → C` from `f: A → C`, `g: B → C`.
pub fn copair(sum: &DirectSum, maps: &[ModuleMorphism]) -> ModuleMorphism {
    assert_eq!(sum.injections.len(), maps.len());
    let target = maps[0].target().clone();
    let mut m = ExactMatrix::zeros(sum.module.ring(), target.generators(), 0);
    for f in maps {
        assert!(f.target() == &target, "copair: different targets");
        m = m.hcat(f.matrix());
    }
    ModuleMorphism::from_parts(sum.module.clone(), target, m)
}

/// `(f; g): C → A ⊕ B` from `f: C → A`, `g: C → B`.
pub fn pair(sum: &DirectSum, maps: &[ModuleMorphism]) -> ModuleMorphism {
    assert_eq!(sum.projections.len(), maps.len());
    let source = maps[0].source().clone();
    let mut m = ExactMatrix::zeros(sum.module.ring(), 0, source.generators());
    for f in maps {
        assert!(f.source() == &source, "pair: different sources");
        m = m.vcat(f.matrix());
    }
    ModuleMorphism::from_parts(source, sum.module.clone(), m)
}

#[derive(Clone, Debug)]
pub struct Pullback {
    pub module: PresentedModule,
    pub to_first: ModuleMorphism,
    pub to_second: ModuleMorphism,
    /// Inclusion into `A ⊕ B`.
    pub inclusion: ModuleMorphism,
    pub sum: DirectSum,
}

/// `A ×_C B` for `f: A → C`, `g: B → C`.
pub fn pullback(f: &ModuleMorphism, g: &ModuleMorphism) -> Pullback {
    assert!(f.target() == g.target(), "pullback needs a common target");
    let sum = direct_sum(f.source(), g.source());
    let diff = copair(&sum, &[f.clone(), g.neg()]);
    let k = kernel(&diff);
    let to_first = sum.projections[0].compose(&k.inclusion);
    let to_second = sum.projections[1].compose(&k.inclusion);
    Pullback {
        module: k.module,
        to_first,
        to_second,
        inclusion: k.inclusion,
        sum,
    }
}

#[derive(Clone, Debug)]
pub struct Pushout {
    pub module: PresentedModule,
    pub from_first: ModuleMorphism,
    pub from_second: ModuleMorphism,
    pub quotient: Quotient,
    pub sum: DirectSum,
}

/// `A ⊔_C B = (A ⊕ B) / {(f c, −g c)}` for `f: C → A`, `g: C → B`.
pub fn pushout(f: &ModuleMorphism, g: &ModuleMorphism) -> Pushout {
    assert!(f.source() == g.source(), "pushout needs a common source");
    let sum = direct_sum(f.target(), g.target());
    let skew = pair(&sum, &[f.clone(), g.neg()]);
    let q = cokernel(&skew);
    let from_first = q.projection.compose(&sum.injections[0]);
    let from_second = q.projection.compose(&sum.injections[1]);
    Pushout {
        module: q.module.clone(),
        from_first,
        from_second,
        quotient: q,
        sum,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionStatus {
    Exact,
    /// The composite through this position is not zero.
    CompositeNonzero,
    /// Image is contained in the kernel but strictly smaller.
    ImageStrictlyInsideKernel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    /// One entry per checked object, in chain order. With a leading zero the
    /// first entry is the source of the first map.
    pub positions: Vec<PositionStatus>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.positions.iter().all(|p| *p == PositionStatus::Exact)
    }

    pub fn failures(&self) -> Vec<usize> {
        (0..self.positions.len())
            .filter(|&i| self.positions[i] != PositionStatus::Exact)
            .collect()
    }
}

fn status_between(f: &ModuleMorphism, g: &ModuleMorphism) -> PositionStatus {
    if !g.compose(f).is_zero() {
        return PositionStatus::CompositeNonzero;
    }
    let k = kernel(g);
    for c in 0..k.inclusion.matrix().cols() {
        if !f.image_contains(&k.inclusion.matrix().column(c)) {
            return PositionStatus::ImageStrictlyInsideKernel;
        }
    }
    PositionStatus::Exact
}

/// Exactness at every interior object of a chain of composable maps, and
/// at the ends when they are flanked by zeros.
pub fn is_exact(
    chain: &[ModuleMorphism],
    leading_zero: bool,
    trailing_zero: bool,
) -> Result<ExactnessReport, ModuleError> {
    for (i, w) in chain.windows(2).enumerate() {
        if w[0].target() != w[1].source() {
            return Err(ModuleError::NonComposable { position: i });
        }
    }
    let mut positions = Vec::new();
    if let Some(first) = chain.first() {
        if leading_zero {
            let zero = ModuleMorphism::zero(&PresentedModule::zero(first.ring()), first.source());
            positions.push(status_between(&zero, first));
        }
    }
    for w in chain.windows(2) {
        positions.push(status_between(&w[0], &w[1]));
    }
    if let Some(last) = chain.last() {
        if trailing_zero {
            let zero = ModuleMorphism::zero(last.target(), &PresentedModule::zero(last.ring()));
            positions.push(status_between(last, &zero));
        }
    }
    Ok(ExactnessReport { positions })
}

/// `0 → left → middle → right → 0`, exactness verified on construction.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    inject: ModuleMorphism,
    project: ModuleMorphism,
}

impl ShortExactSequence {
    pub fn new(inject: ModuleMorphism, project: ModuleMorphism) -> Result<Self, ModuleError> {
        let report = is_exact(&[inject.clone(), project.clone()], true, true)?;
        if !report.is_exact() {
            let names = ["left", "middle", "right"];
            let bad: Vec<&str> = report.failures().iter().map(|&i| names[i]).collect();
            return Err(ModuleError::NotExact(format!("fails at {}", bad.join(", "))));
        }
        Ok(ShortExactSequence { inject, project })
    }

    #[allow(dead_code)]
    pub(crate) fn trusted(inject: ModuleMorphism, project: ModuleMorphism) -> Self {
        debug_assert!(
            is_exact(&[inject.clone(), project.clone()], true, true)
                .map(|r| r.is_exact())
                .unwrap_or(false),
            "internally built sequence is not exact"
        );
        ShortExactSequence { inject, project }
    }

    pub fn inject(&self) -> &ModuleMorphism {
        &self.inject
    }

    pub fn project(&self) -> &ModuleMorphism {
        &self.project
    }

    pub fn left(&self) -> &PresentedModule {
        self.inject.source()
    }

    pub fn middle(&self) -> &PresentedModule {
        self.inject.target()
    }

    pub fn right(&self) -> &PresentedModule {
        self.project.target()
    }

    /// `0 → A → A ⊕ C → C → 0`.
    pub fn split(a: &PresentedModule, c: &PresentedModule) -> Self {
        let s = direct_sum(a, c);
        ShortExactSequence {
            inject: s.injections[0].clone(),
            project: s.projections[1].clone(),
        }
    }
}

/// Output of the snake lemma for a commuting ladder of short exact rows.
#[derive(Clone, Debug)]
pub struct SnakeResult {
    pub kernels: [Subobject; 3],
    pub cokernels: [Quotient; 3],
    pub connecting: ModuleMorphism,
    /// `ker a → ker b → ker c → coker a → coker b → coker c`.
    pub six_term: Vec<ModuleMorphism>,
}

pub fn snake_connecting(
    top: &ShortExactSequence,
    bottom: &ShortExactSequence,
    verticals: [&ModuleMorphism; 3],
) -> Result<SnakeResult, ModuleError> {
    let [va, vb, vc] = verticals;
    let ends_ok = va.source() == top.left()
        && va.target() == bottom.left()
        && vb.source() == top.middle()
        && vb.target() == bottom.middle()
        && vc.source() == top.right()
        && vc.target() == bottom.right();
    if !ends_ok {
        return Err(ModuleError::LadderNotCommuting(
            "vertical maps do not match the rows".into(),
        ));
    }
    if !vb.compose(top.inject()).equals(&bottom.inject().compose(va)) {
        return Err(ModuleError::LadderNotCommuting("left square".into()));
    }
    if !vc.compose(top.project()).equals(&bottom.project().compose(vb)) {
        return Err(ModuleError::LadderNotCommuting("right square".into()));
    }
    let ka = kernel(va);
    let kb = kernel(vb);
    let kc = kernel(vc);
    let ca = cokernel(va);
    let cb = cokernel(vb);
    let cc = cokernel(vc);

    let k_ab = lift_through_mono(&top.inject().compose(&ka.inclusion), &kb.inclusion)
        .ok_or_else(|| ModuleError::LadderNotCommuting("ker a → ker b".into()))?;
    let k_bc = lift_through_mono(&top.project().compose(&kb.inclusion), &kc.inclusion)
        .ok_or_else(|| ModuleError::LadderNotCommuting("ker b → ker c".into()))?;

    // element chase on the generators of ker c
    let ring = va.ring();
    let mut cols = Vec::new();
    for k in 0..kc.module.generators() {
        let c = kc.inclusion.matrix().column(k);
        let b = top.project().preimage(&c).ok_or(ModuleError::NotInImage)?;
        let b2 = vb.apply(&b);
        let a2 = bottom.inject().preimage(&b2).ok_or(ModuleError::NotInImage)?;
        cols.push(ca.projection.apply(&a2));
    }
    let connecting = ModuleMorphism::new(
        kc.module.clone(),
        ca.module.clone(),
        ExactMatrix::from_columns(ring, ca.module.generators(), &cols),
    )?;
    let c_ab = induced_on_quotient(&ca, &cb.projection.compose(bottom.inject()))
        .ok_or_else(|| ModuleError::LadderNotCommuting("coker a → coker b".into()))?;
    let c_bc = induced_on_quotient(&cb, &cc.projection.compose(bottom.project()))
        .ok_or_else(|| ModuleError::LadderNotCommuting("coker b → coker c".into()))?;
    Ok(SnakeResult {
        six_term: vec![k_ab, k_bc, connecting.clone(), c_ab, c_bc],
        kernels: [ka, kb, kc],
        cokernels: [ca, cb, cc],
        connecting,
    })
}
