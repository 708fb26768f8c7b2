//! Extension problems for 3×3 diagrams.
//!
//! ```text
//!   P ──ν──▶ E ──▶ R          P ──▶ E ──▶ R
//!   │μ             │          │     │j    │
//!   ▼              ▼          ▼     ▼     ▼
//!   H              F    ⟶     H ─i▶ X ─m▶ F
//!   │              │          │     │n    │
//!   ▼              ▼          ▼     ▼     ▼
//!   S ──▶ G ──▶ Q             S ──▶ G ──▶ Q
//! ```

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::ext::{
    class_of_ses, delta1_by_splice, free_resolution, induced_contravariant, ses_of_class,
    ses_of_cocycle, yoneda_product, ExtClass, ExtError, ExtModule, FreeResolution, SIGMA,
};
use crate::fgmod::{
    copair, direct_sum, image, induced_on_quotient, is_exact, lift_through_mono, pair, pullback,
    pushout, DirectSum, ModuleError, ModuleMorphism, PresentedModule, Pullback,
    ShortExactSequence,
};
use crate::linalg::{self, int, ExactMatrix, Int, LinearSystem, RingSpec};

/// A named failure of a structural check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub detail: String,
}

impl Violation {
    fn new(location: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            location: location.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.detail)
    }
}

#[derive(Debug, Clone, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {}", join(.0))]
    InvalidDiagram(Vec<Violation>),
    #[error("diagram does not extend: obstruction {} is nonzero", .0.baer_sum_coords())]
    NotExtendable(Box<ObstructionReport>),
    #[error("the extensions have different classes in Ext¹(Y, P)")]
    ClassesDiffer,
    #[error("the correction homomorphism on E + H does not extend to X")]
    LambdaNotExtendable,
    #[error("invalid extension: {}", join(.0))]
    InvalidExtension(Vec<Violation>),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("homomorphism does not extend")]
pub struct NotExtendable;

/// An unvalidated pair `A → B → C`.
#[derive(Clone, Debug)]
pub struct SequenceMaps {
    pub inject: ModuleMorphism,
    pub project: ModuleMorphism,
}

impl SequenceMaps {
    pub fn new(inject: ModuleMorphism, project: ModuleMorphism) -> Self {
        SequenceMaps { inject, project }
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

    fn violations(&self, name: &str) -> Vec<Violation> {
        if self.inject.target() != self.project.source() {
            return vec![Violation::new(name, "maps are not composable")];
        }
        let report = is_exact(&[self.inject.clone(), self.project.clone()], true, true)
            .expect("composable");
        let names = ["left", "middle", "right"];
        report
            .failures()
            .into_iter()
            .map(|k| {
                Violation::new(
                    format!("{name}/{}", names[k]),
                    format!("{:?}", report.positions[k]),
                )
            })
            .collect()
    }

    fn exact(&self) -> ShortExactSequence {
        ShortExactSequence::trusted(self.inject.clone(), self.project.clone())
    }
}

/// Two exact rows and two exact columns sharing the corners `P, R, S, Q`.
#[derive(Clone, Debug)]
pub struct Diagram3x3 {
    pub row_top: SequenceMaps,
    pub row_bottom: SequenceMaps,
    pub col_left: SequenceMaps,
    pub col_right: SequenceMaps,
}

impl Diagram3x3 {
    pub fn new(
        row_top: SequenceMaps,
        row_bottom: SequenceMaps,
        col_left: SequenceMaps,
        col_right: SequenceMaps,
    ) -> Self {
        Diagram3x3 {
            row_top,
            row_bottom,
            col_left,
            col_right,
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.p().ring()
    }

    pub fn p(&self) -> &PresentedModule {
        self.row_top.left()
    }
    pub fn e(&self) -> &PresentedModule {
        self.row_top.middle()
    }
    pub fn r(&self) -> &PresentedModule {
        self.row_top.right()
    }
    pub fn h(&self) -> &PresentedModule {
        self.col_left.middle()
    }
    pub fn s(&self) -> &PresentedModule {
        self.col_left.right()
    }
    pub fn f(&self) -> &PresentedModule {
        self.col_right.middle()
    }
    pub fn g(&self) -> &PresentedModule {
        self.row_bottom.middle()
    }
    pub fn q(&self) -> &PresentedModule {
        self.row_bottom.right()
    }
}

pub fn validate_diagram1(d: &Diagram3x3) -> Vec<Violation> {
    let mut out = Vec::new();
    let ring = d.row_top.inject.ring();
    for (name, s) in [
        ("rowTop", &d.row_top),
        ("rowBottom", &d.row_bottom),
        ("colLeft", &d.col_left),
        ("colRight", &d.col_right),
    ] {
        if s.inject.ring() != ring || s.project.ring() != ring {
            out.push(Violation::new(name, "ring differs from rowTop"));
            continue;
        }
        out.extend(s.violations(name));
    }
    let corners = [
        ("P", d.row_top.left(), d.col_left.left()),
        ("R", d.row_top.right(), d.col_right.left()),
        ("S", d.col_left.right(), d.row_bottom.left()),
        ("Q", d.col_right.right(), d.row_bottom.right()),
    ];
    for (name, a, b) in corners {
        if a != b {
            out.push(Violation::new(
                format!("corner {name}"),
                "the two sequences meeting here use different modules",
            ));
        }
    }
    out
}

/// Middle row `H → X → F` and middle column `E → X → G`.
#[derive(Clone, Debug)]
pub struct DiagramExtension {
    pub x: PresentedModule,
    pub i: ModuleMorphism,
    pub j: ModuleMorphism,
    pub m: ModuleMorphism,
    pub n: ModuleMorphism,
}

impl DiagramExtension {
    pub fn row_mid(&self) -> SequenceMaps {
        SequenceMaps::new(self.i.clone(), self.m.clone())
    }

    pub fn col_mid(&self) -> SequenceMaps {
        SequenceMaps::new(self.j.clone(), self.n.clone())
    }
}

pub fn validate_extension(d: &Diagram3x3, ext: &DiagramExtension) -> Vec<Violation> {
    let mut out = Vec::new();
    let ends = [
        ("i", ext.i.source() == d.h() && ext.i.target() == &ext.x),
        ("j", ext.j.source() == d.e() && ext.j.target() == &ext.x),
        ("m", ext.m.source() == &ext.x && ext.m.target() == d.f()),
        ("n", ext.n.source() == &ext.x && ext.n.target() == d.g()),
    ];
    for (name, ok) in ends {
        if !ok {
            out.push(Violation::new(name, "wrong source or target"));
        }
    }
    if !out.is_empty() {
        return out;
    }
    out.extend(ext.row_mid().violations("rowMid"));
    out.extend(ext.col_mid().violations("colMid"));
    let squares = [
        (
            "square P",
            ext.j.compose(&d.row_top.inject),
            ext.i.compose(&d.col_left.inject),
        ),
        (
            "square E→F",
            ext.m.compose(&ext.j),
            d.col_right.inject.compose(&d.row_top.project),
        ),
        (
            "square H→G",
            ext.n.compose(&ext.i),
            d.row_bottom.inject.compose(&d.col_left.project),
        ),
        (
            "square X→Q",
            d.col_right.project.compose(&ext.m),
            d.row_bottom.project.compose(&ext.n),
        ),
    ];
    for (name, a, b) in squares {
        if !a.equals(&b) {
            out.push(Violation::new(name, "does not commute"));
        }
    }
    out
}

/// `left ∘ M ∘ right = value` for an unknown `M`.
#[derive(Clone, Debug)]
pub struct Sandwich {
    pub left: ModuleMorphism,
    pub right: ModuleMorphism,
    pub value: ModuleMorphism,
}

impl Sandwich {
    /// `left ∘ M = value`.
    pub fn post(left: &ModuleMorphism, value: &ModuleMorphism) -> Self {
        Sandwich {
            left: left.clone(),
            right: ModuleMorphism::identity(value.source()),
            value: value.clone(),
        }
    }

    /// `M ∘ right = value`.
    pub fn pre(right: &ModuleMorphism, value: &ModuleMorphism) -> Self {
        Sandwich {
            left: ModuleMorphism::identity(value.target()),
            right: right.clone(),
            value: value.clone(),
        }
    }
}

/// Some morphism `source → target` satisfying every constraint.
///
/// The unknown is written in canonical coordinates, where well-definedness
/// becomes the divisibility `t_i | o_j·M'_ij`; each constraint is compared
/// in the canonical coordinates of its codomain with one slack per row.
pub fn solve_morphism(
    source: &PresentedModule,
    target: &PresentedModule,
    constraints: &[Sandwich],
) -> Option<ModuleMorphism> {
    let ring = source.ring();
    let ca = source.canonical();
    let cb = target.canonical();
    let oa = ca.module.invariant_factors();
    let ob = cb.module.invariant_factors();
    let mut vars = Vec::new();
    for i in 0..ob.len() {
        for j in 0..oa.len() {
            let g = if ob[i].is_zero() {
                if oa[j].is_zero() {
                    int(1)
                } else {
                    Int::zero()
                }
            } else {
                &ob[i] / oa[j].gcd(&ob[i])
            };
            if !g.is_zero() {
                vars.push((i, j, g));
            }
        }
    }
    let mut rows: Vec<Vec<Int>> = Vec::new();
    let mut rhs: Vec<Int> = Vec::new();
    let mut moduli: Vec<Int> = Vec::new();
    let from_b = cb.from.matrix().lift();
    let to_a = ca.to.matrix().lift();
    for c in constraints {
        assert!(c.left.source() == target, "constraint left map must start at the target");
        assert!(c.right.target() == source, "constraint right map must end at the source");
        assert!(
            c.left.target() == c.value.target() && c.right.source() == c.value.source(),
            "constraint value has the wrong ends"
        );
        let t = c.value.target().canonical();
        let ot = t.module.invariant_factors();
        let to_t = t.to.matrix().lift();
        let lc = to_t.mul(&c.left.matrix().lift()).mul(&from_b);
        let kc = to_a.mul(&c.right.matrix().lift());
        let vc = to_t.mul(&c.value.matrix().lift());
        for x in 0..c.value.source().generators() {
            for k in 0..ot.len() {
                let row: Vec<Int> = vars
                    .iter()
                    .map(|(i, j, g)| lc.get(k, *i) * g * kc.get(*j, x))
                    .collect();
                rows.push(row);
                rhs.push(vc.get(k, x).clone());
                moduli.push(ot[k].clone());
            }
        }
    }
    let nv = vars.len();
    let slack: Vec<usize> = (0..moduli.len()).filter(|&r| !moduli[r].is_zero()).collect();
    let mut a = ExactMatrix::zeros(RingSpec::Integers, rows.len(), nv + slack.len());
    for (r, row) in rows.iter().enumerate() {
        for (v, x) in row.iter().enumerate() {
            a.set(r, v, x.clone());
        }
    }
    for (s, &r) in slack.iter().enumerate() {
        a.set(r, nv + s, moduli[r].clone());
    }
    let y = if rows.is_empty() {
        vec![Int::zero(); nv]
    } else {
        LinearSystem::new(&a).solve(&rhs)?
    };
    let mut mc = ExactMatrix::zeros(RingSpec::Integers, ob.len(), oa.len());
    for (v, (i, j, g)) in vars.iter().enumerate() {
        mc.set(*i, *j, g * &y[v]);
    }
    let matrix = from_b.mul(&mc).mul(&to_a).reduce_to(ring);
    let m = ModuleMorphism::new(source.clone(), target.clone(), matrix)
        .expect("parametrization is well defined");
    debug_assert!(constraints
        .iter()
        .all(|c| c.left.compose(&m).compose(&c.right).equals(&c.value)));
    Some(m)
}

/// `Λ: X → P` with `Λ ∘ inclusion = λ`.
pub fn extend_homomorphism(
    lambda: &ModuleMorphism,
    inclusion: &ModuleMorphism,
) -> Result<ModuleMorphism, NotExtendable> {
    assert!(lambda.source() == inclusion.source(), "λ and the inclusion have different sources");
    solve_morphism(inclusion.target(), lambda.target(), &[Sandwich::pre(inclusion, lambda)])
        .ok_or(NotExtendable)
}

/// `Y = F ×_Q G` with `0 → R ⊕ S → Y → Q → 0`.
#[derive(Clone, Debug)]
pub struct YConstruction {
    pub y: PresentedModule,
    pub pullback: Pullback,
    pub to_f: ModuleMorphism,
    pub to_g: ModuleMorphism,
    pub rs: DirectSum,
    pub incl_r: ModuleMorphism,
    pub incl_s: ModuleMorphism,
    pub ses: ShortExactSequence,
}

pub fn build_y(d: &Diagram3x3) -> Result<YConstruction, DiagramError> {
    check_valid(d)?;
    Ok(build_y_unchecked(d))
}

fn check_valid(d: &Diagram3x3) -> Result<(), DiagramError> {
    let v = validate_diagram1(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(DiagramError::InvalidDiagram(v))
    }
}

fn build_y_unchecked(d: &Diagram3x3) -> YConstruction {
    let pb = pullback(&d.col_right.project, &d.row_bottom.project);
    let incl_r = lift_through_mono(
        &pair(
            &pb.sum,
            &[
                d.col_right.inject.clone(),
                ModuleMorphism::zero(d.r(), d.g()),
            ],
        ),
        &pb.inclusion,
    )
    .expect("R lies in the pullback");
    let incl_s = lift_through_mono(
        &pair(
            &pb.sum,
            &[
                ModuleMorphism::zero(d.s(), d.f()),
                d.row_bottom.inject.clone(),
            ],
        ),
        &pb.inclusion,
    )
    .expect("S lies in the pullback");
    let rs = direct_sum(d.r(), d.s());
    let inject = copair(&rs, &[incl_r.clone(), incl_s.clone()]);
    let project = d.col_right.project.compose(&pb.to_first);
    let ses = ShortExactSequence::new(inject, project).expect("Y sequence is exact");
    YConstruction {
        y: pb.module.clone(),
        to_f: pb.to_first.clone(),
        to_g: pb.to_second.clone(),
        pullback: pb,
        rs,
        incl_r,
        incl_s,
        ses,
    }
}

/// `[E]∪[F]`, `[H]∪[G]` and their sum in `Ext²(Q, P)`.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub yoneda_ef: ExtClass,
    pub yoneda_hg: ExtClass,
    pub baer_sum: ExtClass,
    pub is_zero: bool,
}

impl ObstructionReport {
    pub fn baer_sum_coords(&self) -> String {
        let v: Vec<String> = self.baer_sum.coords().iter().map(|x| x.to_string()).collect();
        format!("[{}]", v.join(", "))
    }
}

/// Everything derived from a valid diagram that the operations share.
#[derive(Clone, Debug)]
pub struct DiagramContext {
    pub diagram: Diagram3x3,
    pub y: YConstruction,
    pub class_e: ExtClass,
    pub class_f: ExtClass,
    pub class_h: ExtClass,
    pub class_g: ExtClass,
    pub ext1_q: ExtModule,
    pub ext2_q: ExtModule,
    pub ext1_rs: ExtModule,
    pub ext1_y: ExtModule,
    /// Class of `0 → P → E ⊔_P H → R ⊕ S → 0`.
    pub tau: ExtClass,
    /// `δ¹(τ)` along the `Y` sequence.
    pub delta_tau: ExtClass,
    pub report: ObstructionReport,
    /// `Ext¹(Y, P) → Ext¹(R ⊕ S, P)`.
    pub restriction: ModuleMorphism,
    /// `Ext¹(Q, P) → Ext¹(Y, P)`.
    pub beta: ModuleMorphism,
}

impl DiagramContext {
    pub fn new(d: &Diagram3x3) -> Result<Self, DiagramError> {
        check_valid(d)?;
        let y = build_y_unchecked(d);
        let (p, r, s, q) = (d.p(), d.r(), d.s(), d.q());
        let res_q: Arc<FreeResolution> = Arc::new(free_resolution(q));
        let res_r = Arc::new(free_resolution(r));
        let res_s = Arc::new(free_resolution(s));
        let res_y = Arc::new(free_resolution(&y.y));
        let res_rs = Arc::new(free_resolution(&y.rs.module));
        let ext1_q = ExtModule::build(1, res_q.clone(), p);
        let ext2_q = ExtModule::build(2, res_q.clone(), p);
        let class_e = class_of_ses(&ExtModule::build(1, res_r, p), &d.row_top.exact())?;
        let class_f = class_of_ses(&ExtModule::build(1, res_q.clone(), r), &d.col_right.exact())?;
        let class_h = class_of_ses(&ExtModule::build(1, res_s, p), &d.col_left.exact())?;
        let class_g = class_of_ses(&ExtModule::build(1, res_q, s), &d.row_bottom.exact())?;
        let yoneda_ef = yoneda_product(&class_e, &class_f, &ext2_q)?;
        let yoneda_hg = yoneda_product(&class_h, &class_g, &ext2_q)?;
        let baer_sum = yoneda_ef.add(&yoneda_hg);
        let report = ObstructionReport {
            is_zero: baer_sum.is_zero(),
            yoneda_ef,
            yoneda_hg,
            baer_sum,
        };

        let ext1_rs = ExtModule::build(1, res_rs, p);
        let tau = class_of_ses(&ext1_rs, &pushout_sequence(d, &y.rs))?;
        let delta_tau = delta1_by_splice(&tau, &y.ses, &ext2_q)?;
        assert!(
            delta_tau.scale(&int(SIGMA)) == report.baer_sum,
            "obstruction disagrees with the connecting image: δ(τ) = {:?}, Baer sum = {:?}",
            delta_tau,
            report.baer_sum
        );
        let ext1_y = ExtModule::build(1, res_y, p);
        let restriction = induced_contravariant(&ext1_y, y.ses.inject(), &ext1_rs);
        let beta = induced_contravariant(&ext1_q, y.ses.project(), &ext1_y);
        Ok(DiagramContext {
            diagram: d.clone(),
            y,
            class_e,
            class_f,
            class_h,
            class_g,
            ext1_q,
            ext2_q,
            ext1_rs,
            ext1_y,
            tau,
            delta_tau,
            report,
            restriction,
            beta,
        })
    }

    pub fn is_extendable(&self) -> bool {
        self.delta_tau.is_zero()
    }

    /// The deterministic lift of `τ`: lexicographically smallest coordinates.
    pub fn xi(&self) -> Result<ExtClass, DiagramError> {
        if !self.is_extendable() {
            return Err(DiagramError::NotExtendable(Box::new(self.report.clone())));
        }
        let x0 = self
            .restriction
            .preimage(self.tau.coords())
            .expect("δ(τ) = 0 forces τ into the image of the restriction");
        let k = crate::fgmod::kernel(&self.restriction);
        let gens = k.inclusion.matrix().columns();
        let coords = linalg::lex_min_in_coset(&x0, &gens, self.ext1_y.orders());
        Ok(self.ext1_y.class(&coords))
    }

    /// All lifts `ξ0 + β(c)`, one per distinct class; `None` when
    /// `Ext¹(Q, P)` is infinite.
    pub fn enumerate_lifts(&self) -> Result<Option<Vec<ExtClass>>, DiagramError> {
        let xi = self.xi()?;
        let Some(all) = self.ext1_q.classes() else {
            return Ok(None);
        };
        let mut out: Vec<ExtClass> = Vec::new();
        for c in all {
            let shifted = xi.add(&self.ext1_y.class(&self.beta.apply(c.coords())));
            if !out.contains(&shifted) {
                out.push(shifted);
            }
        }
        Ok(Some(out))
    }

    /// The extension realized from a lift `ξ` of `τ`.
    pub fn extension_from_class(&self, xi: &ExtClass) -> DiagramExtension {
        self.extension_from_sequence(&ses_of_class(xi))
    }

    /// The extension realized from a specific representing cocycle of `ξ`.
    pub fn extension_from_cocycle(&self, gamma: &ExactMatrix) -> DiagramExtension {
        self.extension_from_sequence(&ses_of_cocycle(&self.ext1_y, gamma))
    }

    fn extension_from_sequence(&self, xs: &ShortExactSequence) -> DiagramExtension {
        let d = &self.diagram;
        let y = &self.y;
        let x = xs.middle().clone();
        let iota = xs.inject();
        let pi = xs.project();
        assert!(
            self.restriction_of(xs) == self.tau,
            "sequence does not restrict to τ"
        );
        let m = y.to_f.compose(pi);
        let n = y.to_g.compose(pi);
        let j = solve_morphism(
            d.e(),
            &x,
            &[
                Sandwich::post(pi, &y.incl_r.compose(&d.row_top.project)),
                Sandwich::pre(&d.row_top.inject, iota),
            ],
        )
        .expect("E embeds in X over R");
        let i = solve_morphism(
            d.h(),
            &x,
            &[
                Sandwich::post(pi, &y.incl_s.compose(&d.col_left.project)),
                Sandwich::pre(&d.col_left.inject, iota),
            ],
        )
        .expect("H embeds in X over S");
        let ext = DiagramExtension { x, i, j, m, n };
        debug_assert!(validate_extension(d, &ext).is_empty());
        ext
    }

    /// The extension of `ξ` realized on the representative
    /// `cocycle(ξ) + b·d1` instead, with every map carried across by
    /// `(p, x) ↦ (p − b x, x)`.
    pub fn representative_variant(&self, xi: &ExtClass, b: &ExactMatrix) -> DiagramExtension {
        let ring = self.diagram.ring();
        let base = self.extension_from_class(xi);
        let d1 = self.ext1_y.resolution().differential(1);
        let gamma = xi.cocycle().add(&b.mul(d1));
        let target = ses_of_cocycle(&self.ext1_y, &gamma);
        let (pg, g) = (b.rows(), b.cols());
        let psi = ExactMatrix::identity(ring, pg)
            .hcat(&b.neg())
            .vcat(&ExactMatrix::zeros(ring, g, pg).hcat(&ExactMatrix::identity(ring, g)));
        let psi = ModuleMorphism::new(base.x.clone(), target.middle().clone(), psi)
            .expect("ψ respects the twisted relations");
        transport_extension(&base, &psi)
    }

    fn restriction_of(&self, xs: &ShortExactSequence) -> ExtClass {
        let c = class_of_ses(&self.ext1_y, xs).expect("X sequence over Y");
        self.ext1_rs.class(&self.restriction.apply(c.coords()))
    }

    /// `X → Y` induced by `(m, n)`.
    pub fn projection_to_y(&self, ext: &DiagramExtension) -> Option<ModuleMorphism> {
        lift_through_mono(
            &pair(&self.y.pullback.sum, &[ext.m.clone(), ext.n.clone()]),
            &self.y.pullback.inclusion,
        )
    }

    /// Class of `0 → P → X → Y → 0` in `Ext¹(Y, P)`.
    pub fn extension_class(&self, ext: &DiagramExtension) -> Result<ExtClass, DiagramError> {
        let v = validate_extension(&self.diagram, ext);
        if !v.is_empty() {
            return Err(DiagramError::InvalidExtension(v));
        }
        let pi = self.projection_to_y(ext).expect("(m, n) lands in the pullback");
        let iota = ext.j.compose(&self.diagram.row_top.inject);
        let s = ShortExactSequence::new(iota, pi)?;
        Ok(class_of_ses(&self.ext1_y, &s)?)
    }
}

/// `0 → P → E ⊔_P H → R ⊕ S → 0`.
fn pushout_sequence(d: &Diagram3x3, rs: &DirectSum) -> ShortExactSequence {
    let po = pushout(&d.row_top.inject, &d.col_left.inject);
    let proj = d.row_top.project.matrix().block_diag(d.col_left.project.matrix());
    let proj = ModuleMorphism::new(po.sum.module.clone(), rs.module.clone(), proj)
        .expect("block projection");
    let project = induced_on_quotient(&po.quotient, &proj).expect("projection kills P");
    let inject = po.from_first.compose(&d.row_top.inject);
    ShortExactSequence::new(inject, project).expect("pushout sequence is exact")
}

pub fn obstruction(d: &Diagram3x3) -> Result<ObstructionReport, DiagramError> {
    Ok(DiagramContext::new(d)?.report)
}

pub fn extend_diagram(d: &Diagram3x3) -> Result<DiagramExtension, DiagramError> {
    let ctx = DiagramContext::new(d)?;
    let xi = ctx.xi()?;
    Ok(ctx.extension_from_class(&xi))
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub unique: bool,
    /// `α: Hom(R ⊕ S, P) → Ext¹(Q, P)` on presentations.
    pub alpha: ModuleMorphism,
    pub cokernel: PresentedModule,
}

pub fn check_uniqueness(d: &Diagram3x3) -> Result<UniquenessReport, DiagramError> {
    let ctx = DiagramContext::new(d)?;
    Ok(uniqueness_in(&ctx))
}

pub fn uniqueness_in(ctx: &DiagramContext) -> UniquenessReport {
    let p = ctx.diagram.p();
    let hom = ExtModule::build(0, Arc::new(free_resolution(&ctx.y.rs.module)), p);
    let gamma_ext = ExtModule::build(1, ctx.ext1_q.resolution().clone(), &ctx.y.rs.module);
    let gamma = class_of_ses(&gamma_ext, &ctx.y.ses)
        .expect("Y sequence")
        .cocycle();
    let cols: Vec<Vec<Int>> = (0..hom.generators())
        .map(|k| {
            let c = hom.basis_cocycle(k).mul(&gamma);
            ctx.ext1_q
                .class_of_cocycle(&c)
                .expect("λ∘γ is a cocycle")
                .coords()
                .to_vec()
        })
        .collect();
    let alpha = ModuleMorphism::new(
        hom.presentation().clone(),
        ctx.ext1_q.presentation().clone(),
        ExactMatrix::from_columns(p.ring(), ctx.ext1_q.generators(), &cols),
    )
    .expect("α is well defined");
    let cokernel = crate::fgmod::cokernel(&alpha).module;
    UniquenessReport {
        unique: cokernel.is_zero_module(),
        alpha,
        cokernel,
    }
}

/// An isomorphism `φ′: X1 → X2` commuting with all four maps.
pub fn compatible_isomorphism(
    ctx: &DiagramContext,
    e1: &DiagramExtension,
    e2: &DiagramExtension,
) -> Result<ModuleMorphism, DiagramError> {
    let d = &ctx.diagram;
    if ctx.extension_class(e1)? != ctx.extension_class(e2)? {
        return Err(DiagramError::ClassesDiffer);
    }
    let iota1 = e1.j.compose(&d.row_top.inject);
    let iota2 = e2.j.compose(&d.row_top.inject);
    let phi = solve_morphism(
        &e1.x,
        &e2.x,
        &[
            Sandwich::post(&e2.m, &e1.m),
            Sandwich::post(&e2.n, &e1.n),
            Sandwich::pre(&iota1, &iota2),
        ],
    )
    .expect("equal classes give an equivalence over Y and P");

    let i_t = lift_through_mono(&e2.i.sub(&phi.compose(&e1.i)), &iota2)
        .expect("i2 − φ i1 lands in P");
    let j_t = lift_through_mono(&e2.j.sub(&phi.compose(&e1.j)), &iota2)
        .expect("j2 − φ j1 lands in P");
    debug_assert!(i_t.compose(&d.col_left.inject).is_zero());
    debug_assert!(j_t.compose(&d.row_top.inject).is_zero());

    let eh = direct_sum(d.e(), d.h());
    let sum_map = copair(&eh, &[e1.j.clone(), e1.i.clone()]);
    let im = image(&sum_map);
    let lambda_eh = copair(&eh, &[j_t, i_t]);
    let lambda = solve_morphism(
        &im.module,
        d.p(),
        &[Sandwich::pre(&im.corestriction, &lambda_eh)],
    )
    .expect("λ vanishes on P1 and so is defined on E1 + H1");
    let eta = extend_homomorphism(&lambda, &im.inclusion)
        .map_err(|_| DiagramError::LambdaNotExtendable)?;
    let phi2 = phi.add(&iota2.compose(&eta));
    assert!(phi2.compose(&e1.i).equals(&e2.i), "φ′ i1 = i2");
    assert!(phi2.compose(&e1.j).equals(&e2.j), "φ′ j1 = j2");
    assert!(e2.m.compose(&phi2).equals(&e1.m), "m2 φ′ = m1");
    assert!(e2.n.compose(&phi2).equals(&e1.n), "n2 φ′ = n1");
    assert!(phi2.is_isomorphism(), "φ′ is invertible");
    Ok(phi2)
}

/// Replace `j` by `j + ι λ_E (E → R)` and `i` by `i + ι λ_H (H → S)`.
pub fn shift_extension(
    d: &Diagram3x3,
    ext: &DiagramExtension,
    lambda_r: &ModuleMorphism,
    lambda_s: &ModuleMorphism,
) -> DiagramExtension {
    let iota = ext.j.compose(&d.row_top.inject);
    DiagramExtension {
        x: ext.x.clone(),
        j: ext
            .j
            .add(&iota.compose(lambda_r).compose(&d.row_top.project)),
        i: ext
            .i
            .add(&iota.compose(lambda_s).compose(&d.col_left.project)),
        m: ext.m.clone(),
        n: ext.n.clone(),
    }
}

/// Every map of `ext` transported along an isomorphism `ψ: X → X′`.
pub fn transport_extension(ext: &DiagramExtension, psi: &ModuleMorphism) -> DiagramExtension {
    let inv = psi.inverse().expect("ψ is an isomorphism");
    DiagramExtension {
        x: psi.target().clone(),
        i: psi.compose(&ext.i),
        j: psi.compose(&ext.j),
        m: ext.m.compose(&inv),
        n: ext.n.compose(&inv),
    }
}

fn prime_factors(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_injective_module(p: &PresentedModule) -> bool {
    match p.ring() {
        RingSpec::Integers => p.is_zero_module(),
        RingSpec::IntegersMod(m) => {
            let primes = prime_factors(m);
            p.invariant_factors().iter().all(|d| {
                primes.iter().all(|&(q, e)| {
                    let q = Int::from(q);
                    let mut v = 0;
                    let mut x = d.clone();
                    while !x.is_zero() && x.is_multiple_of(&q) {
                        x /= &q;
                        v += 1;
                    }
                    v == 0 || v == e
                })
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r4() -> RingSpec {
        RingSpec::IntegersMod(4)
    }
    fn z() -> RingSpec {
        RingSpec::Integers
    }
    fn mor(s: &PresentedModule, t: &PresentedModule, rows: &[Vec<i64>]) -> ModuleMorphism {
        ModuleMorphism::new(s.clone(), t.clone(), ExactMatrix::from_rows(s.ring(), rows)).unwrap()
    }
    fn split(a: &PresentedModule, c: &PresentedModule) -> SequenceMaps {
        let s = direct_sum(a, c);
        SequenceMaps::new(s.injections[0].clone(), s.projections[1].clone())
    }
    fn nonsplit4(z2: &PresentedModule) -> SequenceMaps {
        let z4 = PresentedModule::free(r4(), 1);
        SequenceMaps::new(mor(z2, &z4, &[vec![2]]), mor(&z4, z2, &[vec![1]]))
    }

    fn example_a() -> Diagram3x3 {
        let z2 = PresentedModule::cyclic(r4(), 2);
        Diagram3x3::new(nonsplit4(&z2), split(&z2, &z2), split(&z2, &z2), nonsplit4(&z2))
    }

    fn all_split() -> Diagram3x3 {
        let z2 = PresentedModule::cyclic(r4(), 2);
        Diagram3x3::new(split(&z2, &z2), split(&z2, &z2), split(&z2, &z2), split(&z2, &z2))
    }

    fn integer_example() -> Diagram3x3 {
        let zz = PresentedModule::free(z(), 1);
        let z2 = PresentedModule::cyclic(z(), 2);
        let z3 = PresentedModule::cyclic(z(), 3);
        let z6 = PresentedModule::cyclic(z(), 6);
        let z12 = PresentedModule::cyclic(z(), 12);
        let z18 = PresentedModule::cyclic(z(), 18);
        Diagram3x3::new(
            SequenceMaps::new(mor(&zz, &zz, &[vec![2]]), mor(&zz, &z2, &[vec![1]])),
            SequenceMaps::new(mor(&z3, &z18, &[vec![6]]), mor(&z18, &z6, &[vec![1]])),
            SequenceMaps::new(mor(&zz, &zz, &[vec![3]]), mor(&zz, &z3, &[vec![1]])),
            SequenceMaps::new(mor(&z2, &z12, &[vec![6]]), mor(&z12, &z6, &[vec![1]])),
        )
    }

    #[test]
    fn validate_diagram_examples() {
        assert!(validate_diagram1(&all_split()).is_empty());
        assert!(validate_diagram1(&example_a()).is_empty());
        assert!(validate_diagram1(&integer_example()).is_empty());
        let mut d = all_split();
        d.row_top.project = ModuleMorphism::zero(d.row_top.project.source(), d.row_top.project.target());
        let v = validate_diagram1(&d);
        assert!(v.iter().any(|x| x.location == "rowTop/right"), "{v:?}");
    }

    #[test]
    fn obstruction_examples() {
        let a = obstruction(&example_a()).unwrap();
        assert!(!a.yoneda_ef.is_zero());
        assert!(a.yoneda_hg.is_zero());
        assert!(!a.is_zero);
        let s = obstruction(&all_split()).unwrap();
        assert!(s.yoneda_ef.is_zero() && s.yoneda_hg.is_zero() && s.is_zero);
        assert!(obstruction(&integer_example()).unwrap().is_zero);
    }

    #[test]
    fn build_y_examples() {
        let y = build_y(&example_a()).unwrap();
        assert_eq!(y.y.order(), Some(int(8)));
        let y = build_y(&all_split()).unwrap();
        assert_eq!(y.y.invariant_factors(), vec![int(2), int(2), int(2)]);
        // F = G = Q with identities: R = S = 0
        let z2 = PresentedModule::cyclic(r4(), 2);
        let zero = PresentedModule::zero(r4());
        let id = SequenceMaps::new(ModuleMorphism::zero(&zero, &z2), ModuleMorphism::identity(&z2));
        let top = SequenceMaps::new(ModuleMorphism::identity(&zero), ModuleMorphism::identity(&zero));
        let d = Diagram3x3::new(top.clone(), id.clone(), top, id);
        let y = build_y(&d).unwrap();
        assert!(y.y.is_isomorphic(&z2));
    }

    #[test]
    fn extend_examples() {
        match extend_diagram(&example_a()) {
            Err(DiagramError::NotExtendable(r)) => assert!(!r.is_zero),
            other => panic!("expected NotExtendable, got {other:?}"),
        }
        let d = all_split();
        let e = extend_diagram(&d).unwrap();
        assert!(validate_extension(&d, &e).is_empty());
        assert_eq!(e.x.order(), Some(int(16)));
        let d = integer_example();
        let e = extend_diagram(&d).unwrap();
        assert!(validate_extension(&d, &e).is_empty());
    }

    #[test]
    fn validate_extension_catches_zero_n() {
        let d = all_split();
        let mut e = extend_diagram(&d).unwrap();
        e.n = ModuleMorphism::zero(e.n.source(), e.n.target());
        let v = validate_extension(&d, &e);
        assert!(v.iter().any(|x| x.location == "colMid/right"), "{v:?}");
    }

    #[test]
    fn hand_built_split_extension_validates() {
        let d = all_split();
        let x = PresentedModule::diagonal(r4(), &[int(2), int(2), int(2), int(2)]);
        // coordinates (p, r, s, q); E = (p, r), H = (p, s), F = (r, q), G = (s, q)
        let i = mor(d.h(), &x, &[vec![1, 0], vec![0, 0], vec![0, 1], vec![0, 0]]);
        let j = mor(d.e(), &x, &[vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0]]);
        let m = mor(&x, d.f(), &[vec![0, 1, 0, 0], vec![0, 0, 0, 1]]);
        let n = mor(&x, d.g(), &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        let e = DiagramExtension { x, i, j, m, n };
        assert!(validate_extension(&d, &e).is_empty());
    }

    #[test]
    fn uniqueness_examples() {
        let u = check_uniqueness(&all_split()).unwrap();
        assert!(u.alpha.is_zero());
        assert!(!u.unique);

        // Q free over Z/4: Ext¹(Q, P) = 0
        let z2 = PresentedModule::cyclic(r4(), 2);
        let z4 = PresentedModule::free(r4(), 1);
        let d = Diagram3x3::new(split(&z2, &z2), split(&z2, &z4), split(&z2, &z2), split(&z2, &z4));
        assert!(check_uniqueness(&d).unwrap().unique);

        let zz = PresentedModule::free(z(), 1);
        let zz2 = PresentedModule::free(z(), 2);
        let z2 = PresentedModule::cyclic(z(), 2);
        let d = Diagram3x3::new(
            SequenceMaps::new(mor(&zz, &zz, &[vec![2]]), mor(&zz, &z2, &[vec![1]])),
            SequenceMaps::new(mor(&zz, &zz, &[vec![2]]), mor(&zz, &z2, &[vec![1]])),
            SequenceMaps::new(mor(&zz, &zz2, &[vec![1], vec![0]]), mor(&zz2, &zz, &[vec![0, 1]])),
            split(&z2, &z2),
        );
        let u = check_uniqueness(&d).unwrap();
        assert!(u.unique);
        assert!(!u.alpha.is_zero());
    }

    #[test]
    fn extend_homomorphism_examples() {
        let z2 = PresentedModule::cyclic(r4(), 2);
        let z4 = PresentedModule::free(r4(), 1);
        let incl = mor(&z2, &z4, &[vec![2]]);
        let lam = mor(&z2, &z4, &[vec![2]]);
        let big = extend_homomorphism(&lam, &incl).unwrap();
        assert!(big.compose(&incl).equals(&lam));
        let lam = mor(&z2, &z2, &[vec![1]]);
        assert_eq!(extend_homomorphism(&lam, &incl).unwrap_err(), NotExtendable);
        let f = mor(&z4, &z2, &[vec![1]]);
        let id = ModuleMorphism::identity(&z4);
        assert!(extend_homomorphism(&f, &id).unwrap().equals(&f));
    }

    #[test]
    fn injective_examples() {
        assert!(is_injective_module(&PresentedModule::free(r4(), 1)));
        assert!(!is_injective_module(&PresentedModule::cyclic(r4(), 2)));
        assert!(is_injective_module(&PresentedModule::zero(r4())));
        assert!(is_injective_module(&PresentedModule::cyclic(RingSpec::IntegersMod(12), 3)));
        assert!(!is_injective_module(&PresentedModule::cyclic(z(), 5)));
        assert!(is_injective_module(&PresentedModule::zero(z())));
    }

    #[test]
    fn compatible_iso_examples() {
        let d = all_split();
        let ctx = DiagramContext::new(&d).unwrap();
        let e1 = ctx.extension_from_class(&ctx.xi().unwrap());
        let phi = compatible_isomorphism(&ctx, &e1, &e1).unwrap();
        assert!(phi.is_isomorphism());

        let lifts = ctx.enumerate_lifts().unwrap().unwrap();
        assert_eq!(lifts.len(), 2);
        let e2 = ctx.extension_from_class(&lifts[1]);
        assert!(validate_extension(&d, &e2).is_empty());
        assert!(matches!(
            compatible_isomorphism(&ctx, &e1, &e2),
            Err(DiagramError::ClassesDiffer)
        ));

        let xi = ctx.xi().unwrap();
        let p = d.p().generators();
        let g = ctx.ext1_y.resolution().rank(0);
        let mut b = ExactMatrix::zeros(r4(), p, g);
        for c in 0..g {
            b.set(0, c, int(c as i64 + 1));
        }
        let e3 = ctx.representative_variant(&xi, &b);
        assert!(validate_extension(&d, &e3).is_empty());
        compatible_isomorphism(&ctx, &e1, &e3).unwrap();
    }

    #[test]
    fn degenerate_zero_p() {
        let zero = PresentedModule::zero(r4());
        let z2 = PresentedModule::cyclic(r4(), 2);
        let top = SequenceMaps::new(ModuleMorphism::zero(&zero, &z2), ModuleMorphism::identity(&z2));
        let d = Diagram3x3::new(top.clone(), split(&z2, &z2), top, split(&z2, &z2));
        let e = extend_diagram(&d).unwrap();
        assert!(validate_extension(&d, &e).is_empty());
        assert!(e.x.is_isomorphic(&build_y(&d).unwrap().y));
    }
}
