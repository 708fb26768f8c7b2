//! Hexagon-shaped diagrams solved by folding their outer frame into a
//! 3×3 extension problem.
//!
//! ```text
//!          B1 ──topB──▶ B2
//!        ↗    ↘      ↗    ↘ r
//!   A1          center       A4
//!   β ↘       ↗      ↘    ↗ s
//!          A2 ───d───▶ A3
//! ```
//!
//! `alpha: A1 → B1`, the diagonals are `B1 ─j→ center ─curv→ A3` and
//! `A2 ─i→ center ─c→ B2`.

use thiserror::Error;

use crate::diagram::{
    compatible_isomorphism, extend_diagram, validate_diagram1, DiagramContext, DiagramError,
    DiagramExtension, Diagram3x3, SequenceMaps, Violation,
};
use crate::fgmod::{
    cokernel, direct_sum, image, induced_on_quotient, is_exact, kernel, lift_through_mono,
    ModuleMorphism, PresentedModule,
};

#[derive(Debug, Clone, Error)]
pub enum HexagonError {
    #[error("invalid frame: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    FrameInvalid(Vec<Violation>),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Clone, Debug)]
pub struct HexagonFrame {
    pub alpha: ModuleMorphism,
    pub beta: ModuleMorphism,
    pub top_b: ModuleMorphism,
    pub d: ModuleMorphism,
    pub r: ModuleMorphism,
    pub s: ModuleMorphism,
}

impl HexagonFrame {
    pub fn a1(&self) -> &PresentedModule {
        self.alpha.source()
    }
    pub fn b1(&self) -> &PresentedModule {
        self.alpha.target()
    }
    pub fn b2(&self) -> &PresentedModule {
        self.top_b.target()
    }
    pub fn a2(&self) -> &PresentedModule {
        self.beta.target()
    }
    pub fn a3(&self) -> &PresentedModule {
        self.d.target()
    }
    pub fn a4(&self) -> &PresentedModule {
        self.s.target()
    }
}

fn exact_at(name: &str, f: &ModuleMorphism, g: &ModuleMorphism, out: &mut Vec<Violation>) {
    if f.target() != g.source() {
        out.push(Violation {
            location: name.into(),
            detail: "maps are not composable".into(),
        });
        return;
    }
    let rep = is_exact(&[f.clone(), g.clone()], false, false).expect("composable");
    if !rep.is_exact() {
        out.push(Violation {
            location: name.into(),
            detail: format!("{:?}", rep.positions[0]),
        });
    }
}

fn contained(a: &ModuleMorphism, b: &ModuleMorphism) -> bool {
    (0..a.matrix().cols()).all(|c| b.image_contains(&a.matrix().column(c)))
}

pub fn validate_frame(f: &HexagonFrame) -> Vec<Violation> {
    let mut out = Vec::new();
    let ends = [
        ("beta", f.beta.source() == f.a1()),
        ("topB", f.top_b.source() == f.b1()),
        ("d", f.d.source() == f.a2()),
        ("r", f.r.source() == f.b2() && f.r.target() == f.a4()),
        ("s", f.s.source() == f.a3()),
    ];
    for (name, ok) in ends {
        if !ok {
            out.push(Violation {
                location: name.into(),
                detail: "wrong source or target".into(),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let ka = kernel(&f.alpha);
    let kb = kernel(&f.beta);
    if !f.beta.compose(&ka.inclusion).is_zero() || !f.alpha.compose(&kb.inclusion).is_zero() {
        out.push(Violation {
            location: "A1".into(),
            detail: "ker(alpha) differs from ker(beta)".into(),
        });
    }
    exact_at("B1", &f.alpha, &f.top_b, &mut out);
    exact_at("B2", &f.top_b, &f.r, &mut out);
    exact_at("A2", &f.beta, &f.d, &mut out);
    exact_at("A3", &f.d, &f.s, &mut out);
    if !contained(&f.r, &f.s) || !contained(&f.s, &f.r) {
        out.push(Violation {
            location: "A4".into(),
            detail: "im(r) differs from im(s)".into(),
        });
    }
    out
}

/// The folded diagram with the identifications used to build it.
#[derive(Clone, Debug)]
pub struct FoldedFrame {
    pub frame: HexagonFrame,
    pub diagram: Diagram3x3,
    /// `A1 → P = A1 / ker(alpha)`.
    pub to_p: ModuleMorphism,
    /// `R = im(d) ↪ A3`.
    pub incl_r: ModuleMorphism,
    /// `S = im(topB) ↪ B2`.
    pub incl_s: ModuleMorphism,
    /// `Q = im(s) ↪ A4`.
    pub incl_q: ModuleMorphism,
}

impl FoldedFrame {
    /// Rebuild the frame maps from the diagram and the identifications.
    pub fn unfold(&self) -> HexagonFrame {
        let d = &self.diagram;
        HexagonFrame {
            alpha: d.col_left.inject.compose(&self.to_p),
            beta: d.row_top.inject.compose(&self.to_p),
            top_b: d.row_bottom.inject.compose(&d.col_left.project),
            d: d.col_right.inject.compose(&d.row_top.project),
            r: self.incl_q.compose(&d.row_bottom.project),
            s: self.incl_q.compose(&d.col_right.project),
        }
    }
}

pub fn fold_frame(f: &HexagonFrame) -> Result<FoldedFrame, HexagonError> {
    let v = validate_frame(f);
    if !v.is_empty() {
        return Err(HexagonError::FrameInvalid(v));
    }
    let q = cokernel(&kernel(&f.alpha).inclusion);
    let mu = induced_on_quotient(&q, &f.alpha).expect("alpha kills its kernel");
    let nu = induced_on_quotient(&q, &f.beta).expect("beta kills ker(alpha)");
    let im_d = image(&f.d);
    let im_b = image(&f.top_b);
    let im_s = image(&f.s);
    let r_q = lift_through_mono(&f.r, &im_s.inclusion).expect("im(r) ⊆ im(s)");
    let diagram = Diagram3x3::new(
        SequenceMaps::new(nu, im_d.corestriction.clone()),
        SequenceMaps::new(im_b.inclusion.clone(), r_q),
        SequenceMaps::new(mu, im_b.corestriction.clone()),
        SequenceMaps::new(im_d.inclusion.clone(), im_s.corestriction.clone()),
    );
    let v = validate_diagram1(&diagram);
    if !v.is_empty() {
        return Err(HexagonError::FrameInvalid(v));
    }
    Ok(FoldedFrame {
        frame: f.clone(),
        diagram,
        to_p: q.projection,
        incl_r: im_d.inclusion,
        incl_s: im_b.inclusion,
        incl_q: im_s.inclusion,
    })
}

/// The frame `P → H → G → Q`, `P → E → F → Q` of a diagram.
pub fn frame_from_diagram(d: &Diagram3x3) -> HexagonFrame {
    HexagonFrame {
        alpha: d.col_left.inject.clone(),
        beta: d.row_top.inject.clone(),
        top_b: d.row_bottom.inject.compose(&d.col_left.project),
        d: d.col_right.inject.compose(&d.row_top.project),
        r: d.row_bottom.project.clone(),
        s: d.col_right.project.clone(),
    }
}

/// Enlarge a frame by an extra kernel `K` in `A1` and an extra cokernel
/// `C` in `A4`; folding is unchanged up to identification.
pub fn padded_frame(f: &HexagonFrame, k: &PresentedModule, c: &PresentedModule) -> HexagonFrame {
    let a1 = direct_sum(f.a1(), k);
    let a4 = direct_sum(f.a4(), c);
    let pad = |m: &ModuleMorphism| m.compose(&a1.projections[0]);
    let lift = |m: &ModuleMorphism| a4.injections[0].compose(m);
    HexagonFrame {
        alpha: pad(&f.alpha),
        beta: pad(&f.beta),
        top_b: f.top_b.clone(),
        d: f.d.clone(),
        r: lift(&f.r),
        s: lift(&f.s),
    }
}

#[derive(Clone, Debug)]
pub struct SolvedHexagon {
    pub frame: HexagonFrame,
    pub center: PresentedModule,
    pub i: ModuleMorphism,
    pub j: ModuleMorphism,
    pub c: ModuleMorphism,
    pub curv: ModuleMorphism,
}

impl SolvedHexagon {
    pub fn from_extension(frame: &HexagonFrame, ext: &DiagramExtension) -> Self {
        SolvedHexagon {
            frame: frame.clone(),
            center: ext.x.clone(),
            i: ext.j.clone(),
            j: ext.i.clone(),
            c: ext.n.clone(),
            curv: ext.m.clone(),
        }
    }

    pub fn to_extension(&self) -> DiagramExtension {
        DiagramExtension {
            x: self.center.clone(),
            i: self.j.clone(),
            j: self.i.clone(),
            m: self.curv.clone(),
            n: self.c.clone(),
        }
    }
}

pub fn solve_hexagon(f: &HexagonFrame) -> Result<SolvedHexagon, HexagonError> {
    let folded = fold_frame(f)?;
    let ext = extend_diagram(&folded.diagram)?;
    let h = SolvedHexagon::from_extension(f, &ext);
    let v = verify_hexagon(&h);
    assert!(v.is_empty(), "unfolded solution violates the hexagon: {v:?}");
    Ok(h)
}

pub fn verify_hexagon(h: &SolvedHexagon) -> Vec<Violation> {
    let f = &h.frame;
    let mut out = Vec::new();
    let ends = [
        ("i", h.i.source() == f.a2() && h.i.target() == &h.center),
        ("j", h.j.source() == f.b1() && h.j.target() == &h.center),
        ("c", h.c.source() == &h.center && h.c.target() == f.b2()),
        ("curv", h.curv.source() == &h.center && h.curv.target() == f.a3()),
    ];
    for (name, ok) in ends {
        if !ok {
            out.push(Violation {
                location: name.into(),
                detail: "wrong source or target".into(),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let names = ["left", "middle", "right"];
    for (name, a, b) in [
        ("diagonal B1→center→A3", &h.j, &h.curv),
        ("diagonal A2→center→B2", &h.i, &h.c),
    ] {
        let rep = is_exact(&[a.clone(), b.clone()], true, true).expect("composable");
        for k in rep.failures() {
            out.push(Violation {
                location: format!("{name}/{}", names[k]),
                detail: format!("{:?}", rep.positions[k]),
            });
        }
    }
    let identities = [
        ("c∘j = topB", h.c.compose(&h.j), f.top_b.clone()),
        ("curv∘i = d", h.curv.compose(&h.i), f.d.clone()),
        ("i∘beta = j∘alpha", h.i.compose(&f.beta), h.j.compose(&f.alpha)),
        ("s∘curv = r∘c", f.s.compose(&h.curv), f.r.compose(&h.c)),
    ];
    for (name, a, b) in identities {
        if !a.equals(&b) {
            out.push(Violation {
                location: name.into(),
                detail: "does not commute".into(),
            });
        }
    }
    out
}

/// `φ: center1 → center2` with `φ i = i′`, `φ j = j′`, `c′ φ = c`, `curv′ φ = curv`.
pub fn hexagon_compatible_iso(
    h1: &SolvedHexagon,
    h2: &SolvedHexagon,
) -> Result<ModuleMorphism, HexagonError> {
    let folded = fold_frame(&h1.frame)?;
    let ctx = DiagramContext::new(&folded.diagram)?;
    let phi = compatible_isomorphism(&ctx, &h1.to_extension(), &h2.to_extension())?;
    assert!(phi.compose(&h1.i).equals(&h2.i));
    assert!(phi.compose(&h1.j).equals(&h2.j));
    assert!(h2.c.compose(&phi).equals(&h1.c));
    assert!(h2.curv.compose(&phi).equals(&h1.curv));
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{example_a, injective_frame, synthetic_frame};
    use crate::linalg::{int, ExactMatrix, RingSpec};

    fn r4() -> RingSpec {
        RingSpec::IntegersMod(4)
    }

    #[test]
    fn zero_frame_folds() {
        let zero = PresentedModule::zero(r4());
        let z = ModuleMorphism::identity(&zero);
        let f = HexagonFrame {
            alpha: z.clone(),
            beta: z.clone(),
            top_b: z.clone(),
            d: z.clone(),
            r: z.clone(),
            s: z,
        };
        let folded = fold_frame(&f).unwrap();
        assert!(folded.diagram.p().is_zero_module() && folded.diagram.q().is_zero_module());
        let h = solve_hexagon(&f).unwrap();
        assert!(h.center.is_zero_module());
    }

    #[test]
    fn synthetic_frame_folds_and_solves() {
        let f = synthetic_frame();
        let folded = fold_frame(&f).unwrap();
        assert_eq!(folded.diagram.p().invariant_factors(), vec![int(2)]);
        let back = folded.unfold();
        assert!(back.alpha.equals(&f.alpha) && back.beta.equals(&f.beta));
        assert!(back.top_b.equals(&f.top_b) && back.d.equals(&f.d));
        assert!(back.r.equals(&f.r) && back.s.equals(&f.s));
        let h = solve_hexagon(&f).unwrap();
        assert!(verify_hexagon(&h).is_empty());
        assert!(h.c.compose(&h.j).equals(&f.top_b));
        assert!(h.curv.compose(&h.i).equals(&f.d));
    }

    #[test]
    fn mismatched_kernels_are_rejected() {
        let f = synthetic_frame();
        let z4 = f.a1().clone();
        let bad = HexagonFrame {
            beta: ModuleMorphism::zero(&z4, f.a2()),
            ..f
        };
        match fold_frame(&bad) {
            Err(HexagonError::FrameInvalid(v)) => assert!(v.iter().any(|x| x.location == "A1")),
            other => panic!("expected FrameInvalid, got {other:?}"),
        }
    }

    #[test]
    fn obstructed_frame() {
        assert!(matches!(
            solve_hexagon(&frame_from_diagram(&example_a())),
            Err(HexagonError::Diagram(DiagramError::NotExtendable(_)))
        ));
    }

    #[test]
    fn injective_frame_solutions_are_compatible() {
        let f = injective_frame();
        let h1 = solve_hexagon(&f).unwrap();
        let folded = fold_frame(&f).unwrap();
        let ctx = DiagramContext::new(&folded.diagram).unwrap();
        let xi = ctx.xi().unwrap();
        let p = folded.diagram.p().generators();
        let g = ctx.ext1_y.resolution().rank(0);
        let mut b = ExactMatrix::zeros(r4(), p, g);
        b.set(0, 0, int(3));
        let h2 = SolvedHexagon::from_extension(&f, &ctx.representative_variant(&xi, &b));
        assert!(verify_hexagon(&h2).is_empty());
        hexagon_compatible_iso(&h1, &h2).unwrap();
    }

    #[test]
    fn zero_curv_is_caught() {
        let f = synthetic_frame();
        let mut h = solve_hexagon(&f).unwrap();
        h.curv = ModuleMorphism::zero(h.curv.source(), h.curv.target());
        let v = verify_hexagon(&h);
        assert!(v.iter().any(|x| x.location.starts_with("diagonal B1")), "{v:?}");
    }

    #[test]
    fn padded_frame_folds_to_same_diagram_shape() {
        let f = synthetic_frame();
        let k = PresentedModule::cyclic(r4(), 2);
        let padded = padded_frame(&f, &k, &k);
        let folded = fold_frame(&padded).unwrap();
        assert!(folded.diagram.p().is_isomorphic(&fold_frame(&f).unwrap().diagram.p()));
        assert!(verify_hexagon(&solve_hexagon(&padded).unwrap()).is_empty());
    }
}
