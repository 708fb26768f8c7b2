//! Seeded property runner over random diagrams.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{
    compatible_isomorphism, extend_diagram, is_injective_module, shift_extension, uniqueness_in,
    validate_extension, DiagramContext, DiagramError, DiagramExtension,
};
use crate::fgmod::ModuleMorphism;
use crate::generate::{case_rng, random_diagram, GeneratorConfig};
use crate::linalg::{int, ExactMatrix, RingSpec};

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub ring: RingSpec,
    pub seed: u64,
    pub count: u64,
    pub max_order: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CaseOutcome {
    pub case: u64,
    pub orders: [String; 4],
    pub obstruction: Vec<String>,
    pub ext2_invariants: Vec<String>,
    pub extendable: bool,
    pub unique: Option<bool>,
    pub injective_p: bool,
    pub extensions_checked: usize,
    pub isomorphisms_checked: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FuzzReport {
    pub ring: String,
    pub seed: u64,
    pub count: u64,
    pub max_order: u64,
    pub extendable: u64,
    pub unique: u64,
    pub injective_p: u64,
    pub failures: u64,
    pub cases: Vec<CaseOutcome>,
}

fn strs<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn random_hom<R: Rng>(q: &crate::fgmod::PresentedModule, p: &crate::fgmod::PresentedModule, rng: &mut R) -> ModuleMorphism {
    let hom = crate::ext::ext_module(0, q, p).expect("same ring");
    let coords: Vec<_> = hom
        .orders()
        .iter()
        .map(|o| match crate::linalg::to_i64(o) {
            Some(0) | None => int(rng.gen_range(-2..=2)),
            Some(o) => int(rng.gen_range(0..o)),
        })
        .collect();
    hom.morphism_of_class(&hom.class(&coords))
}

fn random_b<R: Rng>(ctx: &DiagramContext, rng: &mut R) -> ExactMatrix {
    let ring = ctx.diagram.ring();
    let rows = ctx.diagram.p().generators();
    let cols = ctx.ext1_y.resolution().rank(0);
    let mut b = ExactMatrix::zeros(ring, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            b.set(r, c, int(rng.gen_range(-2..=2)));
        }
    }
    b
}

const MAX_LIFTS: usize = 4;

/// Checks every extension law on case `k`.
pub fn run_case(cfg: &FuzzConfig, k: u64) -> CaseOutcome {
    let mut rng = case_rng(cfg.seed, k);
    let d = random_diagram(&GeneratorConfig::new(cfg.ring, cfg.max_order), &mut rng);
    let order = |m: &crate::fgmod::PresentedModule| {
        m.order().map_or("inf".to_string(), |o| o.to_string())
    };
    let mut out = CaseOutcome {
        case: k,
        orders: [order(d.p()), order(d.r()), order(d.s()), order(d.q())],
        obstruction: vec![],
        ext2_invariants: vec![],
        extendable: false,
        unique: None,
        injective_p: is_injective_module(d.p()),
        extensions_checked: 0,
        isomorphisms_checked: 0,
        failures: vec![],
    };
    let ctx = match DiagramContext::new(&d) {
        Ok(c) => c,
        Err(e) => {
            out.failures.push(format!("context: {e}"));
            return out;
        }
    };
    out.obstruction = strs(ctx.report.baer_sum.coords());
    out.ext2_invariants = strs(ctx.ext2_q.orders());
    out.extendable = ctx.report.is_zero;

    match extend_diagram(&d) {
        Ok(ext) => {
            if !ctx.report.is_zero {
                out.failures.push("extended although the obstruction is nonzero".into());
            }
            let v = validate_extension(&d, &ext);
            if !v.is_empty() {
                out.failures.push(format!("invalid extension: {v:?}"));
            }
            out.extensions_checked += 1;
        }
        Err(DiagramError::NotExtendable(_)) => {
            if ctx.report.is_zero {
                out.failures.push("not extended although the obstruction vanishes".into());
            }
            if out.injective_p {
                out.failures.push("injective P but not extendable".into());
            }
            return out;
        }
        Err(e) => {
            out.failures.push(format!("extend: {e}"));
            return out;
        }
    }

    let uniq = uniqueness_in(&ctx);
    out.unique = Some(uniq.unique);
    if !(uniq.unique || out.injective_p) {
        return out;
    }
    let lifts = match ctx.enumerate_lifts() {
        Ok(Some(l)) => l,
        Ok(None) => vec![ctx.xi().expect("extendable")],
        Err(e) => {
            out.failures.push(format!("lifts: {e}"));
            return out;
        }
    };
    let mut exts: Vec<DiagramExtension> = lifts
        .iter()
        .take(MAX_LIFTS)
        .map(|xi| ctx.extension_from_class(xi))
        .collect();
    let xi = &lifts[0];
    exts.push(ctx.representative_variant(xi, &random_b(&ctx, &mut rng)));
    if out.injective_p {
        let lr = random_hom(d.r(), d.p(), &mut rng);
        let ls = random_hom(d.s(), d.p(), &mut rng);
        exts.push(shift_extension(&d, &exts[0], &lr, &ls));
    }
    for (n, e) in exts.iter().enumerate() {
        let v = validate_extension(&d, e);
        if !v.is_empty() {
            out.failures.push(format!("solution {n} invalid: {v:?}"));
            return out;
        }
    }
    out.extensions_checked += exts.len();
    let classes: Vec<_> = exts.iter().map(|e| ctx.extension_class(e)).collect();
    if classes.iter().any(|c| c.as_ref().ok() != classes[0].as_ref().ok()) {
        out.failures.push("solutions have different classes in Ext¹(Y, P)".into());
    }
    for a in 0..exts.len() {
        for b in a + 1..exts.len() {
            match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                compatible_isomorphism(&ctx, &exts[a], &exts[b])
            })) {
                Ok(Ok(_)) => out.isomorphisms_checked += 1,
                Ok(Err(e)) => out.failures.push(format!("iso {a}-{b}: {e}")),
                Err(_) => out.failures.push(format!("iso {a}-{b}: compatibility equations fail")),
            }
        }
    }
    out
}

pub fn ring_name(r: RingSpec) -> String {
    match r {
        RingSpec::Integers => "Z".into(),
        RingSpec::IntegersMod(m) => format!("Zmod{m}"),
    }
}

/// Cases run in parallel; the report lists them in case order.
pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let cases: Vec<CaseOutcome> = (0..cfg.count).into_par_iter().map(|k| run_case(cfg, k)).collect();
    let count = |f: &dyn Fn(&CaseOutcome) -> bool| cases.iter().filter(|c| f(c)).count() as u64;
    FuzzReport {
        ring: ring_name(cfg.ring),
        seed: cfg.seed,
        count: cfg.count,
        max_order: cfg.max_order,
        extendable: count(&|c| c.extendable),
        unique: count(&|c| c.unique == Some(true)),
        injective_p: count(&|c| c.injective_p),
        failures: count(&|c| !c.failures.is_empty()),
        cases,
    }
}
