//! Brute-force ground truth for tiny finite modules.
//!
//! Nothing here uses the Smith form or the module constructions: a module
//! is materialized as the set of cosets of its relation lattice inside
//! `(Z/N)^g`, found by closure, and every question is answered by
//! enumeration.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::diagram::Diagram3x3;
use crate::fgmod::{ModuleMorphism, PresentedModule, ShortExactSequence};
use crate::linalg::{to_i64, Int, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("module is infinite")]
    Infinite,
    #[error("entry does not fit in 64 bits")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_order: u64,
    pub max_candidates: u64,
    pub deadline: Option<Duration>,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_order: 16,
            max_candidates: 20_000_000,
            deadline: None,
        }
    }
}

impl EnumerationBudget {
    /// `HEXEXT_BUDGET` overrides the candidate limit.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(n) = std::env::var("HEXEXT_BUDGET").ok().and_then(|v| v.parse().ok()) {
            b.max_candidates = n;
        }
        b
    }
}

struct Meter {
    budget: EnumerationBudget,
    start: Instant,
    used: u64,
}

impl Meter {
    fn new(budget: EnumerationBudget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            used: 0,
        }
    }

    fn charge(&mut self, n: u64) -> Result<(), OracleError> {
        self.used += n;
        if self.used > self.budget.max_candidates {
            return Err(OracleError::BudgetExceeded(format!(
                "more than {} candidates",
                self.budget.max_candidates
            )));
        }
        if let Some(d) = self.budget.deadline {
            if self.start.elapsed() > d {
                return Err(OracleError::BudgetExceeded("deadline passed".into()));
            }
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    // fraction-free elimination
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
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
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A finite module as an explicit set of elements.
#[derive(Clone, Debug)]
pub struct FiniteModule {
    gens: usize,
    modulus: u64,
    class_of: Vec<u32>,
    reps: Vec<Vec<u64>>,
}

impl FiniteModule {
    pub fn from_presented(m: &PresentedModule, budget: &EnumerationBudget) -> Result<Self, OracleError> {
        let g = m.generators();
        let rel = m.relations();
        let cols: Vec<Vec<i64>> = (0..rel.cols())
            .map(|c| {
                rel.column(c)
                    .iter()
                    .map(|x| to_i64(x).ok_or(OracleError::Overflow))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let modulus = match m.ring() {
            RingSpec::IntegersMod(q) => q,
            RingSpec::Integers => {
                if g == 0 {
                    1
                } else {
                    let mut n = 0u64;
                    for pick in choose(cols.len(), g) {
                        let minor: Vec<Vec<i128>> = (0..g)
                            .map(|r| pick.iter().map(|&c| cols[c][r] as i128).collect())
                            .collect();
                        n = gcd(n, det_i128(&minor).unsigned_abs() as u64);
                    }
                    if n == 0 {
                        return Err(OracleError::Infinite);
                    }
                    n
                }
            }
        };
        let size = (modulus as u128).checked_pow(g as u32).unwrap_or(u128::MAX);
        if size > 1 << 22 {
            return Err(OracleError::BudgetExceeded(format!("coordinate space of size {size}")));
        }
        let size = size as usize;
        let encode = |v: &[u64]| v.iter().rev().fold(0usize, |acc, &x| acc * modulus as usize + x as usize);
        let decode = |mut code: usize| {
            let mut v = vec![0u64; g];
            for x in v.iter_mut() {
                *x = (code % modulus as usize) as u64;
                code /= modulus as usize;
            }
            v
        };
        let red = |x: i64| x.rem_euclid(modulus as i64) as u64;
        let gens_l: Vec<Vec<u64>> = cols.iter().map(|c| c.iter().map(|&x| red(x)).collect()).collect();
        // closure of the relation columns
        let mut in_l = vec![false; size];
        in_l[0] = true;
        let mut lattice = vec![vec![0u64; g]];
        let mut k = 0;
        while k < lattice.len() {
            let v = lattice[k].clone();
            for gen in &gens_l {
                let w: Vec<u64> = v.iter().zip(gen).map(|(a, b)| (a + b) % modulus).collect();
                let c = encode(&w);
                if !in_l[c] {
                    in_l[c] = true;
                    lattice.push(w);
                }
            }
            k += 1;
        }
        let order = size / lattice.len();
        if order as u64 > budget.max_order.max(1) * budget.max_order.max(1) * 64 {
            return Err(OracleError::BudgetExceeded(format!("module of order {order}")));
        }
        let mut class_of = vec![u32::MAX; size];
        let mut reps = Vec::new();
        for code in 0..size {
            if class_of[code] != u32::MAX {
                continue;
            }
            let v = decode(code);
            let id = reps.len() as u32;
            for l in &lattice {
                let w: Vec<u64> = v.iter().zip(l).map(|(a, b)| (a + b) % modulus).collect();
                class_of[encode(&w)] = id;
            }
            reps.push(v);
        }
        Ok(FiniteModule {
            gens: g,
            modulus,
            class_of,
            reps,
        })
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn generators(&self) -> usize {
        self.gens
    }

    fn encode(&self, v: &[u64]) -> usize {
        v.iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.modulus as usize + x as usize)
    }

    /// Element of an integer coordinate vector.
    pub fn element(&self, v: &[i64]) -> u32 {
        let w: Vec<u64> = v
            .iter()
            .map(|&x| x.rem_euclid(self.modulus as i64) as u64)
            .collect();
        self.class_of[self.encode(&w)]
    }

    pub fn zero(&self) -> u32 {
        self.class_of[0]
    }

    pub fn generator(&self, k: usize) -> u32 {
        let mut v = vec![0i64; self.gens];
        v[k] = 1;
        self.element(&v)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let w: Vec<u64> = self.reps[a as usize]
            .iter()
            .zip(&self.reps[b as usize])
            .map(|(x, y)| (x + y) % self.modulus)
            .collect();
        self.class_of[self.encode(&w)]
    }

    pub fn scale(&self, a: u32, c: i64) -> u32 {
        let v: Vec<i64> = self.reps[a as usize].iter().map(|&x| x as i64 * c).collect();
        self.element(&v)
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.scale(a, -1)
    }

    pub fn rep(&self, a: u32) -> &[u64] {
        &self.reps[a as usize]
    }

    /// `Σ coeffs_k · images_k`.
    fn combine(&self, coeffs: &[u64], images: &[u32]) -> u32 {
        let mut acc = vec![0u64; self.gens];
        for (c, &img) in coeffs.iter().zip(images) {
            if *c == 0 {
                continue;
            }
            for (a, r) in acc.iter_mut().zip(&self.reps[img as usize]) {
                *a = (*a + c * r) % self.modulus;
            }
        }
        self.class_of[self.encode(&acc)]
    }

    /// Number of elements killed by `n`.
    pub fn torsion_count(&self, n: i64) -> usize {
        (0..self.order() as u32).filter(|&x| self.scale(x, n) == self.zero()).count()
    }

    /// Size of `n · M`.
    pub fn multiple_count(&self, n: i64) -> usize {
        let mut seen = vec![false; self.order()];
        for x in 0..self.order() as u32 {
            seen[self.scale(x, n) as usize] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }
}

/// A morphism of finite modules as the images of the source generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMap {
    pub images: Vec<u32>,
}

impl FinMap {
    pub fn from_morphism(f: &ModuleMorphism, tgt: &FiniteModule) -> Result<Self, OracleError> {
        let images = (0..f.matrix().cols())
            .map(|c| {
                let v: Vec<i64> = f
                    .matrix()
                    .column(c)
                    .iter()
                    .map(|x| to_i64(x).ok_or(OracleError::Overflow))
                    .collect::<Result<_, _>>()?;
                Ok(tgt.element(&v))
            })
            .collect::<Result<_, OracleError>>()?;
        Ok(FinMap { images })
    }

    /// The generator images as coordinate columns of `target`.
    pub fn to_morphism(&self, source: &PresentedModule, target: &PresentedModule, ft: &FiniteModule) -> ModuleMorphism {
        let cols: Vec<Vec<Int>> = self
            .images
            .iter()
            .map(|&y| ft.rep(y).iter().map(|&c| Int::from(c)).collect())
            .collect();
        let m = crate::linalg::ExactMatrix::from_columns(source.ring(), target.generators(), &cols);
        ModuleMorphism::new(source.clone(), target.clone(), m).expect("enumerated morphisms are well defined")
    }

    pub fn apply(&self, src: &FiniteModule, tgt: &FiniteModule, x: u32) -> u32 {
        tgt.combine(src.rep(x), &self.images)
    }

    /// `self ∘ inner` on the generators of `inner`'s source.
    pub fn compose(&self, inner: &FinMap, mid: &FiniteModule, tgt: &FiniteModule) -> FinMap {
        FinMap {
            images: inner.images.iter().map(|&y| self.apply(mid, tgt, y)).collect(),
        }
    }

    pub fn is_injective(&self, src: &FiniteModule, tgt: &FiniteModule) -> bool {
        let z = tgt.zero();
        (0..src.order() as u32).filter(|&x| self.apply(src, tgt, x) == z).count() == 1
    }

    pub fn is_surjective(&self, src: &FiniteModule, tgt: &FiniteModule) -> bool {
        let mut seen = vec![false; tgt.order()];
        for x in 0..src.order() as u32 {
            seen[self.apply(src, tgt, x) as usize] = true;
        }
        seen.iter().all(|&b| b)
    }

    pub fn is_zero(&self, tgt: &FiniteModule) -> bool {
        self.images.iter().all(|&y| y == tgt.zero())
    }
}

fn relation_columns(m: &PresentedModule) -> Result<Vec<Vec<i64>>, OracleError> {
    let rel = m.relations();
    (0..rel.cols())
        .map(|c| {
            rel.column(c)
                .iter()
                .map(|x| to_i64(x).ok_or(OracleError::Overflow))
                .collect()
        })
        .collect()
}

/// Every well-defined morphism `A → B`, duplicate-free.
pub fn enumerate_morphisms(
    a: &PresentedModule,
    fa: &FiniteModule,
    fb: &FiniteModule,
    budget: &EnumerationBudget,
) -> Result<Vec<FinMap>, OracleError> {
    let mut meter = Meter::new(*budget);
    let rel = relation_columns(a)?;
    let g = fa.generators();
    // each relation is checked once its last generator has an image
    let mut due: Vec<Vec<&[i64]>> = vec![Vec::new(); g];
    for col in &rel {
        if let Some(last) = col.iter().rposition(|&x| x != 0) {
            due[last].push(col);
        }
    }
    let candidates: Vec<u32> = (0..fb.order() as u32)
        .filter(|&y| fb.scale(y, fa.modulus as i64) == fb.zero())
        .collect();
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(g);
    extend_images(fb, &due, &candidates, &mut images, &mut out, &mut meter)?;
    Ok(out)
}

fn extend_images(
    fb: &FiniteModule,
    due: &[Vec<&[i64]>],
    candidates: &[u32],
    images: &mut Vec<u32>,
    out: &mut Vec<FinMap>,
    meter: &mut Meter,
) -> Result<(), OracleError> {
    let k = images.len();
    if k == due.len() {
        out.push(FinMap {
            images: images.clone(),
        });
        return Ok(());
    }
    meter.charge(candidates.len() as u64)?;
    for &y in candidates {
        images.push(y);
        if due[k]
            .iter()
            .all(|col| fb.combine_signed(&col[..=k], images) == fb.zero())
        {
            extend_images(fb, due, candidates, images, out, meter)?;
        }
        images.pop();
    }
    Ok(())
}

/// `N e_k` is a relation of the source, so `N · image_k` must vanish.
fn fa_modulus_ok(fa: &FiniteModule, fb: &FiniteModule, images: &[u32]) -> bool {
    images.iter().all(|&y| fb.scale(y, fa.modulus as i64) == fb.zero())
}

impl FiniteModule {
    fn combine_signed(&self, col: &[i64], images: &[u32]) -> u32 {
        let mut acc = self.zero();
        for (&c, &img) in col.iter().zip(images) {
            if c != 0 {
                acc = self.add(acc, self.scale(img, c));
            }
        }
        acc
    }
}

/// All abelian groups of order `n` that are modules over `ring`, as
/// diagonal presentations with prime-power orders.
pub fn iso_types(ring: RingSpec, n: u64) -> Vec<PresentedModule> {
    let mut primes = Vec::new();
    let mut x = n;
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            primes.push((p, e));
        }
        p += 1;
    }
    if x > 1 {
        primes.push((x, 1));
    }
    let cap = |p: u64| -> u32 {
        match ring {
            RingSpec::Integers => u32::MAX,
            RingSpec::IntegersMod(m) => {
                let mut v = 0;
                let mut mm = m;
                while mm % p == 0 {
                    mm /= p;
                    v += 1;
                }
                v
            }
        }
    };
    fn partitions(k: u32, max: u32) -> Vec<Vec<u32>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=k.min(max)).rev() {
            for mut rest in partitions(k - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut combos: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in primes {
        let parts = partitions(e, cap(p));
        let mut next = Vec::new();
        for c in &combos {
            for part in &parts {
                let mut c2 = c.clone();
                c2.extend(part.iter().map(|&k| p.pow(k)));
                next.push(c2);
            }
        }
        combos = next;
    }
    combos
        .into_iter()
        .map(|orders| {
            let orders: Vec<Int> = orders.into_iter().map(Int::from).collect();
            PresentedModule::diagonal(ring, &orders)
        })
        .collect()
}

fn prime_power_decomposition(f: &FiniteModule) -> Vec<u64> {
    // |M[p^k]| for increasing k determines the multiplicities
    let n = f.order() as u64;
    let mut out = Vec::new();
    let mut x = n;
    let mut p = 2;
    let mut primes = Vec::new();
    while p * p <= x {
        if x % p == 0 {
            primes.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        primes.push(x);
    }
    for p in primes {
        // r_k = log_p |M[p^k]| - log_p |M[p^{k-1}]| = number of cyclic factors of order ≥ p^k
        let mut counts = vec![0u32];
        let mut k = 1;
        loop {
            let c = f.torsion_count((p as i64).pow(k)) as u64;
            let mut e = 0;
            let mut y = c;
            while y > 1 {
                y /= p;
                e += 1;
            }
            counts.push(e);
            if c == f.order() as u64 {
                break;
            }
            k += 1;
        }
        for k in 1..counts.len() {
            let at_least_k = counts[k] - counts[k - 1];
            let at_least_next = if k + 1 < counts.len() {
                counts[k + 1] - counts[k]
            } else {
                0
            };
            for _ in 0..(at_least_k - at_least_next) {
                out.push(p.pow(k as u32));
            }
        }
    }
    out
}

/// `|Ext¹(Q, P)|` by counting lifts: with `Q ≅ ⊕ Z/q_j`, an extension is
/// fixed by the values `q_j x_j ∈ P[m/q_j]` of lifted generators, up to
/// changing each lift by `P`.
pub fn brute_ext1(q: &PresentedModule, p: &PresentedModule, budget: &EnumerationBudget) -> Result<u64, OracleError> {
    let fq = FiniteModule::from_presented(q, budget)?;
    let fp = FiniteModule::from_presented(p, budget)?;
    if (fq.order() * fp.order()) as u64 > budget.max_order * budget.max_order {
        return Err(OracleError::BudgetExceeded("|P|·|Q|".into()));
    }
    let mut count = 1u64;
    for qj in prime_power_decomposition(&fq) {
        let cocycles = match q.ring() {
            RingSpec::IntegersMod(m) => fp.torsion_count((m / qj) as i64),
            RingSpec::Integers => fp.order(),
        } as u64;
        let coboundaries = fp.multiple_count(qj as i64) as u64;
        count *= cocycles / coboundaries;
    }
    Ok(count)
}

/// `|Ext¹(Q, P)|` by enumerating middles: for each module type `X` of order
/// `|P||Q|`, count exact pairs `(ι, π)` and divide by the `Aut(X)` orbit
/// size `|Aut(X)| / |Hom(Q, P)|`.
pub fn brute_ext1_by_middles(
    q: &PresentedModule,
    p: &PresentedModule,
    budget: &EnumerationBudget,
) -> Result<u64, OracleError> {
    let ring = q.ring();
    let fq = FiniteModule::from_presented(q, budget)?;
    let fp = FiniteModule::from_presented(p, budget)?;
    let n = (fq.order() * fp.order()) as u64;
    if n > budget.max_order {
        return Err(OracleError::BudgetExceeded(format!("middle order {n}")));
    }
    let hom_qp = enumerate_morphisms(q, &fq, &fp, budget)?.len() as u64;
    let mut total = 0u64;
    for x in iso_types(ring, n) {
        let fx = FiniteModule::from_presented(&x, budget)?;
        let inj: Vec<FinMap> = enumerate_morphisms(p, &fp, &fx, budget)?
            .into_iter()
            .filter(|f| f.is_injective(&fp, &fx))
            .collect();
        let surj: Vec<FinMap> = enumerate_morphisms(&x, &fx, &fq, budget)?
            .into_iter()
            .filter(|f| f.is_surjective(&fx, &fq))
            .collect();
        let mut pairs = 0u64;
        for i in &inj {
            for s in &surj {
                if s.compose(i, &fx, &fq).is_zero(&fq) {
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            continue;
        }
        let aut = enumerate_morphisms(&x, &fx, &fx, budget)?
            .into_iter()
            .filter(|f| f.is_injective(&fx, &fx))
            .count() as u64;
        total += pairs * hom_qp / aut;
    }
    Ok(total)
}

/// Every exact `0 → P → X → Q → 0` with `X` running over the diagonal
/// module types of order `|P||Q|`.
pub fn enumerate_extension_sequences(
    q: &PresentedModule,
    p: &PresentedModule,
    budget: &EnumerationBudget,
) -> Result<Vec<ShortExactSequence>, OracleError> {
    let fq = FiniteModule::from_presented(q, budget)?;
    let fp = FiniteModule::from_presented(p, budget)?;
    let n = (fq.order() * fp.order()) as u64;
    if n > budget.max_order {
        return Err(OracleError::BudgetExceeded(format!("middle order {n}")));
    }
    let mut out = Vec::new();
    for x in iso_types(q.ring(), n) {
        let fx = FiniteModule::from_presented(&x, budget)?;
        let inj: Vec<FinMap> = enumerate_morphisms(p, &fp, &fx, budget)?
            .into_iter()
            .filter(|f| f.is_injective(&fp, &fx))
            .collect();
        let surj: Vec<FinMap> = enumerate_morphisms(&x, &fx, &fq, budget)?
            .into_iter()
            .filter(|f| f.is_surjective(&fx, &fq))
            .collect();
        for i in &inj {
            for s in &surj {
                if s.compose(i, &fx, &fq).is_zero(&fq) {
                    let iota = i.to_morphism(p, &x, &fx);
                    let pi = s.to_morphism(&x, q, &fq);
                    out.push(ShortExactSequence::new(iota, pi).expect("counted exact"));
                }
            }
        }
    }
    Ok(out)
}

/// Whether some `θ: X1 → X2` satisfies `θ ι1 = ι2` and `π2 θ = π1`.
pub fn brute_equivalent(
    s1: &ShortExactSequence,
    s2: &ShortExactSequence,
    budget: &EnumerationBudget,
) -> Result<bool, OracleError> {
    let mut meter = Meter::new(*budget);
    let fq = FiniteModule::from_presented(s1.right(), budget)?;
    let f1 = FiniteModule::from_presented(s1.middle(), budget)?;
    let f2 = FiniteModule::from_presented(s2.middle(), budget)?;
    let i1 = FinMap::from_morphism(s1.inject(), &f1)?;
    let i2 = FinMap::from_morphism(s2.inject(), &f2)?;
    let p1 = FinMap::from_morphism(s1.project(), &fq)?;
    let p2 = FinMap::from_morphism(s2.project(), &fq)?;
    let rel = relation_columns(s1.middle())?;
    // candidate images of each generator of X1: the fibre of π2 over π1(x)
    let fibres: Vec<Vec<u32>> = (0..f1.generators())
        .map(|k| {
            let target = p1.images[k];
            (0..f2.order() as u32)
                .filter(|&y| p2.apply(&f2, &fq, y) == target)
                .collect()
        })
        .collect();
    let total: u64 = fibres.iter().map(|f| f.len() as u64).product();
    meter.charge(total)?;
    let mut idx = vec![0usize; fibres.len()];
    if fibres.iter().any(|f| f.is_empty()) {
        return Ok(false);
    }
    loop {
        let images: Vec<u32> = idx.iter().zip(&fibres).map(|(&i, f)| f[i]).collect();
        let well_defined = rel
            .iter()
            .all(|col| f2.combine_signed(col, &images) == f2.zero())
            && fa_modulus_ok(&f1, &f2, &images);
        if well_defined {
            let theta = FinMap { images };
            if theta.compose(&i1, &f1, &f2) == i2 {
                return Ok(true);
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(false);
            }
            idx[k] += 1;
            if idx[k] == fibres[k].len() {
                idx[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// Baer's criterion: every map from an ideal extends to the ring.
pub fn brute_injective(p: &PresentedModule, budget: &EnumerationBudget) -> Result<bool, OracleError> {
    let fp = FiniteModule::from_presented(p, budget)?;
    match p.ring() {
        RingSpec::IntegersMod(m) => {
            for d in 1..=m {
                if m % d != 0 {
                    continue;
                }
                // a map (d) → P sends d to y with (m/d) y = 0; it extends iff y ∈ dP
                let mut in_dp = vec![false; fp.order()];
                for x in 0..fp.order() as u32 {
                    in_dp[fp.scale(x, d as i64) as usize] = true;
                }
                for y in 0..fp.order() as u32 {
                    if fp.scale(y, (m / d) as i64) == fp.zero() && !in_dp[y as usize] {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        RingSpec::Integers => {
            // a finite Z-module is injective iff divisible
            for n in 2..=(fp.order() as i64).max(2) {
                if fp.multiple_count(n) != fp.order() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Outcome of the exhaustive search for a middle object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiddleSearch {
    pub found: bool,
    pub middle_types: usize,
    pub candidates: u64,
}

/// Search every module `X` of order `|P||R||S||Q|` and every `i, j, m, n`
/// for a valid extension of the diagram.
pub fn brute_extension_exists(d: &Diagram3x3, budget: &EnumerationBudget) -> Result<MiddleSearch, OracleError> {
    let mut meter = Meter::new(*budget);
    let fin = |m: &PresentedModule| FiniteModule::from_presented(m, budget);
    let (fp, fe, fr, fh, fs, ff, fg, fq) = (
        fin(d.p())?,
        fin(d.e())?,
        fin(d.r())?,
        fin(d.h())?,
        fin(d.s())?,
        fin(d.f())?,
        fin(d.g())?,
        fin(d.q())?,
    );
    let nu = FinMap::from_morphism(&d.row_top.inject, &fe)?;
    let mu = FinMap::from_morphism(&d.col_left.inject, &fh)?;
    let e_r = FinMap::from_morphism(&d.row_top.project, &fr)?;
    let r_f = FinMap::from_morphism(&d.col_right.inject, &ff)?;
    let h_s = FinMap::from_morphism(&d.col_left.project, &fs)?;
    let s_g = FinMap::from_morphism(&d.row_bottom.inject, &fg)?;
    let f_q = FinMap::from_morphism(&d.col_right.project, &fq)?;
    let g_q = FinMap::from_morphism(&d.row_bottom.project, &fq)?;
    let d_ef = r_f.compose(&e_r, &fr, &ff);
    let t_hg = s_g.compose(&h_s, &fs, &fg);
    let order = (fp.order() * fr.order() * fs.order() * fq.order()) as u64;
    let types = iso_types(d.ring(), order);
    let mut candidates = 0u64;
    for x in &types {
        let fx = fin(x)?;
        let homs = |a: &PresentedModule, fa: &FiniteModule, fb: &FiniteModule| {
            enumerate_morphisms(a, fa, fb, budget)
        };
        let js: Vec<FinMap> = homs(d.e(), &fe, &fx)?
            .into_iter()
            .filter(|j| j.is_injective(&fe, &fx))
            .collect();
        let is: Vec<FinMap> = homs(d.h(), &fh, &fx)?
            .into_iter()
            .filter(|i| i.is_injective(&fh, &fx))
            .collect();
        let ms: Vec<FinMap> = homs(x, &fx, &ff)?
            .into_iter()
            .filter(|m| m.is_surjective(&fx, &ff))
            .collect();
        let ns: Vec<FinMap> = homs(x, &fx, &fg)?
            .into_iter()
            .filter(|n| n.is_surjective(&fx, &fg))
            .collect();
        let mut by_p: HashMap<FinMap, Vec<usize>> = HashMap::new();
        for (k, i) in is.iter().enumerate() {
            by_p.entry(i.compose(&mu, &fh, &fx)).or_default().push(k);
        }
        let zero_on = |f: &FinMap, fa: &FiniteModule| f.is_zero(fa);
        for j in &js {
            let Some(matching) = by_p.get(&j.compose(&nu, &fe, &fx)) else {
                continue;
            };
            let m_j: Vec<&FinMap> = ms
                .iter()
                .filter(|m| m.compose(j, &fx, &ff) == d_ef)
                .collect();
            let n_j: Vec<&FinMap> = ns
                .iter()
                .filter(|n| zero_on(&n.compose(j, &fx, &fg), &fg))
                .collect();
            for &k in matching {
                let i = &is[k];
                let m_ok: Vec<&&FinMap> = m_j
                    .iter()
                    .filter(|m| zero_on(&m.compose(i, &fx, &ff), &ff))
                    .collect();
                let n_ok: Vec<&&FinMap> = n_j
                    .iter()
                    .filter(|n| n.compose(i, &fx, &fg) == t_hg)
                    .collect();
                let work = (m_ok.len() * n_ok.len()) as u64 + 1;
                candidates += work;
                meter.charge(work)?;
                for m in &m_ok {
                    let fm = f_q.compose(m, &ff, &fq);
                    for n in &n_ok {
                        if g_q.compose(n, &fg, &fq) == fm {
                            return Ok(MiddleSearch {
                                found: true,
                                middle_types: types.len(),
                                candidates,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(MiddleSearch {
        found: false,
        middle_types: types.len(),
        candidates,
    })
}
