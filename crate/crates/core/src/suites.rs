//! The analytic checks on one-parameter groups and the suite runner.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::{check_duality, fourier, pair, DualElement, DualTag, Duality};
use crate::error::{AqgError, Result};
use crate::gns::Gns;
use crate::hopf::axioms::check_axioms;
use crate::hopf::{random_element, Element, Presentation};
use crate::linalg::{Echelon, Insert};
use crate::modular::{MapTag, ModularMaps, OneParameterGroup, OperatorTag, SpectralTable};
use crate::munitary::{coproduct_sign_audit, tau_coproduct_residual, Munitary, DEFAULT_T_SAMPLES};
use crate::report::{Check, CheckRecord, Environment, VerificationReport};
use crate::scalar::{scalar_pow_z, PositiveEigenvalue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Modular,
    Duality,
    Gns,
    Appendix,
    All,
}

impl FromStr for Suite {
    type Err = AqgError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "axioms" => Suite::Axioms,
            "modular" => Suite::Modular,
            "duality" => Suite::Duality,
            "gns" => Suite::Gns,
            "appendix" => Suite::Appendix,
            "all" => Suite::All,
            _ => return Err(AqgError::Usage(format!("unknown suite '{s}'"))),
        })
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Modular => "modular",
            Suite::Duality => "duality",
            Suite::Gns => "gns",
            Suite::Appendix => "appendix",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub degree: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub t_samples: Vec<f64>,
    /// Random elements per positivity probe.
    pub samples: usize,
    pub exact_polar: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { degree: 2, tolerance: crate::scalar::DEFAULT_TOLERANCE, seed: 0, t_samples: DEFAULT_T_SAMPLES.to_vec(), samples: 200, exact_polar: false }
    }
}

fn environment(p: &Presentation, o: &RunOptions) -> Environment {
    Environment {
        example: p.name(),
        q: p.q().map(|q| q.to_string()),
        degree: p.cap_degree(o.degree),
        tolerance: o.tolerance,
        seed: o.seed,
        t_samples: o.t_samples.clone(),
    }
}

fn failed_setup(rep: &mut VerificationReport, id: &str, anchor: &str, e: &AqgError) {
    let mut c = Check::exact(id, anchor, 0.0);
    c.error(e);
    rep.push(c.finish());
}

/// Runs one suite (or all) on a presentation.
///
/// Setup failures inside a suite become failing records; usage errors
/// (such as an inexact polar decomposition when exactness was demanded) are returned.
pub fn run_suite(p: &Presentation, suite: Suite, o: &RunOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(suite.name(), environment(p, o));
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Axioms) {
        rep.extend(check_axioms(p, o.degree, o.tolerance));
    }
    if wants(Suite::Modular) {
        match Gns::new(p, o.degree, o.tolerance) {
            Ok(g) => check_analytic(&g, o, &mut rep),
            Err(e) => failed_setup(&mut rep, "analytic.setup", "Prop 2.5", &e),
        }
    }
    if wants(Suite::Duality) {
        match Duality::new(p, o.degree, o.tolerance) {
            Ok(d) => check_duality(&d, &mut rep),
            Err(e) => failed_setup(&mut rep, "duality.setup", "Prop 1.2", &e),
        }
    }
    if wants(Suite::Gns) || wants(Suite::Appendix) {
        let g = match Gns::new(p, o.degree, o.tolerance) {
            Ok(g) => Some(g),
            Err(e) => {
                failed_setup(&mut rep, "gns.setup", "Prop 1.2", &e);
                None
            }
        };
        if let Some(g) = g {
            if o.exact_polar {
                g.polar_parts(g.space.degree, true)?;
            }
            if wants(Suite::Gns) {
                g.check_into(&mut rep);
            }
            if wants(Suite::Appendix) {
                match Munitary::new(&g, &o.t_samples, o.exact_polar) {
                    Ok(m) => m.check_into(&mut rep),
                    Err(e @ AqgError::Usage(_)) => return Err(e),
                    Err(e) => failed_setup(&mut rep, "appendix.setup", "Prop A.1", &e),
                }
            }
        }
    }
    rep.normalize();
    Ok(rep)
}

/// Joint eigenvectors over the truncation of B at the duality's degree, one orbit at a time.
fn dual_eigenvectors(d: &Duality, tags: &[DualTag]) -> Result<(Vec<(Vec<PositiveEigenvalue>, DualElement)>, bool, f64)> {
    let p = &d.pres;
    let mut span = Echelon::homogeneous(d.tol);
    let mut out = Vec::new();
    let mut exact = true;
    let mut residual = 0.0f64;
    for i in 0..d.dim() {
        let row = |e: &Element| e.terms().map(|(k, v)| (k.0, v.clone())).collect();
        if span.reduce(row(&p.basis(i))).is_empty() {
            continue;
        }
        let orbit = d.orbit_subspace(&fourier(&p.basis(i)), tags)?;
        let dec = d.eigen_dual(&orbit, tags)?;
        exact &= dec.exact;
        residual = residual.max(dec.residual);
        for b in dec.blocks {
            for v in b.vectors {
                if let Insert::Pivot(_) = span.insert(row(&v)) {
                    out.push((b.values.clone(), fourier(&v)));
                }
            }
        }
    }
    if span.rank() != d.dim() {
        return Err(AqgError::NotDiagonalizable(format!("eigenvectors span {} of {} dimensions of B", span.rank(), d.dim())));
    }
    Ok((out, exact, residual))
}

fn eigenvectors(m: &ModularMaps, tags: &[MapTag], degree: usize, tol: f64) -> Result<Vec<(Vec<PositiveEigenvalue>, Element)>> {
    let dec = m.full_eigenbasis(tags, degree, tol)?;
    Ok(dec.blocks.into_iter().flat_map(|b| b.vectors.into_iter().map(move |v| (b.values.clone(), v))).collect())
}

fn is_positive_rational(v: &PositiveEigenvalue) -> bool {
    v.value.as_rational().is_some_and(|r| *r > num_rational::BigRational::from_integer(0.into()))
}

fn random_ts(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(-10.0..=10.0), rng.gen_range(-10.0..=10.0))).collect()
}

fn re(t: f64) -> Complex64 {
    Complex64::new(t, 0.0)
}

pub(crate) const SCALED: &str = "float residuals relative to the largest coefficient of either side";

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// The analytic structure: finiteness of orbits, positivity, joint eigenbases,
/// the one-parameter groups and their compatibility with the coproducts.
pub fn check_analytic(g: &Gns, o: &RunOptions, rep: &mut VerificationReport) {
    let tol = o.tolerance;
    let m = &*g.modular;
    let d = &*g.duality;
    let p = g.pres().clone();
    let n_deg = g.space.degree;
    let n = g.space.dim;
    let basis: Vec<Element> = (0..n).map(|i| p.basis(i)).collect();
    let lbl = |i: usize| p.maps().label(i);
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);

    // Finite orbits.
    for (id, anchor, tags) in [
        ("analytic.delta_orbits", "Prop 2.1", &[MapTag::DeltaLeft, MapTag::DeltaRight][..]),
        ("analytic.kappa_rho_orbits", "Prop 2.2", &[MapTag::Kappa, MapTag::Rho][..]),
        ("analytic.s_sigma_orbits", "Prop 2.3", &[MapTag::SSquared, MapTag::Sigma, MapTag::SigmaPrime][..]),
    ] {
        let mut c = Check::exact(id, anchor, tol);
        let mut largest = 0;
        for (i, x) in basis.iter().enumerate() {
            if let Some(orbit) = c.attempt(m.orbit_subspace(x, tags)) {
                largest = largest.max(orbit.len());
                c.holds(!orbit.is_empty(), || format!("empty orbit for {}", lbl(i)));
            }
        }
        c.note(format!("largest orbit dimension {largest}"));
        rep.push(c.finish());
    }

    let mut c = Check::exact("analytic.kappa_rho_coproduct", "Prop 2.2", tol);
    for (i, x) in basis.iter().enumerate() {
        let dx = x.comul();
        let kr = dx.map_legs(|v| m.kappa(v), |v| m.rho_inv(v));
        if let Some(kr) = c.attempt(kr) {
            c.tensors(&kr, &dx, || format!("(κ⊗ρ⁻¹)Δ({})", lbl(i)));
        }
        let s2 = m.s_squared(x).comul();
        if let Some(r) = c.attempt(dx.map_legs(|v| m.sigma.apply(v), |v| m.sigma_prime_inv.apply(v))) {
            c.tensors(&s2, &r, || format!("Δ(S²({})) = (σ⊗σ′⁻¹)Δ", lbl(i)));
        }
        let ds = m.sigma.apply(x).map(|v| v.comul());
        let r = dx.map_legs(|v| Ok(m.s_squared(v)), |v| m.sigma.apply(v));
        if let (Some(l), Some(r)) = (c.attempt(ds), c.attempt(r)) {
            c.tensors(&l, &r, || format!("Δ(σ({})) = (S²⊗σ)Δ", lbl(i)));
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("analytic.commuting_maps", "Prop 2.3", tol);
    let tags = [MapTag::SSquared, MapTag::Sigma, MapTag::SigmaPrime, MapTag::DeltaLeft, MapTag::DeltaRight];
    for (i, x) in basis.iter().enumerate() {
        for (k, s) in tags.iter().enumerate() {
            for t in &tags[k + 1..] {
                let l = m.apply(*t, x).and_then(|v| m.apply(*s, &v));
                let r = m.apply(*s, x).and_then(|v| m.apply(*t, &v));
                if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                    c.elements(&l, &r, || format!("{}∘{} on {}", s.name(), t.name(), lbl(i)));
                }
            }
        }
        // σσ′(x) = δσ²(x)δ⁻¹
        let l = m.sigma_prime.apply(x).and_then(|v| m.sigma.apply(&v));
        let r = m.sigma.apply(x).and_then(|v| m.sigma.apply(&v)).map(|v| &(&m.delta * &v) * &m.delta_inv);
        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
            c.elements(&l, &r, || format!("σσ′({}) = δσ²({})δ⁻¹", lbl(i), lbl(i)));
        }
    }
    rep.push(c.finish());

    // Positivity on the basis and on seeded random elements.
    let mut c = Check::exact("analytic.positivity", "Prop 2.4", tol);
    for (i, x) in basis.iter().enumerate() {
        match m.positivity_probe(x) {
            Ok(_) => c.holds(true, String::new),
            Err(e) => c.holds(false, || format!("basis element {}: {e}", lbl(i))),
        };
    }
    for k in 0..o.samples {
        let x = random_element(&p, n_deg, 4, &mut rng);
        match m.positivity_probe(&x) {
            Ok(_) => c.holds(true, String::new),
            Err(e) => c.holds(false, || format!("random element {k}: {e}")),
        };
    }
    c.note(format!("{} basis elements and {} random elements (seed {})", n, o.samples, o.seed));
    rep.push(c.finish());

    // Joint eigenbases.
    for (id, anchor, tags) in [
        ("analytic.eigenbasis_s_sigma", "Prop 2.5", &[MapTag::SSquared, MapTag::Sigma, MapTag::SigmaPrime][..]),
        ("analytic.eigenbasis_with_delta", "Prop 2.6", &tags[..]),
    ] {
        let mut c = Check::exact(id, anchor, tol);
        if let Some(dec) = c.attempt(m.full_eigenbasis(tags, n_deg, tol)) {
            c.holds(dec.vector_count() == dec.dim, || format!("{} eigenvectors for dimension {}", dec.vector_count(), dec.dim));
            c.holds(dec.exact && dec.residual == 0.0, || format!("decomposition not exact (residual {:e})", dec.residual));
            for b in &dec.blocks {
                c.holds(b.values.iter().all(is_positive_rational), || format!("eigenvalues {:?}", b.values.iter().map(|v| v.value.to_string()).collect::<Vec<_>>()));
                for v in &b.vectors {
                    for (k, t) in tags.iter().enumerate() {
                        if let Some(tv) = c.attempt(m.apply(*t, v)) {
                            c.elements(&tv, &v.scale(&b.values[k].value), || format!("{} on {v}", t.name()));
                        }
                    }
                }
            }
            c.note(format!("{} joint eigenspaces on dimension {}", dec.blocks.len(), dec.dim));
        }
        rep.push(c.finish());
    }

    let dual_tags = [DualTag::SSquared, DualTag::SigmaHat, DualTag::SigmaHatPrime, DualTag::DeltaHatLeft, DualTag::DeltaHatRight];
    let mut c = Check::exact("analytic.dual_eigenbasis", "Prop 2.7", tol);
    if let Some((vecs, exact, residual)) = c.attempt(dual_eigenvectors(d, &dual_tags)) {
        c.holds(exact && residual == 0.0, || format!("decomposition not exact (residual {residual:e})"));
        for (vals, v) in &vecs {
            c.holds(vals.iter().all(is_positive_rational), || format!("eigenvalues {:?}", vals.iter().map(|v| v.value.to_string()).collect::<Vec<_>>()));
            for (k, t) in dual_tags.iter().enumerate() {
                if let Some(tv) = c.attempt(d.apply(*t, v)) {
                    c.elements(&tv.preimage, &v.preimage.scale(&vals[k].value), || format!("{} on F({})", t.name(), v.preimage));
                }
            }
        }
        c.note(format!("{} joint eigenvectors span B up to degree {}", vecs.len(), d.degree));
    }
    rep.push(c.finish());

    check_delta_it(g, o, &basis, &mut rng, rep);
    check_conjugations(g, o, &basis, rep);
    check_groups(g, o, &basis, &mut rng, rep);
    check_coproducts(g, o, rep);
}

fn check_delta_it(g: &Gns, o: &RunOptions, basis: &[Element], rng: &mut ChaCha8Rng, rep: &mut VerificationReport) {
    let tol = o.tolerance;
    let m = &*g.modular;
    let p = g.pres();
    let lbl = |i: usize| p.maps().label(i);
    let mut c = Check::exact("analytic.delta_it_integer_powers", "Prop 2.8", tol);
    for (i, x) in basis.iter().enumerate() {
        for k in [1i64, -1, 2] {
            let z = Complex64::new(0.0, -(k as f64));
            let pw = if k >= 0 { (0..k).fold(p.unit(), |acc, _| &acc * &m.delta) } else { (0..-k).fold(p.unit(), |acc, _| &acc * &m.delta_inv) };
            if let Some(l) = c.attempt(m.one_parameter_apply(OneParameterGroup::DeltaItLeft, z, x, tol)) {
                c.elements(&l, &(&pw * x), || format!("δ^(iz) {} at z = -{k}i", lbl(i)));
            }
            if let Some(r) = c.attempt(m.one_parameter_apply(OneParameterGroup::DeltaItRight, z, x, tol)) {
                c.elements(&r, &(x * &pw), || format!("{} δ^(iz) at z = -{k}i", lbl(i)));
            }
        }
    }
    rep.push(c.finish());

    let mut c = Check::float("analytic.delta_it_multiplier", "Prop 2.8", tol);
    let left = SpectralTable::new(m, MapTag::DeltaLeft, m.degree, tol);
    let right = SpectralTable::new(m, MapTag::DeltaRight, m.degree, tol);
    if let (Some(l), Some(r)) = (c.attempt(left), c.attempt(right)) {
        for &t in &o.t_samples {
            for (i, x) in basis.iter().enumerate() {
                let a = l.apply(re(t), x).and_then(|v| r.apply(re(t), &v));
                let b = r.apply(re(t), x).and_then(|v| l.apply(re(t), &v));
                if let (Some(a), Some(b)) = (c.attempt(a), c.attempt(b)) {
                    c.elements(&a, &b, || format!("(δ^(it){})δ^(it) at t = {t}", lbl(i)));
                }
            }
        }
        for (s, t) in random_ts(rng, 4) {
            for (i, x) in basis.iter().enumerate() {
                for tab in [&l, &r] {
                    let a = tab.apply(re(t), x).and_then(|v| tab.apply(re(s), &v));
                    let b = tab.apply(re(s + t), x);
                    if let (Some(a), Some(b)) = (c.attempt(a), c.attempt(b)) {
                        c.elements(&a, &b, || format!("group law on {} at s = {s}, t = {t}", lbl(i)));
                    }
                }
            }
        }
    }
    c.note("commuting left and right actions; group law at seeded s, t in [-10, 10]");
    rep.push(c.finish());

    // Δ(δ^{it}) = δ^{it} ⊗ δ^{it} on products a ⊗ c within the modular truncation.
    let mut c = Check::float("analytic.delta_it_grouplike", "Prop 2.9", tol);
    let mut ts = o.t_samples.clone();
    ts.extend(random_ts(rng, 2).into_iter().map(|(s, _)| s));
    for &t in &ts {
        for (i, a) in basis.iter().enumerate() {
            for (k, x) in basis.iter().enumerate() {
                if a.degree() + x.degree() > m.degree {
                    continue;
                }
                if let Some(r) = c.attempt(m.group_like_check_delta_it(t, a, x, tol)) {
                    c.residual(r, || format!("{}⊗{} at t = {t}", lbl(i), lbl(k)));
                }
            }
        }
    }
    rep.push(c.finish());
}

/// Tables of the eigen-scaling groups on the modular truncation.
struct Tables {
    sigma_prime: SpectralTable,
    sigma: SpectralTable,
    nabla_hat: SpectralTable,
    tau: SpectralTable,
    s_squared: SpectralTable,
}

fn tables(g: &Gns, tol: f64) -> Result<Tables> {
    let m = &*g.modular;
    Ok(Tables {
        sigma_prime: SpectralTable::new(m, MapTag::SigmaPrime, m.degree, tol)?,
        sigma: SpectralTable::new(m, MapTag::Sigma, m.degree, tol)?,
        nabla_hat: SpectralTable::new(m, MapTag::NablaHat, m.degree, tol)?,
        tau: SpectralTable::new(m, MapTag::SSquaredInv, m.degree, tol)?,
        s_squared: SpectralTable::new(m, MapTag::SSquared, m.degree, tol)?,
    })
}

/// Conjugation by ∇^{it} and ∇̂^{it} maps A and B into themselves, scaling eigenvectors.
fn check_conjugations(g: &Gns, o: &RunOptions, basis: &[Element], rep: &mut VerificationReport) {
    let tol = o.tolerance;
    let m = &*g.modular;
    let d = &*g.duality;
    let p = g.pres();
    let n_deg = g.space.degree;
    let lbl = |i: usize| p.maps().label(i);
    let tabs = match tables(g, tol) {
        Ok(t) => t,
        Err(e) => {
            failed_setup(rep, "analytic.conjugation_setup", "Prop 2.10", &e);
            return;
        }
    };

    // On A: ∇^{it} π(a) ∇^{-it} = λ^{it} π(a) for σ′(a) = λa; ∇̂^{it} π(a) ∇̂^{-it} = λ^{it} π(a) for S⁻²(a) = λa.
    for (id, anchor, tag, op) in [
        ("analytic.nabla_conjugates_a", "Prop 2.10", MapTag::SigmaPrime, &tabs.sigma_prime),
        ("analytic.nabla_hat_conjugates_a", "Prop 2.13", MapTag::SSquaredInv, &tabs.nabla_hat),
    ] {
        let mut c = Check::float(id, anchor, tol);
        if let Some(vecs) = c.attempt(eigenvectors(m, &[tag], n_deg, tol)) {
            for &t in &o.t_samples {
                for (vals, a) in &vecs {
                    let Some(f) = c.attempt(scalar_pow_z(&vals[0], re(t))) else { continue };
                    for (k, x) in basis.iter().enumerate() {
                        let l = op.apply(re(t), &(a * x));
                        let r = op.apply(re(t), x).map(|v| (a * &v).scale(&f));
                        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                            c.elements_scaled(&l, &r, || format!("t = {t}, a = {a}, x = {}", lbl(k)));
                        }
                    }
                }
            }
        }
        c.note(SCALED);
        rep.push(c.finish());
    }

    // On B: ∇̂^{it} γ(b) ∇̂^{-it} = μ^{it} γ(b) for σ̂(b) = μb; ∇^{it} γ(b) ∇^{-it} = μ^{it} γ(b) for S²(b) = μb.
    for (id, anchor, tag, op) in [
        ("analytic.nabla_hat_conjugates_b", "Prop 2.10", DualTag::SigmaHat, &tabs.nabla_hat),
        ("analytic.nabla_conjugates_b", "Prop 2.13", DualTag::SSquared, &tabs.sigma_prime),
    ] {
        let mut c = Check::float(id, anchor, tol);
        if let Some((vecs, _, _)) = c.attempt(dual_eigenvectors(d, &[tag])) {
            for &t in &o.t_samples {
                for (vals, b) in &vecs {
                    let Some(f) = c.attempt(scalar_pow_z(&vals[0], re(t))) else { continue };
                    for (k, x) in basis.iter().enumerate() {
                        let l = g.gamma(b, x).and_then(|v| op.apply(re(t), &v));
                        let r = op.apply(re(t), x).and_then(|v| g.gamma(b, &v)).map(|v| v.scale(&f));
                        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                            c.elements_scaled(&l, &r, || format!("t = {t}, b = F({}), x = {}", b.preimage, lbl(k)));
                        }
                    }
                }
            }
        }
        c.note(SCALED);
        rep.push(c.finish());
    }

    // σ′ₜ(a) = ∇^{it} a ∇^{-it}, τₜ(a) = ∇̂^{it} a ∇̂^{-it}.
    for (id, anchor, group, op) in [
        ("analytic.sigma_prime_t_conjugation", "Def 2.11", &tabs.sigma_prime, &tabs.sigma_prime),
        ("analytic.tau_t_conjugation", "Def 2.14", &tabs.tau, &tabs.nabla_hat),
    ] {
        let mut c = Check::float(id, anchor, tol);
        for &t in &o.t_samples {
            for (i, a) in basis.iter().enumerate() {
                let Some(ga) = c.attempt(group.apply(re(t), a)) else { continue };
                for (k, x) in basis.iter().enumerate() {
                    let l = op.apply(-re(t), x).and_then(|v| op.apply(re(t), &(a * &v)));
                    if let Some(l) = c.attempt(l) {
                        c.elements_scaled(&l, &(&ga * x), || format!("t = {t}, a = {}, x = {}", lbl(i), lbl(k)));
                    }
                }
            }
        }
        c.note(SCALED);
        rep.push(c.finish());
    }

    // σ̂ₜ(b) = ∇̂^{it} b ∇̂^{-it} with σ̂ₜ the eigen-scaling group of σ̂ on B.
    let mut c = Check::float("analytic.sigma_hat_t_conjugation", "Def 2.11", tol);
    for &t in &o.t_samples {
        for (i, a) in basis.iter().enumerate() {
            let b = fourier(a);
            let Some(sb) = c.attempt(d.analytic_apply(DualTag::SigmaHat, re(t), &b)) else { continue };
            for (k, x) in basis.iter().enumerate() {
                let l = tabs.nabla_hat.apply(-re(t), x).and_then(|v| g.gamma(&b, &v)).and_then(|v| tabs.nabla_hat.apply(re(t), &v));
                let r = g.gamma(&sb, x);
                if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                    c.elements_scaled(&l, &r, || format!("t = {t}, b = F({}), x = {}", lbl(i), lbl(k)));
                }
            }
        }
    }
    c.note(SCALED);
    rep.push(c.finish());
}

fn check_groups(g: &Gns, o: &RunOptions, basis: &[Element], rng: &mut ChaCha8Rng, rep: &mut VerificationReport) {
    let tol = o.tolerance;
    let m = &*g.modular;
    let d = &*g.duality;
    let p = g.pres();
    let lbl = |i: usize| p.maps().label(i);

    // Analytic generators, exactly.
    let mut c = Check::exact("analytic.sigma_prime_generator", "Prop 2.12", tol);
    for (i, x) in basis.iter().enumerate() {
        let l = m.one_parameter_apply(OneParameterGroup::SigmaPrimeT, MINUS_I, x, tol);
        let r = m.sigma_prime.apply(x);
        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
            c.elements(&l, &r, || format!("σ′₋ᵢ({})", lbl(i)));
        }
        let b = fourier(x);
        let l = d.analytic_apply(DualTag::SigmaHat, MINUS_I, &b);
        let r = d.sigma_hat(&b);
        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
            c.elements(&l.preimage, &r.preimage, || format!("σ̂₋ᵢ(F({}))", lbl(i)));
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("analytic.tau_generator", "Def 2.14", tol);
    for (i, x) in basis.iter().enumerate() {
        if let Some(l) = c.attempt(m.one_parameter_apply(OneParameterGroup::TauT, MINUS_I, x, tol)) {
            c.elements(&l, &m.s_squared_inv(x), || format!("τ₋ᵢ({})", lbl(i)));
        }
        let b = fourier(x);
        let l = d.analytic_apply(DualTag::SSquared, MINUS_I, &b);
        let r = d.s_squared(&b);
        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
            c.elements(&l.preimage, &r.preimage, || format!("τ̂₋ᵢ(F({}))", lbl(i)));
        }
    }
    rep.push(c.finish());

    // Group laws and the *-property at seeded parameters.
    let tabs = match tables(g, tol) {
        Ok(t) => t,
        Err(e) => {
            failed_setup(rep, "analytic.group_setup", "Prop 2.12", &e);
            return;
        }
    };
    let pairs = random_ts(rng, 6);
    for (id, anchor, tab) in [
        ("analytic.sigma_prime_t_group", "Prop 2.12", &tabs.sigma_prime),
        ("analytic.sigma_t_group", "Prop 2.12", &tabs.sigma),
        ("analytic.tau_t_group", "Def 2.14", &tabs.tau),
    ] {
        let mut c = Check::float(id, anchor, tol.min(1e-10));
        for &(s, t) in &pairs {
            for (i, x) in basis.iter().enumerate() {
                let a = tab.apply(re(t), x).and_then(|v| tab.apply(re(s), &v));
                let b = tab.apply(re(s + t), x);
                if let (Some(a), Some(b)) = (c.attempt(a), c.attempt(b)) {
                    c.elements(&a, &b, || format!("{} at s = {s}, t = {t}", lbl(i)));
                }
                let st = tab.apply(re(t), &x.star());
                if let (Some(st), Some(tx)) = (c.attempt(st), c.attempt(tab.apply(re(t), x))) {
                    c.elements(&st, &tx.star(), || format!("({})* at t = {t}", lbl(i)));
                }
            }
        }
        c.note(format!("{} seeded pairs (s, t) in [-10, 10]; commutes with the involution", pairs.len()));
        rep.push(c.finish());
    }

    let mut c = Check::float("analytic.sigma_hat_t_group", "Prop 2.12", tol.min(1e-10));
    for &(s, t) in pairs.iter().take(2) {
        for (i, x) in basis.iter().enumerate() {
            let b = fourier(x);
            let a = d.analytic_apply(DualTag::SigmaHat, re(t), &b).and_then(|v| d.analytic_apply(DualTag::SigmaHat, re(s), &v));
            let r = d.analytic_apply(DualTag::SigmaHat, re(s + t), &b);
            if let (Some(a), Some(r)) = (c.attempt(a), c.attempt(r)) {
                c.elements(&a.preimage, &r.preimage, || format!("F({}) at s = {s}, t = {t}", lbl(i)));
            }
        }
    }
    rep.push(c.finish());
}

fn check_coproducts(g: &Gns, o: &RunOptions, rep: &mut VerificationReport) {
    let tol = o.tolerance;
    let n_deg = g.space.degree;
    match coproduct_sign_audit(g, n_deg, &o.t_samples) {
        Ok(a) => rep.push(a.record("analytic.sigma_prime_t_coproduct", "Prop 2.15", tol)),
        Err(e) => failed_setup(rep, "analytic.sigma_prime_t_coproduct", "Prop 2.15", &e),
    }
    let mut c = Check::float("analytic.tau_t_coproduct", "Prop 2.15", tol);
    if let Some(r) = c.attempt(tau_coproduct_residual(g, n_deg, &o.t_samples)) {
        c.residual(r, || format!("residual {r:.3e}"));
    }
    rep.push(c.finish());

    // Dual coproduct formulas, paired against products x x′ in A.
    // ⟨x, τ̂ₜ(b)⟩ = ⟨(S²)ₜ(x), b⟩ and ⟨x, σ̂ₜ(b)⟩ = ⟨∇̂^{-it}(x), b⟩ on A.
    let d = &*g.duality;
    let p = g.pres();
    let tabs = match tables(g, tol) {
        Ok(t) => t,
        Err(e) => {
            failed_setup(rep, "analytic.dual_coproduct_setup", "Prop 2.15", &e);
            return;
        }
    };
    let n = g.space.dim;
    let mut cs = Check::float("analytic.dual_sigma_hat_t_coproduct", "Prop 2.15", tol);
    let mut ct = Check::float("analytic.dual_tau_hat_t_coproduct", "Prop 2.15", tol);
    let mut opposite_ok = true;
    for &t in &o.t_samples {
        let z = re(t);
        for j in 0..n {
            let b = fourier(&p.basis(j));
            let (Some(sb), Some(tb)) = (cs.attempt(d.analytic_apply(DualTag::SigmaHat, z, &b)), ct.attempt(d.analytic_apply(DualTag::SSquared, z, &b))) else { continue };
            for x in 0..n {
                for y in 0..n {
                    let (bx, by) = (p.basis(x), p.basis(y));
                    if bx.degree() + by.degree() > n_deg {
                        continue;
                    }
                    let tx = tabs.s_squared.apply(z, &bx);
                    let sy = tabs.nabla_hat.apply(-z, &by);
                    let ty = tabs.s_squared.apply(z, &by);
                    let (Some(tx), Some(sy), Some(ty)) = (cs.attempt(tx), cs.attempt(sy), ct.attempt(ty)) else { continue };
                    let w = || format!("t = {t}, x = {}, y = {}, b = F({})", p.maps().label(x), p.maps().label(y), p.maps().label(j));
                    let l = pair(&(&bx * &by), &sb);
                    let r = pair(&(&tx * &sy), &b);
                    if let (Some(l), Some(r)) = (cs.attempt(l), cs.attempt(r)) {
                        cs.scalars(&l, &r, w);
                    }
                    let lo = pair(&(&by * &bx), &sb);
                    let ro = pair(&(&sy * &tx), &b);
                    if let (Ok(lo), Ok(ro)) = (lo, ro) {
                        opposite_ok &= (&lo - &ro).abs() <= tol;
                    }
                    let l = pair(&(&bx * &by), &tb);
                    let r = pair(&(&tx * &ty), &b);
                    if let (Some(l), Some(r)) = (ct.attempt(l), ct.attempt(r)) {
                        ct.scalars(&l, &r, w);
                    }
                }
            }
        }
    }
    cs.note(format!(
        "paired with ⟨x⊗y, Δ^(b)⟩ = ⟨xy, b⟩; the opposite pairing {}",
        if opposite_ok { "also holds" } else { "fails" }
    ));
    rep.push(cs.finish());
    rep.push(ct.finish());
}

/// Builds the presentation for a run: examples are built large enough for the suite's products.
pub fn build_example(spec: &crate::examples::ExampleSpec, degree: usize) -> Result<Presentation> {
    spec.build(2 * degree + 2)
}

/// A summary line per record, used by the CLI.
pub fn summary_line(c: &CheckRecord) -> String {
    format!("{:<5} {:<44} {:<12} {:<6} residual {}", format!("{:?}", c.status).to_uppercase(), c.id, c.anchor, format!("{:?}", c.tier).to_lowercase(), c.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, make_suq2, rational, FiniteGroup};

    fn opts(degree: usize) -> RunOptions {
        RunOptions { degree, samples: 20, t_samples: vec![0.5, 1.0], ..Default::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["axioms", "modular", "duality", "gns", "appendix", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().name(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn finite_examples_pass_everything() {
        for p in [make_group_algebra(&FiniteGroup::s3()), make_function_algebra(&FiniteGroup::cyclic(4))] {
            let rep = run_suite(&p, Suite::All, &opts(0)).unwrap();
            assert!(rep.passed(), "{}: {:?}", p.name(), rep.failures());
        }
    }

    #[test]
    fn full_run_covers_every_anchor() {
        let rep = run_suite(&make_group_algebra(&FiniteGroup::s3()), Suite::All, &opts(0)).unwrap();
        let a = crate::coverage::audit(&rep);
        assert!(a.is_complete(), "{}", a.to_text());
        assert!(a.unknown.is_empty(), "{:?}", a.unknown);
    }

    #[test]
    fn suq2_analytic_suite_at_degree_one() {
        let p = make_suq2(&rational(1, 4), 4).unwrap();
        let rep = run_suite(&p, Suite::Modular, &opts(1)).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
        let eig = rep.get("analytic.eigenbasis_with_delta").unwrap();
        assert_eq!(eig.residual, "0");
        assert_eq!(rep.get("analytic.delta_it_grouplike").unwrap().residual, "0");
    }
}
