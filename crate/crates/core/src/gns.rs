//! GNS data on degree truncations: Λ, Λ̂, π, γ, the maps T, T̂ with their
//! adjoints, ∇, ∇̂ and the polar parts J, Ĵ.
//!
//! Vectors of the GNS space are represented by the algebra element they are
//! the Λ-image of, so `⟨Λ(a), Λ(c)⟩ = ψ(c* a)` is evaluated exactly.
//! Operators are stored by their algebra-level action.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::duality::{fourier, DeltaHatSide, DualElement, Duality};
use crate::error::{AqgError, Result};
use crate::hopf::axioms::gram_matrix;
use crate::hopf::{Element, Presentation};
use crate::linalg::{ldl_pivots, DenseMatrix};
use crate::modular::{expand_in, MapTag, ModularMaps};
use crate::report::{Check, CheckRecord, Environment, VerificationReport};
use crate::scalar::{scalar_pow_z, Scalar};

/// The truncated GNS space of ψ.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    pub pres: Presentation,
    pub degree: usize,
    pub dim: usize,
    /// `G[x, y] = ψ(y* x)`.
    pub gram: DenseMatrix,
}

impl GnsSpace {
    pub fn new(p: &Presentation, degree: usize) -> Result<Self> {
        let degree = p.cap_degree(degree);
        let dim = p.dim_upto(degree);
        let gram = gram_matrix(p, dim)?;
        for (k, d) in ldl_pivots(&gram)?.iter().enumerate() {
            if !d.as_rational().is_some_and(|r| *r > BigRational::from_integer(0.into())) {
                return Err(AqgError::Singular(format!("Gram pivot {k} = {d}")));
            }
        }
        Ok(Self { pres: p.clone(), degree, dim, gram })
    }

    /// `Λ(a)`, refusing elements outside the truncation.
    pub fn lambda(&self, a: &Element) -> Result<Element> {
        if !a.is_zero() && a.degree() > self.degree {
            return Err(AqgError::DegreeOverflow { requested: a.degree(), available: self.degree });
        }
        Ok(a.clone())
    }

    /// `Λ̂(b) = Λ(preimage)`.
    pub fn lambda_hat(&self, b: &DualElement) -> Result<Element> {
        self.lambda(&b.preimage)
    }

    /// `⟨Λ(a), Λ(c)⟩ = ψ(c* a)`.
    pub fn inner(&self, a: &Element, c: &Element) -> Result<Scalar> {
        (&c.star() * a).right_integral()
    }

    /// The inner product through the Gram matrix (both vectors inside the truncation).
    pub fn inner_gram(&self, a: &Element, c: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (x, u) in a.terms() {
            for (y, v) in c.terms() {
                if x.0 >= self.dim || y.0 >= self.dim {
                    return Err(AqgError::DegreeOverflow { requested: a.degree().max(c.degree()), available: self.degree });
                }
                acc += &(&(u * &v.conj()) * self.gram.get(x.0, y.0));
            }
        }
        Ok(acc)
    }

    /// The vector `w` in the truncation with `⟨w, Λ(b_x)⟩ = f(x)` for every basis `x`.
    pub fn riesz(&self, f: impl Fn(usize) -> Result<Scalar>) -> Result<Element> {
        // ⟨w, Λ(b_x)⟩ = Σ_k w_k G[k, x], so w solves Gᵀ w = f.
        let n = self.dim;
        let mut gt = DenseMatrix::zeros(n, n);
        for k in 0..n {
            for x in 0..n {
                gt.set(x, k, self.gram.get(k, x).clone());
            }
        }
        let rhs: Vec<Scalar> = (0..n).map(&f).collect::<Result<_>>()?;
        let inv = gt.inverse(0.0)?;
        Ok(Element::from_coords(&self.pres, &inv.mul_vec(&rhs)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linearity {
    Linear,
    ConjugateLinear,
}

type Action = Arc<dyn Fn(&Element) -> Result<Element> + Send + Sync>;

/// An operator on the GNS space given by its action on algebra elements.
#[derive(Clone)]
pub struct SpanOperator {
    pub name: String,
    pub linearity: Linearity,
    action: Action,
}

impl std::fmt::Debug for SpanOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SpanOperator({}, {:?})", self.name, self.linearity)
    }
}

impl SpanOperator {
    pub fn new(name: &str, linearity: Linearity, action: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static) -> Self {
        Self { name: name.to_string(), linearity, action: Arc::new(action) }
    }

    pub fn apply(&self, v: &Element) -> Result<Element> {
        if v.is_zero() {
            return Ok(v.clone());
        }
        (self.action)(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SpanOperator) -> SpanOperator {
        let (f, g) = (self.action.clone(), other.action.clone());
        let linearity = if self.linearity == other.linearity { Linearity::Linear } else { Linearity::ConjugateLinear };
        SpanOperator { name: format!("{}{}", self.name, other.name), linearity, action: Arc::new(move |v| f(&g(v)?)) }
    }
}

/// Polar parts `J`, `Ĵ` on a truncation, stored as images of basis vectors.
#[derive(Clone, Debug)]
pub struct PolarParts {
    pub degree: usize,
    pub j: SpanOperator,
    pub j_hat: SpanOperator,
    /// Whether every square root was exact.
    pub exact: bool,
}

const HALF_DOWN: Complex64 = Complex64::new(0.0, 0.5);

fn table_operator(name: &str, p: &Presentation, degree: usize, images: Vec<Element>) -> SpanOperator {
    let p = p.clone();
    SpanOperator::new(name, Linearity::ConjugateLinear, move |v| {
        let mut out = Element::zero(&p);
        for (i, c) in v.terms() {
            let img = images.get(i.0).ok_or(AqgError::DegreeOverflow { requested: p.degree_of(*i), available: degree })?;
            out = &out + &img.scale(&c.conj());
        }
        Ok(out)
    })
}

/// All GNS operators of a presentation on one truncation.
pub struct Gns {
    pub space: GnsSpace,
    pub duality: Arc<Duality>,
    /// Modular data on a truncation large enough for products of two vectors.
    pub modular: Arc<ModularMaps>,
    pub tol: f64,
}

impl Gns {
    pub fn new(p: &Presentation, degree: usize, tol: f64) -> Result<Self> {
        let space = GnsSpace::new(p, degree)?;
        let big = p.cap_degree((2 * space.degree).max(space.degree + 1));
        let modular = ModularMaps::derive(p, big)?;
        let duality = Duality::with_modular(p, space.degree, modular.clone(), tol)?;
        Ok(Self { space, duality: Arc::new(duality), modular: Arc::new(modular), tol })
    }

    pub fn pres(&self) -> &Presentation {
        &self.space.pres
    }

    pub fn basis(&self) -> Vec<Element> {
        (0..self.space.dim).map(|i| self.pres().basis(i)).collect()
    }

    /// `π(a)Λ(x) = Λ(ax)`.
    pub fn pi(&self, a: &Element, x: &Element) -> Element {
        a * x
    }

    /// `γ(b)Λ(x) = Σ ⟨x₂, b⟩ Λ(x₁)`.
    pub fn gamma(&self, b: &DualElement, x: &Element) -> Result<Element> {
        let vals = self.duality.values(b)?;
        self.gamma_values(&vals, b, x)
    }

    fn gamma_values(&self, vals: &[Scalar], b: &DualElement, x: &Element) -> Result<Element> {
        let p = self.pres();
        let mut out = Element::zero(p);
        for ((i, j), c) in x.comul().terms() {
            let v = match vals.get(j.0) {
                Some(v) => v.clone(),
                None => crate::duality::pair(&p.basis(j.0), b)?,
            };
            if !v.is_zero() {
                out = &out + &p.basis(i.0).scale(&(c * &v));
            }
        }
        Ok(out)
    }

    // Operators by their defining formulas on Λ(A).

    /// `TΛ(a) = Λ(a*)`.
    pub fn t(&self) -> SpanOperator {
        SpanOperator::new("T", Linearity::ConjugateLinear, |a| Ok(a.star()))
    }

    /// `T*Λ(a) = Λ(σ′(a*))`.
    pub fn t_star(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("T*", Linearity::ConjugateLinear, move |a| m.sigma_prime.apply(&a.star()))
    }

    /// `T̂Λ(a) = Λ(S(a*)δ⁻¹)`.
    pub fn t_hat(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("T^", Linearity::ConjugateLinear, move |a| Ok(&a.star().antipode() * &m.delta_inv))
    }

    /// `T̂*Λ(a) = Λ(S(a)*)`.
    pub fn t_hat_star(&self) -> SpanOperator {
        SpanOperator::new("T^*", Linearity::ConjugateLinear, |a| Ok(a.antipode().star()))
    }

    /// `∇Λ(a) = Λ(σ′(a))`.
    pub fn nabla(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("∇", Linearity::Linear, move |a| m.sigma_prime.apply(a))
    }

    pub fn nabla_inv(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("∇⁻¹", Linearity::Linear, move |a| m.sigma_prime_inv.apply(a))
    }

    /// `∇̂Λ(a) = Λ(S⁻²(a)δ)`.
    pub fn nabla_hat(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("∇^", Linearity::Linear, move |a| m.apply(MapTag::NablaHat, a))
    }

    pub fn nabla_hat_inv(&self) -> SpanOperator {
        let m = self.modular.clone();
        SpanOperator::new("∇^⁻¹", Linearity::Linear, move |a| m.apply_inverse(MapTag::NablaHat, a))
    }

    /// `∇^{iz}` by eigen-scaling (`z = t` real gives the unitary group).
    pub fn nabla_pow(&self, z: Complex64, a: &Element) -> Result<Element> {
        self.modular.analytic_apply(MapTag::SigmaPrime, z, a, self.tol)
    }

    pub fn nabla_hat_pow(&self, z: Complex64, a: &Element) -> Result<Element> {
        self.modular.analytic_apply(MapTag::NablaHat, z, a, self.tol)
    }

    // The same operators computed on the dual side through Fourier preimages.

    /// `T̂Λ̂(b) = Λ̂(b*)`.
    pub fn t_hat_dual(&self, a: &Element) -> Result<Element> {
        Ok(self.duality.star(&fourier(a))?.preimage)
    }

    /// `T̂*Λ̂(b) = Λ̂(σ̂(b*))`.
    pub fn t_hat_star_dual(&self, a: &Element) -> Result<Element> {
        Ok(self.duality.sigma_hat(&self.duality.star(&fourier(a))?)?.preimage)
    }

    /// `TΛ̂(b) = Λ̂(S(b)*δ̂)`.
    pub fn t_dual(&self, a: &Element) -> Result<Element> {
        let d = &self.duality;
        let s = d.star(&d.antipode(&fourier(a))?)?;
        Ok(d.delta_hat_action(&s, DeltaHatSide::Right)?.preimage)
    }

    /// `T*Λ̂(b) = Λ̂(S(b*))`.
    pub fn t_star_dual(&self, a: &Element) -> Result<Element> {
        let d = &self.duality;
        Ok(d.antipode(&d.star(&fourier(a))?)?.preimage)
    }

    /// `J`, `Ĵ` on the truncation of the given degree, from the eigenbases of ∇ and ∇̂.
    pub fn polar_parts(&self, degree: usize, require_exact: bool) -> Result<PolarParts> {
        let p = self.pres().clone();
        let degree = p.cap_degree(degree);
        if degree > self.modular.degree {
            return Err(AqgError::DegreeOverflow { requested: degree, available: self.modular.degree });
        }
        let n = p.dim_upto(degree);
        let mut exact = true;
        let mut build = |tag: MapTag, conj: &dyn Fn(&Element) -> Element| -> Result<Vec<Element>> {
            let dec = self.modular.full_eigenbasis(&[tag], degree, self.tol)?;
            let mut images = Vec::with_capacity(n);
            for i in 0..n {
                let mut img = Element::zero(&p);
                for (lam, comp) in expand_in(&p, &p.basis(i), &dec, self.tol)? {
                    let f = scalar_pow_z(&lam, HALF_DOWN)?;
                    if !f.is_exact() {
                        if require_exact {
                            return Err(AqgError::Usage(format!("eigenvalue {} has no rational square root", lam.value)));
                        }
                        exact = false;
                    }
                    img = &img + &conj(&comp).scale(&f);
                }
                images.push(img);
            }
            Ok(images)
        };
        let j_images = build(MapTag::SigmaPrime, &|v| v.star())?;
        let delta_inv = self.modular.delta_inv.clone();
        let jh_images = build(MapTag::NablaHat, &|v| &v.star().antipode() * &delta_inv)?;
        Ok(PolarParts {
            degree,
            j: table_operator("J", &p, degree, j_images),
            j_hat: table_operator("J^", &p, degree, jh_images),
            exact,
        })
    }

    /// The checks of the modular-structure section on the full truncation.
    pub fn check(&self, env: Environment) -> VerificationReport {
        let mut rep = VerificationReport::new("gns", env);
        self.check_into(&mut rep);
        rep.normalize();
        rep
    }

    pub fn check_into(&self, rep: &mut VerificationReport) {
        let tol = self.tol;
        let p = self.pres().clone();
        let basis = self.basis();
        let lbl = |i: usize| p.maps().label(i);
        let sp = &self.space;

        let mut c = Check::exact("gns.lambda_inner", "Prop 1.2", tol);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                if let (Some(a), Some(b)) = (c.attempt(sp.inner(x, y)), c.attempt(sp.inner_gram(x, y))) {
                    c.scalars(&a, &b, || format!("⟨Λ({}), Λ({})⟩", lbl(i), lbl(j)));
                }
            }
        }
        rep.push(c.finish());

        // γ(b)Λ̂(y) = Λ̂(by), Sweedler evaluation against the dual product.
        let mut c = Check::exact("gns.gamma_lambda_hat", "Prop 1.2", tol);
        for (i, x) in basis.iter().enumerate() {
            let b = fourier(x);
            let Some(vals) = c.attempt(self.duality.values(&b)) else { continue };
            for (j, y) in basis.iter().enumerate() {
                let lhs = self.gamma_values(&vals, &b, y);
                let rhs = self.duality.mul(&b, &fourier(y));
                if let (Some(l), Some(r)) = (c.attempt(lhs), c.attempt(rhs)) {
                    c.elements(&l, &r.preimage, || format!("γ(F{})Λ̂(F{})", lbl(i), lbl(j)));
                }
            }
        }
        rep.push(c.finish());

        let t = self.t();
        let ts = self.t_star();
        let th = self.t_hat();
        let ths = self.t_hat_star();
        // ⟨Tξ, η⟩ = ⟨T*η, ξ⟩
        let mut c = Check::exact("gns.t_adjoint", "Prop 1.3", tol);
        let mut ch = Check::exact("gns.t_hat_adjoint", "Prop 1.3", tol);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let l = t.apply(x).and_then(|v| sp.inner(&v, y));
                let r = ts.apply(y).and_then(|v| sp.inner(&v, x));
                if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                    c.scalars(&l, &r, || format!("x = {}, y = {}", lbl(i), lbl(j)));
                }
                // Dual side: T̂Λ̂(b) = Λ̂(b*) and T̂*Λ̂(b) = Λ̂(σ̂(b*)).
                let l = self.t_hat_dual(x).and_then(|v| sp.inner(&v, y));
                let r = self.t_hat_star_dual(y).and_then(|v| sp.inner(&v, x));
                if let (Some(l), Some(r)) = (ch.attempt(l), ch.attempt(r)) {
                    ch.scalars(&l, &r, || format!("b = F{}, d = F{}", lbl(i), lbl(j)));
                }
            }
        }
        rep.push(c.finish());
        rep.push(ch.finish());

        let mut c = Check::exact("gns.t_hat_on_lambda", "Prop 1.4", tol);
        for (i, x) in basis.iter().enumerate() {
            if let (Some(l), Some(r)) = (c.attempt(self.t_hat_dual(x)), c.attempt(th.apply(x))) {
                c.elements(&l, &r, || format!("T^Λ({})", lbl(i)));
            }
            if let (Some(l), Some(r)) = (c.attempt(self.t_hat_star_dual(x)), c.attempt(ths.apply(x))) {
                c.elements(&l, &r, || format!("T^*Λ({})", lbl(i)));
            }
        }
        rep.push(c.finish());

        let mut c = Check::exact("gns.t_on_lambda_hat", "Prop 1.5", tol);
        for (i, x) in basis.iter().enumerate() {
            if let (Some(l), Some(r)) = (c.attempt(t.apply(x)), c.attempt(self.t_dual(x))) {
                c.elements(&l, &r, || format!("TΛ^(F{})", lbl(i)));
            }
            if let (Some(l), Some(r)) = (c.attempt(ts.apply(x)), c.attempt(self.t_star_dual(x))) {
                c.elements(&l, &r, || format!("T*Λ^(F{})", lbl(i)));
            }
        }
        rep.push(c.finish());

        self.check_nabla(rep, &basis);
        self.check_polar(rep, &basis);
        self.check_conjugations(rep, &basis);
        self.check_delta_actions(rep, &basis);
    }

    /// Four formulas, each computed once from the A-side formulas and once from the B-side ones.
    fn check_nabla(&self, rep: &mut VerificationReport, basis: &[Element]) {
        let tol = self.tol;
        let p = self.pres().clone();
        let lbl = |i: usize| p.maps().label(i);
        let d = &self.duality;
        let (t, ts, th, ths) = (self.t(), self.t_star(), self.t_hat(), self.t_hat_star());
        let nabla = self.nabla();
        let nabla_hat = self.nabla_hat();
        type Route<'a> = Box<dyn Fn(&Element) -> Result<Element> + 'a>;
        let formulas: Vec<(&str, Route, Route, Route)> = vec![
            (
                "nabla_on_lambda",
                Box::new(|a: &Element| nabla.apply(a)),
                Box::new(|a: &Element| ts.apply(&t.apply(a)?)),
                Box::new(|a: &Element| self.t_star_dual(&self.t_dual(a)?)),
            ),
            (
                "nabla_on_lambda_hat",
                Box::new(|a: &Element| Ok(d.delta_hat_action(&d.s_squared(&fourier(a))?, DeltaHatSide::InvRight)?.preimage)),
                Box::new(|a: &Element| ts.apply(&t.apply(a)?)),
                Box::new(|a: &Element| self.t_star_dual(&self.t_dual(a)?)),
            ),
            (
                "nabla_hat_on_lambda",
                Box::new(|a: &Element| nabla_hat.apply(a)),
                Box::new(|a: &Element| ths.apply(&th.apply(a)?)),
                Box::new(|a: &Element| self.t_hat_star_dual(&self.t_hat_dual(a)?)),
            ),
            (
                "nabla_hat_on_lambda_hat",
                Box::new(|a: &Element| Ok(d.sigma_hat(&fourier(a))?.preimage)),
                Box::new(|a: &Element| ths.apply(&th.apply(a)?)),
                Box::new(|a: &Element| self.t_hat_star_dual(&self.t_hat_dual(a)?)),
            ),
        ];
        for (name, formula, via_a, via_b) in &formulas {
            let mut ca = Check::exact(&format!("gns.{name}.via_a"), "Prop 1.6", tol);
            let mut cb = Check::exact(&format!("gns.{name}.via_b"), "Prop 1.6", tol);
            for (i, x) in basis.iter().enumerate() {
                let Some(want) = ca.attempt(formula(x)) else { continue };
                if let Some(v) = ca.attempt(via_a(x)) {
                    ca.elements(&v, &want, || format!("a = {}", lbl(i)));
                }
                if let Some(v) = cb.attempt(via_b(x)) {
                    cb.elements(&v, &want, || format!("a = {}", lbl(i)));
                }
            }
            ca.note("adjoint composition from the formulas on Λ(A)");
            cb.note("adjoint composition from the formulas on Λ^(B)");
            rep.push(ca.finish());
            rep.push(cb.finish());
        }
    }

    fn check_polar(&self, rep: &mut VerificationReport, basis: &[Element]) {
        let tol = self.tol;
        let p = self.pres().clone();
        let lbl = |i: usize| p.maps().label(i);
        let sp = &self.space;
        let mut c = Check::exact("gns.polar", "Def 1.polar", tol);
        let polar = match self.polar_parts(sp.degree, false) {
            Ok(v) => v,
            Err(e) => {
                c.error(&e);
                rep.push(c.finish());
                return;
            }
        };
        let half = Complex64::new(0.0, -0.5);
        for (op, tt, name, tag) in [(&polar.j, self.t(), "J", MapTag::SigmaPrime), (&polar.j_hat, self.t_hat(), "J^", MapTag::NablaHat)] {
            for (i, x) in basis.iter().enumerate() {
                let Some(jx) = c.attempt(op.apply(x)) else { continue };
                if let Some(jjx) = c.attempt(op.apply(&jx)) {
                    c.elements(&jjx, x, || format!("{name}² Λ({})", lbl(i)));
                }
                // T = J ∇^{1/2}
                let root = self.modular.analytic_apply(tag, half, x, tol);
                if let (Some(r), Some(tx)) = (c.attempt(root), c.attempt(tt.apply(x))) {
                    if let Some(v) = c.attempt(op.apply(&r)) {
                        c.elements(&v, &tx, || format!("{name}(polar) on Λ({})", lbl(i)));
                    }
                }
                for (j, y) in basis.iter().enumerate() {
                    let Some(jy) = c.attempt(op.apply(y)) else { continue };
                    if let (Some(l), Some(r)) = (c.attempt(sp.inner(&jx, &jy)), c.attempt(sp.inner(y, x))) {
                        c.scalars(&l, &r, || format!("⟨{name}Λ({}), {name}Λ({})⟩", lbl(i), lbl(j)));
                    }
                }
            }
        }
        c.note(if polar.exact { "square roots exact" } else { "square roots in floating point" });
        rep.push(c.finish());
    }

    fn check_conjugations(&self, rep: &mut VerificationReport, basis: &[Element]) {
        let tol = self.tol;
        let p = self.pres().clone();
        let lbl = |i: usize| p.maps().label(i);
        let d = &self.duality;
        let m = &self.modular;
        let (nabla, nabla_inv, nh, nh_inv) = (self.nabla(), self.nabla_inv(), self.nabla_hat(), self.nabla_hat_inv());

        // ∇π(a)∇⁻¹ = π(σ′(a)) and ∇^π(a)∇^⁻¹ = π(S⁻²(a)).
        let mut c1 = Check::exact("gns.conj_nabla_pi", "Prop 1.7", tol);
        let mut c4 = Check::exact("gns.conj_nabla_hat_pi", "Prop 1.7", tol);
        for (i, a) in basis.iter().enumerate() {
            let sa = c1.attempt(m.sigma_prime.apply(a));
            let s2a = m.s_squared_inv(a);
            for (j, x) in basis.iter().enumerate() {
                if let Some(sa) = &sa {
                    let lhs = nabla_inv.apply(x).and_then(|v| nabla.apply(&self.pi(a, &v)));
                    if let Some(l) = c1.attempt(lhs) {
                        c1.elements(&l, &self.pi(sa, x), || format!("a = {}, x = {}", lbl(i), lbl(j)));
                    }
                }
                let lhs = nh_inv.apply(x).and_then(|v| nh.apply(&self.pi(a, &v)));
                if let Some(l) = c4.attempt(lhs) {
                    c4.elements(&l, &self.pi(&s2a, x), || format!("a = {}, x = {}", lbl(i), lbl(j)));
                }
            }
        }

        // ∇γ(b)∇⁻¹ = γ(S²(b)) and ∇^γ(b)∇^⁻¹ = γ(σ^(b)).
        let mut c2 = Check::exact("gns.conj_nabla_gamma", "Prop 1.7", tol);
        let mut c3 = Check::exact("gns.conj_nabla_hat_gamma", "Prop 1.7", tol);
        for (i, a) in basis.iter().enumerate() {
            let b = fourier(a);
            let s2b = c2.attempt(d.s_squared(&b));
            let shb = c3.attempt(d.sigma_hat(&b));
            for (j, x) in basis.iter().enumerate() {
                if let Some(s2b) = &s2b {
                    let lhs = nabla_inv.apply(x).and_then(|v| nabla.apply(&self.gamma(&b, &v)?));
                    if let (Some(l), Some(r)) = (c2.attempt(lhs), c2.attempt(self.gamma(s2b, x))) {
                        c2.elements(&l, &r, || format!("b = F{}, x = {}", lbl(i), lbl(j)));
                    }
                }
                if let Some(shb) = &shb {
                    let lhs = nh_inv.apply(x).and_then(|v| nh.apply(&self.gamma(&b, &v)?));
                    if let (Some(l), Some(r)) = (c3.attempt(lhs), c3.attempt(self.gamma(shb, x))) {
                        c3.elements(&l, &r, || format!("b = F{}, x = {}", lbl(i), lbl(j)));
                    }
                }
            }
        }
        for c in [c1, c2, c3, c4] {
            rep.push(c.finish());
        }
    }

    fn check_delta_actions(&self, rep: &mut VerificationReport, basis: &[Element]) {
        let tol = self.tol;
        let p = self.pres().clone();
        let lbl = |i: usize| p.maps().label(i);
        let d = &self.duality;
        let m = &self.modular;
        // γ(δ^)Λ(a) = Σ ε(σ⁻¹(a₂))Λ(a₁) = Λ(S²σ⁻¹(a)).
        let mut c = Check::exact("gns.delta_hat_action", "Prop 1.8", tol);
        let chi = d.delta_hat_character().to_vec();
        for (i, a) in basis.iter().enumerate() {
            let mut lhs = Element::zero(&p);
            for ((k, l), v) in a.comul().terms() {
                lhs = &lhs + &p.basis(k.0).scale(&(v * &chi[l.0]));
            }
            if let Some(r) = c.attempt(m.sigma_inv.apply(a)) {
                c.elements(&lhs, &m.s_squared(&r), || format!("a = {}", lbl(i)));
            }
        }
        rep.push(c.finish());
        // π(δ)Λ^(b) = Λ^(S²σ^′(b)).
        let mut c = Check::exact("gns.delta_action_on_lambda_hat", "Prop 1.8", tol);
        for (i, a) in basis.iter().enumerate() {
            let rhs = d.sigma_hat_prime(&fourier(a)).and_then(|v| d.s_squared(&v));
            if let Some(r) = c.attempt(rhs) {
                c.elements(&self.pi(&m.delta, a), &r.preimage, || format!("b = F{}", lbl(i)));
            }
        }
        rep.push(c.finish());
        rep.push(CheckRecord::info(
            "gns.delta_hat_inverse_rule",
            "Prop 1.8",
            format!("character of the inverse dual modular element: {}", d.delta_hat_inverse_rule()),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, make_suq2, rational, FiniteGroup};
    use crate::report::Status;

    #[test]
    fn lambda_inner_products() {
        let p = make_group_algebra(&FiniteGroup::s3());
        let s = GnsSpace::new(&p, 0).unwrap();
        let u = p.basis(2);
        assert_eq!(s.inner(&u, &u).unwrap(), Scalar::one());
        assert_eq!(s.lambda(&Element::zero(&p)).unwrap(), Element::zero(&p));
        let q = make_suq2(&rational(1, 4), 2).unwrap();
        let s = GnsSpace::new(&q, 1).unwrap();
        let c = q.element("c").unwrap();
        assert_eq!(s.inner(&c, &c).unwrap(), Scalar::ratio(16, 17));
        assert!(matches!(s.lambda(&(&c * &c)), Err(AqgError::DegreeOverflow { .. })));
    }

    #[test]
    fn gamma_of_point_functional() {
        let p = make_group_algebra(&FiniteGroup::cyclic(4));
        let g = Gns::new(&p, 0, 1e-9).unwrap();
        let b = fourier(&p.basis(1));
        for h in 0..4 {
            let want = if h == 1 { p.basis(1) } else { Element::zero(&p) };
            assert_eq!(g.gamma(&b, &p.basis(h)).unwrap(), want);
        }
        assert_eq!(g.pi(&p.basis(1), &p.basis(2)), p.basis(3));
    }

    #[test]
    fn function_algebra_operators() {
        let p = make_function_algebra(&FiniteGroup::cyclic(4));
        let g = Gns::new(&p, 0, 1e-9).unwrap();
        let e1 = p.basis(1);
        assert_eq!(g.t().apply(&e1).unwrap(), e1);
        assert_eq!(g.t_hat().apply(&e1).unwrap(), p.basis(3));
        assert_eq!(g.nabla().apply(&e1).unwrap(), e1);
        let polar = g.polar_parts(0, true).unwrap();
        assert_eq!(polar.j.apply(&e1).unwrap(), e1);
        assert!(polar.exact);
    }

    #[test]
    fn group_algebra_j_hat_permutes() {
        let p = make_group_algebra(&FiniteGroup::s3());
        let g = Gns::new(&p, 0, 1e-9).unwrap();
        let polar = g.polar_parts(0, true).unwrap();
        for i in 0..6 {
            let img = polar.j_hat.apply(&p.basis(i)).unwrap();
            assert_eq!(img.support_len(), 1);
            assert_eq!(polar.j_hat.apply(&img).unwrap(), p.basis(i));
        }
    }

    #[test]
    fn finite_checks_pass_exactly() {
        for p in [make_function_algebra(&FiniteGroup::cyclic(4)), make_group_algebra(&FiniteGroup::s3())] {
            let g = Gns::new(&p, 0, 1e-9).unwrap();
            let r = g.check(Environment::default());
            assert!(r.passed(), "{:?}", r.failures());
            assert!(r.checks.iter().filter(|c| c.status == Status::Pass).all(|c| c.residual == "0"));
        }
    }

    #[test]
    fn suq2_operator_values() {
        let p = make_suq2(&rational(1, 4), 2).unwrap();
        let g = Gns::new(&p, 1, 1e-9).unwrap();
        let c = p.element("c").unwrap();
        let cs = p.element("c*").unwrap();
        // σ′(c*) = c*, so T*Λ(c) = Λ(c*).
        assert_eq!(g.t_star().apply(&c).unwrap(), cs);
        let polar = g.polar_parts(1, true).unwrap();
        assert!(polar.exact);
        let jc = polar.j.apply(&c).unwrap();
        assert_eq!(polar.j.apply(&jc).unwrap(), c);
        let r = g.check(Environment::default());
        assert!(r.passed(), "{:?}", r.failures());
    }
}
