//! The dual B, handled through Fourier preimages.
//!
//! An element `b ∈ B` is stored as the `a ∈ A` with `b = ψ(S(·)a)`. Every dual
//! operation evaluates the resulting functional on a basis of `A` and solves
//! back for the preimage; the solve is checked against one extra degree so a
//! result escaping the truncation is reported instead of silently truncated.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{AqgError, Result};
use crate::hopf::{BasisIndex, Element, Presentation};
use crate::linalg::DenseMatrix;
use crate::modular::{expand_in, joint_eigen_of, orbit_closure, EigenDecomposition, ModularMaps, OperatorTag, TruncatedMap};
use crate::report::{Check, VerificationReport};
use crate::scalar::{scalar_pow_z, Scalar};

/// `b = ψ(S(·) preimage)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualElement {
    pub preimage: Element,
}

impl DualElement {
    pub fn zero(p: &Presentation) -> Self {
        Self { preimage: Element::zero(p) }
    }

    pub fn is_zero(&self) -> bool {
        self.preimage.is_zero()
    }

    pub fn add(&self, other: &DualElement) -> DualElement {
        DualElement { preimage: &self.preimage + &other.preimage }
    }

    pub fn sub(&self, other: &DualElement) -> DualElement {
        DualElement { preimage: &self.preimage - &other.preimage }
    }

    pub fn scale(&self, s: &Scalar) -> DualElement {
        DualElement { preimage: self.preimage.scale(s) }
    }
}

/// The Fourier transform `a ↦ ψ(S(·)a)`.
pub fn fourier(a: &Element) -> DualElement {
    DualElement { preimage: a.clone() }
}

/// `⟨x, b⟩ = ψ(S(x) preimage(b))`.
pub fn pair(x: &Element, b: &DualElement) -> Result<Scalar> {
    (&x.antipode() * &b.preimage).right_integral()
}

/// Which side δ̂ (or δ̂⁻¹) multiplies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaHatSide {
    Left,
    Right,
    InvLeft,
    InvRight,
}

/// Operators on B used in orbit closures and eigenbases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualTag {
    SSquared,
    SigmaHat,
    SigmaHatPrime,
    DeltaHatLeft,
    DeltaHatRight,
    /// `b ↦ S²(b) δ̂⁻¹`, the action of ∇ on Λ̂(B).
    Nabla,
}

impl OperatorTag for DualTag {
    fn name(&self) -> &'static str {
        match self {
            DualTag::SSquared => "S^2 (dual)",
            DualTag::SigmaHat => "sigma^",
            DualTag::SigmaHatPrime => "sigma^'",
            DualTag::DeltaHatLeft => "delta^.",
            DualTag::DeltaHatRight => ".delta^",
            DualTag::Nabla => "S^2(.)delta^-1",
        }
    }
}

/// Modular automorphisms of φ̂ and ψ̂, recorded on preimages of a truncation.
#[derive(Clone, Debug)]
pub struct DualModularData {
    pub sigma_hat: TruncatedMap,
    pub sigma_hat_inv: TruncatedMap,
    pub sigma_hat_prime: TruncatedMap,
    pub sigma_hat_prime_inv: TruncatedMap,
}

/// Fourier machinery on the truncation of a given degree.
pub struct Duality {
    pub pres: Presentation,
    /// Preimages are solved in the truncation of this degree.
    pub degree: usize,
    pub modular: ModularMaps,
    pub tol: f64,
    n: usize,
    n_ext: usize,
    /// `table[x][j] = ψ(S(b_x) b_j)` for `x < n_ext`, `j < n`.
    table: Vec<Vec<Scalar>>,
    pinv: DenseMatrix,
    /// Character of δ̂⁻¹ on basis elements below `n_ext`, and its description.
    delta_hat_inv: (Vec<Scalar>, &'static str),
    delta_hat: Vec<Scalar>,
    dual_modular: OnceLock<DualModularData>,
}

impl Duality {
    pub fn new(p: &Presentation, degree: usize, tol: f64) -> Result<Self> {
        let degree = p.cap_degree(degree);
        let ext = p.cap_degree(degree + 1);
        let modular = ModularMaps::derive(p, ext)?;
        Self::with_modular(p, degree, modular, tol)
    }

    /// Uses already derived modular data (its degree must cover one more than `degree`).
    pub fn with_modular(p: &Presentation, degree: usize, modular: ModularMaps, tol: f64) -> Result<Self> {
        let degree = p.cap_degree(degree);
        let ext = p.cap_degree(degree + 1);
        if modular.degree < ext {
            return Err(AqgError::DegreeOverflow { requested: ext, available: modular.degree });
        }
        let n = p.dim_upto(degree);
        let n_ext = p.dim_upto(ext);
        let mut table = Vec::with_capacity(n_ext);
        for x in 0..n_ext {
            let sx = p.basis(x).antipode();
            let row: Vec<Scalar> = (0..n).map(|j| (&sx * &p.basis(j)).right_integral()).collect::<Result<_>>()?;
            table.push(row);
        }
        let mut pm = DenseMatrix::zeros(n, n);
        for (x, row) in table.iter().take(n).enumerate() {
            for (j, v) in row.iter().enumerate() {
                pm.set(x, j, v.clone());
            }
        }
        let pinv = pm.inverse(0.0).map_err(|e| AqgError::Singular(format!("Fourier pairing at degree {degree}: {e}")))?;
        let mut d = Self {
            pres: p.clone(),
            degree,
            modular,
            tol,
            n,
            n_ext,
            table,
            pinv,
            delta_hat_inv: (Vec::new(), ""),
            delta_hat: Vec::new(),
            dual_modular: OnceLock::new(),
        };
        d.delta_hat = (0..n_ext).map(|x| Ok(d.modular.sigma_inv.apply(&p.basis(x))?.counit())).collect::<Result<_>>()?;
        d.calibrate_delta_hat_inverse()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Description of the character used for δ̂⁻¹.
    pub fn delta_hat_inverse_rule(&self) -> &'static str {
        self.delta_hat_inv.1
    }

    fn calibrate_delta_hat_inverse(&mut self) -> Result<()> {
        let p = self.pres.clone();
        let via_antipode: Vec<Scalar> =
            (0..self.n_ext).map(|x| Ok(self.modular.sigma_inv.apply(&p.basis(x).antipode())?.counit())).collect::<Result<_>>()?;
        let via_sigma: Vec<Scalar> = (0..self.n_ext).map(|x| Ok(self.modular.sigma.apply(&p.basis(x))?.counit())).collect::<Result<_>>()?;
        for cand in [(via_antipode, "eps(sigma^-1(S(x)))"), (via_sigma, "eps(sigma(x))")] {
            self.delta_hat_inv = cand;
            let mut ok = true;
            for i in 0..self.n {
                let b = fourier(&p.basis(i));
                let l = self.delta_hat_action(&self.delta_hat_action(&b, DeltaHatSide::InvLeft)?, DeltaHatSide::Left)?;
                let r = self.delta_hat_action(&self.delta_hat_action(&b, DeltaHatSide::InvRight)?, DeltaHatSide::Right)?;
                if !l.preimage.approx_eq(&b.preimage, self.tol) || !r.preimage.approx_eq(&b.preimage, self.tol) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(());
            }
        }
        Err(AqgError::Inconsistent("no character inverts the action of the dual modular element".into()))
    }

    /// Values `⟨b_x, b⟩` for every basis element below the check dimension.
    pub fn values(&self, b: &DualElement) -> Result<Vec<Scalar>> {
        let a = &b.preimage;
        if a.degree() <= self.degree || a.is_zero() {
            let coords: Vec<(usize, &Scalar)> = a.terms().map(|(i, c)| (i.0, c)).collect();
            Ok(self
                .table
                .iter()
                .map(|row| {
                    let mut acc = Scalar::zero();
                    for (j, c) in &coords {
                        acc += &(&row[*j] * *c);
                    }
                    acc
                })
                .collect())
        } else {
            (0..self.n_ext).map(|x| pair(&self.pres.basis(x), b)).collect()
        }
    }

    /// Solves for the preimage of the functional with the given basis values.
    pub fn solve(&self, vals: &[Scalar]) -> Result<DualElement> {
        let coords = self.pinv.mul_vec(&vals[..self.n]);
        for x in self.n..self.n_ext {
            let mut acc = Scalar::zero();
            for (j, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    acc += &(&self.table[x][j] * c);
                }
            }
            let d = &acc - &vals[x];
            let bad = if d.is_exact() { !d.is_zero() } else { d.abs() > self.tol };
            if bad {
                return Err(AqgError::NotClosed { degree: self.degree, required: self.degree + 1 });
            }
        }
        Ok(DualElement { preimage: Element::from_coords(&self.pres, &coords) })
    }

    /// Preimage of an arbitrary functional given on basis elements.
    pub fn functional(&self, f: impl Fn(BasisIndex) -> Result<Scalar>) -> Result<DualElement> {
        let vals: Vec<Scalar> = (0..self.n_ext).map(|x| f(BasisIndex(x))).collect::<Result<_>>()?;
        self.solve(&vals)
    }

    fn leg(&self, v: &[Scalar], i: BasisIndex) -> Result<Scalar> {
        v.get(i.0).cloned().ok_or(AqgError::DegreeOverflow { requested: self.pres.degree_of(i), available: self.degree + 1 })
    }

    /// Values of `x ↦ Σ v1(x₁) v2(x₂)`.
    fn convolve(&self, v1: &[Scalar], v2: &[Scalar]) -> Result<Vec<Scalar>> {
        (0..self.n_ext)
            .map(|x| {
                let mut acc = Scalar::zero();
                for ((i, j), c) in self.pres.basis(x).comul().terms() {
                    let l = self.leg(v1, *i)?;
                    if l.is_zero() {
                        continue;
                    }
                    acc += &(&(c * &l) * &self.leg(v2, *j)?);
                }
                Ok(acc)
            })
            .collect()
    }

    /// Values of `x ↦ v(f(x))` (conjugated when `conj`).
    fn pullback(&self, v: &[Scalar], f: impl Fn(&Element) -> Result<Element>, conj: bool) -> Result<Vec<Scalar>> {
        (0..self.n_ext)
            .map(|x| {
                let img = f(&self.pres.basis(x))?;
                let mut acc = Scalar::zero();
                for (k, c) in img.terms() {
                    acc += &(c * &self.leg(v, *k)?);
                }
                Ok(if conj { acc.conj() } else { acc })
            })
            .collect()
    }

    /// Preimage of `u ↦ ⟨k u, b⟩` (`left`) or `u ↦ ⟨u k, b⟩`.
    pub fn translate(&self, k: &Element, b: &DualElement, left: bool) -> Result<DualElement> {
        let vals = self.values(b)?;
        self.functional(|u| {
            let bu = self.pres.basis(u.0);
            let prod = if left { k * &bu } else { &bu * k };
            let mut acc = Scalar::zero();
            for (m, v) in prod.terms() {
                let w = match vals.get(m.0) {
                    Some(w) => w.clone(),
                    None => pair(&self.pres.basis(m.0), b)?,
                };
                acc += &(v * &w);
            }
            Ok(acc)
        })
    }

    /// `(b1 b2)(x) = Σ b1(x₁) b2(x₂)`.
    pub fn mul(&self, b1: &DualElement, b2: &DualElement) -> Result<DualElement> {
        if b1.is_zero() || b2.is_zero() {
            return Ok(DualElement::zero(&self.pres));
        }
        let v = self.convolve(&self.values(b1)?, &self.values(b2)?)?;
        self.solve(&v)
    }

    /// `⟨x, b*⟩ = ⟨S(x)*, b⟩⁻`.
    pub fn star(&self, b: &DualElement) -> Result<DualElement> {
        let v = self.pullback(&self.values(b)?, |x| Ok(x.antipode().star()), true)?;
        self.solve(&v)
    }

    /// `⟨x, S(b)⟩ = ⟨S(x), b⟩`.
    pub fn antipode(&self, b: &DualElement) -> Result<DualElement> {
        let v = self.pullback(&self.values(b)?, |x| Ok(x.antipode()), false)?;
        self.solve(&v)
    }

    pub fn antipode_inv(&self, b: &DualElement) -> Result<DualElement> {
        let v = self.pullback(&self.values(b)?, |x| Ok(x.antipode_inv()), false)?;
        self.solve(&v)
    }

    /// `⟨x, S²(b)⟩ = ⟨S²(x), b⟩`.
    pub fn s_squared(&self, b: &DualElement) -> Result<DualElement> {
        let v = self.pullback(&self.values(b)?, |x| Ok(x.antipode().antipode()), false)?;
        self.solve(&v)
    }

    pub fn s_squared_inv(&self, b: &DualElement) -> Result<DualElement> {
        let v = self.pullback(&self.values(b)?, |x| Ok(x.antipode_inv().antipode_inv()), false)?;
        self.solve(&v)
    }

    /// The unit of B, which exists only for finite presentations (`⟨x, 1⟩ = ε(x)`).
    pub fn unit(&self) -> Result<DualElement> {
        self.functional(|i| Ok(self.pres.maps().counit(i.0)))
    }

    /// `ε(b) = ⟨1, b⟩`.
    pub fn counit(&self, b: &DualElement) -> Result<Scalar> {
        pair(&self.pres.unit(), b)
    }

    /// `φ̂(b) = ε(preimage)`.
    pub fn left_integral(&self, b: &DualElement) -> Scalar {
        b.preimage.counit()
    }

    /// `ψ̂ = φ̂ ∘ S`.
    pub fn right_integral(&self, b: &DualElement) -> Result<Scalar> {
        Ok(self.left_integral(&self.antipode(b)?))
    }

    /// `⟨x, δ̂⟩ = ε(σ⁻¹(x))`, on basis elements.
    pub fn delta_hat_character(&self) -> &[Scalar] {
        &self.delta_hat
    }

    pub fn delta_hat_inverse_character(&self) -> &[Scalar] {
        &self.delta_hat_inv.0
    }

    pub fn delta_hat_action(&self, b: &DualElement, side: DeltaHatSide) -> Result<DualElement> {
        let v = self.values(b)?;
        let chi = match side {
            DeltaHatSide::Left | DeltaHatSide::Right => &self.delta_hat,
            _ => &self.delta_hat_inv.0,
        };
        let w = match side {
            DeltaHatSide::Left | DeltaHatSide::InvLeft => self.convolve(chi, &v)?,
            _ => self.convolve(&v, chi)?,
        };
        self.solve(&w)
    }

    /// `(φ̂(â*â), ψ(a*a))`.
    pub fn plancherel(&self, a: &Element) -> Result<(Scalar, Scalar)> {
        let b = fourier(a);
        let lhs = self.left_integral(&self.mul(&self.star(&b)?, &b)?);
        let rhs = (&a.star() * a).right_integral()?;
        Ok((lhs, rhs))
    }

    fn fourier_basis(&self, i: usize) -> DualElement {
        fourier(&self.pres.basis(i))
    }

    fn solve_weight(&self, weight: &dyn Fn(&DualElement) -> Result<Scalar>, name: &str) -> Result<TruncatedMap> {
        let n = self.n;
        let mut prods: Vec<Vec<Scalar>> = vec![Vec::with_capacity(self.n_ext); n];
        for (x, row) in prods.iter_mut().enumerate() {
            let bx = self.fourier_basis(x);
            for y in 0..self.n_ext {
                row.push(weight(&self.mul(&bx, &self.fourier_basis(y))?)?);
            }
        }
        let mut w = DenseMatrix::zeros(n, n);
        for y in 0..n {
            for k in 0..n {
                w.set(y, k, prods[y][k].clone());
            }
        }
        let winv = w.inverse(0.0).map_err(|e| AqgError::Singular(format!("{name}: {e}")))?;
        let mut images = Vec::with_capacity(n);
        for row in prods.iter() {
            let rhs: Vec<Scalar> = row[..n].to_vec();
            images.push(Element::from_coords(&self.pres, &winv.mul_vec(&rhs)));
        }
        let map = TruncatedMap { name: name.to_string(), degree: self.degree, images };
        // Closure: w(b d) = w(d σ̂(b)) also for d one degree higher.
        for (x, row) in prods.iter().enumerate() {
            let sb = fourier(&map.images[x]);
            for (y, want) in row.iter().enumerate().skip(n) {
                let got = weight(&self.mul(&self.fourier_basis(y), &sb)?)?;
                if &got != want {
                    return Err(AqgError::NotClosed { degree: self.degree, required: self.degree + 1 });
                }
            }
        }
        Ok(map)
    }

    /// σ̂ from `φ̂(bd) = φ̂(d σ̂(b))` and σ̂′ from `ψ̂(bd) = ψ̂(d σ̂′(b))`.
    pub fn dual_modular(&self) -> Result<&DualModularData> {
        if let Some(d) = self.dual_modular.get() {
            return Ok(d);
        }
        let phi = |b: &DualElement| Ok(self.left_integral(b));
        let psi = |b: &DualElement| self.right_integral(b);
        let sigma_hat = self.solve_weight(&phi, "sigma_hat")?;
        let sigma_hat_prime = self.solve_weight(&psi, "sigma_hat_prime")?;
        let data = DualModularData {
            sigma_hat_inv: sigma_hat.inverse("sigma_hat_inv")?,
            sigma_hat_prime_inv: sigma_hat_prime.inverse("sigma_hat_prime_inv")?,
            sigma_hat,
            sigma_hat_prime,
        };
        let _ = self.dual_modular.set(data);
        Ok(self.dual_modular.get().expect("just set"))
    }

    pub fn sigma_hat(&self, b: &DualElement) -> Result<DualElement> {
        Ok(fourier(&self.dual_modular()?.sigma_hat.apply(&b.preimage)?))
    }

    pub fn sigma_hat_inv(&self, b: &DualElement) -> Result<DualElement> {
        Ok(fourier(&self.dual_modular()?.sigma_hat_inv.apply(&b.preimage)?))
    }

    pub fn sigma_hat_prime(&self, b: &DualElement) -> Result<DualElement> {
        Ok(fourier(&self.dual_modular()?.sigma_hat_prime.apply(&b.preimage)?))
    }

    pub fn sigma_hat_prime_inv(&self, b: &DualElement) -> Result<DualElement> {
        Ok(fourier(&self.dual_modular()?.sigma_hat_prime_inv.apply(&b.preimage)?))
    }

    pub fn apply(&self, tag: DualTag, b: &DualElement) -> Result<DualElement> {
        match tag {
            DualTag::SSquared => self.s_squared(b),
            DualTag::SigmaHat => self.sigma_hat(b),
            DualTag::SigmaHatPrime => self.sigma_hat_prime(b),
            DualTag::DeltaHatLeft => self.delta_hat_action(b, DeltaHatSide::Left),
            DualTag::DeltaHatRight => self.delta_hat_action(b, DeltaHatSide::Right),
            DualTag::Nabla => self.delta_hat_action(&self.s_squared(b)?, DeltaHatSide::InvRight),
        }
    }

    pub fn apply_inverse(&self, tag: DualTag, b: &DualElement) -> Result<DualElement> {
        match tag {
            DualTag::SSquared => self.s_squared_inv(b),
            DualTag::SigmaHat => self.sigma_hat_inv(b),
            DualTag::SigmaHatPrime => self.sigma_hat_prime_inv(b),
            DualTag::DeltaHatLeft => self.delta_hat_action(b, DeltaHatSide::InvLeft),
            DualTag::DeltaHatRight => self.delta_hat_action(b, DeltaHatSide::InvRight),
            DualTag::Nabla => self.s_squared_inv(&self.delta_hat_action(b, DeltaHatSide::Right)?),
        }
    }

    /// Smallest subspace of B containing `b` and stable under the maps, as preimages.
    pub fn orbit_subspace(&self, b: &DualElement, tags: &[DualTag]) -> Result<Vec<DualElement>> {
        let basis = orbit_closure(&self.pres, self.n, &b.preimage, |v| {
            let d = fourier(v);
            let mut out = Vec::new();
            for t in tags {
                out.push(self.apply(*t, &d)?.preimage);
                out.push(self.apply_inverse(*t, &d)?.preimage);
            }
            Ok(out)
        })?;
        Ok(basis.into_iter().map(|a| fourier(&a)).collect())
    }

    /// Joint eigen-decomposition on a stable subspace of B; vectors are preimages.
    pub fn eigen_dual(&self, subspace: &[DualElement], tags: &[DualTag]) -> Result<EigenDecomposition> {
        let pre: Vec<Element> = subspace.iter().map(|b| b.preimage.clone()).collect();
        joint_eigen_of(&self.pres, &pre, tags, self.tol, |t, v| Ok(self.apply(t, &fourier(v))?.preimage))
    }

    /// `b ↦ Σ λ^{iz} b_λ` over eigencomponents for one operator on B.
    pub fn analytic_apply(&self, tag: DualTag, z: Complex64, b: &DualElement) -> Result<DualElement> {
        if b.is_zero() {
            return Ok(b.clone());
        }
        let orbit = self.orbit_subspace(b, &[tag])?;
        let dec = self.eigen_dual(&orbit, &[tag])?;
        let mut out = Element::zero(&self.pres);
        for (lam, v) in expand_in(&self.pres, &b.preimage, &dec, self.tol)? {
            out = &out + &v.scale(&scalar_pow_z(&lam, z)?);
        }
        Ok(fourier(&out))
    }
}

/// Order `n` when the presentation is the group algebra of a cyclic group `Zn`.
fn cyclic_group_algebra(p: &Presentation) -> Option<usize> {
    p.name().strip_prefix("C[Z")?.strip_suffix(']')?.parse().ok()
}

/// `e^{2πi k/n}`, exact for `n ∈ {1, 2, 4}`.
fn root_of_unity(k: usize, n: usize) -> Scalar {
    let k = k % n;
    match (n, k) {
        (_, 0) => Scalar::one(),
        (2, 1) | (4, 2) => Scalar::int(-1),
        (4, 1) => Scalar::i(),
        (4, 3) => -Scalar::i(),
        _ => {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Scalar::float(th.cos(), th.sin())
        }
    }
}

/// The duality checks on the truncation of `d`.
pub fn check_duality(d: &Duality, rep: &mut VerificationReport) {
    let tol = d.tol;
    let p = d.pres.clone();
    let n = d.dim();
    let lbl = |i: usize| p.maps().label(i);
    let basis: Vec<DualElement> = (0..n).map(|i| d.fourier_basis(i)).collect();

    // (ι⊗φ̂)Δ̂(b) = φ̂(b)1, with ⟨x⊗y, Δ̂b⟩ = ⟨xy, b⟩.
    let mut c = Check::exact("duality.left_invariance", "Def 1.1", tol);
    for (i, b) in basis.iter().enumerate() {
        let phi = d.left_integral(b);
        // The translate has preimage S(x)a, so x ranges where that stays in the truncation.
        for x in 0..p.dim_upto(d.degree - b.preimage.degree()) {
            let bx = p.basis(x);
            if let Some(s) = c.attempt(d.translate(&bx, b, true)) {
                c.scalars(&d.left_integral(&s), &(&bx.counit() * &phi), || format!("b = F{}, x = {}", lbl(i), lbl(x)));
            }
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("duality.plancherel", "Prop 1.2", tol);
    for (i, b) in basis.iter().enumerate() {
        let sb = c.attempt(d.star(b));
        for (j, e) in basis.iter().enumerate() {
            let Some(sb) = &sb else { continue };
            // ⟨Λ̂(e), Λ̂(b)⟩ = φ̂(b*e) = ψ(a_b* a_e)
            let lhs = d.mul(sb, e).map(|v| d.left_integral(&v));
            let rhs = (&b.preimage.star() * &e.preimage).right_integral();
            if let (Some(l), Some(r)) = (c.attempt(lhs), c.attempt(rhs)) {
                c.scalars(&l, &r, || format!("φ^((F{})* F{})", lbl(i), lbl(j)));
            }
        }
    }
    rep.push(c.finish());

    let small: Vec<usize> = (0..p.dim_upto(p.cap_degree(d.degree.min(1)))).collect();
    let mut c = Check::exact("duality.associativity", "Prop 1.2", tol);
    for &i in &small {
        for &j in &small {
            let Some(ij) = c.attempt(d.mul(&basis[i], &basis[j])) else { continue };
            for &k in &small {
                let l = d.mul(&ij, &basis[k]);
                let r = d.mul(&basis[j], &basis[k]).and_then(|jk| d.mul(&basis[i], &jk));
                if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                    c.elements(&l.preimage, &r.preimage, || format!("(F{} F{}) F{}", lbl(i), lbl(j), lbl(k)));
                }
            }
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("duality.star", "Prop 1.2", tol);
    let stars: Vec<Option<DualElement>> = basis.iter().map(|b| c.attempt(d.star(b))).collect();
    for (i, b) in basis.iter().enumerate() {
        let Some(sb) = &stars[i] else { continue };
        if let Some(ssb) = c.attempt(d.star(sb)) {
            c.elements(&ssb.preimage, &b.preimage, || format!("(F{})**", lbl(i)));
        }
        // The closed form b* = F(S(a*)δ⁻¹).
        let want = &b.preimage.star().antipode() * &d.modular.delta_inv;
        c.elements(&sb.preimage, &want, || format!("(F{})* closed form", lbl(i)));
        for &j in &small {
            let Some(sj) = &stars[j] else { continue };
            let l = d.mul(b, &basis[j]).and_then(|v| d.star(&v));
            let r = d.mul(sj, sb);
            if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                c.elements(&l.preimage, &r.preimage, || format!("(F{} F{})*", lbl(i), lbl(j)));
            }
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("duality.antipode", "Prop 1.3", tol);
    for (i, b) in basis.iter().enumerate() {
        let round = d.antipode(b).and_then(|v| d.antipode_inv(&v));
        if let Some(v) = c.attempt(round) {
            c.elements(&v.preimage, &b.preimage, || format!("S^-1 S(F{})", lbl(i)));
        }
        // S(S(b*)*) = b
        let twisted = d.star(b).and_then(|v| d.antipode(&v)).and_then(|v| d.star(&v)).and_then(|v| d.antipode(&v));
        if let Some(v) = c.attempt(twisted) {
            c.elements(&v.preimage, &b.preimage, || format!("S(S(F{}*)*)", lbl(i)));
        }
        for &j in &small {
            let l = d.mul(b, &basis[j]).and_then(|v| d.antipode(&v));
            let r = d.antipode(&basis[j]).and_then(|sj| d.mul(&sj, &d.antipode(b)?));
            if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
                c.elements(&l.preimage, &r.preimage, || format!("S(F{} F{})", lbl(i), lbl(j)));
            }
        }
    }
    rep.push(c.finish());

    // ⟨σ(x), b⟩ = ⟨x, S²(b)δ̂⁻¹⟩ and ⟨x, σ̂(b)⟩ = ⟨S²(x)δ⁻¹, b⟩.
    let mut c1 = Check::exact("duality.sigma_pairing", "Prop 1.6", tol);
    let mut c2 = Check::exact("duality.sigma_hat_pairing", "Prop 1.8", tol);
    for (i, b) in basis.iter().enumerate() {
        let right = d.s_squared(b).and_then(|v| d.delta_hat_action(&v, DeltaHatSide::InvRight));
        let sh = d.sigma_hat(b);
        let (right, sh) = (c1.attempt(right), c2.attempt(sh));
        for x in 0..n {
            let bx = p.basis(x);
            if let Some(r) = &right {
                let l = d.modular.sigma.apply(&bx).and_then(|s| pair(&s, b));
                if let (Some(l), Some(r)) = (c1.attempt(l), c1.attempt(pair(&bx, r))) {
                    c1.scalars(&l, &r, || format!("x = {}, b = F{}", lbl(x), lbl(i)));
                }
            }
            if let Some(sh) = &sh {
                let r = pair(&(&d.modular.s_squared(&bx) * &d.modular.delta_inv), b);
                if let (Some(l), Some(r)) = (c2.attempt(pair(&bx, sh)), c2.attempt(r)) {
                    c2.scalars(&l, &r, || format!("x = {}, b = F{}", lbl(x), lbl(i)));
                }
            }
        }
    }
    rep.push(c1.finish());
    rep.push(c2.finish());

    let mut c = Check::exact("duality.delta_hat", "Prop 1.8", tol);
    for (i, b) in basis.iter().enumerate() {
        let lr = d.delta_hat_action(b, DeltaHatSide::Left).and_then(|v| d.delta_hat_action(&v, DeltaHatSide::Right));
        let rl = d.delta_hat_action(b, DeltaHatSide::Right).and_then(|v| d.delta_hat_action(&v, DeltaHatSide::Left));
        if let (Some(l), Some(r)) = (c.attempt(lr), c.attempt(rl)) {
            c.elements(&l.preimage, &r.preimage, || format!("δ^ F{} δ^", lbl(i)));
        }
        let inv = d.delta_hat_action(b, DeltaHatSide::Left).and_then(|v| d.delta_hat_action(&v, DeltaHatSide::InvLeft));
        if let Some(v) = c.attempt(inv) {
            c.elements(&v.preimage, &b.preimage, || format!("δ^-1 δ^ F{}", lbl(i)));
        }
    }
    c.note(format!("inverse character: {}", d.delta_hat_inverse_rule()));
    rep.push(c.finish());

    if let Some(order) = cyclic_group_algebra(&p) {
        let mut c = Check::exact("duality.dft", "Fourier DFT", tol);
        let chars: Vec<Option<DualElement>> =
            (0..order).map(|k| c.attempt(d.functional(|g| Ok(root_of_unity(k * g.0, order))))).collect();
        for (k, bk) in chars.iter().enumerate() {
            let Some(bk) = bk else { continue };
            for g in 0..order {
                if let Some(v) = c.attempt(pair(&p.basis(g), bk)) {
                    c.scalars(&v, &root_of_unity(k * g, order), || format!("⟨u_{g}, χ_{k}⟩"));
                }
            }
            for (l, bl) in chars.iter().enumerate() {
                let (Some(bl), Some(bkl)) = (bl, &chars[(k + l) % order]) else { continue };
                if let Some(v) = c.attempt(d.mul(bk, bl)) {
                    c.elements(&v.preimage, &bkl.preimage, || format!("χ_{k} χ_{l}"));
                }
            }
        }
        c.note(format!("pairing of u_g with the characters of Z{order} against the {order}x{order} DFT matrix"));
        rep.push(c.finish());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, make_suq2, rational, FiniteGroup};

    #[test]
    fn point_functionals_of_group_algebra() {
        let p = make_group_algebra(&FiniteGroup::cyclic(4));
        let d = Duality::new(&p, 0, 1e-9).unwrap();
        for g in 0..4 {
            let b = fourier(&p.basis(g));
            for h in 0..4 {
                let want = if g == h { Scalar::one() } else { Scalar::zero() };
                assert_eq!(pair(&p.basis(h), &b).unwrap(), want);
            }
            assert_eq!(d.left_integral(&b), Scalar::one());
            assert_eq!(d.star(&b).unwrap(), b);
            for h in 0..4 {
                let prod = d.mul(&b, &fourier(&p.basis(h))).unwrap();
                let want = if g == h { b.clone() } else { DualElement::zero(&p) };
                assert_eq!(prod, want);
            }
        }
        let one = d.unit().unwrap();
        let b = fourier(&(&p.basis(1) + &p.basis(2).scale(&Scalar::i())));
        assert_eq!(d.mul(&one, &b).unwrap(), b);
        assert_eq!(d.mul(&DualElement::zero(&p), &b).unwrap(), DualElement::zero(&p));
    }

    #[test]
    fn function_algebra_fourier_values() {
        let p = make_function_algebra(&FiniteGroup::cyclic(2));
        let b = fourier(&(&p.basis(0) + &p.basis(1)));
        assert_eq!(pair(&p.basis(0), &b).unwrap(), Scalar::one());
        let d = Duality::new(&p, 0, 1e-9).unwrap();
        assert_eq!(d.left_integral(&fourier(&p.basis(0))), Scalar::one());
        assert_eq!(d.left_integral(&fourier(&p.basis(1))), Scalar::zero());
    }

    #[test]
    fn suq2_star_and_plancherel() {
        let p = make_suq2(&rational(1, 4), 2).unwrap();
        let d = Duality::new(&p, 2, 1e-9).unwrap();
        let c = p.element("c").unwrap();
        let cs = p.element("c*").unwrap();
        assert_eq!(d.star(&fourier(&c)).unwrap(), fourier(&cs.scale(&Scalar::int(-4))));
        let (l, r) = d.plancherel(&c).unwrap();
        assert_eq!(l, Scalar::ratio(16, 17));
        assert_eq!(r, Scalar::ratio(16, 17));
        assert_eq!(d.delta_hat_inverse_rule(), "eps(sigma^-1(S(x)))");
    }

    fn run(d: &Duality) -> VerificationReport {
        let mut rep = VerificationReport::new("duality", Default::default());
        check_duality(d, &mut rep);
        rep
    }

    #[test]
    fn dft_matches_for_cyclic_groups() {
        for (n, exact) in [(4, true), (8, false)] {
            let p = make_group_algebra(&FiniteGroup::cyclic(n));
            let rep = run(&Duality::new(&p, 0, 1e-12).unwrap());
            assert!(rep.passed(), "{:?}", rep.failures());
            let dft = rep.get("duality.dft").unwrap();
            assert_eq!(dft.tier == crate::report::Tier::Exact, exact);
        }
    }

    #[test]
    fn duality_checks_pass() {
        let p = make_function_algebra(&FiniteGroup::s3());
        assert!(run(&Duality::new(&p, 0, 1e-9).unwrap()).passed());
        let q = make_suq2(&rational(1, 4), 2).unwrap();
        let rep = run(&Duality::new(&q, 1, 1e-9).unwrap());
        assert!(rep.passed(), "{:?}", rep.failures());
        assert!(rep.checks.iter().all(|c| c.residual == "0"));
    }

    #[test]
    fn suq2_dual_unit_escapes_truncation() {
        let p = make_suq2(&rational(1, 4), 1).unwrap();
        let d = Duality::new(&p, 1, 1e-9).unwrap();
        assert!(matches!(d.unit(), Err(AqgError::NotClosed { .. })));
    }

    #[test]
    fn suq2_sigma_hat_scales_fourier_of_c() {
        let p = make_suq2(&rational(1, 4), 1).unwrap();
        let d = Duality::new(&p, 1, 1e-9).unwrap();
        let c = p.element("c").unwrap();
        let s = d.sigma_hat(&fourier(&c)).unwrap();
        let ratio = s.preimage.coeff(BasisIndex(p.maps().lookup("c").unwrap()));
        assert_eq!(s.preimage, c.scale(&ratio));
        assert!(ratio.as_rational().is_some_and(|r| *r > num_rational::BigRational::from_integer(0.into())));
        let dh = d.delta_hat_action(&fourier(&c), DeltaHatSide::Right).unwrap();
        let f = dh.preimage.coeff(BasisIndex(p.maps().lookup("c").unwrap()));
        assert_eq!(dh.preimage, c.scale(&f));
    }
}
