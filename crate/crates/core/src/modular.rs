//! Modular data of a presentation: σ′, σ, δ, κ, ρ, orbit subspaces, joint
//! eigenbases with positive spectra and the one-parameter groups.
//!
//! σ′ and σ are obtained by solving `ψ(xy) = ψ(y σ′(x))` and
//! `φ(xy) = φ(y σ(x))` (with `φ = ψ∘S`) on a degree truncation; δ⁻¹ by solving
//! `ψ(S(x)) = ψ(x δ⁻¹)`. Each solution is re-checked one degree higher.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{AqgError, Result};
use crate::hopf::{BasisIndex, Element, Presentation, TensorElement};
use crate::linalg::{DenseMatrix, Echelon, Insert, SparseRow};
use crate::scalar::{scalar_pow_z, PositiveEigenvalue, Scalar};
use crate::spectral::joint_diagonalize;

/// `ψ(b_i b_j)`.
pub fn psi_product(p: &Presentation, i: usize, j: usize) -> Result<Scalar> {
    let maps = p.maps();
    let mut acc = Scalar::zero();
    for (k, c) in maps.mult(i, j) {
        let v = maps.right_integral(k)?;
        if !v.is_zero() {
            acc += &(&c * &v);
        }
    }
    Ok(acc)
}

/// `φ(b_i b_j) = ψ(S(b_i b_j))`.
pub fn phi_product(p: &Presentation, i: usize, j: usize) -> Result<Scalar> {
    let prod = &p.basis(i) * &p.basis(j);
    prod.left_integral()
}

/// A linear map recorded by its images of the basis of a truncation.
#[derive(Clone, Debug)]
pub struct TruncatedMap {
    pub name: String,
    pub degree: usize,
    pub images: Vec<Element>,
}

impl TruncatedMap {
    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        x.map_linear(|i| {
            self.images.get(i.0).cloned().ok_or(AqgError::DegreeOverflow {
                requested: x.presentation().degree_of(i),
                available: self.degree,
            })
        })
    }

    pub fn matrix(&self) -> DenseMatrix {
        let n = self.dim();
        let cols: Vec<Vec<Scalar>> = self.images.iter().map(|e| e.coords(n).expect("image within truncation")).collect();
        DenseMatrix::from_columns(n, &cols)
    }

    pub fn inverse(&self, name: &str) -> Result<TruncatedMap> {
        let inv = self.matrix().inverse(0.0)?;
        let p = self.images[0].presentation().clone();
        let images = (0..self.dim()).map(|j| Element::from_coords(&p, &inv.column(j))).collect();
        Ok(TruncatedMap { name: name.to_string(), degree: self.degree, images })
    }
}

/// Which functional defines the modular automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Weight {
    Psi,
    Phi,
}

fn weight_product(p: &Presentation, w: Weight, i: usize, j: usize) -> Result<Scalar> {
    match w {
        Weight::Psi => psi_product(p, i, j),
        Weight::Phi => phi_product(p, i, j),
    }
}

fn weight_of(w: Weight, x: &Element) -> Result<Scalar> {
    match w {
        Weight::Psi => x.right_integral(),
        Weight::Phi => x.left_integral(),
    }
}

/// Matrix `W[y, z] = w(b_y b_z)` on the truncation of the given dimension.
fn weight_matrix(p: &Presentation, w: Weight, n: usize) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(n, n);
    for y in 0..n {
        for z in 0..n {
            m.set(y, z, weight_product(p, w, y, z)?);
        }
    }
    Ok(m)
}

fn solve_modular(p: &Presentation, w: Weight, degree: usize, name: &str) -> Result<TruncatedMap> {
    let n = p.dim_upto(degree);
    let wm = weight_matrix(p, w, n)?;
    let winv = wm.inverse(0.0).map_err(|e| AqgError::Singular(format!("{name}: {e}")))?;
    let mut images = Vec::with_capacity(n);
    for x in 0..n {
        let v: Vec<Scalar> = (0..n).map(|y| weight_product(p, w, x, y)).collect::<Result<_>>()?;
        images.push(Element::from_coords(p, &winv.mul_vec(&v)));
    }
    let map = TruncatedMap { name: name.to_string(), degree, images };
    // Closure: the defining relation must hold against one degree more.
    let check_dim = p.dim_upto(p.cap_degree(degree + 1));
    for x in 0..n {
        let img = &map.images[x];
        for y in 0..check_dim {
            let lhs = weight_product(p, w, x, y)?;
            let rhs = weight_of(w, &(&p.basis(y) * img))?;
            if lhs != rhs {
                return Err(AqgError::NotClosed { degree, required: p.growth(degree, degree) });
            }
        }
    }
    Ok(map)
}

fn with_escalation<T>(p: &Presentation, degree: usize, f: impl Fn(usize) -> Result<T>) -> Result<T> {
    let degree = p.cap_degree(degree);
    match f(degree) {
        Err(AqgError::NotClosed { required, .. }) => {
            let next = p.cap_degree(required.max(degree + 1));
            f(next)
        }
        other => other,
    }
}

pub fn derive_sigma_prime(p: &Presentation, degree: usize) -> Result<TruncatedMap> {
    with_escalation(p, degree, |d| solve_modular(p, Weight::Psi, d, "sigma_prime"))
}

pub fn derive_sigma(p: &Presentation, degree: usize) -> Result<TruncatedMap> {
    with_escalation(p, degree, |d| solve_modular(p, Weight::Phi, d, "sigma"))
}

/// Returns `(δ, δ⁻¹)`, with δ⁻¹ from `ψ(S(x)) = ψ(x δ⁻¹)` and δ by inversion.
pub fn derive_delta(p: &Presentation, degree: usize) -> Result<(Element, Element)> {
    with_escalation(p, degree, |d| solve_delta(p, d))
}

fn solve_delta(p: &Presentation, degree: usize) -> Result<(Element, Element)> {
    let n = p.dim_upto(degree);
    let wm = weight_matrix(p, Weight::Psi, n)?;
    let winv = wm.inverse(0.0)?;
    let rhs: Vec<Scalar> = (0..n).map(|x| p.basis(x).left_integral()).collect::<Result<_>>()?;
    let delta_inv = Element::from_coords(p, &winv.mul_vec(&rhs));
    let check_dim = p.dim_upto(p.cap_degree(degree + 1));
    for x in 0..check_dim {
        let bx = p.basis(x);
        if bx.left_integral()? != (&bx * &delta_inv).right_integral()? {
            return Err(AqgError::NotClosed { degree, required: p.growth(degree, degree) });
        }
    }
    // δ δ⁻¹ = 1 as a linear system in the coefficients of δ.
    let mut ech = Echelon::new(n, 0.0);
    let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for j in 0..n {
        for (k, c) in (&p.basis(j) * &delta_inv).terms() {
            rows.entry(k.0).or_default().insert(j, c.clone());
        }
    }
    for (k, c) in p.unit().terms() {
        rows.entry(k.0).or_default().insert(n, c.clone());
    }
    for (_, row) in rows {
        if let Insert::Inconsistent(_) = ech.insert(row) {
            return Err(AqgError::NotClosed { degree, required: p.growth(degree, degree) });
        }
    }
    let sol = ech.solution();
    let delta = Element::from_terms(p, sol.into_iter().map(|(i, v)| (BasisIndex(i), v)));
    if &delta * &delta_inv != p.unit() || &delta_inv * &delta != p.unit() {
        return Err(AqgError::InvalidPresentation("modular element is not invertible in the truncation".into()));
    }
    Ok((delta, delta_inv))
}

/// The modular data on a degree truncation.
#[derive(Clone, Debug)]
pub struct ModularMaps {
    pub pres: Presentation,
    pub degree: usize,
    pub sigma_prime: TruncatedMap,
    pub sigma_prime_inv: TruncatedMap,
    pub sigma: TruncatedMap,
    pub sigma_inv: TruncatedMap,
    pub delta: Element,
    pub delta_inv: Element,
}

/// Operators appearing in orbit closures and joint eigenbases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapTag {
    SSquared,
    SSquaredInv,
    Sigma,
    SigmaPrime,
    DeltaLeft,
    DeltaRight,
    Kappa,
    Rho,
    /// `x ↦ S⁻²(x) δ`, the algebra-level action of ∇̂.
    NablaHat,
}

/// Anything that can label an operator in an eigen-decomposition.
pub trait OperatorTag: Copy {
    fn name(&self) -> &'static str;
}

impl OperatorTag for MapTag {
    fn name(&self) -> &'static str {
        match self {
            MapTag::SSquared => "S^2",
            MapTag::SSquaredInv => "S^-2",
            MapTag::Sigma => "sigma",
            MapTag::SigmaPrime => "sigma'",
            MapTag::DeltaLeft => "delta.",
            MapTag::DeltaRight => ".delta",
            MapTag::Kappa => "kappa",
            MapTag::Rho => "rho",
            MapTag::NablaHat => "S^-2(.)delta",
        }
    }
}

impl ModularMaps {
    /// Derives σ′, σ, δ on the truncation of the given degree (escalating once if needed).
    pub fn derive(p: &Presentation, degree: usize) -> Result<Self> {
        let sigma_prime = derive_sigma_prime(p, degree)?;
        let sigma = derive_sigma(p, sigma_prime.degree)?;
        let degree = sigma.degree.min(sigma_prime.degree);
        let sigma_prime = if sigma_prime.degree == degree { sigma_prime } else { derive_sigma_prime(p, degree)? };
        let (delta, delta_inv) = derive_delta(p, degree)?;
        let sigma_prime_inv = sigma_prime.inverse("sigma_prime_inv")?;
        let sigma_inv = sigma.inverse("sigma_inv")?;
        Ok(Self { pres: p.clone(), degree, sigma_prime, sigma_prime_inv, sigma, sigma_inv, delta, delta_inv })
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn s_squared(&self, x: &Element) -> Element {
        x.antipode().antipode()
    }

    pub fn s_squared_inv(&self, x: &Element) -> Element {
        x.antipode_inv().antipode_inv()
    }

    pub fn kappa(&self, x: &Element) -> Result<Element> {
        Ok(self.s_squared_inv(&self.sigma.apply(x)?))
    }

    pub fn kappa_inv(&self, x: &Element) -> Result<Element> {
        self.sigma_inv.apply(&self.s_squared(x))
    }

    pub fn rho(&self, x: &Element) -> Result<Element> {
        Ok(self.s_squared(&self.sigma_prime.apply(x)?))
    }

    pub fn rho_inv(&self, x: &Element) -> Result<Element> {
        self.sigma_prime_inv.apply(&self.s_squared_inv(x))
    }

    pub fn apply(&self, tag: MapTag, x: &Element) -> Result<Element> {
        match tag {
            MapTag::SSquared => Ok(self.s_squared(x)),
            MapTag::SSquaredInv => Ok(self.s_squared_inv(x)),
            MapTag::Sigma => self.sigma.apply(x),
            MapTag::SigmaPrime => self.sigma_prime.apply(x),
            MapTag::DeltaLeft => Ok(&self.delta * x),
            MapTag::DeltaRight => Ok(x * &self.delta),
            MapTag::Kappa => self.kappa(x),
            MapTag::Rho => self.rho(x),
            MapTag::NablaHat => Ok(&self.s_squared_inv(x) * &self.delta),
        }
    }

    pub fn apply_inverse(&self, tag: MapTag, x: &Element) -> Result<Element> {
        match tag {
            MapTag::SSquared => Ok(self.s_squared_inv(x)),
            MapTag::SSquaredInv => Ok(self.s_squared(x)),
            MapTag::Sigma => self.sigma_inv.apply(x),
            MapTag::SigmaPrime => self.sigma_prime_inv.apply(x),
            MapTag::DeltaLeft => Ok(&self.delta_inv * x),
            MapTag::DeltaRight => Ok(x * &self.delta_inv),
            MapTag::Kappa => self.kappa_inv(x),
            MapTag::Rho => self.rho_inv(x),
            MapTag::NablaHat => Ok(self.s_squared(&(x * &self.delta_inv))),
        }
    }

    /// `(ψ(x*S²(x)), ψ(x*σ(x)), ψ(x*σ′(x)))`; each must be a nonnegative rational.
    pub fn positivity_probe(&self, x: &Element) -> Result<(Scalar, Scalar, Scalar)> {
        let xs = x.star();
        let a = (&xs * &self.s_squared(x)).right_integral()?;
        let b = (&xs * &self.sigma.apply(x)?).right_integral()?;
        let c = (&xs * &self.sigma_prime.apply(x)?).right_integral()?;
        for v in [&a, &b, &c] {
            let ok = v.as_rational().is_some_and(|r| *r >= num_rational::BigRational::from_integer(0.into()));
            if !ok {
                return Err(AqgError::CheckFailed(format!("positivity violated: {v} for x = {x}")));
            }
        }
        Ok((a, b, c))
    }

    /// Exact basis (reduced row echelon) of the smallest subspace containing `x`
    /// and stable under the listed maps and their inverses.
    pub fn orbit_subspace(&self, x: &Element, tags: &[MapTag]) -> Result<Vec<Element>> {
        let ambient = self.pres.dim_upto(self.pres.cap_degree(self.degree.max(x.degree())));
        orbit_closure(&self.pres, ambient, x, |v| {
            let mut out = Vec::new();
            for t in tags {
                out.push(self.apply(*t, v)?);
                out.push(self.apply_inverse(*t, v)?);
            }
            Ok(out)
        })
    }

    /// Joint eigen-decomposition of the listed operators on a stable subspace.
    pub fn joint_eigenbasis(&self, subspace: &[Element], tags: &[MapTag], tol: f64) -> Result<EigenDecomposition> {
        joint_eigen_of(&self.pres, subspace, tags, tol, |t, v| self.apply(t, v))
    }

    /// Joint eigenbasis of the whole truncation, assembled orbit by orbit.
    pub fn full_eigenbasis(&self, tags: &[MapTag], degree: usize, tol: f64) -> Result<EigenDecomposition> {
        let n = self.pres.dim_upto(self.pres.cap_degree(degree));
        let mut span = Echelon::homogeneous(tol);
        let mut blocks: Vec<EigenBlock> = Vec::new();
        let mut exact = true;
        let mut residual = 0.0f64;
        for i in 0..n {
            if span.reduce(to_row(&self.pres.basis(i))).is_empty() {
                continue;
            }
            let orbit = self.orbit_subspace(&self.pres.basis(i), tags)?;
            let dec = self.joint_eigenbasis(&orbit, tags, tol)?;
            exact &= dec.exact;
            residual = residual.max(dec.residual);
            for b in dec.blocks {
                let mut kept = Vec::new();
                for v in b.vectors {
                    if let Insert::Pivot(_) = span.insert(to_row(&v)) {
                        kept.push(v);
                    }
                }
                if kept.is_empty() {
                    continue;
                }
                match blocks.iter_mut().find(|e| e.values.iter().map(|v| &v.value).eq(b.values.iter().map(|v| &v.value))) {
                    Some(e) => e.vectors.extend(kept),
                    None => blocks.push(EigenBlock { values: b.values, vectors: kept }),
                }
            }
        }
        Ok(EigenDecomposition { operators: tags.iter().map(|t| t.name().to_string()).collect(), blocks, exact, residual, dim: n })
    }

    /// Expands `x` in eigenvectors of one operator: `x = Σ v`, each `v` an eigenvector.
    pub fn eigen_expand(&self, x: &Element, tag: MapTag, tol: f64) -> Result<Vec<(PositiveEigenvalue, Element)>> {
        if x.is_zero() {
            return Ok(Vec::new());
        }
        let orbit = self.orbit_subspace(x, &[tag])?;
        let dec = self.joint_eigenbasis(&orbit, &[tag], tol)?;
        expand_in(&self.pres, x, &dec, tol)
    }

    /// Applies a one-parameter group at complex parameter `z` (real `t` is `z = t`).
    pub fn one_parameter_apply(&self, group: OneParameterGroup, z: Complex64, x: &Element, tol: f64) -> Result<Element> {
        self.analytic_apply(group.generator(), z, x, tol)
    }

    /// `x ↦ Σ λ^{iz} x_λ` over the eigencomponents of `x` for the operator `tag`.
    pub fn analytic_apply(&self, tag: MapTag, z: Complex64, x: &Element, tol: f64) -> Result<Element> {
        let mut out = Element::zero(&self.pres);
        for (lam, v) in self.eigen_expand(x, tag, tol)? {
            let f = scalar_pow_z(&lam, z)?;
            out = &out + &v.scale(&f);
        }
        Ok(out)
    }

    /// Checks `Δ(δ^{it}) = δ^{it} ⊗ δ^{it}` on `a ⊗ c` through the decomposition
    /// `a ⊗ c = Σ Δ(a₁)(1 ⊗ S(a₂)c)`. Returns the largest residual.
    pub fn group_like_check_delta_it(&self, t: f64, a: &Element, c: &Element, tol: f64) -> Result<f64> {
        let z = Complex64::new(t, 0.0);
        let p = &self.pres;
        let one = p.unit();
        let mut decomposed = TensorElement::zero(p);
        let mut lhs = TensorElement::zero(p);
        for ((i, j), v) in a.comul().terms() {
            let a1 = Element::basis(p, *i);
            let a2 = Element::basis(p, *j);
            let right = TensorElement::simple(&one, &(&a2.antipode() * c));
            decomposed = decomposed.add(&a1.comul().mul(&right).scale(v));
            let moved = self.one_parameter_apply(OneParameterGroup::DeltaItLeft, z, &a1, tol)?;
            lhs = lhs.add(&moved.comul().mul(&right).scale(v));
        }
        if decomposed != TensorElement::simple(a, c) {
            return Err(AqgError::CheckFailed(format!("decomposition a⊗c = ΣΔ(a1)(1⊗S(a2)c) fails for a = {a}, c = {c}")));
        }
        let da = self.one_parameter_apply(OneParameterGroup::DeltaItLeft, z, a, tol)?;
        let dc = self.one_parameter_apply(OneParameterGroup::DeltaItLeft, z, c, tol)?;
        let rhs = TensorElement::simple(&da, &dc);
        Ok(lhs.sub(&rhs).max_abs())
    }
}

/// The one-parameter groups acting on A.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneParameterGroup {
    /// σ′ₜ, generator σ′ (σ′₋ᵢ = σ′).
    SigmaPrimeT,
    /// σₜ, generator σ.
    SigmaT,
    /// τₜ, generator S⁻² (τ₋ᵢ = S⁻²).
    TauT,
    /// Left multiplication by δ^{it}.
    DeltaItLeft,
    /// Right multiplication by δ^{it}.
    DeltaItRight,
}

impl OneParameterGroup {
    pub fn generator(&self) -> MapTag {
        match self {
            OneParameterGroup::SigmaPrimeT => MapTag::SigmaPrime,
            OneParameterGroup::SigmaT => MapTag::Sigma,
            OneParameterGroup::TauT => MapTag::SSquaredInv,
            OneParameterGroup::DeltaItLeft => MapTag::DeltaLeft,
            OneParameterGroup::DeltaItRight => MapTag::DeltaRight,
        }
    }
}

pub(crate) fn to_row(x: &Element) -> SparseRow {
    x.terms().map(|(i, v)| (i.0, v.clone())).collect()
}

/// Orbit closure under a family of maps, returned as an RREF basis.
pub fn orbit_closure(p: &Presentation, ambient: usize, x: &Element, images: impl Fn(&Element) -> Result<Vec<Element>>) -> Result<Vec<Element>> {
    let mut ech = Echelon::homogeneous(0.0);
    let mut queue = vec![x.clone()];
    while let Some(v) = queue.pop() {
        if let Insert::Pivot(_) = ech.insert(to_row(&v)) {
            if ech.rank() > ambient {
                return Err(AqgError::CheckFailed(format!("orbit of {x} exceeds the ambient truncation (escaped at {v})")));
            }
            queue.extend(images(&v)?);
        }
    }
    let mut rows = ech.reduced_rows();
    rows.sort_by_key(|(piv, _)| *piv);
    Ok(rows.into_iter().map(|(_, r)| Element::from_terms(p, r.into_iter().map(|(i, v)| (BasisIndex(i), v)))).collect())
}

/// One joint eigenspace: eigenvalue per operator and a basis.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub values: Vec<PositiveEigenvalue>,
    pub vectors: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub operators: Vec<String>,
    pub blocks: Vec<EigenBlock>,
    pub exact: bool,
    pub residual: f64,
    pub dim: usize,
}

impl EigenDecomposition {
    pub fn vector_count(&self) -> usize {
        self.blocks.iter().map(|b| b.vectors.len()).sum()
    }

    /// Eigenvalue of operator `k` for the block containing vector `v`, if `v` is a listed eigenvector.
    pub fn value_of(&self, k: usize, v: &Element) -> Option<&PositiveEigenvalue> {
        self.blocks.iter().find(|b| b.vectors.contains(v)).map(|b| &b.values[k])
    }
}

/// Subspace coordinates of `v` w.r.t. an RREF basis (entries at pivot columns).
fn coordinates(basis: &[Element], pivots: &[usize], v: &Element) -> Vec<Scalar> {
    let _ = basis;
    pivots.iter().map(|p| v.coeff(BasisIndex(*p))).collect()
}

fn rref_basis(subspace: &[Element], tol: f64) -> (Vec<Element>, Vec<usize>) {
    let mut ech = Echelon::homogeneous(tol);
    for v in subspace {
        ech.insert(to_row(v));
    }
    let mut rows = ech.reduced_rows();
    rows.sort_by_key(|(p, _)| *p);
    let p = subspace.first().map(|e| e.presentation().clone());
    let mut basis = Vec::new();
    let mut pivots = Vec::new();
    for (piv, r) in rows {
        pivots.push(piv);
        basis.push(Element::from_terms(p.as_ref().unwrap(), r.into_iter().map(|(i, v)| (BasisIndex(i), v))));
    }
    (basis, pivots)
}

/// Joint eigen-decomposition on an invariant subspace for arbitrary operator actions.
pub fn joint_eigen_of<T: OperatorTag>(
    p: &Presentation,
    subspace: &[Element],
    tags: &[T],
    tol: f64,
    act: impl Fn(T, &Element) -> Result<Element>,
) -> Result<EigenDecomposition> {
    let operators: Vec<String> = tags.iter().map(|t| t.name().to_string()).collect();
    if subspace.is_empty() {
        return Ok(EigenDecomposition { operators, blocks: Vec::new(), exact: true, residual: 0.0, dim: 0 });
    }
    let (basis, pivots) = rref_basis(subspace, tol);
    let k = basis.len();
    let mut mats = Vec::new();
    for t in tags {
        let mut cols = Vec::with_capacity(k);
        for b in &basis {
            let img = act(*t, b)?;
            let coords = coordinates(&basis, &pivots, &img);
            let back = combine(p, &basis, &coords);
            if !back.approx_eq(&img, tol) {
                return Err(AqgError::CheckFailed(format!("subspace not stable under {}: image of {b} escapes", t.name())));
            }
            cols.push(coords);
        }
        mats.push(DenseMatrix::from_columns(k, &cols));
    }
    let (blocks, exact) = joint_diagonalize(k, &mats, tol)?;
    let mut out = Vec::new();
    let mut residual = 0.0f64;
    for b in blocks {
        let values = b.values.iter().map(|v| PositiveEigenvalue::certify(v.clone(), tol)).collect::<Result<Vec<_>>>()?;
        let vectors: Vec<Element> = b.basis.iter().map(|c| combine(p, &basis, c)).collect();
        for (t, lam) in tags.iter().zip(&values) {
            for v in &vectors {
                let r = act(*t, v)?.residual(&v.scale(&lam.value));
                if exact && r != 0.0 {
                    return Err(AqgError::CheckFailed(format!("eigen-equation residual {r} for {}", t.name())));
                }
                residual = residual.max(r);
            }
        }
        out.push(EigenBlock { values, vectors });
    }
    Ok(EigenDecomposition { operators, blocks: out, exact, residual, dim: k })
}

fn combine(p: &Presentation, basis: &[Element], coords: &[Scalar]) -> Element {
    let mut out = Element::zero(p);
    for (c, b) in coords.iter().zip(basis) {
        if !c.is_zero() {
            out = &out + &b.scale(c);
        }
    }
    out
}

/// Writes `x` as a sum of eigencomponents, one per block of `dec`.
pub fn expand_in(p: &Presentation, x: &Element, dec: &EigenDecomposition, tol: f64) -> Result<Vec<(PositiveEigenvalue, Element)>> {
    let vectors: Vec<(usize, &Element)> = dec.blocks.iter().enumerate().flat_map(|(bi, b)| b.vectors.iter().map(move |v| (bi, v))).collect();
    let mut ech = Echelon::new(vectors.len(), tol);
    // Columns are the eigenvectors; rows are basis coordinates.
    let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for (j, (_, v)) in vectors.iter().enumerate() {
        for (i, c) in v.terms() {
            rows.entry(i.0).or_default().insert(j, c.clone());
        }
    }
    for (i, c) in x.terms() {
        rows.entry(i.0).or_default().insert(vectors.len(), c.clone());
    }
    for (_, row) in rows {
        if let Insert::Inconsistent(_) = ech.insert(row) {
            return Err(AqgError::CheckFailed(format!("{x} is not in the span of the eigenbasis")));
        }
    }
    let sol = ech.solution();
    let mut comps: Vec<Element> = vec![Element::zero(p); dec.blocks.len()];
    for (j, (bi, v)) in vectors.iter().enumerate() {
        if let Some(c) = sol.get(&j) {
            comps[*bi] = &comps[*bi] + &v.scale(c);
        }
    }
    Ok(dec
        .blocks
        .iter()
        .zip(comps)
        .filter(|(_, c)| !c.is_zero())
        .map(|(b, c)| (b.values[0].clone(), c))
        .collect())
}

/// Eigencomponents of every basis element of a truncation for one operator,
/// so that complex powers can be applied by a table lookup.
#[derive(Clone, Debug)]
pub struct SpectralTable {
    pub tag: MapTag,
    pub degree: usize,
    comps: Vec<Vec<(PositiveEigenvalue, Element)>>,
}

impl SpectralTable {
    pub fn new(m: &ModularMaps, tag: MapTag, degree: usize, tol: f64) -> Result<Self> {
        let p = &m.pres;
        let degree = p.cap_degree(degree);
        let dec = m.full_eigenbasis(&[tag], degree, tol)?;
        let comps = (0..p.dim_upto(degree)).map(|i| expand_in(p, &p.basis(i), &dec, tol)).collect::<Result<_>>()?;
        Ok(Self { tag, degree, comps })
    }

    /// `x ↦ Σ λ^{iz} x_λ`.
    pub fn apply(&self, z: Complex64, x: &Element) -> Result<Element> {
        let p = x.presentation();
        let mut out = Element::zero(p);
        for (i, c) in x.terms() {
            let comps = self.comps.get(i.0).ok_or(AqgError::DegreeOverflow { requested: p.degree_of(*i), available: self.degree })?;
            for (lam, v) in comps {
                out = &out + &v.scale(&(c * &scalar_pow_z(lam, z)?));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, make_suq2, rational, FiniteGroup};

    fn suq2() -> Presentation {
        make_suq2(&rational(1, 4), 3).unwrap()
    }

    #[test]
    fn kac_examples_have_trivial_modular_data() {
        for p in [make_function_algebra(&FiniteGroup::s3()), make_group_algebra(&FiniteGroup::s3()), make_group_algebra(&FiniteGroup::cyclic(4))] {
            let m = ModularMaps::derive(&p, 0).unwrap();
            for i in 0..p.dim_upto(0) {
                let x = p.basis(i);
                assert_eq!(m.sigma_prime.apply(&x).unwrap(), x);
                assert_eq!(m.sigma.apply(&x).unwrap(), x);
            }
            assert_eq!(m.delta, p.unit());
            assert_eq!(m.delta_inv, p.unit());
        }
    }

    #[test]
    fn suq2_sigma_prime_on_generators() {
        let p = suq2();
        let m = ModularMaps::derive(&p, 1).unwrap();
        let a = p.element("a").unwrap();
        let c = p.element("c").unwrap();
        let b = p.element("a*").unwrap();
        // ψ(a a*) = ψ(a* σ′(a)) forces σ′(a) = q^-2 a; c is fixed.
        assert_eq!(m.sigma_prime.apply(&a).unwrap(), a.scale(&Scalar::int(16)));
        assert_eq!(m.sigma_prime.apply(&b).unwrap(), b.scale(&Scalar::ratio(1, 16)));
        assert_eq!(m.sigma_prime.apply(&c).unwrap(), c);
        // Compact type: φ = ψ, so σ = σ′ and δ = 1.
        assert_eq!(m.sigma.apply(&a).unwrap(), a.scale(&Scalar::int(16)));
        assert_eq!(m.delta, p.unit());
    }

    #[test]
    fn orbit_examples() {
        let p = suq2();
        let m = ModularMaps::derive(&p, 1).unwrap();
        let c = p.element("c").unwrap();
        assert_eq!(m.orbit_subspace(&c, &[MapTag::SSquared]).unwrap(), vec![c.clone()]);
        let a = p.element("a").unwrap();
        let o = m.orbit_subspace(&(&a + &c), &[MapTag::SSquared, MapTag::Sigma, MapTag::SigmaPrime]).unwrap();
        assert_eq!(o, vec![a.clone(), c.clone()]);
        let g = make_group_algebra(&FiniteGroup::cyclic(4));
        let mg = ModularMaps::derive(&g, 0).unwrap();
        let ug = g.element("u_g").unwrap();
        let all = [MapTag::SSquared, MapTag::Sigma, MapTag::SigmaPrime, MapTag::DeltaLeft, MapTag::DeltaRight];
        assert_eq!(mg.orbit_subspace(&ug, &all).unwrap(), vec![ug]);
    }

    #[test]
    fn positivity_probe_values() {
        let p = suq2();
        let m = ModularMaps::derive(&p, 1).unwrap();
        let c = p.element("c").unwrap();
        let (s2, _, _) = m.positivity_probe(&c).unwrap();
        assert_eq!(s2, Scalar::ratio(1, 17));
        let z = Element::zero(&p);
        assert_eq!(m.positivity_probe(&z).unwrap(), (Scalar::zero(), Scalar::zero(), Scalar::zero()));
        let g = make_group_algebra(&FiniteGroup::s3());
        let mg = ModularMaps::derive(&g, 0).unwrap();
        let one = Scalar::one();
        assert_eq!(mg.positivity_probe(&g.basis(3)).unwrap(), (one.clone(), one.clone(), one));
    }

    #[test]
    fn sigma_prime_star_pairing() {
        let p = suq2();
        let m = ModularMaps::derive(&p, 1).unwrap();
        let span = vec![p.element("a").unwrap(), p.element("a*").unwrap()];
        let dec = m.joint_eigenbasis(&span, &[MapTag::SigmaPrime], 1e-9).unwrap();
        assert!(dec.exact);
        let mut vals: Vec<String> = dec.blocks.iter().map(|b| b.values[0].value.to_string()).collect();
        vals.sort();
        assert_eq!(vals, vec!["1/16", "16"]);
        for b in &dec.blocks {
            for v in &b.vectors {
                let lhs = m.sigma_prime.apply(v).unwrap().star();
                let rhs = m.sigma_prime_inv.apply(&v.star()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn analytic_generator_recovery() {
        let p = suq2();
        let m = ModularMaps::derive(&p, 2).unwrap();
        let minus_i = Complex64::new(0.0, -1.0);
        for label in ["a", "c", "a c*", "a*^2"] {
            let x = p.element(label).unwrap();
            let s = m.one_parameter_apply(OneParameterGroup::SigmaPrimeT, minus_i, &x, 1e-9).unwrap();
            assert_eq!(s, m.sigma_prime.apply(&x).unwrap());
            let t = m.one_parameter_apply(OneParameterGroup::TauT, minus_i, &x, 1e-9).unwrap();
            assert_eq!(t, m.s_squared_inv(&x));
        }
        let f = make_function_algebra(&FiniteGroup::s3());
        let mf = ModularMaps::derive(&f, 0).unwrap();
        let x = &f.basis(1) + &f.basis(4);
        let y = mf.one_parameter_apply(OneParameterGroup::SigmaPrimeT, Complex64::new(2.5, 0.0), &x, 1e-9).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn nondiagonalizable_operator_is_rejected() {
        let p = make_function_algebra(&FiniteGroup::cyclic(2));
        let e0 = p.basis(0);
        let e1 = p.basis(1);
        let span = vec![e0.clone(), e1.clone()];
        // Identity plus a nilpotent part.
        let r = joint_eigen_of(&p, &span, &[MapTag::SigmaPrime], 1e-9, |_, v| {
            let shift = Element::from_terms(&p, [(BasisIndex(0), v.coeff(BasisIndex(1)))]);
            Ok(v + &shift)
        });
        assert!(matches!(r, Err(AqgError::NotDiagonalizable(_))));
    }
}
