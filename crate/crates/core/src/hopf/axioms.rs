//! Axiom and consistency checker for presentations.

use crate::hopf::{BasisIndex, Element, Presentation, Tensor3, TensorElement};
use crate::linalg::{ldl_pivots, DenseMatrix};
use crate::modular::ModularMaps;
use crate::report::{Check, Environment, VerificationReport};
use crate::scalar::Scalar;

const STRUCT: &str = "Hopf *-algebra axioms";
const INTEGRAL: &str = "positive right integral";

fn lbl(p: &Presentation, i: usize) -> String {
    p.maps().label(i)
}

/// `(Δ⊗ι)Δ(x)` as a three-leg tensor.
pub fn comul_left(x: &Element) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((i, j), c) in x.comul().terms() {
        for ((k, l), d) in Element::basis(x.presentation(), *i).comul().terms() {
            out.add_term((*k, *l, *j), c * d);
        }
    }
    out
}

/// `(ι⊗Δ)Δ(x)` as a three-leg tensor.
pub fn comul_right(x: &Element) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((i, j), c) in x.comul().terms() {
        for ((k, l), d) in Element::basis(x.presentation(), *j).comul().terms() {
            out.add_term((*i, *k, *l), c * d);
        }
    }
    out
}

/// Runs every structural check on basis elements of degree `<= max_degree`.
pub fn check_axioms(p: &Presentation, max_degree: usize, tol: f64) -> VerificationReport {
    let n_deg = p.cap_degree(max_degree);
    let env = Environment {
        example: p.name(),
        q: p.q().map(|q| q.to_string()),
        degree: n_deg,
        tolerance: tol,
        ..Default::default()
    };
    let mut rep = VerificationReport::new("axioms", env);
    let n = p.dim_upto(n_deg);
    let basis: Vec<Element> = (0..n).map(|i| p.basis(i)).collect();
    let one = p.unit();

    let mut c = Check::exact("axioms.unit", STRUCT, tol);
    c.scalars(&one.counit(), &Scalar::one(), || "ε(1)".into());
    c.elements(&one.antipode(), &one, || "S(1)".into());
    c.tensors(&one.comul(), &TensorElement::simple(&one, &one), || "Δ(1)".into());
    c.elements(&one.star(), &one, || "1*".into());
    for (i, x) in basis.iter().enumerate() {
        c.elements(&(&one * x), x, || format!("1·{}", lbl(p, i)));
        c.elements(&(x * &one), x, || format!("{}·1", lbl(p, i)));
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.associativity", STRUCT, tol);
    let mut products: Vec<Vec<Element>> = Vec::with_capacity(n);
    for x in &basis {
        products.push(basis.iter().map(|y| x * y).collect());
    }
    for i in 0..n {
        for j in 0..n {
            let xy = &products[i][j];
            for (k, z) in basis.iter().enumerate() {
                let lhs = xy * z;
                let rhs = &basis[i] * &products[j][k];
                c.elements(&lhs, &rhs, || format!("({} {}) {}", lbl(p, i), lbl(p, j), lbl(p, k)));
            }
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.coassociativity", STRUCT, tol);
    for (i, x) in basis.iter().enumerate() {
        let d = comul_left(x).sub(&comul_right(x));
        c.holds(d.is_zero(), || format!("x = {}; residual {:?}", lbl(p, i), d));
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.counit", STRUCT, tol);
    for (i, x) in basis.iter().enumerate() {
        let cx = x.comul();
        let left = cx.contract_left(|k| Ok(p.maps().counit(k.0)));
        let right = cx.contract_right(|k| Ok(p.maps().counit(k.0)));
        if let (Some(l), Some(r)) = (c.attempt(left), c.attempt(right)) {
            c.elements(&l, x, || format!("(ε⊗ι)Δ({})", lbl(p, i)));
            c.elements(&r, x, || format!("(ι⊗ε)Δ({})", lbl(p, i)));
        }
    }
    rep.push(c.finish());

    let mut cm = Check::exact("axioms.comultiplicative", STRUCT, tol);
    let mut ce = Check::exact("axioms.counit_multiplicative", STRUCT, tol);
    let mut cs = Check::exact("axioms.star_antimultiplicative", STRUCT, tol);
    let comuls: Vec<TensorElement> = basis.iter().map(|x| x.comul()).collect();
    for i in 0..n {
        for j in 0..n {
            let xy = &products[i][j];
            cm.tensors(&xy.comul(), &comuls[i].mul(&comuls[j]), || format!("Δ({} {})", lbl(p, i), lbl(p, j)));
            ce.scalars(&xy.counit(), &(&basis[i].counit() * &basis[j].counit()), || format!("ε({} {})", lbl(p, i), lbl(p, j)));
            cs.elements(&xy.star(), &(&basis[j].star() * &basis[i].star()), || format!("({} {})*", lbl(p, i), lbl(p, j)));
        }
    }
    rep.push(cm.finish());
    rep.push(ce.finish());
    rep.push(cs.finish());

    let mut c = Check::exact("axioms.antipode", STRUCT, tol);
    for (i, x) in basis.iter().enumerate() {
        let mut left = Element::zero(p);
        let mut right = Element::zero(p);
        for ((a, b), v) in comuls[i].terms() {
            let xa = Element::basis(p, *a);
            let xb = Element::basis(p, *b);
            left = &left + &(&xa.antipode() * &xb).scale(v);
            right = &right + &(&xa * &xb.antipode()).scale(v);
        }
        let target = one.scale(&x.counit());
        c.elements(&left, &target, || format!("m(S⊗ι)Δ({})", lbl(p, i)));
        c.elements(&right, &target, || format!("m(ι⊗S)Δ({})", lbl(p, i)));
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.star", STRUCT, tol);
    for (i, x) in basis.iter().enumerate() {
        c.elements(&x.star().star(), x, || format!("{}**", lbl(p, i)));
        let lhs = x.star().comul();
        let rhs = comuls[i].map_legs_conj(|e| e.star(), |e| e.star());
        c.tensors(&lhs, &rhs, || format!("Δ({}*)", lbl(p, i)));
        c.elements(&x.star().antipode().star().antipode(), x, || format!("S(S({}*)*)", lbl(p, i)));
        c.elements(&x.antipode().antipode_inv(), x, || format!("S⁻¹S({})", lbl(p, i)));
        c.elements(&x.antipode_inv().antipode(), x, || format!("SS⁻¹({})", lbl(p, i)));
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.right_invariance", INTEGRAL, tol);
    for (i, x) in basis.iter().enumerate() {
        let lhs = comuls[i].contract_left(|k| p.maps().right_integral(k.0));
        let psi = x.right_integral();
        if let (Some(l), Some(v)) = (c.attempt(lhs), c.attempt(psi)) {
            c.elements(&l, &one.scale(&v), || format!("(ψ⊗ι)Δ({})", lbl(p, i)));
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.gram_positive", INTEGRAL, tol);
    match gram_matrix(p, n) {
        Ok(g) => {
            for i in 0..n {
                for j in 0..n {
                    c.scalars(g.get(i, j), &g.get(j, i).conj(), || format!("Hermitian at ({}, {})", lbl(p, i), lbl(p, j)));
                }
            }
            match ldl_pivots(&g) {
                Ok(piv) => {
                    for (k, d) in piv.iter().enumerate() {
                        let pos = d.as_rational().is_some_and(|r| *r > num_rational::BigRational::from_integer(0.into()));
                        c.holds(pos, || format!("pivot {k} = {d}"));
                    }
                }
                Err(e) => c.error(&e),
            }
        }
        Err(e) => c.error(&e),
    }
    rep.push(c.finish());

    consistency(p, n_deg, &basis, &comuls, tol, &mut rep);
    rep.normalize();
    rep
}

/// `G[x, y] = ψ(y* x)` on the first `n` basis elements.
pub fn gram_matrix(p: &Presentation, n: usize) -> crate::error::Result<DenseMatrix> {
    let mut g = DenseMatrix::zeros(n, n);
    let stars: Vec<Element> = (0..n).map(|i| p.basis(i).star()).collect();
    for x in 0..n {
        let bx = p.basis(x);
        for (y, ys) in stars.iter().enumerate() {
            g.set(x, y, (ys * &bx).right_integral()?);
        }
    }
    Ok(g)
}

fn consistency(p: &Presentation, degree: usize, basis: &[Element], comuls: &[TensorElement], tol: f64, rep: &mut VerificationReport) {
    let anchor = "modular consistency";
    let m = match ModularMaps::derive(p, degree) {
        Ok(m) => m,
        Err(e) => {
            let mut c = Check::exact("axioms.modular_data", anchor, tol);
            c.error(&e);
            rep.push(c.finish());
            return;
        }
    };
    let mut c = Check::exact("axioms.left_integral_delta", anchor, tol);
    for (i, x) in basis.iter().enumerate() {
        let l = x.left_integral();
        let r = (x * &m.delta_inv).right_integral();
        if let (Some(l), Some(r)) = (c.attempt(l), c.attempt(r)) {
            c.scalars(&l, &r, || format!("ψ(S({0})) vs ψ({0}δ⁻¹)", lbl(p, i)));
        }
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.delta_grouplike", anchor, tol);
    c.tensors(&m.delta.comul(), &TensorElement::simple(&m.delta, &m.delta), || "Δ(δ)".into());
    c.elements(&m.delta.antipode(), &m.delta_inv, || "S(δ)".into());
    if let Some(v) = c.attempt(m.sigma_prime.apply(&m.delta)) {
        c.elements(&v, &m.delta, || "σ′(δ)".into());
    }
    if let Some(v) = c.attempt(m.sigma.apply(&m.delta)) {
        c.elements(&v, &m.delta, || "σ(δ)".into());
    }
    rep.push(c.finish());

    let mut c = Check::exact("axioms.sigma_coproduct", anchor, tol);
    for (i, x) in basis.iter().enumerate() {
        let Some(sx) = c.attempt(m.sigma.apply(x)) else { continue };
        let rhs = comuls[i].map_legs(|e| Ok(m.s_squared(e)), |e| m.sigma.apply(e));
        if let Some(rhs) = c.attempt(rhs) {
            c.tensors(&sx.comul(), &rhs, || format!("Δ(σ({}))", lbl(p, i)));
        }
    }
    rep.push(c.finish());
    let _ = BasisIndex(0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, make_suq2, rational, FiniteGroup};
    use crate::report::Status;

    #[test]
    fn finite_examples_pass() {
        for g in [FiniteGroup::cyclic(4), FiniteGroup::s3()] {
            for p in [make_group_algebra(&g), make_function_algebra(&g)] {
                let r = check_axioms(&p, 0, 1e-9);
                assert!(r.passed(), "{}: {:?}", p.name(), r.failures());
                assert!(r.checks.iter().all(|c| c.residual == "0"));
            }
        }
    }

    #[test]
    fn suq2_passes_at_low_degree() {
        let p = make_suq2(&rational(1, 4), 2).unwrap();
        let r = check_axioms(&p, 2, 1e-9);
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(r.get("axioms.associativity").unwrap().status, Status::Pass);
    }
}
