//! Eigen-decompositions with exact rational spectra where possible.
//!
//! Eigenvalues are located numerically on the square-free part of the exact
//! characteristic polynomial, rationalized by continued fractions and then
//! certified by exact evaluation. Certified eigenvalues get exact kernels;
//! anything left over falls back to float kernels with a reported residual.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{AqgError, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Polynomial with coefficients low to high.
pub type Poly = Vec<Scalar>;

pub fn poly_trim(p: &mut Poly) {
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
}

pub fn poly_eval(p: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn poly_derivative(p: &[Scalar]) -> Poly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * &Scalar::int(i as i64)).collect()
}

/// Division with remainder by a nonzero polynomial.
pub fn poly_divrem(a: &[Scalar], b: &[Scalar]) -> (Poly, Poly) {
    let mut b = b.to_vec();
    poly_trim(&mut b);
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    poly_trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b.last().unwrap().inv().expect("nonzero lead");
    let mut q = vec![Scalar::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() * &lead_inv;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&f * c);
        }
        q[shift] = f;
        r.pop();
        poly_trim(&mut r);
    }
    (q, r)
}

fn poly_monic(p: &[Scalar]) -> Poly {
    let inv = p.last().unwrap().inv().expect("nonzero lead");
    p.iter().map(|c| c * &inv).collect()
}

pub fn poly_gcd(a: &[Scalar], b: &[Scalar]) -> Poly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        poly_monic(&x)
    }
}

/// Durand-Kerner simultaneous iteration followed by Newton polishing.
pub fn numeric_roots(p: &[Scalar]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    poly_trim(&mut p);
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n].to_complex();
    let c: Vec<Complex64> = p.iter().map(|x| x.to_complex() / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (bound / 2.0).max(0.5)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / z[i].norm().max(1.0));
        }
        if delta < 1e-16 {
            break;
        }
    }
    let dc: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
    let deval = |z: Complex64| dc.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = deval(*zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= eval(*zi) / d;
        }
    }
    z
}

/// Continued-fraction convergents of `x`, smallest denominators first.
pub fn convergents(x: f64, max_terms: usize) -> Vec<BigRational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut v = x;
    for _ in 0..max_terms {
        let a = v.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * a.abs().max(1.0)
}

fn certify_rational_root(p: &[Scalar], x: f64) -> Option<BigRational> {
    convergents(x, 40)
        .into_iter()
        .filter(|r| close(crate::scalar::ratio_to_f64(r), x))
        .find(|r| poly_eval(p, &Scalar::from_rational(r.clone())).is_zero())
}

fn certify_root(p: &[Scalar], z: Complex64) -> Option<Scalar> {
    let scale = z.norm().max(1.0);
    if z.im.abs() <= 1e-9 * scale {
        if let Some(r) = certify_rational_root(p, z.re) {
            return Some(Scalar::from_rational(r));
        }
    }
    let res = convergents(z.re, 40);
    let ims = convergents(z.im, 40);
    for re in res.iter().rev().take(6).filter(|r| close(crate::scalar::ratio_to_f64(r), z.re)) {
        for im in ims.iter().rev().take(6).filter(|r| close(crate::scalar::ratio_to_f64(r), z.im)) {
            let s = Scalar::gaussian(re.clone(), im.clone());
            if poly_eval(p, &s).is_zero() {
                return Some(s);
            }
        }
    }
    None
}

/// One eigenspace: eigenvalue plus a basis of eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSpace {
    pub value: Scalar,
    pub vectors: Vec<Vec<Scalar>>,
}

/// Eigen-decomposition of a square matrix.
#[derive(Debug, Clone)]
pub struct MatrixEigen {
    pub spaces: Vec<EigenSpace>,
    /// True when every eigenvalue and eigenvector is exact.
    pub exact: bool,
    /// Largest eigen-equation residual (0 in the exact tier).
    pub residual: f64,
}

/// Diagonalizes `m`; fails hard if `m` is not diagonalizable.
pub fn diagonalize(m: &DenseMatrix, tol: f64) -> Result<MatrixEigen> {
    let n = m.rows;
    if n == 0 {
        return Ok(MatrixEigen { spaces: Vec::new(), exact: true, residual: 0.0 });
    }
    let mut spaces = Vec::new();
    let mut exact = m.is_exact();
    let mut residual = 0.0f64;
    let mut total = 0;
    if m.is_exact() {
        let cp = m.char_poly();
        let g = poly_gcd(&cp, &poly_derivative(&cp));
        let sf = if g.len() > 1 { poly_divrem(&cp, &g).0 } else { cp.clone() };
        let roots = numeric_roots(&sf);
        let mut pending = Vec::new();
        let mut certified: Vec<Scalar> = Vec::new();
        for z in roots {
            match certify_root(&sf, z) {
                Some(r) if !certified.contains(&r) => certified.push(r),
                Some(_) => pending.push(z),
                None => pending.push(z),
            }
        }
        for r in certified {
            let mut mult = 0;
            let mut rest = cp.clone();
            let lin = vec![-r.clone(), Scalar::one()];
            loop {
                let (q, rem) = poly_divrem(&rest, &lin);
                if !rem.is_empty() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            let shifted = m.add_scaled_identity(&-r.clone());
            let kernel = shifted.nullspace(0.0);
            if kernel.len() < mult {
                return Err(AqgError::NotDiagonalizable(format!(
                    "eigenvalue {r} has algebraic multiplicity {mult} but geometric multiplicity {}",
                    kernel.len()
                )));
            }
            total += kernel.len();
            spaces.push(EigenSpace { value: r, vectors: kernel });
        }
        for z in pending {
            exact = false;
            let (space, res) = float_space(m, z, tol)?;
            residual = residual.max(res);
            total += space.vectors.len();
            spaces.push(space);
        }
    } else {
        let fm = m.clone();
        let cp = fm.char_poly();
        let mut seen: Vec<Complex64> = Vec::new();
        for z in numeric_roots(&cp) {
            if seen.iter().any(|s| (s - z).norm() <= 1e-6 * z.norm().max(1.0)) {
                continue;
            }
            seen.push(z);
            let (space, res) = float_space(m, z, tol)?;
            residual = residual.max(res);
            total += space.vectors.len();
            spaces.push(space);
        }
    }
    if total != n {
        return Err(AqgError::NotDiagonalizable(format!("eigenvectors span {total} of {n} dimensions")));
    }
    Ok(MatrixEigen { spaces, exact, residual })
}

fn float_space(m: &DenseMatrix, z: Complex64, tol: f64) -> Result<(EigenSpace, f64)> {
    let fm = DenseMatrix::from_columns(m.rows, &(0..m.cols).map(|j| m.column(j).iter().map(Scalar::to_float).collect()).collect::<Vec<_>>());
    let lam = Scalar::Float(z);
    let shifted = fm.add_scaled_identity(&-lam.clone());
    let rank_tol = (tol * 1e3).max(1e-7) * (1.0 + z.norm());
    let kernel = shifted.nullspace(rank_tol);
    let mut res = 0.0f64;
    for v in &kernel {
        let av = fm.mul_vec(v);
        for (a, x) in av.iter().zip(v) {
            res = res.max((a - &(&lam * x)).abs());
        }
    }
    Ok((EigenSpace { value: lam, vectors: kernel }, res))
}

/// A block of a joint eigen-decomposition: one eigenvalue per operator.
#[derive(Debug, Clone)]
pub struct JointBlock {
    pub values: Vec<Scalar>,
    pub basis: Vec<Vec<Scalar>>,
}

/// Matrix of `op` restricted to the span of `basis` (columns), if invariant.
pub fn restrict(op: &DenseMatrix, basis: &[Vec<Scalar>], tol: f64) -> Result<DenseMatrix> {
    let n = op.rows;
    let k = basis.len();
    let mut aug = DenseMatrix::zeros(n, 2 * k);
    for (j, b) in basis.iter().enumerate() {
        let img = op.mul_vec(b);
        for i in 0..n {
            aug.set(i, j, b[i].clone());
            aug.set(i, k + j, img[i].clone());
        }
    }
    let pivots = aug.rref(tol);
    if pivots.iter().take(k).enumerate().any(|(i, p)| *p != i) || pivots.len() > k {
        return Err(AqgError::NotClosed { degree: 0, required: 0 });
    }
    let mut out = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out.set(i, j, aug.get(i, k + j).clone());
        }
    }
    Ok(out)
}

/// Simultaneous diagonalization of commuting operators on `dim`-space.
pub fn joint_diagonalize(dim: usize, ops: &[DenseMatrix], tol: f64) -> Result<(Vec<JointBlock>, bool)> {
    let identity: Vec<Vec<Scalar>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    let mut blocks = vec![JointBlock { values: Vec::new(), basis: identity }];
    if dim == 0 {
        return Ok((Vec::new(), true));
    }
    let mut exact = true;
    for op in ops {
        let mut next = Vec::new();
        for block in blocks {
            let r = restrict(op, &block.basis, tol)?;
            let eig = diagonalize(&r, tol)?;
            exact &= eig.exact;
            for sp in eig.spaces {
                let basis = sp
                    .vectors
                    .iter()
                    .map(|c| {
                        let mut v = vec![Scalar::zero(); dim];
                        for (coef, b) in c.iter().zip(&block.basis) {
                            if coef.is_zero() {
                                continue;
                            }
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi += &(coef * bi);
                            }
                        }
                        v
                    })
                    .collect();
                let mut values = block.values.clone();
                values.push(sp.value);
                next.push(JointBlock { values, basis });
            }
        }
        blocks = next;
    }
    Ok((blocks, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[Scalar]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(vals.len(), vals.len());
        for (i, v) in vals.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    #[test]
    fn exact_rational_spectrum() {
        let p = DenseMatrix::from_columns(
            3,
            &[
                vec![Scalar::int(1), Scalar::int(1), Scalar::int(0)],
                vec![Scalar::int(0), Scalar::int(1), Scalar::int(1)],
                vec![Scalar::int(1), Scalar::int(0), Scalar::int(1)],
            ],
        );
        let pinv = p.inverse(0.0).unwrap();
        let d = diag(&[Scalar::int(16), Scalar::ratio(1, 16), Scalar::int(16)]);
        let m = p.mul(&d).mul(&pinv);
        let e = diagonalize(&m, 1e-9).unwrap();
        assert!(e.exact);
        let mut vals: Vec<_> = e.spaces.iter().map(|s| (s.value.to_string(), s.vectors.len())).collect();
        vals.sort();
        assert_eq!(vals, vec![("1/16".to_string(), 1), ("16".to_string(), 2)]);
    }

    #[test]
    fn irrational_spectrum_falls_back_to_float() {
        let m = DenseMatrix::from_columns(2, &[vec![Scalar::int(0), Scalar::int(1)], vec![Scalar::int(2), Scalar::int(0)]]);
        let e = diagonalize(&m, 1e-9).unwrap();
        assert!(!e.exact);
        assert!(e.residual < 1e-9);
        let mut v: Vec<f64> = e.spaces.iter().map(|s| s.value.to_complex().re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((v[1] - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_perturbation_is_rejected() {
        let m = DenseMatrix::from_columns(2, &[vec![Scalar::int(1), Scalar::int(0)], vec![Scalar::int(1), Scalar::int(1)]]);
        assert!(matches!(diagonalize(&m, 1e-9), Err(AqgError::NotDiagonalizable(_))));
    }

    #[test]
    fn joint_refinement() {
        let a = diag(&[Scalar::int(1), Scalar::int(1), Scalar::int(2)]);
        let b = diag(&[Scalar::int(3), Scalar::int(4), Scalar::int(4)]);
        let (blocks, exact) = joint_diagonalize(3, &[a, b], 1e-9).unwrap();
        assert!(exact);
        assert_eq!(blocks.len(), 3);
        assert!(blocks.iter().all(|b| b.basis.len() == 1));
    }
}
