//! Orientation invariants of periodic maps: the orbit permutation of a
//! rotation of the circle, and the linking-sign class of a double rotation
//! of the 3-sphere.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use serde::Serialize;

use crate::elem::OrthElement;
use crate::error::{Error, Result};
use crate::linalg::{rotation_decomposition, rotation_decomposition_random, RotationDecomposition};
use crate::tolerance::{DEFAULT_ORDER_CAP, RESIDUE_TOL};

/// Invariant data of a double rotation of finite order `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChiralityData {
    pub m: usize,
    /// Rotation residues in `(0, m/2)`, in units of `1/m` turns, `a1 <= a2`.
    pub a1: usize,
    pub a2: usize,
    pub isoclinic: bool,
    /// Sign of `det[u1 v1 u2 v2]` for the positively oriented plane frames.
    pub lk_sign: i8,
    /// `lk_sign` reduced mod `m`: 1 or `m - 1`.
    pub lk_class: usize,
}

/// Exponents of `x -> x e^{2 pi i a/m}` in the order their orbit points occur
/// counterclockwise from the marked point. Entry `t - 1` is the `e` with
/// `e a = t (mod m)`.
pub fn orbit_permutation(a: i64, m: i64) -> Result<Vec<i64>> {
    if m < 3 {
        return Err(Error::Precondition(format!("orbit permutation needs m >= 3, got {m}")));
    }
    let r = a.rem_euclid(m);
    if r == 0 || 2 * r == m || gcd(r, m) != 1 {
        return Err(Error::Precondition(format!("a = {a} is not a unit of Z/{m} away from 0 and m/2")));
    }
    let mut perm = vec![0; (m - 1) as usize];
    for e in 1..m {
        let t = (e * r) % m;
        perm[(t - 1) as usize] = e;
    }
    Ok(perm)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The linking-sign invariant of a proper element with no real eigenvalue.
pub fn chirality_invariant(e: &OrthElement) -> Result<ChiralityData> {
    check_element(e)?;
    let m = e.order_with_cap(DEFAULT_ORDER_CAP)?;
    invariant_from_decomposition(&rotation_decomposition(e.matrix())?, m)
}

/// As [`chirality_invariant`], with non-unique planes chosen at random.
pub fn chirality_invariant_random<R: Rng + ?Sized>(e: &OrthElement, rng: &mut R) -> Result<ChiralityData> {
    check_element(e)?;
    let m = e.order_with_cap(DEFAULT_ORDER_CAP)?;
    invariant_from_decomposition(&rotation_decomposition_random(e.matrix(), rng)?, m)
}

/// The invariant of a rotation matrix of known order `m`.
pub fn chirality_invariant_matrix(matrix: &Matrix4<f64>, m: usize) -> Result<ChiralityData> {
    invariant_from_decomposition(&rotation_decomposition(matrix)?, m)
}

fn check_element(e: &OrthElement) -> Result<()> {
    if e.is_star() {
        return Err(Error::NotProper);
    }
    if e.has_invariant_line() {
        return Err(Error::Precondition(format!("{e} has a real eigenspace")));
    }
    Ok(())
}

fn invariant_from_decomposition(d: &RotationDecomposition, m: usize) -> Result<ChiralityData> {
    if !d.fixed_space.is_empty() || !d.negated_space.is_empty() || d.planes.len() != 2 {
        return Err(Error::Precondition("element has a real eigenspace".into()));
    }
    let mut planes = d.planes.clone();
    planes.sort_by(|p, q| p.angle.total_cmp(&q.angle));
    let residues: Vec<usize> = planes
        .iter()
        .map(|p| residue(p.angle, m))
        .collect::<Result<_>>()?;
    let frame = Matrix4::from_columns(&[planes[0].u, planes[0].v, planes[1].u, planes[1].v]);
    let lk_sign: i8 = if frame.determinant() > 0.0 { 1 } else { -1 };
    let lk_class = if lk_sign > 0 { 1 % m } else { m - 1 };
    Ok(ChiralityData {
        m,
        a1: residues[0],
        a2: residues[1],
        isoclinic: residues[0] == residues[1],
        lk_sign,
        lk_class,
    })
}

fn residue(angle: f64, m: usize) -> Result<usize> {
    let x = m as f64 * angle / TAU;
    let a = x.round();
    if (x - a).abs() > RESIDUE_TOL || a <= 0.0 || 2.0 * a >= m as f64 {
        return Err(Error::Precondition(format!(
            "rotation angle {angle} is not a multiple of 2 pi / {m} inside (0, pi)"
        )));
    }
    Ok(a as usize)
}

/// Block-diagonal double rotation by `2 pi a1/m` on span(e1, e2) and
/// `2 pi a2/m` on span(e3, e4).
pub fn block_rotation(a1: i64, a2: i64, m: i64) -> Matrix4<f64> {
    let (t1, t2) = (TAU * a1 as f64 / m as f64, TAU * a2 as f64 / m as f64);
    let mut r = Matrix4::zeros();
    for (off, t) in [(0, t1), (2, t2)] {
        r[(off, off)] = t.cos();
        r[(off, off + 1)] = -t.sin();
        r[(off + 1, off)] = t.sin();
        r[(off + 1, off + 1)] = t.cos();
    }
    r
}

/// `diag(-1, 1, 1, 1)`.
pub fn first_axis_reflection() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
}
