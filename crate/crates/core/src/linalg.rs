//! Analysis of 4x4 orthogonal matrices: real eigenlines, invariant planes with
//! rotation angles, commutants of matrix sets.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen, Vector4};
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::tolerance::eps;

/// Eigenvalue clusters of the symmetric part closer than this are merged.
const CLUSTER_TOL: f64 = 1e-7;

pub fn orthogonality_defect(m: &Matrix4<f64>) -> f64 {
    (m.transpose() * m - Matrix4::identity()).abs().max()
}

pub fn check_orthogonal(m: &Matrix4<f64>) -> Result<()> {
    let deviation = orthogonality_defect(m);
    if deviation > eps() * 10.0 {
        return Err(Error::NotOrthogonal { deviation });
    }
    Ok(())
}

/// Orthonormal basis of the null space of `a`, deciding rank with singular
/// values below `eps() * max(sigma_max, 1)`. The floor keeps a matrix that
/// is zero up to rounding from reporting full rank.
pub fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return (0..n).map(|i| DVector::from_fn(n, |r, _| (r == i) as u8 as f64)).collect();
    }
    // pad to at least n rows so that the thin SVD yields n right vectors
    let a = if a.nrows() < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let threshold = eps() * sigma_max.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= threshold)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

fn to_dmatrix(m: &Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}

fn to_vec4(v: &DVector<f64>) -> Vector4<f64> {
    Vector4::new(v[0], v[1], v[2], v[3])
}

/// Orthonormal basis of `{x : m x = sign x}`.
pub fn eigenspace(m: &Matrix4<f64>, sign: f64) -> Vec<Vector4<f64>> {
    let shifted = m - Matrix4::identity() * sign;
    null_space(&to_dmatrix(&shifted)).iter().map(to_vec4).collect()
}

/// A unit vector `v` with `m v = v` or `m v = -v`, if one exists.
pub fn eigen_real_line(m: &Matrix4<f64>) -> Result<Option<Vector4<f64>>> {
    check_orthogonal(m)?;
    Ok(eigenspace(m, 1.0)
        .into_iter()
        .next()
        .or_else(|| eigenspace(m, -1.0).into_iter().next()))
}

/// An oriented invariant plane: `m u = cos(angle) u + sin(angle) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPlane {
    pub u: Vector4<f64>,
    pub v: Vector4<f64>,
    /// In `(0, pi)`.
    pub angle: f64,
}

/// Orthogonal splitting of R^4 under a rotation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RotationDecomposition {
    pub planes: Vec<RotationPlane>,
    /// Orthonormal basis of the +1 eigenspace.
    pub fixed_space: Vec<Vector4<f64>>,
    /// Orthonormal basis of the -1 eigenspace.
    pub negated_space: Vec<Vector4<f64>>,
}

impl RotationDecomposition {
    /// The block-rotation matrix described by the decomposition.
    pub fn reconstruct(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for p in &self.planes {
            let (c, s) = (p.angle.cos(), p.angle.sin());
            m += (p.u * p.u.transpose() + p.v * p.v.transpose()) * c;
            m += (p.v * p.u.transpose() - p.u * p.v.transpose()) * s;
        }
        for f in &self.fixed_space {
            m += f * f.transpose();
        }
        for n in &self.negated_space {
            m -= n * n.transpose();
        }
        m
    }

    /// All basis vectors, planes first.
    pub fn vectors(&self) -> Vec<Vector4<f64>> {
        let mut out: Vec<Vector4<f64>> = self.planes.iter().flat_map(|p| [p.u, p.v]).collect();
        out.extend(self.fixed_space.iter().copied());
        out.extend(self.negated_space.iter().copied());
        out
    }
}

/// Decompose a rotation into oriented invariant planes with angles in `(0, pi)`,
/// plus its +1 and -1 eigenspaces. Where a plane is not unique (isoclinic
/// blocks), the first available basis vector seeds it.
pub fn rotation_decomposition(m: &Matrix4<f64>) -> Result<RotationDecomposition> {
    decompose(m, &mut |basis: &[Vector4<f64>]| basis[0])
}

/// As [`rotation_decomposition`], but seeds non-unique planes with random
/// vectors, so repeated calls explore different valid decompositions.
pub fn rotation_decomposition_random<R: Rng + ?Sized>(
    m: &Matrix4<f64>,
    rng: &mut R,
) -> Result<RotationDecomposition> {
    decompose(m, &mut |basis: &[Vector4<f64>]| {
        basis
            .iter()
            .fold(Vector4::zeros(), |acc, b| acc + b * rng.gen_range(-1.0..1.0))
    })
}

fn decompose(
    m: &Matrix4<f64>,
    seed: &mut dyn FnMut(&[Vector4<f64>]) -> Vector4<f64>,
) -> Result<RotationDecomposition> {
    check_orthogonal(m)?;
    if m.determinant() < 0.0 {
        return Err(Error::NotProper);
    }
    let sym = (m + m.transpose()) * 0.5;
    let skew = (m - m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut out = RotationDecomposition::default();
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= CLUSTER_TOL
        {
            end += 1;
        }
        let cluster: Vec<Vector4<f64>> = order[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let c = cluster_mean(&eig.eigenvalues, &order[start..end]);
        if c >= 1.0 - eps() {
            out.fixed_space.extend(cluster);
        } else if c <= -1.0 + eps() {
            out.negated_space.extend(cluster);
        } else {
            split_into_planes(&skew, cluster, c, seed, &mut out.planes)?;
        }
        start = end;
    }
    Ok(out)
}

fn cluster_mean(values: &nalgebra::Vector4<f64>, idx: &[usize]) -> f64 {
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

/// Within an eigenspace of the symmetric part with eigenvalue `cos`, the skew
/// part divided by `sin` is a complex structure; pair each seed vector with
/// its image.
fn split_into_planes(
    skew: &Matrix4<f64>,
    mut basis: Vec<Vector4<f64>>,
    cos: f64,
    seed: &mut dyn FnMut(&[Vector4<f64>]) -> Vector4<f64>,
    planes: &mut Vec<RotationPlane>,
) -> Result<()> {
    if basis.len() % 2 == 1 {
        return Err(Error::Precondition(
            "rotation eigenspace of odd dimension".into(),
        ));
    }
    let angle = cos.clamp(-1.0, 1.0).acos();
    while !basis.is_empty() {
        let mut u = seed(&basis);
        if u.norm() < 1e-3 {
            u = basis[0];
        }
        let u = u.normalize();
        let v = (skew * u).normalize();
        planes.push(RotationPlane { u, v, angle });
        basis = orthonormal_complement_within(&basis, &[u, v]);
    }
    Ok(())
}

/// Orthonormal basis of `span(basis)` minus the span of the orthonormal `remove`.
fn orthonormal_complement_within(
    basis: &[Vector4<f64>],
    remove: &[Vector4<f64>],
) -> Vec<Vector4<f64>> {
    let mut out: Vec<Vector4<f64>> = Vec::new();
    for b in basis {
        let mut x = *b;
        for r in remove.iter().chain(out.iter()) {
            x -= r * r.dot(&x);
        }
        if x.norm() > 1e-6 {
            out.push(x.normalize());
        }
    }
    out
}

/// Linear span of matrices commuting with every generator.
#[derive(Debug, Clone)]
pub struct Commutant {
    /// Orthonormal in the Frobenius inner product.
    pub basis: Vec<Matrix4<f64>>,
}

impl Commutant {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection (Frobenius) onto the commutant.
    pub fn project(&self, x: &Matrix4<f64>) -> Matrix4<f64> {
        self.basis
            .iter()
            .fold(Matrix4::zeros(), |acc, b| acc + b * b.dot(x))
    }
}

fn unit_matrix(r: usize, c: usize) -> Matrix4<f64> {
    let mut e = Matrix4::zeros();
    e[(r, c)] = 1.0;
    e
}

/// Solve `X g = g X` for all generators over the 16-dimensional matrix space.
pub fn commutant(gens: &[Matrix4<f64>]) -> Commutant {
    let mut system = DMatrix::<f64>::zeros(16 * gens.len(), 16);
    for (gi, g) in gens.iter().enumerate() {
        for col in 0..16 {
            let e = unit_matrix(col % 4, col / 4);
            let residual = e * g - g * e;
            for (row, x) in residual.iter().enumerate() {
                system[(16 * gi + row, col)] = *x;
            }
        }
    }
    let basis = null_space(&system)
        .iter()
        .map(|v| Matrix4::from_column_slice(v.as_slice()))
        .collect();
    Commutant { basis }
}

/// `I - 2 v v^T` for a common invariant line `v`, if the group has one.
pub fn lcp_witness(group: &FiniteGroup) -> Option<Matrix4<f64>> {
    let v = group.find_invariant_line()?;
    Some(householder(&v))
}

/// Reflection through the hyperplane orthogonal to `v`.
pub fn householder(v: &Vector4<f64>) -> Matrix4<f64> {
    let v = v.normalize();
    Matrix4::identity() - v * v.transpose() * 2.0
}

/// Nearest orthogonal matrix (polar factor).
pub fn orthogonalize(x: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    let svd = x.svd(true, true);
    if svd.singular_values.min() <= 1e-8 {
        return None;
    }
    Some(svd.u? * svd.v_t?)
}

/// The subspaces left invariant by a set of orthogonal matrices, when they
/// are all sums of a unique family of pairwise distinct irreducible blocks.
#[derive(Debug, Clone)]
pub struct InvariantSplitting {
    /// Orthonormal bases of the irreducible blocks.
    pub blocks: Vec<Vec<Vector4<f64>>>,
}

impl InvariantSplitting {
    /// Every invariant subspace of dimension `dim`, as an orthonormal basis.
    pub fn subspaces_of_dim(&self, dim: usize) -> Vec<Vec<Vector4<f64>>> {
        let n = self.blocks.len();
        (0u32..(1 << n))
            .filter(|mask| {
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.blocks[i].len())
                    .sum::<usize>()
                    == dim
            })
            .map(|mask| {
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .flat_map(|i| self.blocks[i].iter().copied())
                    .collect()
            })
            .collect()
    }
}

/// Split R^4 by the eigenspaces of a generic symmetric element of the
/// commutant. Returns `None` unless the commutant is spanned by the block
/// projectors, in which case the blocks are irreducible, pairwise
/// non-isomorphic, and every invariant subspace is a sum of blocks.
pub fn invariant_splitting(gens: &[Matrix4<f64>]) -> Option<InvariantSplitting> {
    let comm = commutant(gens);
    // fixed, incommensurable weights keep the result deterministic
    let generic = comm
        .basis
        .iter()
        .enumerate()
        .fold(Matrix4::zeros(), |acc, (i, b)| {
            let w = ((i as f64) + 2.0).sqrt() + std::f64::consts::FRAC_1_PI * (i as f64);
            acc + (b + b.transpose()) * w
        });
    let eig = SymmetricEigen::new(generic);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut blocks: Vec<Vec<Vector4<f64>>> = Vec::new();
    let mut last: Option<f64> = None;
    for &i in &order {
        let value = eig.eigenvalues[i];
        let v = eig.eigenvectors.column(i).into_owned();
        match last {
            Some(prev) if (value - prev).abs() <= 1e-6 => blocks.last_mut().unwrap().push(v),
            _ => blocks.push(vec![v]),
        }
        last = Some(value);
    }
    (blocks.len() == comm.dim()).then_some(InvariantSplitting { blocks })
}

/// Whether `span(basis)` is mapped into itself by `m`.
pub fn is_invariant_subspace(m: &Matrix4<f64>, basis: &[Vector4<f64>]) -> bool {
    basis.iter().all(|b| {
        let image = m * b;
        let inside = basis.iter().fold(Vector4::zeros(), |acc, c| acc + c * c.dot(&image));
        (image - inside).norm() <= eps() * 10.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::random_unit;
    use crate::elem::{parse_element, OrthElement};
    use crate::quat::{exp_pi_i_frac, UnitQuaternion};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(s: &str) -> Matrix4<f64> {
        *parse_element(s).unwrap().matrix()
    }

    #[test]
    fn rounding_noise_has_full_null_space() {
        let noise = DMatrix::from_fn(4, 4, |r, c| 1e-16 * (r as f64 - c as f64));
        assert_eq!(null_space(&noise).len(), 4);
    }


    #[test]
    fn real_line_examples() {
        let v = eigen_real_line(&Matrix4::identity()).unwrap().unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(eigen_real_line(&mat("[i,1]")).unwrap(), None);
        let m = mat("*[i,i]");
        let v = eigen_real_line(&m).unwrap().unwrap();
        assert!((m * v - v).norm() < 1e-9 || (m * v + v).norm() < 1e-9);
        let bad = Matrix4::identity() * 2.0;
        assert!(matches!(eigen_real_line(&bad), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn decomposition_examples() {
        let d = rotation_decomposition(&Matrix4::identity()).unwrap();
        assert!(d.planes.is_empty());
        assert_eq!(d.fixed_space.len(), 4);

        let left = OrthElement::pair(exp_pi_i_frac(2, 5), UnitQuaternion::ONE);
        let d = rotation_decomposition(left.matrix()).unwrap();
        assert_eq!(d.planes.len(), 2);
        for p in &d.planes {
            assert!((p.angle - 2.0 * std::f64::consts::PI / 5.0).abs() < 1e-12);
        }

        // [e^{pi i/n}, e^{pi i/n}][e^{pi i/m}, e^{-pi i/m}] turns by 2 pi/m and 2 pi/n
        let pi = std::f64::consts::PI;
        let product = |m: i64, n: i64| {
            OrthElement::pair(exp_pi_i_frac(1, n), exp_pi_i_frac(1, n))
                .compose(&OrthElement::pair(exp_pi_i_frac(1, m), exp_pi_i_frac(-1, m)))
        };
        let d = rotation_decomposition(product(3, 2).matrix()).unwrap();
        assert_eq!(d.planes.len(), 1);
        assert!((d.planes[0].angle - 2.0 * pi / 3.0).abs() < 1e-12);
        assert_eq!(d.negated_space.len(), 2);

        let d = rotation_decomposition(product(5, 3).matrix()).unwrap();
        let mut angles: Vec<f64> = d.planes.iter().map(|p| p.angle).collect();
        angles.sort_by(f64::total_cmp);
        assert!((angles[0] - 2.0 * pi / 5.0).abs() < 1e-12);
        assert!((angles[1] - 2.0 * pi / 3.0).abs() < 1e-12);

        assert!(matches!(rotation_decomposition(&mat("*[1,1]")), Err(Error::NotProper)));
    }

    #[test]
    fn negated_space_holds_half_turns() {
        let d = rotation_decomposition(&mat("[1,-1]")).unwrap();
        assert_eq!(d.negated_space.len(), 4);
        let d = rotation_decomposition(&mat("[i,i]")).unwrap();
        assert_eq!(d.fixed_space.len(), 2);
        assert_eq!(d.negated_space.len(), 2);
    }

    #[test]
    fn reconstruction_of_random_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let e = OrthElement::pair(random_unit(&mut rng), random_unit(&mut rng));
            let d = rotation_decomposition(e.matrix()).unwrap();
            assert!((d.reconstruct() - e.matrix()).abs().max() <= eps());
            let vs = d.vectors();
            assert_eq!(vs.len(), 4);
            for (a, x) in vs.iter().enumerate() {
                for (b, y) in vs.iter().enumerate() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((x.dot(y) - expect).abs() <= eps());
                }
            }
            for p in &d.planes {
                assert!(p.angle > 0.0 && p.angle < std::f64::consts::PI);
                let image = e.matrix() * p.u;
                assert!((image - p.u * p.angle.cos() - p.v * p.angle.sin()).norm() <= eps());
            }
        }
    }

    #[test]
    fn random_decomposition_of_isoclinic_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let m = *OrthElement::pair(exp_pi_i_frac(2, 7), UnitQuaternion::ONE).matrix();
        for _ in 0..20 {
            let d = rotation_decomposition_random(&m, &mut rng).unwrap();
            assert_eq!(d.planes.len(), 2);
            assert!((d.reconstruct() - m).abs().max() <= eps());
        }
    }

    #[test]
    fn commutant_dimensions() {
        assert_eq!(commutant(&[Matrix4::identity()]).dim(), 16);
        assert_eq!(commutant(&[]).dim(), 16);
        assert_eq!(commutant(&[mat("[i,i]")]).dim(), 8);
        let k = [mat("*[i,i][i,1]"), mat("*[k,k][i,1]")];
        let c = commutant(&k);
        assert_eq!(c.dim(), 2);
        // I and k1^2 lie in it
        let k1_sq = k[0] * k[0];
        for x in [Matrix4::identity(), k1_sq] {
            assert!((c.project(&x) - x).abs().max() <= 1e-9);
        }
        for b in &c.basis {
            for g in &k {
                assert!((b * g - g * b).abs().max() <= eps());
            }
        }
    }

    #[test]
    fn commutant_of_left_multiplications_is_right_multiplications() {
        // left multiplication by i and j generates all left multiplications;
        // the commutant is the 4-dimensional algebra of right multiplications
        let c = commutant(&[mat("[-i,1]"), mat("[-j,1]")]);
        assert_eq!(c.dim(), 4);
    }

    #[test]
    fn splitting_of_k() {
        let k = [mat("*[i,i][i,1]"), mat("*[k,k][i,1]")];
        let s = invariant_splitting(&k).unwrap();
        assert_eq!(s.blocks.len(), 2);
        let planes = s.subspaces_of_dim(2);
        assert_eq!(planes.len(), 2);
        for p in &planes {
            for g in &k {
                assert!(is_invariant_subspace(g, p));
            }
        }
        assert!(s.subspaces_of_dim(1).is_empty());
        assert!(s.subspaces_of_dim(3).is_empty());
        // a group with an isotypic block is not split
        assert!(invariant_splitting(&[mat("[i,i]")]).is_none());
    }

    #[test]
    fn householder_is_reflection() {
        let v = Vector4::new(1.0, 2.0, -1.0, 0.5);
        let h = householder(&v);
        assert!((h.determinant() + 1.0).abs() < 1e-12);
        assert!((h * v.normalize() + v.normalize()).norm() < 1e-12);
        assert!(orthogonality_defect(&h) < 1e-12);
    }

    #[test]
    fn orthogonalize_recovers_orthogonal_matrices() {
        let m = mat("[w, iI]");
        let noisy = m + Matrix4::from_element(1e-7);
        let o = orthogonalize(&noisy).unwrap();
        assert!(orthogonality_defect(&o) < 1e-12);
        assert!((o - m).abs().max() < 1e-6);
        assert!(orthogonalize(&Matrix4::zeros()).is_none());
    }
}
