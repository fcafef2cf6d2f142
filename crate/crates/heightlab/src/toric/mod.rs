//! Moment-polytope computations for toric Fano varieties.
//!
//! Volumes, barycenters and the K-polystability test are exact rational
//! computations on a simplicial decomposition; only the universal height
//! bound is evaluated in floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::rational_to_f64;

mod linalg;

use linalg::{determinant, nullspace, rank};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToricError {
    #[error("polytope is not full-dimensional")]
    Degenerate,
    #[error("polytope needs at least dim+1 vertices")]
    TooFewPoints,
    #[error("vertex dimension mismatch")]
    DimensionMismatch,
}

/// Full-dimensional rational polytope given by its vertices.
#[derive(Debug, Clone, Serialize)]
pub struct LatticePolytope {
    vertices: Vec<Vec<BigRational>>,
    #[serde(skip)]
    facets: Vec<Facet>,
}

/// Half-space a·x ≤ b with primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Facet {
    normal: Vec<BigInt>,
    offset: BigRational,
}

impl Facet {
    fn eval(&self, x: &[BigRational]) -> BigRational {
        self.normal
            .iter()
            .zip(x)
            .map(|(a, xi)| BigRational::from(a.clone()) * xi)
            .sum()
    }

    fn contains(&self, x: &[BigRational]) -> bool {
        self.eval(x) == self.offset
    }
}

impl LatticePolytope {
    /// Builds the polytope as the convex hull of `points`, reducing to the
    /// minimal vertex list.
    pub fn from_points(points: &[Vec<BigRational>]) -> Result<Self, ToricError> {
        let dim = points.first().ok_or(ToricError::TooFewPoints)?.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(ToricError::DimensionMismatch);
        }
        if points.len() < dim + 1 {
            return Err(ToricError::TooFewPoints);
        }
        let diffs: Vec<Vec<BigRational>> = points[1..]
            .iter()
            .map(|p| sub(p, &points[0]))
            .collect();
        if rank(&diffs) != dim {
            return Err(ToricError::Degenerate);
        }
        let facets = enumerate_facets(points, dim);
        // A hull point is a vertex exactly when its active facet normals span.
        let vertices: Vec<Vec<BigRational>> = points
            .iter()
            .filter(|p| {
                let active: Vec<Vec<BigRational>> = facets
                    .iter()
                    .filter(|f| f.contains(p))
                    .map(|f| f.normal.iter().map(|a| BigRational::from(a.clone())).collect())
                    .collect();
                rank(&active) == dim
            })
            .cloned()
            .collect();
        let mut dedup: Vec<Vec<BigRational>> = Vec::new();
        for v in vertices {
            if !dedup.contains(&v) {
                dedup.push(v);
            }
        }
        Ok(LatticePolytope { vertices: dedup, facets })
    }

    pub fn from_i64_points(points: &[&[i64]]) -> Result<Self, ToricError> {
        let pts: Vec<Vec<BigRational>> = points
            .iter()
            .map(|p| p.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
            .collect();
        Self::from_points(&pts)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    pub fn contains_origin_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset.is_positive())
    }

    /// Scales the polytope by a positive integer factor.
    pub fn scale(&self, k: u32) -> LatticePolytope {
        let kq = BigRational::from(BigInt::from(k));
        let vertices: Vec<Vec<BigRational>> =
            self.vertices.iter().map(|v| v.iter().map(|x| x * &kq).collect()).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet { normal: f.normal.clone(), offset: &f.offset * &kq })
            .collect();
        LatticePolytope { vertices, facets }
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|f| f.eval(x) <= f.offset)
    }

    /// All lattice points of the polytope, by bounding-box scan.
    pub fn lattice_points(&self) -> Vec<Vec<BigInt>> {
        let dim = self.dim();
        let mut lo = vec![BigInt::zero(); dim];
        let mut hi = vec![BigInt::zero(); dim];
        for j in 0..dim {
            let coords: Vec<&BigRational> = self.vertices.iter().map(|v| &v[j]).collect();
            lo[j] = coords.iter().min().unwrap().floor().to_integer();
            hi[j] = coords.iter().max().unwrap().ceil().to_integer();
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        'scan: loop {
            let q: Vec<BigRational> =
                cur.iter().map(|x| BigRational::from(x.clone())).collect();
            if self.contains(&q) {
                out.push(cur.clone());
            }
            for j in 0..dim {
                if cur[j] < hi[j] {
                    cur[j] += 1;
                    continue 'scan;
                }
                cur[j] = lo[j].clone();
            }
            break;
        }
        out
    }

    /// Simplicial decomposition: each simplex is dim+1 vertices.
    pub fn triangulate(&self) -> Vec<Vec<Vec<BigRational>>> {
        triangulate_hull(&self.vertices, &self.facets, self.dim())
    }
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Brute-force supporting-hyperplane enumeration over dim-subsets of points.
fn enumerate_facets(points: &[Vec<BigRational>], dim: usize) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    let m = points.len();
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        if let Some(f) = facet_from_subset(points, &idx, dim) {
            if !facets.contains(&f) {
                facets.push(f);
            }
        }
        // next combination
        let mut j = dim;
        loop {
            if j == 0 {
                return facets;
            }
            j -= 1;
            if idx[j] + (dim - j) < m {
                idx[j] += 1;
                for t in j + 1..dim {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn facet_from_subset(points: &[Vec<BigRational>], idx: &[usize], dim: usize) -> Option<Facet> {
    let base = &points[idx[0]];
    let diffs: Vec<Vec<BigRational>> =
        idx[1..].iter().map(|&i| sub(&points[i], base)).collect();
    let kernel = nullspace(&diffs, dim);
    if kernel.len() != 1 {
        return None;
    }
    let mut normal = primitive_integer(&kernel[0]);
    let offset_of = |a: &[BigInt], p: &[BigRational]| -> BigRational {
        a.iter().zip(p).map(|(ai, pi)| BigRational::from(ai.clone()) * pi).sum()
    };
    let b = offset_of(&normal, base);
    let mut any_below = false;
    let mut any_above = false;
    for p in points {
        let v = offset_of(&normal, p);
        if v < b {
            any_below = true;
        } else if v > b {
            any_above = true;
        }
    }
    if any_below && any_above {
        return None;
    }
    let mut offset = b;
    if any_above {
        for a in &mut normal {
            *a = -a.clone();
        }
        offset = -offset;
    }
    Some(Facet { normal, offset })
}

/// Clears denominators and divides by the gcd; first nonzero entry positive.
fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> =
        v.iter().map(|x| (x * BigRational::from(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        for x in &mut ints {
            *x = &*x / &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
    }
    ints
}

fn triangulate_hull(
    vertices: &[Vec<BigRational>],
    facets: &[Facet],
    dim: usize,
) -> Vec<Vec<Vec<BigRational>>> {
    if dim == 1 {
        let lo = vertices.iter().min_by_key(|v| v[0].clone()).unwrap().clone();
        let hi = vertices.iter().max_by_key(|v| v[0].clone()).unwrap().clone();
        return vec![vec![lo, hi]];
    }
    let apex = &vertices[0];
    let mut simplices = Vec::new();
    for f in facets {
        if f.contains(apex) {
            continue;
        }
        let on_facet: Vec<Vec<BigRational>> =
            vertices.iter().filter(|v| f.contains(v)).cloned().collect();
        // Project out a coordinate where the normal is nonzero; the projection
        // is an affine bijection of the facet hyperplane onto Q^{dim-1}.
        let drop = f.normal.iter().position(|a| !a.is_zero()).unwrap();
        let projected: Vec<Vec<BigRational>> = on_facet
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let sub_facets = enumerate_facets(&projected, dim - 1);
        for simplex in triangulate_hull(&projected, &sub_facets, dim - 1) {
            let mut lifted: Vec<Vec<BigRational>> = simplex
                .iter()
                .map(|p| {
                    // recover the dropped coordinate from the projected point
                    let i = projected.iter().position(|q| q == p).unwrap();
                    on_facet[i].clone()
                })
                .collect();
            lifted.push(apex.clone());
            simplices.push(lifted);
        }
    }
    simplices
}

fn simplex_volume(simplex: &[Vec<BigRational>], dim: usize) -> BigRational {
    let rows: Vec<Vec<BigRational>> =
        simplex[..dim].iter().map(|v| sub(v, &simplex[dim])).collect();
    let mut fact = BigInt::one();
    for k in 2..=dim {
        fact *= BigInt::from(k);
    }
    determinant(&rows).abs() / BigRational::from(fact)
}

/// Exact volume, barycenter, degree, K-polystability and height bound.
#[derive(Debug, Clone, Serialize)]
pub struct ToricReport {
    pub volume: BigRational,
    pub barycenter: Vec<BigRational>,
    /// Anticanonical degree n!·vol(P).
    pub degree: BigRational,
    /// True when the barycenter is the origin.
    pub kps: bool,
    /// Universal height bound −(1/2)·vol·log(vol/(2π²)^n).
    pub bound_rhs: f64,
    /// c_n/(n+1)! for the same dimension, for comparison.
    pub cn_over_factorial: f64,
}

pub fn polytope_measure(p: &LatticePolytope) -> ToricReport {
    let dim = p.dim();
    let mut volume = BigRational::zero();
    let mut weighted = vec![BigRational::zero(); dim];
    let denom = BigRational::from(BigInt::from(dim as u32 + 1));
    for simplex in p.triangulate() {
        let v = simplex_volume(&simplex, dim);
        for j in 0..dim {
            let centroid_j: BigRational =
                simplex.iter().map(|q| q[j].clone()).sum::<BigRational>() / &denom;
            weighted[j] += &v * centroid_j;
        }
        volume += v;
    }
    let barycenter: Vec<BigRational> = weighted.iter().map(|w| w / &volume).collect();
    let mut fact = BigInt::one();
    for k in 2..=dim {
        fact *= BigInt::from(k);
    }
    let degree = &volume * BigRational::from(fact);
    let kps = barycenter.iter().all(|b| b.is_zero());
    ToricReport {
        bound_rhs: universal_bound_rhs_from_volume(&volume, dim),
        cn_over_factorial: crate::verdict::c_n_constant(dim as u32)
            / crate::verdict::factorial(dim as u32 + 1),
        volume,
        barycenter,
        degree,
        kps,
    }
}

/// Right-hand side of the universal toric height bound,
/// −(1/2)·vol·log(vol/(2π²)^n).
pub fn universal_bound_rhs(p: &LatticePolytope) -> f64 {
    let report = polytope_measure(p);
    report.bound_rhs
}

fn universal_bound_rhs_from_volume(vol: &BigRational, dim: usize) -> f64 {
    let v = rational_to_f64(vol);
    let pi = std::f64::consts::PI;
    -0.5 * v * (v / (2.0 * pi * pi).powi(dim as i32)).ln()
}

/// Marker points of kP used for the monomial embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkerMode {
    Vertices,
    LatticePoints,
}

/// Binomial relation x^plus − x^minus between embedding coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binomial {
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
}

impl Binomial {
    pub fn display(&self) -> String {
        let side = |exps: &[u64]| {
            let parts: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if parts.is_empty() { "1".to_string() } else { parts.join("*") }
        };
        format!("{} - {}", side(&self.plus), side(&self.minus))
    }
}

/// Marker points of kP in a fixed order.
pub fn embedding_markers(p: &LatticePolytope, k: u32, mode: MarkerMode) -> Vec<Vec<BigInt>> {
    let scaled = p.scale(k);
    match mode {
        MarkerMode::Vertices => scaled
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x.to_integer()).collect())
            .collect(),
        MarkerMode::LatticePoints => scaled.lattice_points(),
    }
}

/// Generating binomials of the toric model: one per basis vector of the
/// integer kernel of the homogenized marker matrix [(m_i, 1)].
pub fn canonical_model_binomials(p: &LatticePolytope, k: u32, mode: MarkerMode) -> Vec<Binomial> {
    let markers = embedding_markers(p, k, mode);
    binomials_from_markers(&markers)
}

fn binomials_from_markers(markers: &[Vec<BigInt>]) -> Vec<Binomial> {
    let dim = markers.first().map_or(0, |m| m.len());
    // columns: one per marker; rows: coordinates plus the homogenizing row.
    let rows: Vec<Vec<BigRational>> = (0..=dim)
        .map(|r| {
            markers
                .iter()
                .map(|m| {
                    if r < dim {
                        BigRational::from(m[r].clone())
                    } else {
                        BigRational::one()
                    }
                })
                .collect()
        })
        .collect();
    let kernel = nullspace(&rows, markers.len());
    kernel
        .iter()
        .map(|v| {
            let ints = primitive_integer(v);
            let plus: Vec<u64> = ints
                .iter()
                .map(|x| if x.is_positive() { u64::try_from(x.clone()).unwrap() } else { 0 })
                .collect();
            let minus: Vec<u64> = ints
                .iter()
                .map(|x| if x.is_negative() { u64::try_from(-x.clone()).unwrap() } else { 0 })
                .collect();
            Binomial { plus, minus }
        })
        .collect()
}

/// Checks that a binomial vanishes on the monomial parametrization
/// z ↦ (z^{m_1}, …, z^{m_N}) at the given rational z (all entries nonzero).
pub fn binomial_vanishes(b: &Binomial, markers: &[Vec<BigInt>], z: &[BigRational]) -> bool {
    let monomial = |m: &[BigInt]| -> BigRational {
        m.iter()
            .zip(z)
            .map(|(e, zi)| {
                let e32 = i32::try_from(e.clone()).unwrap();
                zi.pow(e32)
            })
            .product()
    };
    let side = |exps: &[u64]| -> BigRational {
        exps.iter()
            .zip(markers)
            .map(|(&e, m)| monomial(m).pow(e as i32))
            .product()
    };
    side(&b.plus) == side(&b.minus)
}

/// A named polytope in a gap-table catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub vertices: Vec<Vec<BigRational>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub name: String,
    pub degree: BigRational,
    pub kps: bool,
}

/// Degrees of a catalog sorted descending, with K-polystability flags.
pub fn gap_table(catalog: &[CatalogEntry]) -> Result<Vec<GapRow>, ToricError> {
    let mut rows = Vec::new();
    for entry in catalog {
        let p = LatticePolytope::from_points(&entry.vertices)?;
        let report = polytope_measure(&p);
        rows.push(GapRow { name: entry.name.clone(), degree: report.degree, kps: report.kps });
    }
    rows.sort_by(|a, b| b.degree.cmp(&a.degree).then(a.name.cmp(&b.name)));
    Ok(rows)
}
