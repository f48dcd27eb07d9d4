use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::Q;
use crate::{Error, Result};

/// Half-space `⟨normal, x⟩ + offset ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rational64,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rational64) -> Self {
        Self { normal, offset }
    }

    pub fn integral(normal: Vec<i64>, offset: i64) -> Self {
        Self { normal, offset: Rational64::from_integer(offset) }
    }

    /// Affine function `ℓ(x)` at a floating point.
    pub fn eval(&self, x: &[f64; 2]) -> f64 {
        let mut s = self.offset.to_f64().unwrap_or(f64::NAN);
        for (i, &n) in self.normal.iter().enumerate() {
            s += n as f64 * x[i];
        }
        s
    }

    fn eval_exact(&self, x: &[Rational64]) -> Rational64 {
        let mut s = self.offset;
        for (i, &n) in self.normal.iter().enumerate() {
            s += x[i] * n;
        }
        s
    }
}

/// Moment polytope of a smooth polarised toric manifold of dimension 1 or 2.
#[derive(Debug, Clone)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Facet>,
    /// Counter-clockwise for `dim = 2`, ascending for `dim = 1`.
    vertices: Vec<Vec<Rational64>>,
}

/// Lattice points of `kP`, lexicographically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub k: u32,
    pub dim: usize,
    pub points: Vec<[i64; 2]>,
}

impl LatticeBasis {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_f64(&self, i: usize) -> [f64; 2] {
        let p = self.points[i];
        [p[0] as f64, p[1] as f64]
    }
}

impl DelzantPolytope {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!("polytope dimension {dim}")));
        }
        for f in &facets {
            if f.normal.len() != dim {
                return Err(Error::Dimension { expected: dim, got: f.normal.len() });
            }
            if f.normal.iter().all(|&n| n == 0) {
                return Err(Error::InvalidPolytope("zero facet normal".into()));
            }
            if gcd_all(&f.normal) != 1 {
                return Err(Error::InvalidPolytope(format!("normal {:?} is not primitive", f.normal)));
            }
        }
        let vertices = if dim == 1 { vertices_1d(&facets)? } else { vertices_2d(&facets)? };
        Ok(Self { dim, facets, vertices })
    }

    /// `[0, 1]`, the polytope of `(ℙ¹, 𝒪(1))`.
    pub fn projective_line() -> Self {
        Self::new(1, vec![Facet::new(vec![1], 0.into()), Facet::new(vec![-1], 1.into())]).unwrap()
    }

    /// Unit square, `ℙ¹ × ℙ¹` with `𝒪(1,1)`.
    pub fn product_of_lines() -> Self {
        Self::new(
            2,
            vec![
                Facet::new(vec![1, 0], 0.into()),
                Facet::new(vec![0, 1], 0.into()),
                Facet::new(vec![-1, 0], 1.into()),
                Facet::new(vec![0, -1], 1.into()),
            ],
        )
        .unwrap()
    }

    /// `{x ≥ 0, y ≥ 0, y ≤ 1, x + y ≤ 2}`, the first Hirzebruch surface.
    pub fn hirzebruch_f1() -> Self {
        Self::new(
            2,
            vec![
                Facet::new(vec![1, 0], 0.into()),
                Facet::new(vec![0, 1], 0.into()),
                Facet::new(vec![0, -1], 1.into()),
                Facet::new(vec![-1, -1], 2.into()),
            ],
        )
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vec<Rational64>] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> Vec<[f64; 2]> {
        self.vertices
            .iter()
            .map(|v| {
                let mut p = [0.0; 2];
                for (i, c) in v.iter().enumerate() {
                    p[i] = c.to_f64().unwrap();
                }
                p
            })
            .collect()
    }

    /// Exact Euclidean volume.
    pub fn volume(&self) -> Q {
        let v = &self.vertices;
        let r = if self.dim == 1 {
            v[1][0] - v[0][0]
        } else {
            let m = v.len();
            let mut twice = Rational64::zero();
            for i in 0..m {
                let j = (i + 1) % m;
                twice += v[i][0] * v[j][1] - v[j][0] * v[i][1];
            }
            twice.abs() / 2
        };
        Q::new((*r.numer()).into(), (*r.denom()).into())
    }

    pub fn volume_f64(&self) -> f64 {
        crate::exact::to_f64(&self.volume())
    }

    /// Diameter of the vertex set.
    pub fn diameter(&self) -> f64 {
        let v = self.vertices_f64();
        let mut d: f64 = 0.0;
        for a in &v {
            for b in &v {
                d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        d
    }

    pub fn contains_scaled(&self, alpha: &[i64; 2], k: u32) -> bool {
        self.facets.iter().all(|f| {
            let mut s: i128 = 0;
            for i in 0..self.dim {
                s += f.normal[i] as i128 * alpha[i] as i128;
            }
            let den = *f.offset.denom() as i128;
            s * den + (k as i128) * (*f.offset.numer() as i128) >= 0
        })
    }

    /// All `α ∈ kP ∩ ℤⁿ` in lexicographic order.
    pub fn lattice_points(&self, k: u32) -> LatticeBasis {
        let kq = Rational64::from_integer(k as i64);
        let mut lo = [0i64; 2];
        let mut hi = [0i64; 2];
        for d in 0..self.dim {
            let coords = self.vertices.iter().map(|v| v[d] * kq);
            lo[d] = coords.clone().map(|c| c.floor().to_integer()).min().unwrap();
            hi[d] = coords.map(|c| c.ceil().to_integer()).max().unwrap();
        }
        let mut points = Vec::new();
        if self.dim == 1 {
            for a in lo[0]..=hi[0] {
                let p = [a, 0];
                if self.contains_scaled(&p, k) {
                    points.push(p);
                }
            }
        } else {
            for a in lo[0]..=hi[0] {
                for b in lo[1]..=hi[1] {
                    let p = [a, b];
                    if self.contains_scaled(&p, k) {
                        points.push(p);
                    }
                }
            }
        }
        LatticeBasis { k, dim: self.dim, points }
    }

    /// Smallest facet value at `x`; positive in the interior.
    pub fn min_facet_value(&self, x: &[f64; 2]) -> f64 {
        self.facets.iter().map(|f| f.eval(x)).fold(f64::INFINITY, f64::min)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

fn vertices_1d(facets: &[Facet]) -> Result<Vec<Vec<Rational64>>> {
    if facets.len() != 2 {
        return Err(Error::InvalidPolytope(format!("an interval needs 2 facets, got {}", facets.len())));
    }
    let mut pts: Vec<Rational64> = facets.iter().map(|f| -f.offset / f.normal[0]).collect();
    pts.sort();
    let lower = facets.iter().any(|f| f.normal[0] == 1);
    let upper = facets.iter().any(|f| f.normal[0] == -1);
    if !(lower && upper) || pts[0] >= pts[1] {
        return Err(Error::InvalidPolytope("interval facets must be x ≥ a and x ≤ b with a < b".into()));
    }
    for f in facets {
        if f.eval_exact(&[pts[0]]) < Rational64::zero() || f.eval_exact(&[pts[1]]) < Rational64::zero() {
            return Err(Error::InvalidPolytope("empty interval".into()));
        }
    }
    Ok(pts.into_iter().map(|p| vec![p]).collect())
}

fn vertices_2d(facets: &[Facet]) -> Result<Vec<Vec<Rational64>>> {
    if facets.len() < 3 {
        return Err(Error::InvalidPolytope("a polygon needs at least 3 facets".into()));
    }
    let mut verts: Vec<Vec<Rational64>> = Vec::new();
    for i in 0..facets.len() {
        for j in (i + 1)..facets.len() {
            let (a, b) = (&facets[i], &facets[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det == 0 {
                continue;
            }
            // Solve a.n·x = -a.c, b.n·x = -b.c.
            let d = Rational64::from_integer(det);
            let x = (-a.offset * b.normal[1] + b.offset * a.normal[1]) / d;
            let y = (-b.offset * a.normal[0] + a.offset * b.normal[0]) / d;
            let p = vec![x, y];
            if facets.iter().all(|f| f.eval_exact(&p) >= Rational64::zero()) && !verts.contains(&p) {
                verts.push(p);
            }
        }
    }
    if verts.len() < 3 {
        return Err(Error::InvalidPolytope("polygon is empty or degenerate".into()));
    }
    for f in facets {
        let on = verts.iter().filter(|v| f.eval_exact(v).is_zero()).count();
        if on != 2 {
            return Err(Error::InvalidPolytope(format!("facet {:?} meets {on} vertices (unbounded or redundant)", f.normal)));
        }
    }
    for v in &verts {
        let tight: Vec<&Facet> = facets.iter().filter(|f| f.eval_exact(v).is_zero()).collect();
        let vf: Vec<f64> = v.iter().map(|c| c.to_f64().unwrap()).collect();
        if tight.len() != 2 {
            return Err(Error::NotDelzant { vertex: vf, reason: format!("{} facets meet here", tight.len()) });
        }
        let det = tight[0].normal[0] * tight[1].normal[1] - tight[0].normal[1] * tight[1].normal[0];
        if det.abs() != 1 {
            return Err(Error::NotDelzant { vertex: vf, reason: format!("facet normals span a sublattice of index {}", det.abs()) });
        }
    }
    // Counter-clockwise order around the centroid.
    let m = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0].to_f64().unwrap()).sum::<f64>() / m;
    let cy = verts.iter().map(|v| v[1].to_f64().unwrap()).sum::<f64>() / m;
    verts.sort_by(|a, b| {
        let ta = (a[1].to_f64().unwrap() - cy).atan2(a[0].to_f64().unwrap() - cx);
        let tb = (b[1].to_f64().unwrap() - cy).atan2(b[0].to_f64().unwrap() - cx);
        ta.total_cmp(&tb)
    });
    Ok(verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn interval_points() {
        let p = DelzantPolytope::projective_line();
        let b = p.lattice_points(3);
        assert_eq!(b.points.iter().map(|p| p[0]).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(p.volume(), q(1));
    }

    #[test]
    fn square_points() {
        let p = DelzantPolytope::product_of_lines();
        assert_eq!(p.lattice_points(2).len(), 9);
    }

    #[test]
    fn f1_points_by_hand() {
        // (0,0) (1,0) (2,0) (0,1) (1,1)
        let p = DelzantPolytope::hirzebruch_f1();
        let b = p.lattice_points(1);
        assert_eq!(b.points, vec![[0, 0], [0, 1], [1, 0], [1, 1], [2, 0]]);
        assert_eq!(p.volume(), crate::exact::q_frac(3, 2));
    }

    #[test]
    fn rejects_non_delzant() {
        // Triangle with vertex (0,0),(2,0),(0,1); at (2,0) normals (0,1),(-1,-2): det -1,
        // but at (0,1): (1,0),(-1,-2) det -2.
        let err = DelzantPolytope::new(
            2,
            vec![Facet::new(vec![1, 0], 0.into()), Facet::new(vec![0, 1], 0.into()), Facet::new(vec![-1, -2], 2.into())],
        )
        .unwrap_err();
        match err {
            Error::NotDelzant { vertex, .. } => assert_eq!(vertex, vec![0.0, 1.0]),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_unbounded() {
        let err = DelzantPolytope::new(2, vec![Facet::new(vec![1, 0], 0.into()), Facet::new(vec![0, 1], 0.into())]);
        assert!(err.is_err());
    }
}
