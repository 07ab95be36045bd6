//! Built-in sampled domains, the domain file format and ambient clouds.
//!
//! Shapes are filled with the Halton sequence (bases 2, 3), keeping the
//! points that fall inside; the result depends only on the parameters.
//!
//! Domain files are plain text. `#` starts a comment. The first line holds
//! the dimension `n`, optionally followed by the word `unbounded`. Each
//! following line is one point (`n` whitespace-separated reals) until a
//! line reading `edges`, after which each line is an index pair `i j`.

use std::fmt;
use std::path::Path;

use super::syntax::Term;
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialDomain};

#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// `[a, b] ⊂ ℝ`, evenly spaced.
    Interval { a: f64, b: f64, points: usize },
    /// `[0, side]²`.
    Square { side: f64, points: usize },
    /// `r0 ≤ |x| ≤ r1` in ℝ².
    Annulus { r0: f64, r1: f64, points: usize },
    /// `[0, 2]² \ (1, 2]²`.
    LShape { points: usize },
    /// Unit squares `[0, 1]²` and `[2, 3] × [0, 1]` joined by the strip
    /// `[1, 2] × [(1 − width)/2, (1 + width)/2]`.
    Corridor { width: f64, points: usize },
    /// `rays` half-lines from the origin sampled at radii geometric in
    /// `[1, reach]`; flagged unbounded.
    Rays { rays: usize, reach: f64, points: usize },
    File { path: String },
}

impl DomainSpec {
    pub fn parse(text: &str) -> std::result::Result<DomainSpec, String> {
        let t = Term::parse(text)?;
        let points = |d| t.count_or("points", d);
        let spec = match t.name.as_str() {
            "interval" => {
                t.only(&["a", "b", "points"])?;
                DomainSpec::Interval {
                    a: t.number_or("a", 0.0)?,
                    b: t.number_or("b", 1.0)?,
                    points: points(256)?,
                }
            }
            "square" => {
                t.only(&["side", "points"])?;
                DomainSpec::Square {
                    side: t.number_or("side", 1.0)?,
                    points: points(1024)?,
                }
            }
            "annulus" => {
                t.only(&["r0", "r1", "points"])?;
                DomainSpec::Annulus {
                    r0: t.number_or("r0", 1.0)?,
                    r1: t.number_or("r1", 2.0)?,
                    points: points(2048)?,
                }
            }
            "l_shape" | "lshape" => {
                t.only(&["points"])?;
                DomainSpec::LShape { points: points(2048)? }
            }
            "corridor" => {
                t.only(&["width", "points"])?;
                DomainSpec::Corridor {
                    width: t.number_or("width", 0.1)?,
                    points: points(2048)?,
                }
            }
            "rays" => {
                t.only(&["rays", "reach", "points"])?;
                DomainSpec::Rays {
                    rays: t.count_or("rays", 8)?,
                    reach: t.number_or("reach", 1e3)?,
                    points: points(1024)?,
                }
            }
            "file" => {
                t.only(&["path"])?;
                DomainSpec::File {
                    path: t.get("path").ok_or("`file` needs `path`")?.to_string(),
                }
            }
            other => return Err(format!("unknown domain `{other}`")),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let ok = match self {
            DomainSpec::Interval { a, b, points } => a < b && *points >= 2,
            DomainSpec::Square { side, points } => *side > 0.0 && *points >= 1,
            DomainSpec::Annulus { r0, r1, points } => 0.0 <= *r0 && r0 < r1 && *points >= 1,
            DomainSpec::LShape { points } => *points >= 1,
            DomainSpec::Corridor { width, points } => 0.0 < *width && *width <= 1.0 && *points >= 1,
            DomainSpec::Rays { rays, reach, points } => *rays >= 1 && *reach > 1.0 && *points >= *rays,
            DomainSpec::File { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid domain parameters: {self}"))
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            DomainSpec::Interval { .. } => Some(1),
            DomainSpec::File { .. } => None,
            _ => Some(2),
        }
    }

    /// Membership test of the continuum shape, when there is one.
    pub fn contains(&self, x: &[f64]) -> Option<bool> {
        Some(match self {
            DomainSpec::Interval { a, b, .. } => *a <= x[0] && x[0] <= *b,
            DomainSpec::Square { side, .. } => (0.0..=*side).contains(&x[0]) && (0.0..=*side).contains(&x[1]),
            DomainSpec::Annulus { r0, r1, .. } => {
                let r = x[0].hypot(x[1]);
                *r0 <= r && r <= *r1
            }
            DomainSpec::LShape { .. } => {
                let inside = (0.0..=2.0).contains(&x[0]) && (0.0..=2.0).contains(&x[1]);
                inside && !(x[0] > 1.0 && x[1] > 1.0)
            }
            DomainSpec::Corridor { width, .. } => {
                let unit = (0.0..=1.0).contains(&x[1]);
                let left = (0.0..=1.0).contains(&x[0]) && unit;
                let right = (2.0..=3.0).contains(&x[0]) && unit;
                let strip = (1.0..=2.0).contains(&x[0]) && (x[1] - 0.5).abs() <= width / 2.0;
                left || right || strip
            }
            DomainSpec::Rays { .. } | DomainSpec::File { .. } => return None,
        })
    }

    fn bbox(&self) -> Option<([f64; 2], [f64; 2])> {
        Some(match self {
            DomainSpec::Square { side, .. } => ([0.0, 0.0], [*side, *side]),
            DomainSpec::Annulus { r1, .. } => ([-r1, -r1], [*r1, *r1]),
            DomainSpec::LShape { .. } => ([0.0, 0.0], [2.0, 2.0]),
            DomainSpec::Corridor { .. } => ([0.0, 0.0], [3.0, 1.0]),
            _ => return None,
        })
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Interval { a, b, points } => write!(f, "interval(a={a},b={b},points={points})"),
            DomainSpec::Square { side, points } => write!(f, "square(side={side},points={points})"),
            DomainSpec::Annulus { r0, r1, points } => write!(f, "annulus(r0={r0},r1={r1},points={points})"),
            DomainSpec::LShape { points } => write!(f, "l_shape(points={points})"),
            DomainSpec::Corridor { width, points } => write!(f, "corridor(width={width},points={points})"),
            DomainSpec::Rays { rays, reach, points } => write!(f, "rays(rays={rays},reach={reach},points={points})"),
            DomainSpec::File { path } => write!(f, "file(path={path})"),
        }
    }
}

/// Extra knobs applied after sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainOptions {
    /// Adds the pair `x₁ = seam ± 5·10⁻⁸` (other coordinates at the
    /// middle of the bounding box), so that a discontinuity across the
    /// hyperplane `x₁ = seam` is resolved at every `t` of the grid.
    pub seam: Option<f64>,
    /// Neighbours per point of the adjacency graph; `0` leaves the graph
    /// out (file edges are kept either way).
    pub knn: usize,
    /// Every `hat_stride`-th point forms the hat cloud.
    pub hat_stride: usize,
}

impl Default for DomainOptions {
    fn default() -> Self {
        DomainOptions {
            seam: None,
            knn: 8,
            hat_stride: 1,
        }
    }
}

/// `i`-th element of the base-`b` van der Corput sequence.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Halton points in the box `[lo, hi]`, starting at index `start`, kept
/// when `keep` accepts them, until `count` are collected.
fn halton_fill(lo: [f64; 2], hi: [f64; 2], start: u64, count: usize, keep: impl Fn(&[f64]) -> bool) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(count);
    let mut i = start;
    let limit = start + 10_000 + 1_000 * count as u64;
    while out.len() < count {
        if i > limit {
            return Err(Error::Config("shape too thin to fill with the requested points".into()));
        }
        let p = [
            lo[0] + (hi[0] - lo[0]) * radical_inverse(i, 2),
            lo[1] + (hi[1] - lo[1]) * radical_inverse(i, 3),
        ];
        if keep(&p) {
            out.push(p);
        }
        i += 1;
    }
    Ok(out)
}

/// A sampled domain together with the spec it came from.
#[derive(Clone, Debug)]
pub struct BuiltDomain {
    pub spec: DomainSpec,
    pub domain: SpatialDomain,
}

pub fn build_domain(spec: &DomainSpec, opts: &DomainOptions) -> Result<BuiltDomain> {
    let (mut cloud, edges, bounded) = match spec {
        DomainSpec::Interval { a, b, points } => {
            let pts: Vec<[f64; 1]> = (0..*points)
                .map(|i| [a + (b - a) * i as f64 / (*points - 1) as f64])
                .collect();
            (PointCloud::from_points(1, &pts)?, None, true)
        }
        DomainSpec::Rays { rays, reach, points } => {
            let per = points / rays;
            let mut pts = Vec::with_capacity(per * rays);
            for k in 0..*rays {
                let a = std::f64::consts::TAU * k as f64 / *rays as f64;
                for j in 0..per {
                    let r = reach.powf(j as f64 / (per.max(2) - 1) as f64);
                    pts.push([r * a.cos(), r * a.sin()]);
                }
            }
            (PointCloud::from_points(2, &pts)?, None, false)
        }
        DomainSpec::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let (cloud, edges, bounded) = parse_domain_file(&text)?;
            (cloud, edges, bounded)
        }
        shape => {
            let (lo, hi) = shape.bbox().expect("shapes have a box");
            let n = match shape {
                DomainSpec::Square { points, .. }
                | DomainSpec::Annulus { points, .. }
                | DomainSpec::LShape { points }
                | DomainSpec::Corridor { points, .. } => *points,
                _ => unreachable!(),
            };
            let pts = halton_fill(lo, hi, 1, n, |p| shape.contains(p) == Some(true))?;
            (PointCloud::from_points(2, &pts)?, None, true)
        }
    };
    if let Some(s) = opts.seam {
        let (lo, hi) = cloud.bounding_box();
        let mut mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        mid[0] = s - 5e-8;
        cloud.try_push(&mid)?;
        mid[0] = s + 5e-8;
        cloud.try_push(&mid)?;
    }
    let n = cloud.len();
    let label = spec.to_string();
    let mut domain = SpatialDomain::new(cloud, bounded)?.with_label(label);
    if let Some(e) = edges {
        domain = domain.with_edges(e)?;
    } else if opts.knn > 0 {
        domain = domain.with_knn_graph(opts.knn);
    }
    if opts.hat_stride > 1 {
        domain = domain.with_hat((0..n).step_by(opts.hat_stride).collect())?;
    }
    Ok(BuiltDomain {
        spec: spec.clone(),
        domain,
    })
}

/// Parses the domain file format described in the module docs.
pub fn parse_domain_file(text: &str) -> Result<(PointCloud, Option<Vec<(usize, usize)>>, bool)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty domain file".into(),
    })?;
    let mut words = head.split_whitespace();
    let dim: usize = words
        .next()
        .and_then(|w| w.parse().ok())
        .filter(|&d| d >= 1)
        .ok_or(Error::Parse {
            line,
            message: format!("expected the dimension, found `{head}`"),
        })?;
    let bounded = match words.next() {
        None => true,
        Some("unbounded") => false,
        Some(w) => {
            return Err(Error::Parse {
                line,
                message: format!("unexpected `{w}` after the dimension"),
            })
        }
    };
    let mut cloud = PointCloud::new(dim);
    let mut edges: Option<Vec<(usize, usize)>> = None;
    for (line, l) in lines {
        if l == "edges" {
            if edges.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "second `edges` section".into(),
                });
            }
            edges = Some(Vec::new());
            continue;
        }
        let bad = |m: String| Error::Parse { line, message: m };
        match edges.as_mut() {
            None => {
                let p = l
                    .split_whitespace()
                    .map(|w| w.parse::<f64>().map_err(|_| bad(format!("`{w}` is not a number"))))
                    .collect::<Result<Vec<f64>>>()?;
                if p.len() != dim {
                    return Err(bad(format!("expected {dim} coordinates, found {}", p.len())));
                }
                cloud.try_push(&p).map_err(|e| bad(e.to_string()))?;
            }
            Some(es) => {
                let ij = l
                    .split_whitespace()
                    .map(|w| w.parse::<usize>().map_err(|_| bad(format!("`{w}` is not an index"))))
                    .collect::<Result<Vec<usize>>>()?;
                if ij.len() != 2 {
                    return Err(bad("an edge is two indices `i j`".into()));
                }
                es.push((ij[0], ij[1]));
            }
        }
    }
    if cloud.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "domain file has no points".into(),
        });
    }
    if let Some(es) = &edges {
        if let Some(&(i, j)) = es.iter().find(|&&(i, j)| i >= cloud.len() || j >= cloud.len()) {
            return Err(Error::Config(format!("edge ({i}, {j}) leaves the {} points", cloud.len())));
        }
    }
    Ok((cloud, edges, bounded))
}

/// `count` points of the complement of the domain, spread over its
/// bounding box enlarged by `margin` times its extent on every side.
///
/// Built-in shapes use their membership test. Otherwise a point counts as
/// outside when it is farther than the cloud's median nearest-neighbour
/// distance from every cloud point.
pub fn ambient_complement(built: &BuiltDomain, count: usize, margin: f64) -> Result<PointCloud> {
    let cloud = built.domain.cloud();
    let dim = cloud.dim();
    let (lo, hi) = cloud.bounding_box();
    let lo: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a - margin * (b - a).max(1e-3)).collect();
    let hi: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b + margin * (b - a).max(1e-3)).collect();
    let cutoff = {
        let mut nn = if cloud.len() > 1 { cloud.nearest_neighbor_distances() } else { vec![1.0] };
        nn.sort_by(f64::total_cmp);
        nn[nn.len() / 2]
    };
    let outside = |p: &[f64]| match built.spec.contains(p) {
        Some(inside) => !inside,
        None => cloud.iter().all(|q| crate::geometry::distance(p, q) > cutoff),
    };
    let mut pts = PointCloud::new(dim);
    let bases = [2u64, 3, 5];
    if dim > bases.len() {
        return Err(Error::Config(format!("ambient sampling supports up to {} dimensions", bases.len())));
    }
    let mut i = 7919u64;
    let limit = i + 10_000 + 1_000 * count as u64;
    while pts.len() < count {
        if i > limit {
            return Err(Error::Config("could not place the ambient complement".into()));
        }
        let p: Vec<f64> = (0..dim)
            .map(|k| lo[k] + (hi[k] - lo[k]) * radical_inverse(i, bases[k]))
            .collect();
        if outside(&p) {
            pts.try_push(&p)?;
        }
        i += 1;
    }
    Ok(pts)
}

/// Reads a domain file from disk.
pub fn read_domain_file(path: impl AsRef<Path>) -> Result<(PointCloud, Option<Vec<(usize, usize)>>, bool)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_domain_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_filled_inside() {
        for text in ["square(points=200)", "annulus(r0=1,r1=2,points=300)", "l_shape(points=300)", "corridor(points=300)"] {
            let spec = DomainSpec::parse(text).unwrap();
            let built = build_domain(&spec, &DomainOptions::default()).unwrap();
            let cloud = built.domain.cloud();
            assert!(cloud.len() >= 200);
            assert!(cloud.iter().all(|p| spec.contains(p) == Some(true)), "{text}");
            let amb = ambient_complement(&built, 100, 0.5).unwrap();
            assert_eq!(amb.len(), 100);
            assert!(amb.iter().all(|p| spec.contains(p) == Some(false)));
            assert_eq!(DomainSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn corridor_strip_is_narrow() {
        let spec = DomainSpec::parse("corridor(width=0.1,points=10)").unwrap();
        assert_eq!(spec.contains(&[1.5, 0.5]), Some(true));
        assert_eq!(spec.contains(&[1.5, 0.8]), Some(false));
    }

    #[test]
    fn seam_pair_is_added() {
        let spec = DomainSpec::parse("interval(a=0,b=1,points=11)").unwrap();
        let opts = DomainOptions {
            seam: Some(0.5),
            ..DomainOptions::default()
        };
        let d = build_domain(&spec, &opts).unwrap().domain;
        assert_eq!(d.len(), 13);
        assert!((d.cloud().distance(11, 12) - 1e-7).abs() < 1e-12);
    }

    #[test]
    fn rays_are_unbounded() {
        let spec = DomainSpec::parse("rays(rays=4,reach=100,points=40)").unwrap();
        let d = build_domain(&spec, &DomainOptions::default()).unwrap().domain;
        assert!(!d.is_bounded());
        let far = d.cloud().norms().into_iter().fold(0.0, f64::max);
        assert!((far - 100.0).abs() < 1e-9);
    }

    #[test]
    fn domain_file_format() {
        let text = "# two points\n2\n0 0\n1 0.5\nedges\n0 1\n";
        let (cloud, edges, bounded) = parse_domain_file(text).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(edges, Some(vec![(0, 1)]));
        assert!(bounded);
        let err = parse_domain_file("2\n0 0\n1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(!parse_domain_file("1 unbounded\n0\n").unwrap().2);
    }
}
