//! Diamond paths whose steps encode the poles of the integrand.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;

use super::LocalInverse;
use crate::error::{Error, Result};
use crate::fisher::VertexType;

/// Same-decoration pairs of w/z-type vertices sharing one track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exceptional {
    WZ,
    ZW,
    WW,
    ZZ,
}

/// Number of tracks shared by the rhombi of x and y, refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Case1,
    Case2,
    Case2Exceptional(Exceptional),
    Case3VvNeighbor,
    Case3VvSame,
    Case3,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Case1 => write!(f, "case1"),
            CaseTag::Case2 => write!(f, "case2"),
            CaseTag::Case2Exceptional(e) => write!(f, "case2-{}", format!("{e:?}").to_lowercase()),
            CaseTag::Case3VvNeighbor => write!(f, "case3-vv-neighbor"),
            CaseTag::Case3VvSame => write!(f, "case3-vv-same"),
            CaseTag::Case3 => write!(f, "case3"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaPath {
    /// Steps from ŷ to x̂.
    pub steps: Vec<Complex64>,
    pub x_hat: Complex64,
    pub y_hat: Complex64,
    /// Poles of f_x(λ) f_y(−λ) removed by zeros of Exp.
    pub cancelled: Vec<Complex64>,
    /// Steps added at either end for surviving f-poles.
    pub appended: Vec<Complex64>,
    pub case: CaseTag,
}

impl GammaPath {
    /// Whether the step multiset equals the given poles with multiplicity.
    pub fn matches_poles(&self, poles: &[(Complex64, usize)]) -> bool {
        let mut remaining: Vec<Complex64> = self.steps.clone();
        for &(q, m) in poles {
            for _ in 0..m {
                match remaining.iter().position(|s| (s - q).norm() < 1e-7) {
                    Some(i) => {
                        remaining.swap_remove(i);
                    }
                    None => return false,
                }
            }
        }
        remaining.is_empty()
    }
}

impl LocalInverse<'_> {
    fn sides(&self, u: usize) -> Vec<Complex64> {
        let f = &self.model.fisher;
        let fv = f.vertices[u];
        match fv.ty {
            VertexType::V => {
                vec![f.side(f.index(fv.g, fv.k, VertexType::W)).expect("w side"), f.side(f.index(fv.g, fv.k, VertexType::Z)).expect("z side")]
            }
            _ => vec![f.side(u).expect("w/z side")],
        }
    }

    fn side_tracks(&self, u: usize) -> Result<Vec<(Complex64, usize)>> {
        let f = &self.model.fisher;
        let g = f.vertices[u].g;
        self.sides(u)
            .into_iter()
            .map(|s| self.model.diamond.track_towards(g, s).map(|t| (s, t)).ok_or_else(|| Error::BoundaryTooClose(f.name(u))))
            .collect()
    }

    /// Path γ from ŷ to x̂: a minimal diamond path extended at each end by
    /// the f-poles that Exp does not cancel.
    pub fn build_gamma(&self, x: usize, y: usize) -> Result<GammaPath> {
        let f = &self.model.fisher;
        let (vx, vy) = (f.vertices[x], f.vertices[y]);
        let path = self.path(vy.g, vx.g)?;
        let crossed: HashSet<usize> = path.tracks.iter().copied().collect();
        let xt = self.side_tracks(x)?;
        let yt = self.side_tracks(y)?;
        let mut used = HashSet::new();
        let mut cancelled = Vec::new();
        let mut x_end = Vec::new();
        for &(s, t) in &xt {
            if crossed.contains(&t) && used.insert(t) {
                cancelled.push(s);
            } else {
                x_end.push(s);
            }
        }
        let mut y_end = Vec::new();
        for &(s, t) in &yt {
            if crossed.contains(&t) && used.insert(t) {
                cancelled.push(-s);
            } else {
                y_end.push(s);
            }
        }
        let gpos = |g: usize| self.model.graph.position(g);
        let x_hat = gpos(vx.g) + x_end.iter().sum::<Complex64>();
        let y_hat = gpos(vy.g) + y_end.iter().sum::<Complex64>();
        let mut steps: Vec<Complex64> = y_end.iter().rev().map(|s| -s).collect();
        steps.extend(path.steps.iter().copied());
        steps.extend(x_end.iter().copied());
        let mut appended: Vec<Complex64> = y_end.iter().map(|s| -s).collect();
        appended.extend(x_end.iter().copied());

        let xs: HashSet<usize> = xt.iter().map(|p| p.1).collect();
        let shared = yt.iter().filter(|p| xs.contains(&p.1)).map(|p| p.1).collect::<HashSet<_>>().len();
        let case = match shared {
            0 => CaseTag::Case1,
            1 if vx.g == vy.g && vx.ty != VertexType::V && vy.ty != VertexType::V => CaseTag::Case2Exceptional(match (vx.ty, vy.ty) {
                (VertexType::W, VertexType::Z) => Exceptional::WZ,
                (VertexType::Z, VertexType::W) => Exceptional::ZW,
                (VertexType::W, _) => Exceptional::WW,
                _ => Exceptional::ZZ,
            }),
            1 => CaseTag::Case2,
            _ if x == y => CaseTag::Case3VvSame,
            _ if self.is_vv_pair(x, y) => CaseTag::Case3VvNeighbor,
            _ => CaseTag::Case3,
        };
        Ok(GammaPath { steps, x_hat, y_hat, cancelled, appended, case })
    }
}
