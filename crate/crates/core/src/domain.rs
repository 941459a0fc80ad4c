//! Bounded reference domains in C^n.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a reference domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Polydisc,
    Ball,
    PlanarDisc,
    PlanarRectangle,
}

/// A bounded hyperconvex domain.
///
/// `radii` holds one radius per coordinate for polydiscs, a single radius for
/// balls and discs, and the two half-widths `(re, im)` for rectangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub center: Vec<Complex64>,
    pub radii: Vec<f64>,
}

impl Domain {
    pub fn unit_polydisc(n: usize) -> Self {
        Domain {
            kind: DomainKind::Polydisc,
            center: vec![Complex64::new(0.0, 0.0); n],
            radii: vec![1.0; n],
        }
    }

    pub fn unit_ball(n: usize) -> Self {
        Domain {
            kind: DomainKind::Ball,
            center: vec![Complex64::new(0.0, 0.0); n],
            radii: vec![1.0],
        }
    }

    pub fn unit_disc() -> Self {
        Self::disc(Complex64::new(0.0, 0.0), 1.0)
    }

    pub fn disc(center: Complex64, radius: f64) -> Self {
        Domain {
            kind: DomainKind::PlanarDisc,
            center: vec![center],
            radii: vec![radius],
        }
    }

    /// Axis-aligned rectangle `center + [-hx, hx] x i[-hy, hy]`.
    pub fn rectangle(center: Complex64, hx: f64, hy: f64) -> Self {
        Domain {
            kind: DomainKind::PlanarRectangle,
            center: vec![center],
            radii: vec![hx, hy],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.center.len();
        if n == 0 {
            return Err(Error::Config("domain of dimension 0".into()));
        }
        let expected = match self.kind {
            DomainKind::Polydisc => n,
            DomainKind::Ball | DomainKind::PlanarDisc => 1,
            DomainKind::PlanarRectangle => 2,
        };
        if self.radii.len() != expected {
            return Err(Error::Config(format!(
                "{:?} expects {expected} radii, got {}",
                self.kind,
                self.radii.len()
            )));
        }
        if matches!(self.kind, DomainKind::PlanarDisc | DomainKind::PlanarRectangle) && n != 1 {
            return Err(Error::Config("planar domains live in C^1".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::Config("domain radii must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_planar(&self) -> bool {
        self.dim() == 1
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Polydisc => 2.0 * self.radii.iter().map(|r| r * r).sum::<f64>().sqrt(),
            DomainKind::Ball | DomainKind::PlanarDisc => 2.0 * self.radii[0],
            DomainKind::PlanarRectangle => 2.0 * self.radii[0].hypot(self.radii[1]),
        }
    }

    /// Lebesgue volume in R^{2n}.
    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match self.kind {
            DomainKind::Polydisc => self.radii.iter().map(|r| PI * r * r).product(),
            DomainKind::Ball | DomainKind::PlanarDisc => {
                let n = self.dim() as i32;
                let r2n = self.radii[0].powi(2 * n);
                PI.powi(n) * r2n / factorial(self.dim())
            }
            DomainKind::PlanarRectangle => 4.0 * self.radii[0] * self.radii[1],
        }
    }

    /// Signed "level" of a point: negative inside, zero on the boundary,
    /// positive outside. Scaled so that it is comparable to a distance.
    pub fn level(&self, z: &[Complex64]) -> f64 {
        match self.kind {
            DomainKind::Polydisc => z
                .iter()
                .zip(&self.center)
                .zip(&self.radii)
                .map(|((z, c), r)| (z - c).norm() - r)
                .fold(f64::NEG_INFINITY, f64::max),
            DomainKind::Ball | DomainKind::PlanarDisc => {
                let d2: f64 = z.iter().zip(&self.center).map(|(z, c)| (z - c).norm_sqr()).sum();
                d2.sqrt() - self.radii[0]
            }
            DomainKind::PlanarRectangle => {
                let w = z[0] - self.center[0];
                (w.re.abs() - self.radii[0]).max(w.im.abs() - self.radii[1])
            }
        }
    }

    /// Membership in the closure, with an absolute slack `tol`.
    pub fn contains(&self, z: &[Complex64], tol: f64) -> bool {
        z.len() == self.dim() && self.level(z) <= tol
    }

    pub fn contains_strictly(&self, z: &[Complex64]) -> bool {
        z.len() == self.dim() && self.level(z) < 0.0
    }

    /// Per complex coordinate: `(re_lo, re_hi, im_lo, im_hi)` of a bounding box.
    pub fn bounding_box(&self) -> Vec<[f64; 4]> {
        (0..self.dim())
            .map(|j| {
                let c = self.center[j];
                let (hx, hy) = match self.kind {
                    DomainKind::Polydisc => (self.radii[j], self.radii[j]),
                    DomainKind::Ball | DomainKind::PlanarDisc => (self.radii[0], self.radii[0]),
                    DomainKind::PlanarRectangle => (self.radii[0], self.radii[1]),
                };
                [c.re - hx, c.re + hx, c.im - hy, c.im + hy]
            })
            .collect()
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn diameters_match_shapes() {
        assert_eq!(Domain::unit_ball(3).diameter(), 2.0);
        assert!((Domain::unit_polydisc(2).diameter() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((Domain::unit_polydisc(3).diameter() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::unit_disc().diameter(), 2.0);
    }

    #[test]
    fn volumes() {
        assert!((Domain::unit_polydisc(2).volume() - PI * PI).abs() < 1e-12);
        assert!((Domain::unit_ball(2).volume() - PI * PI / 2.0).abs() < 1e-12);
        assert!((Domain::rectangle(Complex64::new(0.0, 0.0), 1.0, 1.0).volume() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn membership() {
        let b = Domain::unit_ball(2);
        let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        assert!(b.contains(&z, 1e-12));
        assert!(!b.contains_strictly(&z));
        let p = Domain::unit_polydisc(2);
        let w = [Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.9)];
        assert!(p.contains_strictly(&w));
        assert!(!b.contains(&w, 1e-12));
    }

    #[test]
    fn validation_rejects_bad_radii() {
        let mut d = Domain::unit_disc();
        d.radii[0] = -1.0;
        assert!(d.validate().is_err());
        assert!(Domain::unit_polydisc(2).validate().is_ok());
    }
}
