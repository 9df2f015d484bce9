//! Forward kinematics for serial chains (or a forest of them) and the
//! per-link sphere models used for collision checking.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, ModelError};
use crate::math::{self, norm, quaternion_norm, Pose, Transform, Vec3};

const AXIS_TOL: f64 = 1e-9;
const CONTAINMENT_TOL: f64 = 1e-9;
const QUATERNION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
    Fixed,
}

/// The joint connecting a link to its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub kind: JointKind,
    /// Parent link index, `None` for a chain root attached to the world.
    pub parent: Option<usize>,
    /// Fixed offset from the parent link frame to this joint frame.
    pub origin: Pose,
    pub axis: Vec3,
    pub limits: Option<(f64, f64)>,
}

impl Joint {
    pub fn is_actuated(&self) -> bool {
        self.kind != JointKind::Fixed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub const fn new(center: Vec3, radius: f64) -> Self {
        Sphere { center, radius }
    }

    pub fn transformed(&self, t: &Transform) -> Sphere {
        Sphere { center: t.apply(self.center), radius: self.radius }
    }
}

/// Coarse bounding sphere plus the fine spheres it contains, in link frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpheres {
    pub coarse: Sphere,
    pub fine: Vec<Sphere>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    pub joint: Joint,
    pub spheres: LinkSpheres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereLevel {
    Coarse,
    Fine,
}

/// A validated robot: links in topological order, sphere models and the
/// link pairs tested for self-collision.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    name: String,
    links: Vec<Link>,
    self_pairs: Vec<(usize, usize)>,
    origins: Vec<Transform>,
    q_index: Vec<Option<usize>>,
    limits: Vec<(f64, f64)>,
}

impl RobotModel {
    pub fn new(
        name: impl Into<String>,
        links: Vec<Link>,
        self_pairs: Vec<(usize, usize)>,
    ) -> Result<Self, ModelError> {
        if links.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut origins = Vec::with_capacity(links.len());
        let mut q_index = Vec::with_capacity(links.len());
        let mut limits = Vec::new();
        for (k, link) in links.iter().enumerate() {
            let joint = &link.joint;
            if let Some(p) = joint.parent {
                if p >= k {
                    return Err(ModelError::ParentOrder { link: k, parent: p });
                }
            }
            let finite = joint.origin.translation.iter().chain(&joint.origin.rotation).chain(&joint.axis).all(|v| v.is_finite());
            if !finite {
                return Err(ModelError::NonFinite { link: k, field: "joint" });
            }
            let qn = quaternion_norm(joint.origin.rotation);
            if (qn - 1.0).abs() > QUATERNION_TOL {
                return Err(ModelError::OriginRotation { link: k, norm: qn });
            }
            if joint.is_actuated() {
                let n = norm(joint.axis);
                if (n - 1.0).abs() > AXIS_TOL {
                    return Err(ModelError::NonUnitAxis { link: k, norm: n });
                }
                let Some((lo, hi)) = joint.limits else {
                    return Err(ModelError::MissingLimits { link: k });
                };
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(ModelError::NonFinite { link: k, field: "joint.limits" });
                }
                if lo > hi {
                    return Err(ModelError::InvertedLimits { link: k, lo, hi });
                }
                q_index.push(Some(limits.len()));
                limits.push((lo, hi));
            } else {
                if joint.limits.is_some() {
                    return Err(ModelError::UnexpectedLimits { link: k });
                }
                q_index.push(None);
            }
            origins.push(joint.origin.to_transform());
            validate_spheres(k, &link.spheres)?;
        }

        for (i, &(a, b)) in self_pairs.iter().enumerate() {
            let err = |reason| ModelError::SelfPair { pair: i, a, b, reason };
            if a >= links.len() || b >= links.len() {
                return Err(err("references a missing link"));
            }
            if a == b {
                return Err(err("pairs a link with itself"));
            }
            if links[a].joint.parent == Some(b) || links[b].joint.parent == Some(a) {
                return Err(err("pairs adjacent parent and child links"));
            }
        }

        Ok(RobotModel { name: name.into(), links, self_pairs, origins, q_index, limits })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn joints(&self) -> impl Iterator<Item = &Joint> {
        self.links.iter().map(|l| &l.joint)
    }

    pub fn spheres(&self, link: usize) -> &LinkSpheres {
        &self.links[link].spheres
    }

    pub fn self_pairs(&self) -> &[(usize, usize)] {
        &self.self_pairs
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    /// Number of revolute plus prismatic joints.
    pub fn dof(&self) -> usize {
        self.limits.len()
    }

    /// Joint limits in configuration order.
    pub fn limits(&self) -> &[(f64, f64)] {
        &self.limits
    }

    pub fn within_limits(&self, q: &[f64]) -> bool {
        q.len() == self.dof() && q.iter().zip(&self.limits).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn check_dim(&self, q: &[f64]) -> Result<(), Error> {
        if q.len() == self.dof() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dof(), got: q.len() })
        }
    }

    /// World pose of every link frame, written into `out`. The caller has
    /// checked `q.len() == dof`.
    pub fn forward_kinematics_into(&self, q: &[f64], out: &mut Vec<Transform>) {
        out.clear();
        for (k, link) in self.links.iter().enumerate() {
            let joint = &link.joint;
            let origin = &self.origins[k];
            let local = match (joint.kind, self.q_index[k]) {
                (JointKind::Revolute, Some(i)) => {
                    origin.compose(&Transform::from_axis_angle(joint.axis, q[i]))
                }
                (JointKind::Prismatic, Some(i)) => {
                    origin.compose(&Transform::from_translation(math::scale(joint.axis, q[i])))
                }
                _ => *origin,
            };
            let world = match joint.parent {
                Some(p) => out[p].compose(&local),
                None => local,
            };
            out.push(world);
        }
    }
}

fn validate_spheres(link: usize, s: &LinkSpheres) -> Result<(), ModelError> {
    let all = core::iter::once(&s.coarse).chain(&s.fine);
    if !all.clone().all(|sp| sp.radius.is_finite() && sp.center.iter().all(|c| c.is_finite())) {
        return Err(ModelError::NonFinite { link, field: "spheres" });
    }
    if s.coarse.radius <= 0.0 {
        return Err(ModelError::Radius { link, field: "coarse.radius", radius: s.coarse.radius });
    }
    for (i, f) in s.fine.iter().enumerate() {
        if f.radius <= 0.0 {
            return Err(ModelError::Radius { link, field: "fine.radius", radius: f.radius });
        }
        let excess = norm(math::sub(f.center, s.coarse.center)) + f.radius - s.coarse.radius;
        if excess > CONTAINMENT_TOL {
            return Err(ModelError::CoarseContainment { link, sphere: i, excess });
        }
    }
    Ok(())
}

/// World pose of each link frame for configuration `q`.
pub fn forward_kinematics(model: &RobotModel, q: &[f64]) -> Result<Vec<Transform>, Error> {
    model.check_dim(q)?;
    let mut out = Vec::with_capacity(model.num_links());
    model.forward_kinematics_into(q, &mut out);
    Ok(out)
}

/// World-frame spheres ordered by link, then sphere index.
pub fn sphere_positions(model: &RobotModel, q: &[f64], level: SphereLevel) -> Result<Vec<Sphere>, Error> {
    let poses = forward_kinematics(model, q)?;
    let mut out = Vec::new();
    for (link, pose) in model.links().iter().zip(&poses) {
        match level {
            SphereLevel::Coarse => out.push(link.spheres.coarse.transformed(pose)),
            SphereLevel::Fine => out.extend(link.spheres.fine.iter().map(|s| s.transformed(pose))),
        }
    }
    Ok(out)
}
