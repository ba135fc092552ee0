use std::fmt;
use std::sync::Arc;

use crate::grid::{Grid1D, Vec2};

/// Distributed load as a function of `(s, t)`.
pub type SpaceTimeLoad = Arc<dyn Fn(f64, f64) -> Vec2 + Send + Sync>;

/// Vector-valued signal of time.
pub type TimeSignal = Arc<dyn Fn(f64) -> Vec2 + Send + Sync>;

/// Distributed force `f` and couple `l` per unit length. Missing entries are zero.
#[derive(Clone, Default)]
pub struct Loads {
    force: Option<SpaceTimeLoad>,
    couple: Option<SpaceTimeLoad>,
}

impl Loads {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_force(mut self, f: impl Fn(f64, f64) -> Vec2 + Send + Sync + 'static) -> Self {
        self.force = Some(Arc::new(f));
        self
    }

    pub fn with_couple(mut self, l: impl Fn(f64, f64) -> Vec2 + Send + Sync + 'static) -> Self {
        self.couple = Some(Arc::new(l));
        self
    }

    pub fn force(&self, s: f64, t: f64) -> Vec2 {
        self.force.as_ref().map_or_else(Vec2::zeros, |f| f(s, t))
    }

    pub fn couple(&self, s: f64, t: f64) -> Vec2 {
        self.couple.as_ref().map_or_else(Vec2::zeros, |l| l(s, t))
    }

    pub fn force_field(&self, grid: &Grid1D, t: f64) -> Vec<Vec2> {
        grid.positions().map(|s| self.force(s, t)).collect()
    }

    pub fn couple_field(&self, grid: &Grid1D, t: f64) -> Vec<Vec2> {
        grid.positions().map(|s| self.couple(s, t)).collect()
    }

    /// Pointwise sum of two load cases.
    pub fn plus(&self, other: &Loads) -> Loads {
        let (a, b) = (self.clone(), other.clone());
        let (c, d) = (self.clone(), other.clone());
        Loads::none()
            .with_force(move |s, t| a.force(s, t) + b.force(s, t))
            .with_couple(move |s, t| c.couple(s, t) + d.couple(s, t))
    }
}

impl fmt::Debug for Loads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Loads")
            .field("force", &self.force.is_some())
            .field("couple", &self.couple.is_some())
            .finish()
    }
}

/// Prescribed motion of a clamped end.
#[derive(Clone)]
pub struct ClampMotion {
    velocity: TimeSignal,
    acceleration: TimeSignal,
    angular_velocity: TimeSignal,
}

impl ClampMotion {
    /// A clamp at rest.
    pub fn fixed() -> Self {
        let zero: TimeSignal = Arc::new(|_| Vec2::zeros());
        Self {
            velocity: zero.clone(),
            acceleration: zero.clone(),
            angular_velocity: zero,
        }
    }

    /// `acceleration` must be the time derivative of `velocity`.
    pub fn new(
        velocity: impl Fn(f64) -> Vec2 + Send + Sync + 'static,
        acceleration: impl Fn(f64) -> Vec2 + Send + Sync + 'static,
        angular_velocity: impl Fn(f64) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
            angular_velocity: Arc::new(angular_velocity),
        }
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        (self.velocity)(t)
    }

    pub fn acceleration(&self, t: f64) -> Vec2 {
        (self.acceleration)(t)
    }

    pub fn angular_velocity(&self, t: f64) -> Vec2 {
        (self.angular_velocity)(t)
    }
}

impl fmt::Debug for ClampMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ClampMotion")
    }
}

#[derive(Clone, Debug)]
pub enum EndKind {
    /// Force- and moment-free end: `n = 0` and `kappa = 0`.
    Free,
    Clamped(ClampMotion),
}

impl EndKind {
    pub fn clamped() -> Self {
        EndKind::Clamped(ClampMotion::fixed())
    }

    pub fn is_free(&self) -> bool {
        matches!(self, EndKind::Free)
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryConditions {
    pub base: EndKind,
    pub tip: EndKind,
}

impl BoundaryConditions {
    /// Base clamped at rest, tip free.
    pub fn cantilever() -> Self {
        Self {
            base: EndKind::clamped(),
            tip: EndKind::Free,
        }
    }

    pub fn free_free() -> Self {
        Self {
            base: EndKind::Free,
            tip: EndKind::Free,
        }
    }
}
