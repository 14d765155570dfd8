//! The scalar structure-constant representation of a graded algebra whose
//! homogeneous components have dimension ≤ 1.

use std::fmt;
use std::sync::Arc;

use crate::lattice::{GradingGroup, LatticeBox, LatticePoint};
use crate::scalar::{Field, Scalar};

type CoeffFn = dyn Fn(&LatticePoint, &LatticePoint) -> Scalar + Send + Sync;
type SupportFn = dyn Fn(&LatticePoint) -> bool + Send + Sync;

/// A graded product `X_λ · X_μ = p(λ,μ) X_{λ+μ}` with one basis vector per
/// supported degree. Implemented by Lie structures (bracket) and graded
/// Jordan algebras (product); the centroid solver is generic over it.
pub trait GradedProduct: Sync {
    fn group(&self) -> &GradingGroup;
    fn in_support(&self, p: &LatticePoint) -> bool;
    /// Product constant; zero when any of λ, μ, λ+μ is unsupported.
    fn product(&self, a: &LatticePoint, b: &LatticePoint) -> Scalar;
    /// Whether the constant for (λ, μ) is known (finite-domain data).
    fn defined(&self, _a: &LatticePoint, _b: &LatticePoint) -> bool {
        true
    }
}

/// A Λ-graded Lie algebra with dim ℒ_λ ≤ 1: `[L_λ, L_μ] = c(λ,μ) L_{λ+μ}`.
#[derive(Clone)]
pub struct ScalarStructure {
    pub group: GradingGroup,
    pub field: Field,
    /// Catalog name or "external".
    pub provenance: String,
    /// When set, constants are only known for λ, μ, λ+μ inside this box.
    pub domain: Option<LatticeBox>,
    coeff: Arc<CoeffFn>,
    support: Arc<SupportFn>,
}

impl fmt::Debug for ScalarStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarStructure")
            .field("group", &self.group)
            .field("field", &self.field)
            .field("provenance", &self.provenance)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ScalarStructure {
    /// `coeff` and `support` receive canonical points (torsion coordinates
    /// reduced). `coeff` is only consulted when λ, μ and λ+μ are supported.
    pub fn new(
        group: GradingGroup,
        field: Field,
        provenance: impl Into<String>,
        coeff: impl Fn(&LatticePoint, &LatticePoint) -> Scalar + Send + Sync + 'static,
        support: impl Fn(&LatticePoint) -> bool + Send + Sync + 'static,
    ) -> Self {
        ScalarStructure {
            group,
            field,
            provenance: provenance.into(),
            domain: None,
            coeff: Arc::new(coeff),
            support: Arc::new(support),
        }
    }

    /// Full support.
    pub fn with_full_support(
        group: GradingGroup,
        field: Field,
        provenance: impl Into<String>,
        coeff: impl Fn(&LatticePoint, &LatticePoint) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        Self::new(group, field, provenance, coeff, |_| true)
    }

    pub fn with_domain(mut self, domain: LatticeBox) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn zero_point(&self) -> LatticePoint {
        LatticePoint::zero(self.rank())
    }

    pub fn in_support(&self, p: &LatticePoint) -> bool {
        let p = self.group.canonical(p);
        if let Some(d) = &self.domain {
            if !d.contains(&self.group, &p) {
                return false;
            }
        }
        (self.support)(&p)
    }

    /// Whether c(λ, μ) is known.
    pub fn defined(&self, a: &LatticePoint, b: &LatticePoint) -> bool {
        match &self.domain {
            None => true,
            Some(d) => {
                d.contains(&self.group, a) && d.contains(&self.group, b) && d.contains(&self.group, &self.group.add(a, b))
            }
        }
    }

    /// c(λ, μ); zero when λ, μ or λ+μ is outside the support (or the domain).
    pub fn c(&self, a: &LatticePoint, b: &LatticePoint) -> Scalar {
        let a = self.group.canonical(a);
        let b = self.group.canonical(b);
        let s = self.group.add(&a, &b);
        if !self.defined(&a, &b) || !(self.support)(&a) || !(self.support)(&b) || !(self.support)(&s) {
            return Scalar::zero();
        }
        (self.coeff)(&a, &b)
    }

    /// l(λ) = c(0, λ), the eigenvalue of ad L₀.
    pub fn l(&self, p: &LatticePoint) -> Scalar {
        self.c(&self.zero_point(), p)
    }

    /// Supported points of the box, in box order.
    pub fn support_in(&self, b: &LatticeBox) -> Vec<LatticePoint> {
        b.points(&self.group).into_iter().filter(|p| self.in_support(p)).collect()
    }

    /// A structure with constants κ·c (isomorphic for κ ≠ 0).
    pub fn scaled(&self, k: Scalar) -> ScalarStructure {
        let inner = self.clone();
        let mut out = ScalarStructure::new(
            self.group.clone(),
            self.field,
            self.provenance.clone(),
            move |a, b| &inner.c(a, b) * &k,
            {
                let s = self.support.clone();
                move |p| s(p)
            },
        );
        out.domain = self.domain;
        out
    }

    /// Constants after the basis change L_λ ↦ t(λ) L_λ:
    /// c'(λ,μ) = c(λ,μ) t(λ) t(μ) / t(λ+μ).
    pub fn rescaled(&self, t: impl Fn(&LatticePoint) -> Scalar + Send + Sync + 'static) -> ScalarStructure {
        let inner = self.clone();
        let g = self.group.clone();
        let mut out = ScalarStructure::new(
            self.group.clone(),
            self.field,
            self.provenance.clone(),
            move |a, b| {
                let c = inner.c(a, b);
                if c.is_zero() {
                    return c;
                }
                &(&(&c * &t(a)) * &t(b)) / &t(&g.add(a, b))
            },
            {
                let s = self.support.clone();
                move |p| s(p)
            },
        );
        out.domain = self.domain;
        out
    }

    /// Restrict the known constants to a box domain.
    pub fn restricted(&self, domain: LatticeBox) -> ScalarStructure {
        let mut out = self.clone();
        out.domain = Some(domain);
        out
    }
}

impl GradedProduct for ScalarStructure {
    fn group(&self) -> &GradingGroup {
        &self.group
    }
    fn in_support(&self, p: &LatticePoint) -> bool {
        ScalarStructure::in_support(self, p)
    }
    fn product(&self, a: &LatticePoint, b: &LatticePoint) -> Scalar {
        self.c(a, b)
    }
    fn defined(&self, a: &LatticePoint, b: &LatticePoint) -> bool {
        ScalarStructure::defined(self, a, b)
    }
}
