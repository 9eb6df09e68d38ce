use std::fmt;
use std::sync::Arc;

use super::FiberPolynomial;

/// Families of functions on the dual bundle known to be quantisable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantisableTag {
    FourierOfCompact,
    FiberPolynomial,
    CompactCharacter,
}

/// A function of `(u, Z)` on the dual bundle.
pub type SymbolFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A function on the dual bundle together with how it is represented.
#[derive(Clone)]
pub enum SymbolRepr {
    /// Fourier transform (in the fiber) of a kernel supported in the ball of
    /// radius `support_radius`.
    FourierOfCompact {
        support_radius: f64,
        kernel: SymbolFn,
    },
    Polynomial(FiberPolynomial),
    /// `X -> e^{i<r,X>/2}` with integer direction `r`.
    Character {
        direction: Vec<i64>,
        compact_base: bool,
    },
    /// A bare callable; membership cannot be decided from samples.
    Opaque(SymbolFn),
}

impl fmt::Debug for SymbolRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolRepr::FourierOfCompact { support_radius, .. } => f
                .debug_struct("FourierOfCompact")
                .field("support_radius", support_radius)
                .finish_non_exhaustive(),
            SymbolRepr::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            SymbolRepr::Character { direction, compact_base } => f
                .debug_struct("Character")
                .field("direction", direction)
                .field("compact_base", compact_base)
                .finish(),
            SymbolRepr::Opaque(_) => f.write_str("Opaque(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Accepted(QuantisableTag),
    Rejected(String),
}

impl Classification {
    pub fn tag(&self) -> Option<QuantisableTag> {
        match self {
            Classification::Accepted(t) => Some(*t),
            Classification::Rejected(_) => None,
        }
    }
}

pub fn classify_quantisable(f: &SymbolRepr) -> Classification {
    use Classification::*;
    match f {
        SymbolRepr::FourierOfCompact { support_radius, .. } => {
            if support_radius.is_finite() && *support_radius >= 0.0 {
                Accepted(QuantisableTag::FourierOfCompact)
            } else {
                Rejected(format!("kernel support radius {support_radius} is not finite"))
            }
        }
        SymbolRepr::Polynomial(_) => Accepted(QuantisableTag::FiberPolynomial),
        SymbolRepr::Character { direction, compact_base } => {
            let trivial = direction.iter().all(|&r| r == 0);
            if *compact_base || trivial {
                Accepted(QuantisableTag::CompactCharacter)
            } else {
                Rejected("character over a non-compact base is not compactly supported".into())
            }
        }
        SymbolRepr::Opaque(_) => Rejected("opaque callable: class cannot be decided".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepoisson::{BasePoly, FiberPolynomial};

    #[test]
    fn fiber_coordinate_is_a_polynomial() {
        let p = FiberPolynomial::zero(0, 1)
            .with_term(vec![1], BasePoly::constant(0, 1.0).into())
            .unwrap();
        assert_eq!(
            classify_quantisable(&SymbolRepr::Polynomial(p)),
            Classification::Accepted(QuantisableTag::FiberPolynomial)
        );
    }

    #[test]
    fn torus_character_is_compact() {
        let c = SymbolRepr::Character { direction: vec![1, -2], compact_base: true };
        assert_eq!(classify_quantisable(&c).tag(), Some(QuantisableTag::CompactCharacter));
        let c = SymbolRepr::Character { direction: vec![1, 0], compact_base: false };
        assert!(classify_quantisable(&c).tag().is_none());
    }

    #[test]
    fn fourier_of_compact_kernel() {
        let f = SymbolRepr::FourierOfCompact {
            support_radius: 1.0,
            kernel: Arc::new(|_, x| (1.0 - x[0] * x[0]).max(0.0)),
        };
        assert_eq!(classify_quantisable(&f).tag(), Some(QuantisableTag::FourierOfCompact));
    }

    #[test]
    fn opaque_is_rejected() {
        let f = SymbolRepr::Opaque(Arc::new(|_, x| (x[0] * x[0]).exp()));
        assert!(matches!(classify_quantisable(&f), Classification::Rejected(_)));
    }
}
