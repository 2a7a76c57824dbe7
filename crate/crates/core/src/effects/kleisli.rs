//! Tabulated Kleisli maps `X -> T Y` over finite spaces, with the lifted
//! coproduct structure of the Kleisli category.

use super::space::{Point, PureMap, Space};
use super::value::{EffectValue, MonadId};
use super::EffectError;

/// A total map `X -> T Y` tabulated on the points of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleisliMap {
    monad: MonadId,
    domain: Space,
    codomain: Space,
    table: Vec<EffectValue<Point>>,
}

impl KleisliMap {
    pub fn new(
        monad: MonadId,
        domain: Space,
        codomain: Space,
        table: Vec<EffectValue<Point>>,
    ) -> Result<Self, EffectError> {
        if table.len() != domain.size() {
            return Err(EffectError::NotTotal {
                expected: domain.size(),
                got: table.len(),
            });
        }
        for v in &table {
            if !v.matches(&monad) {
                return Err(EffectError::MonadMismatch {
                    expected: monad.name(),
                    got: v.kind(),
                });
            }
            for e in v.elements() {
                if !codomain.contains(e) {
                    return Err(EffectError::UnknownElement {
                        point: format!("{e:?}"),
                        space: codomain.describe(),
                    });
                }
            }
        }
        Ok(KleisliMap {
            monad,
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(
        monad: MonadId,
        domain: Space,
        codomain: Space,
        f: impl Fn(&Point) -> EffectValue<Point>,
    ) -> Result<Self, EffectError> {
        let table = domain.points().iter().map(&f).collect();
        KleisliMap::new(monad, domain, codomain, table)
    }

    /// The monad unit as a Kleisli map `X -> T X`.
    pub fn unit_of(monad: &MonadId, space: &Space) -> Self {
        let table = space.points().into_iter().map(|p| monad.unit(p)).collect();
        KleisliMap {
            monad: monad.clone(),
            domain: space.clone(),
            codomain: space.clone(),
            table,
        }
    }

    /// The constantly-bottom map `X -> T Y`.
    pub fn bottom(monad: &MonadId, domain: &Space, codomain: &Space) -> Self {
        let table = (0..domain.size()).map(|_| monad.bottom()).collect();
        KleisliMap {
            monad: monad.clone(),
            domain: domain.clone(),
            codomain: codomain.clone(),
            table,
        }
    }

    /// `unit ∘ h` for a pure map `h`.
    pub fn pure(monad: &MonadId, h: &PureMap) -> Self {
        let table = h
            .domain()
            .points()
            .iter()
            .map(|p| monad.unit(h.apply(p).expect("pure map is total").clone()))
            .collect();
        KleisliMap {
            monad: monad.clone(),
            domain: h.domain().clone(),
            codomain: h.codomain().clone(),
            table,
        }
    }

    /// Left coproduct injection `X -> T(X+Y)`.
    pub fn inl(monad: &MonadId, x: &Space, y: &Space) -> Self {
        KleisliMap::pure(monad, &PureMap::inl(x, y))
    }

    /// Right coproduct injection `Y -> T(X+Y)`.
    pub fn inr(monad: &MonadId, x: &Space, y: &Space) -> Self {
        KleisliMap::pure(monad, &PureMap::inr(x, y))
    }

    /// The codiagonal `X+X -> T X`.
    pub fn codiag(monad: &MonadId, x: &Space) -> Self {
        KleisliMap::pure(monad, &PureMap::codiag(x))
    }

    /// Copair `[f,g] : A+B -> T C`.
    pub fn copair(f: &KleisliMap, g: &KleisliMap) -> Result<Self, EffectError> {
        if f.monad != g.monad {
            return Err(EffectError::MonadMismatch {
                expected: f.monad.name(),
                got: g.monad.name(),
            });
        }
        if f.codomain != g.codomain {
            return Err(EffectError::SpaceMismatch {
                expected: f.codomain.describe(),
                got: g.codomain.describe(),
            });
        }
        let domain = Space::sum(&f.domain, &g.domain);
        let mut table = f.table.clone();
        table.extend(g.table.clone());
        Ok(KleisliMap {
            monad: f.monad.clone(),
            domain,
            codomain: f.codomain.clone(),
            table,
        })
    }

    /// Coproduct of maps `f ⊕ g : A+B -> T(A'+B')`.
    pub fn coproduct(f: &KleisliMap, g: &KleisliMap) -> Result<Self, EffectError> {
        let cod = Space::sum(&f.codomain, &g.codomain);
        let fl = f.map_outputs_fn(&cod, Point::inl);
        let gr = g.map_outputs_fn(&cod, Point::inr);
        KleisliMap::copair(&fl, &gr)
    }

    fn map_outputs_fn(&self, codomain: &Space, f: impl Fn(Point) -> Point) -> KleisliMap {
        let table = self.table.iter().map(|v| v.map(|p| f(p.clone()))).collect();
        KleisliMap {
            monad: self.monad.clone(),
            domain: self.domain.clone(),
            codomain: codomain.clone(),
            table,
        }
    }

    pub fn monad(&self) -> &MonadId {
        &self.monad
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn apply(&self, p: &Point) -> Result<&EffectValue<Point>, EffectError> {
        Ok(&self.table[self.domain.index_of(p)?])
    }

    pub fn value_at(&self, i: usize) -> &EffectValue<Point> {
        &self.table[i]
    }

    pub fn values(&self) -> &[EffectValue<Point>] {
        &self.table
    }

    /// The Kleisli lifting `f* : T X -> T Y` applied to one value.
    pub fn lift_value(&self, v: &EffectValue<Point>) -> Result<EffectValue<Point>, EffectError> {
        if !v.matches(&self.monad) {
            return Err(EffectError::MonadMismatch {
                expected: self.monad.name(),
                got: v.kind(),
            });
        }
        for e in v.elements() {
            if !self.domain.contains(e) {
                return Err(EffectError::UnknownElement {
                    point: format!("{e:?}"),
                    space: self.domain.describe(),
                });
            }
        }
        Ok(v.bind(|p| self.apply(p).expect("checked above").clone()))
    }

    /// Kleisli composition `self ⊙ g`, i.e. `self* ∘ g`.
    pub fn after(&self, g: &KleisliMap) -> Result<KleisliMap, EffectError> {
        if self.monad != g.monad {
            return Err(EffectError::MonadMismatch {
                expected: self.monad.name(),
                got: g.monad.name(),
            });
        }
        if g.codomain != self.domain {
            return Err(EffectError::SpaceMismatch {
                expected: self.domain.describe(),
                got: g.codomain.describe(),
            });
        }
        let table = g
            .table
            .iter()
            .map(|v| self.lift_value(v))
            .collect::<Result<_, _>>()?;
        KleisliMap::new(
            self.monad.clone(),
            g.domain.clone(),
            self.codomain.clone(),
            table,
        )
    }

    /// Precomposition with a pure map: `self ∘ h`.
    pub fn precompose_pure(&self, h: &PureMap) -> Result<KleisliMap, EffectError> {
        if *h.codomain() != self.domain {
            return Err(EffectError::SpaceMismatch {
                expected: self.domain.describe(),
                got: h.codomain().describe(),
            });
        }
        let table = h
            .domain()
            .points()
            .iter()
            .map(|p| Ok(self.apply(h.apply(p)?)?.clone()))
            .collect::<Result<_, EffectError>>()?;
        KleisliMap::new(
            self.monad.clone(),
            h.domain().clone(),
            self.codomain.clone(),
            table,
        )
    }

    /// Postcomposition with a pure map: `T h ∘ self`.
    pub fn map_outputs(&self, h: &PureMap) -> Result<KleisliMap, EffectError> {
        if *h.domain() != self.codomain {
            return Err(EffectError::SpaceMismatch {
                expected: self.codomain.describe(),
                got: h.domain().describe(),
            });
        }
        let table = self
            .table
            .iter()
            .map(|v| v.bind(|p| self.monad.unit(h.apply(p).expect("total").clone())))
            .collect();
        KleisliMap::new(
            self.monad.clone(),
            self.domain.clone(),
            h.codomain().clone(),
            table,
        )
    }

    /// Pointwise information order.
    pub fn leq(&self, other: &KleisliMap) -> Result<bool, EffectError> {
        if self.domain != other.domain {
            return Err(EffectError::SpaceMismatch {
                expected: self.domain.describe(),
                got: other.domain.describe(),
            });
        }
        for (a, b) in self.table.iter().zip(&other.table) {
            if !a.leq(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The monad unit applied to a single element, as a standalone operation.
pub fn unit(monad: &MonadId, space: &Space, x: &Point) -> Result<EffectValue<Point>, EffectError> {
    if !space.contains(x) {
        return Err(EffectError::UnknownElement {
            point: format!("{x:?}"),
            space: space.describe(),
        });
    }
    Ok(monad.unit(x.clone()))
}
