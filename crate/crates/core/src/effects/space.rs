//! Finite carriers, tagged coproduct spaces and their points, and pure
//! (effect-free) maps between them.

use std::fmt;
use std::rc::Rc;

use super::EffectError;

/// A finite set of named atoms in a fixed canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    name: String,
    elements: Vec<String>,
}

impl Carrier {
    /// Builds a carrier; element names must be pairwise distinct.
    pub fn new(name: impl Into<String>, elements: Vec<String>) -> Result<Self, EffectError> {
        let name = name.into();
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(EffectError::DuplicateElement {
                    carrier: name,
                    element: e.clone(),
                });
            }
        }
        Ok(Carrier { name, elements })
    }

    /// Convenience constructor from string slices.
    pub fn of(name: &str, elements: &[&str]) -> Self {
        Carrier::new(name, elements.iter().map(|s| s.to_string()).collect())
            .expect("carrier elements must be distinct")
    }

    /// A carrier `name = {name0, .., name(k-1)}` with generated element names.
    pub fn indexed(name: &str, size: usize) -> Self {
        let elements = (0..size).map(|i| format!("{name}{i}")).collect();
        Carrier::new(name, elements).expect("generated names are distinct")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn elements(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|s| s.as_str())
    }
}

/// An object of the base category: either a plain carrier or a tagged
/// coproduct of two spaces. Nesting is structural, so `(Z+Y)+X` and
/// `Z+(Y+X)` are distinct spaces related by [`PureMap::assoc_right`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Atoms(Rc<Carrier>),
    Sum(Rc<Space>, Rc<Space>),
}

/// A point of a [`Space`]: an atom index, or an injection into a sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    At(usize),
    L(Box<Point>),
    R(Box<Point>),
}

impl Point {
    pub fn inl(p: Point) -> Point {
        Point::L(Box::new(p))
    }

    pub fn inr(p: Point) -> Point {
        Point::R(Box::new(p))
    }
}

impl Space {
    pub fn atoms(c: Carrier) -> Space {
        Space::Atoms(Rc::new(c))
    }

    pub fn sum(left: &Space, right: &Space) -> Space {
        Space::Sum(Rc::new(left.clone()), Rc::new(right.clone()))
    }

    pub fn size(&self) -> usize {
        match self {
            Space::Atoms(c) => c.len(),
            Space::Sum(a, b) => a.size() + b.size(),
        }
    }

    pub fn as_sum(&self) -> Option<(&Space, &Space)> {
        match self {
            Space::Sum(a, b) => Some((a, b)),
            Space::Atoms(_) => None,
        }
    }

    pub fn as_atoms(&self) -> Option<&Carrier> {
        match self {
            Space::Atoms(c) => Some(c),
            Space::Sum(..) => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::Atoms(c), Point::At(i)) => *i < c.len(),
            (Space::Sum(a, _), Point::L(q)) => a.contains(q),
            (Space::Sum(_, b), Point::R(q)) => b.contains(q),
            _ => false,
        }
    }

    /// All points in canonical order: atoms by index, sums left then right.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Space::Atoms(c) => (0..c.len()).map(Point::At).collect(),
            Space::Sum(a, b) => {
                let mut out: Vec<Point> = a.points().into_iter().map(Point::inl).collect();
                out.extend(b.points().into_iter().map(Point::inr));
                out
            }
        }
    }

    /// Position of `p` in the canonical enumeration.
    pub fn index_of(&self, p: &Point) -> Result<usize, EffectError> {
        match (self, p) {
            (Space::Atoms(c), Point::At(i)) if *i < c.len() => Ok(*i),
            (Space::Sum(a, _), Point::L(q)) => a.index_of(q),
            (Space::Sum(a, b), Point::R(q)) => Ok(a.size() + b.index_of(q)?),
            _ => Err(EffectError::UnknownElement {
                point: format!("{p:?}"),
                space: self.describe(),
            }),
        }
    }

    pub fn point_at(&self, i: usize) -> Point {
        match self {
            Space::Atoms(_) => Point::At(i),
            Space::Sum(a, b) => {
                let la = a.size();
                if i < la {
                    Point::inl(a.point_at(i))
                } else {
                    Point::inr(b.point_at(i - la))
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Space::Atoms(c) => c.name().to_string(),
            Space::Sum(a, b) => format!("({}+{})", a.describe(), b.describe()),
        }
    }

    /// Human-readable rendering of a point of this space.
    pub fn render_point(&self, p: &Point) -> String {
        match (self, p) {
            (Space::Atoms(c), Point::At(i)) if *i < c.len() => c.element(*i).to_string(),
            (Space::Sum(a, _), Point::L(q)) => format!("inl({})", a.render_point(q)),
            (Space::Sum(_, b), Point::R(q)) => format!("inr({})", b.render_point(q)),
            _ => format!("<invalid {p:?}>"),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// A total pure function between spaces, tabulated on the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureMap {
    domain: Space,
    codomain: Space,
    table: Vec<Point>,
}

impl PureMap {
    pub fn new(domain: Space, codomain: Space, table: Vec<Point>) -> Result<Self, EffectError> {
        if table.len() != domain.size() {
            return Err(EffectError::NotTotal {
                expected: domain.size(),
                got: table.len(),
            });
        }
        for p in &table {
            if !codomain.contains(p) {
                return Err(EffectError::UnknownElement {
                    point: format!("{p:?}"),
                    space: codomain.describe(),
                });
            }
        }
        Ok(PureMap {
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(
        domain: Space,
        codomain: Space,
        f: impl Fn(&Point) -> Point,
    ) -> Result<Self, EffectError> {
        let table = domain.points().iter().map(&f).collect();
        PureMap::new(domain, codomain, table)
    }

    pub fn identity(space: &Space) -> Self {
        PureMap {
            domain: space.clone(),
            codomain: space.clone(),
            table: space.points(),
        }
    }

    /// Left injection `X -> X+Y`.
    pub fn inl(x: &Space, y: &Space) -> Self {
        let codomain = Space::sum(x, y);
        PureMap {
            domain: x.clone(),
            codomain,
            table: x.points().into_iter().map(Point::inl).collect(),
        }
    }

    /// Right injection `Y -> X+Y`.
    pub fn inr(x: &Space, y: &Space) -> Self {
        let codomain = Space::sum(x, y);
        PureMap {
            domain: y.clone(),
            codomain,
            table: y.points().into_iter().map(Point::inr).collect(),
        }
    }

    /// Codiagonal `X+X -> X`, both injections of a point collapse to it.
    pub fn codiag(x: &Space) -> Self {
        let domain = Space::sum(x, x);
        let mut table = x.points();
        table.extend(x.points());
        PureMap {
            domain,
            codomain: x.clone(),
            table,
        }
    }

    /// Re-tagging `(A+B)+C -> A+(B+C)`.
    pub fn assoc_right(a: &Space, b: &Space, c: &Space) -> Self {
        let domain = Space::sum(&Space::sum(a, b), c);
        let codomain = Space::sum(a, &Space::sum(b, c));
        let f = |p: &Point| match p {
            Point::L(q) => match q.as_ref() {
                Point::L(r) => Point::inl(r.as_ref().clone()),
                Point::R(r) => Point::inr(Point::inl(r.as_ref().clone())),
                Point::At(_) => unreachable!("sum point expected"),
            },
            Point::R(r) => Point::inr(Point::inr(r.as_ref().clone())),
            Point::At(_) => unreachable!("sum point expected"),
        };
        PureMap::from_fn(domain, codomain, f).expect("retagging is total")
    }

    /// Coproduct of maps `f+g : A+B -> A'+B'`.
    pub fn sum_of(f: &PureMap, g: &PureMap) -> Self {
        let domain = Space::sum(&f.domain, &g.domain);
        let codomain = Space::sum(&f.codomain, &g.codomain);
        let mut table: Vec<Point> = f.table.iter().cloned().map(Point::inl).collect();
        table.extend(g.table.iter().cloned().map(Point::inr));
        PureMap {
            domain,
            codomain,
            table,
        }
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn apply(&self, p: &Point) -> Result<&Point, EffectError> {
        let i = self.domain.index_of(p)?;
        Ok(&self.table[i])
    }

    /// `self` after `g`.
    pub fn compose(&self, g: &PureMap) -> Result<PureMap, EffectError> {
        if g.codomain != self.domain {
            return Err(EffectError::SpaceMismatch {
                expected: self.domain.describe(),
                got: g.codomain.describe(),
            });
        }
        let table = g
            .table
            .iter()
            .map(|p| self.apply(p).cloned())
            .collect::<Result<_, _>>()?;
        PureMap::new(g.domain.clone(), self.codomain.clone(), table)
    }
}
