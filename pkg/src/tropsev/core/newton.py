"""Newton diagrams and marked regular subdivisions of {0, ..., n}."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .arith import CoeffRing, RingElem
from .puiseux import PuiseuxTrunc

Rational = Union[int, Fraction, str]


@dataclass(frozen=True)
class WeightVector:
    """Rational weights ``w_0, ..., w_n`` with ``n >= 4``."""

    entries: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        entries = tuple(Fraction(e) for e in self.entries)
        if len(entries) < 5:
            raise ValueError(
                f"Weight vector needs at least 5 entries (n >= 4), got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, values: Iterable[Rational]) -> "WeightVector":
        return cls(tuple(Fraction(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, index: int) -> Fraction:
        return self.entries[index]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.entries)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


@dataclass(frozen=True)
class Cell:
    """One lower face of the Newton diagram.

    ``support`` lists every index whose lifted point lies on the face,
    endpoints included. ``normal_eta`` is the primitive interior normal
    ``(-p, q)`` of a face with slope ``p/q``.
    """

    support: Tuple[int, ...]
    slope: Fraction
    normal_eta: Tuple[int, int]

    @property
    def left(self) -> int:
        return self.support[0]

    @property
    def right(self) -> int:
        return self.support[-1]

    @property
    def endpoints(self) -> Tuple[int, int]:
        return self.left, self.right

    @property
    def marked(self) -> Tuple[int, ...]:
        return self.support[1:-1]

    @property
    def lattice_length(self) -> int:
        return self.right - self.left

    def is_marked(self) -> bool:
        return len(self.support) > 2

    def contains(self, index: int) -> bool:
        """True when ``index`` lies in the closed segment ``[left, right]``."""
        return self.left <= index <= self.right

    def eta_value(self, index: int, weight: Fraction) -> Fraction:
        """Return ``<eta, (index, weight)>``."""
        return self.normal_eta[0] * index + self.normal_eta[1] * weight


@dataclass(frozen=True)
class MarkedSubdivision:
    """The marked subdivision cut out by the lower faces, left to right."""

    cells: Tuple[Cell, ...]

    @property
    def n(self) -> int:
        return self.cells[-1].right

    def marked_cells(self) -> List[Cell]:
        return [cell for cell in self.cells if cell.is_marked()]

    def cell_of(self, index: int) -> Cell:
        """Return the first cell whose segment contains ``index``.

        Raises:
            ValueError: If the index is outside ``0..n``
        """
        for cell in self.cells:
            if cell.contains(index):
                return cell
        raise ValueError(f"Index {index} outside 0..{self.n}")

    def index_of(self, cell: Cell) -> int:
        return self.cells.index(cell)

    def on_hull(self) -> List[int]:
        """Indices whose lifted points lie on the lower hull."""
        indices = {j for cell in self.cells for j in cell.support}
        return sorted(indices)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class AffineTransform:
    """The reparametrization ``w_i -> w_i + alpha * i + shift``.

    On polynomials it sends ``f(x)`` with ``val(c_i) = w_i`` to
    ``t^shift * f(t^alpha * x)``.
    """

    alpha: Fraction = Fraction(0)
    shift: Fraction = Fraction(0)

    def apply(self, w: WeightVector) -> WeightVector:
        return WeightVector(
            tuple(wi + self.alpha * i + self.shift for i, wi in enumerate(w))
        )

    def inverse(self) -> "AffineTransform":
        return AffineTransform(-self.alpha, -self.shift)

    def is_identity(self) -> bool:
        return self.alpha == 0 and self.shift == 0


def _cross(o: Tuple[int, Fraction], a: Tuple[int, Fraction], b: Tuple[int, Fraction]) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def primitive_normal(slope: Fraction) -> Tuple[int, int]:
    return (-slope.numerator, slope.denominator)


def newton_diagram(w: WeightVector) -> MarkedSubdivision:
    """Compute the lower convex hull of ``{(i, w_i)}`` and its marked cells.

    Collinear points are removed from the vertex chain but kept in the
    support of the face they lie on, so they show up as marks.
    """
    points = list(enumerate(w.entries))
    chain: List[Tuple[int, Fraction]] = []
    for point in points:
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], point) <= 0:
            chain.pop()
        chain.append(point)

    cells = []
    for (a, wa), (b, wb) in zip(chain, chain[1:]):
        slope = Fraction(wb - wa, b - a)
        support = tuple(
            j for j in range(a, b + 1) if w[j] == wa + slope * (j - a)
        )
        cells.append(Cell(support, slope, primitive_normal(slope)))
    return MarkedSubdivision(tuple(cells))


def normalize(w: WeightVector, cell_index: int) -> Tuple[WeightVector, AffineTransform]:
    """Make one cell horizontal at height zero.

    Args:
        w: Weight vector
        cell_index: Position of the cell in ``newton_diagram(w).cells``

    Returns:
        Tuple of (normalized weights, transform with ``transform.apply(w)``
        equal to the normalized weights)

    Raises:
        ValueError: If the cell index is out of range
    """
    cells = newton_diagram(w).cells
    if not 0 <= cell_index < len(cells):
        raise ValueError(f"Cell index {cell_index} out of range 0..{len(cells) - 1}")
    cell = cells[cell_index]
    alpha = -cell.slope
    shift = -(w[cell.left] + alpha * cell.left)
    transform = AffineTransform(alpha, shift)
    return transform.apply(w), transform


def reflect(w: WeightVector) -> WeightVector:
    """Return ``(w_n, ..., w_0)``, the weights of ``x^n f(1/x)``."""
    return WeightVector(tuple(reversed(w.entries)))


def valuation_profile(subdivision: MarkedSubdivision) -> List[Tuple[Fraction, int]]:
    """Return ``(v, l)`` per cell: ``l`` roots of valuation ``v = -slope``."""
    return [(-cell.slope, cell.lattice_length) for cell in subdivision.cells]


@dataclass(frozen=True)
class ResidualPolynomial:
    """Polynomial ``sum delta_i x^i`` over a coefficient ring."""

    ring: CoeffRing
    coefficients: Tuple[Tuple[int, RingElem], ...]

    def as_dict(self) -> Dict[int, RingElem]:
        return dict(self.coefficients)

    @property
    def degree(self) -> int:
        return self.coefficients[-1][0]

    @property
    def order(self) -> int:
        return self.coefficients[0][0]

    def evaluate(self, value: RingElem) -> RingElem:
        result = self.ring.zero()
        for exponent, coefficient in self.coefficients:
            result = result + coefficient * value**exponent
        return result

    def derivative(self) -> "ResidualPolynomial":
        return ResidualPolynomial(
            self.ring,
            tuple((e - 1, c * e) for e, c in self.coefficients if e > 0),
        )

    def root_multiplicity(self, value: RingElem) -> int:
        """Multiplicity of a root, decided exactly in the coefficient ring."""
        poly: Optional[ResidualPolynomial] = self
        multiplicity = 0
        while poly is not None and poly.coefficients:
            if poly.evaluate(value).is_invertible():
                return multiplicity
            multiplicity += 1
            poly = poly.derivative()
        return multiplicity


def residual_polynomial(
    coefficients: Sequence[PuiseuxTrunc], cell: Cell, w: WeightVector
) -> ResidualPolynomial:
    """Return the residual polynomial of ``sum c_i x^i`` on ``cell``.

    Raises:
        ValueError: If some coefficient's valuation differs from ``w``
    """
    if len(coefficients) != len(w):
        raise ValueError(
            f"Expected {len(w)} coefficients, got {len(coefficients)}"
        )
    for i, (coefficient, wi) in enumerate(zip(coefficients, w)):
        valuation = coefficient.valuation()
        if valuation != wi:
            raise ValueError(f"Coefficient {i} has valuation {valuation}, expected {wi}")
    ring = coefficients[0].ring
    return ResidualPolynomial(
        ring,
        tuple((i, coefficients[i].leading_coefficient()) for i in cell.support),
    )
