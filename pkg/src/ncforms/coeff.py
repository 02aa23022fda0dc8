"""Coefficient algebra shared by every calculus in the package.

Two representations of the same commutative function algebra sit behind one
contract:

* ``ExpSum``: finite sums  sum_i c_i * exp(lx_i * x + mt_i * t)  with complex
  coefficients and complex frequencies.  All operations are exact, including
  shifts by arbitrary complex amounts, which is what the trigonometric shift
  operators of the two-parameter calculus require.
* ``GridFunction``: complex samples on a rectangular window of Z^n with a
  periodic or open boundary per axis.  Used by the simulation pipelines.

Values are immutable after construction and all operations are pure, so both
kinds are safe to share across threads.
"""

import numpy as np

from .errors import CoefficientKindError, SingularityError, WindowMismatchError

# Absolute tolerance below which a term/coefficient is dropped as zero.
MERGE_TOL = 1e-14

_SLOTS = {"x": 0, "t": 1}


def _round_sig(v):
    # 12 significant digits; keys arise from finitely many rational
    # combinations, so equal frequencies collide exactly after rounding.
    if v == 0.0:
        return 0.0
    return float(f"{v:.12g}")


def _freq_key(lx, mt):
    lx = complex(lx)
    mt = complex(mt)
    return (
        complex(_round_sig(lx.real), _round_sig(lx.imag)),
        complex(_round_sig(mt.real), _round_sig(mt.imag)),
    )


class ExpSum:
    """Exact exponential sum  sum c * exp(lx*x + mt*t).

    Terms are kept canonical: frequency pairs are compared rounded to 12
    significant digits (terms whose rounded pairs collide are merged, the
    exact frequencies are retained) and coefficients smaller than
    ``MERGE_TOL`` are pruned.  The class is closed under +, *, shifts along
    either variable, d/dt, and complex conjugation, but not under division
    or exp of a general element.

    ``terms`` maps the rounded key to (lx, mt, c) with exact frequencies.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        merged = {}
        if terms:
            items = terms.values() if isinstance(terms, dict) else terms
            for lx, mt, c in items:
                lx, mt, c = complex(lx), complex(mt), complex(c)
                key = _freq_key(lx, mt)
                if key in merged:
                    old = merged[key]
                    merged[key] = (old[0], old[1], old[2] + c)
                else:
                    merged[key] = (lx, mt, c)
        self.terms = {k: v for k, v in merged.items() if abs(v[2]) > MERGE_TOL}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls([(0.0, 0.0, c)])

    @classmethod
    def one(cls):
        return cls.constant(1.0)

    @classmethod
    def exponential(cls, c, lx=0.0, mt=0.0):
        """c * exp(lx*x + mt*t)."""
        return cls([(lx, mt, c)])

    # -- ring structure ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, (ExpSum, int, float, complex)):
            return NotImplemented
        other = _as_expsum(other)
        return ExpSum(list(self.terms.values()) + list(other.terms.values()))

    __radd__ = __add__

    def __neg__(self):
        return ExpSum([(lx, mt, -c) for lx, mt, c in self.terms.values()])

    def __sub__(self, other):
        if not isinstance(other, (ExpSum, int, float, complex)):
            return NotImplemented
        return self + (-_as_expsum(other))

    def __rsub__(self, other):
        return _as_expsum(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ExpSum([(lx, mt, c * other) for lx, mt, c in self.terms.values()])
        if not isinstance(other, ExpSum):
            return NotImplemented
        out = []
        for lx1, mt1, c1 in self.terms.values():
            for lx2, mt2, c2 in other.terms.values():
                out.append((lx1 + lx2, mt1 + mt2, c1 * c2))
        return ExpSum(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1.0 / other)
        return self * _as_expsum(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("ExpSum is not hashable")

    # -- analysis ------------------------------------------------------

    def shift(self, axis, amount):
        """Translate the named variable ('x' or 't') by a complex amount."""
        slot = _SLOTS[axis]
        out = []
        for term in self.terms.values():
            out.append((term[0], term[1], term[2] * np.exp(term[slot] * amount)))
        return ExpSum(out)

    def partial_t(self):
        return ExpSum([(lx, mt, c * mt) for lx, mt, c in self.terms.values()])

    def partial_x(self):
        return ExpSum([(lx, mt, c * lx) for lx, mt, c in self.terms.values()])

    def conj(self):
        """Complex conjugate (for real x, t)."""
        return ExpSum([(lx.conjugate(), mt.conjugate(), c.conjugate())
                       for lx, mt, c in self.terms.values()])

    def inverse(self):
        """Reciprocal; exists only for single-term sums."""
        if len(self.terms) != 1:
            raise SingularityError(
                f"reciprocal needs a single exponential term, got {len(self.terms)}"
            )
        (lx, mt, c), = self.terms.values()
        return ExpSum([(-lx, -mt, 1.0 / c)])

    def eval(self, x=0.0, t=0.0):
        return complex(sum(c * np.exp(lx * x + mt * t) for lx, mt, c in self.terms.values()))

    def is_zero(self, tol=MERGE_TOL):
        return all(abs(c) <= tol for _, _, c in self.terms.values())

    def norm(self):
        """Sum of coefficient magnitudes (a symbolic L1 size)."""
        return float(sum(abs(c) for _, _, c in self.terms.values()))

    def __repr__(self):
        if not self.terms:
            return "ExpSum(0)"
        bits = [f"{c:.6g}*e^({lx:.6g}x+{mt:.6g}t)" for lx, mt, c in sorted(
            self.terms.values(), key=lambda v: (v[0].real, v[1].real))]
        return "ExpSum(" + " + ".join(bits) + ")"


def _as_expsum(v):
    if isinstance(v, ExpSum):
        return v
    if isinstance(v, (int, float, complex)):
        return ExpSum.constant(v)
    raise CoefficientKindError(f"cannot mix ExpSum with {type(v).__name__}")


class GridFunction:
    """Samples on a rectangular window of Z^n.

    ``origin`` is the lattice index of ``values[0, ..., 0]``.  ``boundary``
    is 'periodic' or 'open' per axis (a single string applies to all axes).
    Periodic axes must cover one full period starting at index 0; shifts
    wrap exactly.  On open axes a shift relabels the window, and binary
    operations restrict to the window intersection.
    """

    __slots__ = ("values", "origin", "boundary")

    def __init__(self, values, origin=None, boundary="periodic"):
        values = np.asarray(values)
        if values.dtype not in (np.float64, np.complex128):
            values = values.astype(np.complex128 if np.iscomplexobj(values) else np.float64)
        if values.ndim == 0 or any(s < 1 for s in values.shape):
            raise WindowMismatchError("window extents must be >= 1 in every direction")
        n = values.ndim
        if isinstance(boundary, str):
            boundary = (boundary,) * n
        boundary = tuple(boundary)
        if len(boundary) != n or any(b not in ("periodic", "open") for b in boundary):
            raise WindowMismatchError(f"bad boundary spec {boundary!r}")
        origin = tuple(0 for _ in range(n)) if origin is None else tuple(int(o) for o in origin)
        if len(origin) != n:
            raise WindowMismatchError("origin rank does not match values")
        for ax in range(n):
            if boundary[ax] == "periodic" and origin[ax] != 0:
                raise WindowMismatchError("periodic axes are anchored at index 0")
        values = values.copy()
        values.flags.writeable = False
        self.values = values
        self.origin = origin
        self.boundary = boundary

    # -- window bookkeeping --------------------------------------------

    @property
    def shape(self):
        return self.values.shape

    @property
    def window(self):
        """Per-axis half-open index ranges (lo, hi)."""
        return tuple((o, o + s) for o, s in zip(self.origin, self.shape))

    def _like(self, values, origin=None):
        return GridFunction(values, self.origin if origin is None else origin, self.boundary)

    # -- algebra ---------------------------------------------------------

    def _binary(self, other, op):
        if isinstance(other, (int, float, complex)):
            return self._like(op(self.values, other))
        if isinstance(other, ExpSum):
            raise CoefficientKindError("cannot mix GridFunction with ExpSum")
        if not isinstance(other, GridFunction):
            return NotImplemented
        a, b, origin = _align(self, other)
        return GridFunction(op(a, b), origin, self.boundary)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.values)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        try:
            a, b, _ = _align(self, other)
        except WindowMismatchError:
            return False
        return bool(np.array_equal(a, b))

    def __hash__(self):
        raise TypeError("GridFunction is not hashable")

    def apply(self, fn):
        """Pointwise map (e.g. np.exp); preserves the window."""
        return self._like(np.asarray(fn(self.values)))

    def inverse(self):
        vals = self.values
        small = np.abs(vals) < 1e-13 * max(1.0, float(np.abs(vals).max(initial=0.0)))
        if small.any():
            idx = tuple(int(i[0]) for i in np.nonzero(small))
            site = tuple(o + i for o, i in zip(self.origin, idx))
            raise SingularityError(f"pointwise inverse hit a near-zero value at site {site}")
        return self._like(1.0 / vals)

    # -- lattice action ---------------------------------------------------

    def shift(self, axis, amount=1):
        """T^amount along one axis: (T f)(i) = f(i + 1).

        Periodic axes roll; open axes relabel the window origin.
        """
        k = int(amount)
        if k != amount:
            raise WindowMismatchError("grid shifts must be whole lattice steps")
        if k == 0:
            return self
        if self.boundary[axis] == "periodic":
            return self._like(np.roll(self.values, -k, axis=axis))
        origin = list(self.origin)
        origin[axis] -= k
        return self._like(self.values, tuple(origin))

    def eval(self, point):
        idx = []
        for ax, (p, o, s) in enumerate(zip(point, self.origin, self.shape)):
            i = int(p) - o
            if self.boundary[ax] == "periodic":
                i %= s
            elif not 0 <= i < s:
                raise WindowMismatchError(f"site {tuple(point)} outside open window {self.window}")
            idx.append(i)
        return complex(self.values[tuple(idx)])

    def is_zero(self, tol=MERGE_TOL):
        return bool(np.all(np.abs(self.values) <= tol))

    def norm(self):
        return float(np.abs(self.values).max())

    def conj(self):
        return self._like(np.conj(self.values))

    def __repr__(self):
        return f"GridFunction(window={self.window}, boundary={self.boundary})"


def _align(f, g):
    """Common window of two grids; errors if they cannot be reconciled."""
    if f.boundary != g.boundary:
        raise WindowMismatchError(f"boundary mismatch {f.boundary} vs {g.boundary}")
    if f.values.ndim != g.values.ndim:
        raise WindowMismatchError("rank mismatch")
    sl_f, sl_g, origin = [], [], []
    for ax in range(f.values.ndim):
        if f.boundary[ax] == "periodic":
            if f.shape[ax] != g.shape[ax]:
                raise WindowMismatchError(
                    f"periodic axis {ax}: length {f.shape[ax]} vs {g.shape[ax]}")
            sl_f.append(slice(None))
            sl_g.append(slice(None))
            origin.append(0)
        else:
            lo = max(f.origin[ax], g.origin[ax])
            hi = min(f.origin[ax] + f.shape[ax], g.origin[ax] + g.shape[ax])
            if hi - lo < 1:
                raise WindowMismatchError(f"empty window intersection on axis {ax}")
            sl_f.append(slice(lo - f.origin[ax], hi - f.origin[ax]))
            sl_g.append(slice(lo - g.origin[ax], hi - g.origin[ax]))
            origin.append(lo)
    return f.values[tuple(sl_f)], g.values[tuple(sl_g)], tuple(origin)


# ---------------------------------------------------------------------------
# Kind-generic entry points.  Thin wrappers over the methods above so the
# calculus layers can stay agnostic about the representation in play.
# ---------------------------------------------------------------------------

def add(f, g):
    return f + g


def mul(f, g):
    return f * g


def scale(c, f):
    return f * c


def shift(f, axis, amount):
    """Shift along an axis: ExpSum takes 'x'/'t' and any complex amount,
    GridFunction takes an axis index and whole steps."""
    return f.shift(axis, amount)


def partial_t(f):
    if isinstance(f, ExpSum):
        return f.partial_t()
    raise CoefficientKindError("d/dt is only defined for ExpSum; shift grids instead")


def evaluate(f, point):
    """Numeric value at a point: (x, t) pair for ExpSum, lattice index for grids."""
    if isinstance(f, ExpSum):
        x, t = point
        return f.eval(x=x, t=t)
    return f.eval(point)


def is_zero(f, tol=MERGE_TOL):
    if isinstance(f, (int, float, complex)):
        return abs(f) <= tol
    return f.is_zero(tol)


def norm(f):
    if isinstance(f, (int, float, complex)):
        return abs(f)
    return f.norm()
