"""Weight modules over unrolled quantum sl2 at an even root of unity.

This is an executable matrix model of the ribbon category of
finite-dimensional weight modules: generator actions H, E, F, K on explicit
weight bases, braiding from the R-matrix, twist, two-sided duality with the
pivot K^{r/2+1}, an intertwiner solver, the modified trace on projective
objects, Kirby colors, and the global constants (stabilization coefficients,
their square root, and the relative modularity parameter) that enter the
surgery formula.

Typical simple modules V_alpha have highest weight alpha and dimension r/2,
with weight string alpha, alpha-2, ..., alpha-r+2; this is forced by the
nilpotency E^{r/2} = F^{r/2} = 0.  V_alpha is simple projective ("typical")
iff alpha is not an integer or alpha = r/2 - 1 mod r/2.  One-dimensional
modules sigma(k), with H acting by k in rbar*Z, realize the periodicity
group.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _linalg as la
from .qscalars import ScalarContext, Scalar


class NonTypicalColor(ValueError):
    """A typical simple module was required but the weight is atypical."""


class CriticalDegree(ValueError):
    """A generic degree was required but the given one is critical."""


class NotProjective(ValueError):
    """The operation needs a typical (projective) tensor factor."""


class NotScalar(ArithmeticError):
    """An endomorphism expected to be scalar deviates beyond tolerance."""


# ---------------------------------------------------------------------------
# degrees and colors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Degree:
    """A class in C/2Z, stored as a complex representative."""

    g: complex

    def reduced(self) -> complex:
        re = self.g.real % 2.0
        return complex(re, self.g.imag)

    def equals(self, other: "Degree", tol: float = 1e-9) -> bool:
        d = self.g - other.g
        if abs(d.imag) > tol:
            return False
        half = d.real / 2.0
        return abs(half - round(half)) <= tol

    def is_critical(self, tol: float = 1e-9) -> bool:
        # critical classes are the integers mod 2, i.e. Z/2Z inside C/2Z
        if abs(self.g.imag) > tol:
            return False
        return abs(self.g.real - round(self.g.real)) <= tol

    def __add__(self, other: "Degree") -> "Degree":
        return Degree(self.g + other.g)

    def __neg__(self) -> "Degree":
        return Degree(-self.g)


@dataclass(frozen=True)
class Typical:
    """Color of the typical simple module with highest weight alpha."""

    alpha: complex

    def __repr__(self):
        return f"V({self.alpha})"


@dataclass(frozen=True)
class Sigma:
    """Color of the one-dimensional module sigma(k), k in rbar*Z."""

    k: int

    def __repr__(self):
        return f"sigma({self.k})"


Color = Typical | Sigma

Letter = tuple[int, Color]  # (+1 or -1, color)


def is_typical_weight(ctx: ScalarContext, alpha: complex, tol: float | None = None) -> bool:
    """Highest weights of typical (simple projective) modules.

    alpha works iff it is not an integer, or is an integer congruent to
    r/2 - 1 mod r/2.
    """
    tol = ctx.tol if tol is None else tol
    alpha = complex(alpha)
    if abs(alpha.imag) > tol:
        return True
    n = round(alpha.real)
    if abs(alpha.real - n) > tol:
        return True
    m = ctx.nilpotency
    return n % m == m - 1


def check_color(ctx: ScalarContext, color: Color) -> None:
    if isinstance(color, Typical):
        if not is_typical_weight(ctx, color.alpha):
            raise NonTypicalColor(f"weight {color.alpha} is not typical at level {ctx.r}")
    elif isinstance(color, Sigma):
        if color.k % ctx.rbar != 0:
            raise ValueError(f"sigma index {color.k} not a multiple of rbar={ctx.rbar}")
    else:
        raise TypeError(f"not a color: {color!r}")


def color_dim(ctx: ScalarContext, color: Color) -> int:
    return ctx.nilpotency if isinstance(color, Typical) else 1


def color_degree(ctx: ScalarContext, color: Color) -> Degree:
    if isinstance(color, Typical):
        return Degree(complex(color.alpha))
    return Degree(complex(color.k))


def shift_color(color: Color, k: int) -> Color:
    """Tensoring with sigma(k) on simple colors: V_a -> V_{a+k}, s(j) -> s(j+k)."""
    if isinstance(color, Typical):
        return Typical(complex(color.alpha) + k)
    return Sigma(color.k + k)


def dual_color(ctx: ScalarContext, color: Color) -> Color:
    """Isomorphism class of the dual of a simple module."""
    if isinstance(color, Typical):
        return Typical(2 * (ctx.nilpotency - 1) - complex(color.alpha))
    return Sigma(-color.k)


@dataclass(frozen=True)
class ObjectWord:
    """Signed tensor word of generating colors."""

    letters: tuple[Letter, ...]

    def __init__(self, letters):
        object.__setattr__(self, "letters", tuple((int(s), c) for s, c in letters))

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "ObjectWord") -> "ObjectWord":
        return ObjectWord(self.letters + other.letters)

    def degree(self, ctx: ScalarContext) -> Degree:
        g = 0j
        for sign, color in self.letters:
            g += sign * color_degree(ctx, color).g
        return Degree(g)


EMPTY_WORD = ObjectWord(())


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightModule:
    """Concrete module: weight basis plus generator action matrices."""

    dim: int
    weights: tuple[complex, ...]
    actH: np.ndarray
    actE: np.ndarray
    actF: np.ndarray
    actK: np.ndarray
    degree: Degree

    def pivot(self, ctx: ScalarContext) -> np.ndarray:
        """Action of the pivotal element K^{r/2+1}, diagonal on weights."""
        p = la.zeros(ctx, (self.dim, self.dim))
        for i, w in enumerate(self.weights):
            p[i, i] = ctx.q_power(ctx.pivot_power * w)
        return p

    def pivot_inv(self, ctx: ScalarContext) -> np.ndarray:
        p = la.zeros(ctx, (self.dim, self.dim))
        for i, w in enumerate(self.weights):
            p[i, i] = ctx.q_power(-ctx.pivot_power * w)
        return p

    def actK_inv(self, ctx: ScalarContext) -> np.ndarray:
        p = la.zeros(ctx, (self.dim, self.dim))
        for i, w in enumerate(self.weights):
            p[i, i] = ctx.q_power(-w)
        return p


def _degree_from_weights(weights) -> Degree:
    return Degree(complex(weights[0]))


def typical_module(ctx: ScalarContext, alpha: complex) -> WeightModule:
    """V_alpha: basis v_0..v_{m-1}, F v_n = v_{n+1}, E v_n = [n][a-n+1] v_{n-1}."""
    alpha = complex(alpha)
    if not is_typical_weight(ctx, alpha):
        raise NonTypicalColor(f"weight {alpha} is not typical at level {ctx.r}")
    m = ctx.nilpotency
    weights = tuple(alpha - 2 * n for n in range(m))
    H = la.zeros(ctx, (m, m))
    K = la.zeros(ctx, (m, m))
    E = la.zeros(ctx, (m, m))
    F = la.zeros(ctx, (m, m))
    for n in range(m):
        H[n, n] = ctx.scalar(weights[n])
        K[n, n] = ctx.q_power(weights[n])
        if n + 1 < m:
            F[n + 1, n] = ctx.scalar(1)
        if n >= 1:
            E[n - 1, n] = ctx.qint(n) * ctx.qint(alpha - n + 1)
    return WeightModule(m, weights, H, E, F, K, _degree_from_weights(weights))


def sigma_module(ctx: ScalarContext, k: int) -> WeightModule:
    if k % ctx.rbar != 0:
        raise ValueError(f"sigma index {k} not a multiple of rbar={ctx.rbar}")
    H = la.asarray(ctx, [[k]])
    K = la.asarray(ctx, [[0]])
    K[0, 0] = ctx.q_power(k)
    Z = la.zeros(ctx, (1, 1))
    return WeightModule(1, (complex(k),), H, Z.copy(), Z.copy(), K, Degree(complex(k)))


def unit_module(ctx: ScalarContext) -> WeightModule:
    return sigma_module(ctx, 0)


def dual_module(ctx: ScalarContext, M: WeightModule) -> WeightModule:
    """Dual action through the antipode: rho*(x) = rho(S(x))^T."""
    weights = tuple(-w for w in M.weights)
    H = la.zeros(ctx, (M.dim, M.dim))
    K = la.zeros(ctx, (M.dim, M.dim))
    for i, w in enumerate(weights):
        H[i, i] = ctx.scalar(w)
        K[i, i] = ctx.q_power(w)
    Kinv = M.actK_inv(ctx)
    E = -(M.actE @ Kinv).T
    F = -(M.actK @ M.actF).T
    return WeightModule(M.dim, weights, H, E, F, K, _degree_from_weights(weights))


def tensor_module(ctx: ScalarContext, A: WeightModule, B: WeightModule) -> WeightModule:
    """Tensor product through the coproduct, basis in lexicographic order."""
    dim = A.dim * B.dim
    weights = tuple(a + b for a in A.weights for b in B.weights)
    IA = la.eye(ctx, A.dim)
    IB = la.eye(ctx, B.dim)
    H = la.kron(ctx, A.actH, IB) + la.kron(ctx, IA, B.actH)
    E = la.kron(ctx, A.actE, B.actK) + la.kron(ctx, IA, B.actE)
    F = la.kron(ctx, A.actF, IB) + la.kron(ctx, A.actK_inv(ctx), B.actF)
    K = la.kron(ctx, A.actK, B.actK)
    return WeightModule(dim, weights, H, E, F, K, _degree_from_weights(weights))


@lru_cache(maxsize=None)
def realize_letter(ctx: ScalarContext, letter: Letter) -> WeightModule:
    sign, color = letter
    check_color(ctx, color)
    if isinstance(color, Typical):
        M = typical_module(ctx, color.alpha)
    else:
        M = sigma_module(ctx, color.k)
    return M if sign > 0 else dual_module(ctx, M)


def realize(ctx: ScalarContext, word: ObjectWord) -> WeightModule:
    """Concrete module of a signed tensor word; empty word gives the unit."""
    M = unit_module(ctx)
    first = True
    for letter in word:
        piece = realize_letter(ctx, letter)
        M = piece if first else tensor_module(ctx, M, piece)
        first = False
    return M


def letter_modules(ctx: ScalarContext, word: ObjectWord) -> list[WeightModule]:
    return [realize_letter(ctx, letter) for letter in word]


def check_module_relations(ctx: ScalarContext, M: WeightModule) -> float:
    """Largest deviation from the defining algebra relations.

    Checks K = q^H on the weight basis, [H,E] = 2E, [H,F] = -2F,
    [E,F] = (K - K^-1)/(q - q^-1), E^{r/2} = F^{r/2} = 0, and weight/degree
    congruence.  Returns the max infinity-norm residual.
    """
    devs = []
    Kdiag = la.zeros(ctx, (M.dim, M.dim))
    for i, w in enumerate(M.weights):
        Kdiag[i, i] = ctx.q_power(w)
    devs.append(la.norm_inf(M.actK - Kdiag))
    comm_he = M.actH @ M.actE - M.actE @ M.actH
    devs.append(la.norm_inf(comm_he - 2 * M.actE))
    comm_hf = M.actH @ M.actF - M.actF @ M.actH
    devs.append(la.norm_inf(comm_hf + 2 * M.actF))
    comm_ef = M.actE @ M.actF - M.actF @ M.actE
    rhs = (M.actK - M.actK_inv(ctx)) / (ctx.q - 1 / ctx.q)
    devs.append(la.norm_inf(comm_ef - rhs))
    m = ctx.nilpotency
    Epow = la.eye(ctx, M.dim)
    Fpow = la.eye(ctx, M.dim)
    for _ in range(m):
        Epow = Epow @ M.actE
        Fpow = Fpow @ M.actF
    devs.append(la.norm_inf(Epow))
    devs.append(la.norm_inf(Fpow))
    g = M.degree.g
    for w in M.weights:
        half = (complex(w) - g) / 2.0
        devs.append(abs(half.imag) + abs(half.real - round(half.real)))
    return max(devs)


# ---------------------------------------------------------------------------
# braiding, twist, duality morphisms
# ---------------------------------------------------------------------------


def _swap_matrix(ctx: ScalarContext, dA: int, dB: int) -> np.ndarray:
    P = la.zeros(ctx, (dB * dA, dA * dB))
    one = ctx.scalar(1)
    for i in range(dA):
        for j in range(dB):
            P[j * dA + i, i * dB + j] = one
    return P


def braiding(ctx: ScalarContext, V: WeightModule, W: WeightModule) -> np.ndarray:
    """Braiding c_{V,W}: V(x)W -> W(x)V.

    c = swap o (Cartan factor q^{lambda*mu/2}) o Theta, with the truncated
    quasi-R-matrix Theta = sum_b q^{b(b-1)/2} {1}^b/[b]! E^b (x) F^b.
    """
    m = ctx.nilpotency
    theta = la.zeros(ctx, (V.dim * W.dim, V.dim * W.dim))
    Eb = la.eye(ctx, V.dim)
    Fb = la.eye(ctx, W.dim)
    for b in range(m):
        if b > 0:
            Eb = Eb @ V.actE
            Fb = Fb @ W.actF
            if la.norm_inf(Eb) == 0.0 or la.norm_inf(Fb) == 0.0:
                break
        coeff = ctx.q_power(b * (b - 1) / 2) * ctx.brace(1) ** b / ctx.qfact_nonzero(b)
        theta = theta + coeff * la.kron(ctx, Eb, Fb)
    out = theta.copy()
    # Cartan factor is diagonal in the weight basis of the target of Theta;
    # row (i,j) of the composite carries weights (lam_i, mu_j)
    for i, lam in enumerate(V.weights):
        for j, mu in enumerate(W.weights):
            out[i * W.dim + j, :] *= ctx.q_power(complex(lam) * complex(mu) / 2.0)
    return _swap_matrix(ctx, V.dim, W.dim) @ out


def braiding_inv(ctx: ScalarContext, V: WeightModule, W: WeightModule) -> np.ndarray:
    """Inverse braiding (c_{V,W})^{-1}: W(x)V -> V(x)W by matrix inversion."""
    return la.inv(ctx, braiding(ctx, V, W))


def ev_coev(ctx: ScalarContext, M: WeightModule, flavor: str) -> np.ndarray:
    """(Co)evaluation matrices for a realized module M.

    'ev_l':   M* (x) M  -> 1      phi (x) v |-> phi(v)
    'coev_l': 1 -> M (x) M*       1 |-> sum v_i (x) phi_i
    'ev_r':   M (x) M* -> 1       v (x) phi |-> phi(pivot v)
    'coev_r': 1 -> M* (x) M       1 |-> sum phi_i (x) pivot^{-1} v_i

    The right flavors carry the pivot K^{r/2+1}; the left flavors are free
    of it.  Zig-zag identities hold by construction.
    """
    d = M.dim
    if flavor == "ev_l":
        out = la.zeros(ctx, (1, d * d))
        for i in range(d):
            out[0, i * d + i] = ctx.scalar(1)
        return out
    if flavor == "coev_l":
        out = la.zeros(ctx, (d * d, 1))
        for i in range(d):
            out[i * d + i, 0] = ctx.scalar(1)
        return out
    if flavor == "ev_r":
        out = la.zeros(ctx, (1, d * d))
        for i, w in enumerate(M.weights):
            out[0, i * d + i] = ctx.q_power(ctx.pivot_power * w)
        return out
    if flavor == "coev_r":
        out = la.zeros(ctx, (d * d, 1))
        for i, w in enumerate(M.weights):
            out[i * d + i, 0] = ctx.q_power(-ctx.pivot_power * w)
        return out
    raise ValueError(f"unknown flavor {flavor!r}")


def twist(ctx: ScalarContext, V: WeightModule) -> np.ndarray:
    """theta_V = (id (x) ev_r) o (c_{V,V} (x) id) o (id (x) coev_l).

    Equals the pivot-weighted right partial trace of the self-braiding; a
    scalar multiple of the identity on simple modules.
    """
    c = braiding(ctx, V, V)
    d = V.dim
    out = la.zeros(ctx, (d, d))
    for k, w in enumerate(V.weights):
        pk = ctx.q_power(ctx.pivot_power * w)
        for a in range(d):
            for j in range(d):
                out[a, j] += c[a * d + k, j * d + k] * pk
    return out


def scalar_of(ctx: ScalarContext, f: np.ndarray) -> Scalar:
    """Extract s from f = s*id, enforcing the deviation policy."""
    s = f[0, 0]
    dev = la.norm_inf(f - s * la.eye(ctx, f.shape[0]))
    if dev > ctx.tol * max(1.0, abs(s)):
        raise NotScalar(f"endomorphism deviates from scalar*id by {dev:.3e}")
    return s


# ---------------------------------------------------------------------------
# partial traces and the modified trace
# ---------------------------------------------------------------------------


def partial_trace_right(ctx: ScalarContext, f: np.ndarray, dA: int, B: WeightModule) -> np.ndarray:
    """tr_r on End(A (x) B): close the B factor with the right evaluation."""
    dB = B.dim
    out = la.zeros(ctx, (dA, dA))
    for b, w in enumerate(B.weights):
        pb = ctx.q_power(ctx.pivot_power * w)
        out += pb * f[b::dB, b::dB]
    return out


def partial_trace_left(ctx: ScalarContext, f: np.ndarray, A: WeightModule, dB: int) -> np.ndarray:
    """tr_l on End(A (x) B): close the A factor with the left evaluation."""
    dA = A.dim
    out = la.zeros(ctx, (dB, dB))
    for a, w in enumerate(A.weights):
        pa = ctx.q_power(-ctx.pivot_power * w)
        out += pa * f[a * dB:(a + 1) * dB, a * dB:(a + 1) * dB]
    return out


def modified_trace(ctx: ScalarContext, word: ObjectWord, f: np.ndarray) -> Scalar:
    """Modified trace of an endomorphism of the realized word.

    Reduces by right/left partial traces down to one typical letter, where
    the result must be scalar*id; the trace is that scalar times the
    modified dimension of the letter.  Raises NotProjective when the word
    has no typical letter and NotScalar when the reduced endomorphism is
    not scalar.
    """
    letters = list(word)
    mods = letter_modules(ctx, word)
    target = None
    for idx, (sign, color) in enumerate(letters):
        if isinstance(color, Typical):
            target = idx
            break
    if target is None:
        raise NotProjective("modified trace needs a typical tensor factor")
    total = int(np.prod([M.dim for M in mods])) if mods else 1
    if f.shape != (total, total):
        raise ValueError(f"endomorphism shape {f.shape} does not match word dim {total}")
    # close letters to the right of the target, then to its left
    right_dims = [M.dim for M in mods]
    g = f
    for j in range(len(mods) - 1, target, -1):
        dA = int(np.prod(right_dims[:j])) if j else 1
        g = partial_trace_right(ctx, g, dA, mods[j])
        right_dims.pop()
    for j in range(target):
        dB = int(np.prod(right_dims[1:])) if len(right_dims) > 1 else 1
        g = partial_trace_left(ctx, g, mods[j], dB)
        right_dims.pop(0)
    s = scalar_of(ctx, g)
    sign, color = letters[target]
    alpha = complex(color.alpha) if sign > 0 else complex(dual_color(ctx, color).alpha)
    return s * modified_dimension(ctx, alpha)


# ---------------------------------------------------------------------------
# modified dimension
# ---------------------------------------------------------------------------


def modified_dimension(ctx: ScalarContext, alpha) -> Scalar:
    """Modified (projective) dimension of the typical module V_alpha.

    d(V_alpha) = (-1)^{m-1} m {mu} / {m mu},  mu = alpha - m + 1,

    with m = r/2 and mu the middle weight of V_alpha.  The shift is forced
    by trace compatibility: d(V_gamma)/d(V_alpha) must equal the scalar of
    tr_r applied to the projector onto each summand V_gamma of
    V_alpha (x) V_beta, with the ribbon pivot K^{1-r/2}.  It also satisfies
    d(V (x) sigma(k)) = d(V) dim(sigma(k)) and d(V*) = d(V).  The overall
    scale is a free normalization.
    """
    alpha = complex(alpha)
    if not is_typical_weight(ctx, alpha):
        raise NonTypicalColor(f"weight {alpha} is not typical at level {ctx.r}")
    m = ctx.nilpotency
    mu = alpha - (m - 1)
    den = ctx.brace(m * mu)
    if abs(den) <= 10 * ctx.tol:
        # typical weights on the critical lattice (mu in m Z): both braces
        # vanish and the ratio continues to the derivative quotient
        qm = ctx.q_power(mu)
        qmm = ctx.q_power(m * mu)
        return (-1) ** (m - 1) * (qm + 1 / qm) / (qmm + 1 / qmm)
    return (-1) ** (m - 1) * m * ctx.brace(mu) / den


# ---------------------------------------------------------------------------
# intertwiner solver
# ---------------------------------------------------------------------------


def hom_basis(ctx: ScalarContext, src: ObjectWord, dst: ObjectWord) -> list[np.ndarray]:
    """Basis of the space of module maps realize(src) -> realize(dst).

    Solves f rho_src(x) = rho_dst(x) f for x in {H, E, F} by a dense
    nullspace computation; K-intertwining follows from H.  Returns matrices
    of shape (dim dst, dim src); an empty list means the Hom space is zero.
    """
    S = realize(ctx, src)
    D = realize(ctx, dst)
    nS, nD = S.dim, D.dim
    Is = la.eye(ctx, nS)
    Id = la.eye(ctx, nD)
    blocks = []
    for xs, xd in ((S.actH, D.actH), (S.actE, D.actE), (S.actF, D.actF)):
        blocks.append(la.kron(ctx, Id, xs.T) - la.kron(ctx, xd, Is))
    A = np.concatenate(blocks, axis=0)
    basis = []
    for v in la.nullspace(ctx, A):
        f = v.reshape(nD, nS)
        # deterministic normalization: largest entry becomes 1
        idx = max(range(f.size), key=lambda t: abs(f.reshape(-1)[t]))
        basis.append(f / f.reshape(-1)[idx])
    return basis


def hom_dim_graded(ctx: ScalarContext, word: ObjectWord, window: int | None = None) -> int:
    """Total dimension of the periodicity-graded Hom from the unit to the word.

    Sums dim Hom(1, word (x) sigma(k)) over k in rbar*Z; only weights in the
    support of the word can contribute, so the window is finite.  Computed
    directly as the space of joint E- and F-null vectors whose weight lies
    in rbar*Z, which doubles as the brute-force oracle for the per-k counts.
    """
    M = realize(ctx, word)
    vecs = la.nullspace(ctx, np.concatenate([M.actE, M.actF], axis=0))
    if not vecs:
        return 0
    N = np.stack(vecs, axis=1)
    # the joint kernel is H-invariant, so it splits over the weight
    # eigenspaces; count the projection rank onto each lattice weight
    count = 0
    seen = []
    for w0 in M.weights:
        w0 = complex(w0)
        if any(abs(w0 - s) <= ctx.tol for s in seen):
            continue
        seen.append(w0)
        if abs(w0.imag) > ctx.tol:
            continue
        ratio = w0.real / ctx.rbar
        if abs(ratio - round(ratio)) > 100 * ctx.tol:
            continue
        rows = [i for i in range(M.dim)
                if abs(complex(M.weights[i]) - w0) <= ctx.tol]
        count += la.rank(ctx, N[rows, :], scale=1.0)
    return count


# ---------------------------------------------------------------------------
# index sets, Kirby colors, constants
# ---------------------------------------------------------------------------


def index_set(ctx: ScalarContext, g: Degree) -> list[complex]:
    """Representatives of typical highest weights of degree g mod sigma shifts.

    There are rbar/2 of them: g0, g0+2, ..., g0 + rbar - 2 for a reduced
    representative g0 of g.
    """
    if g.is_critical(ctx.tol):
        raise CriticalDegree(f"degree {g.g} is critical")
    g0 = g.reduced()
    return [g0 + 2 * t for t in range(ctx.rbar // 2)]


def sigma_dim(ctx: ScalarContext, k: int) -> int:
    """Categorical dimension of sigma(k): the pivot's action, +1 or -1."""
    val = ctx.q_power(ctx.pivot_power * k)
    out = round(val.real)
    if abs(val - out) > ctx.tol or out not in (1, -1):
        raise ArithmeticError(f"sigma({k}) dimension not a sign: {val}")
    return out


def z_mod_zplus(ctx: ScalarContext) -> int:
    """Order of Z/Z_+: 1 if dim sigma(rbar) = 1, else 2.  Computed, not hardcoded."""
    return 1 if sigma_dim(ctx, ctx.rbar) == 1 else 2


@dataclass(frozen=True)
class FormalColorSum:
    """Formal linear combination of homogeneous colors of one degree."""

    terms: tuple[tuple[Scalar, Color], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("formal color sum must be nonempty")

    def degree(self, ctx: ScalarContext) -> Degree:
        degs = [color_degree(ctx, c) for _, c in self.terms]
        for d in degs[1:]:
            if not d.equals(degs[0], ctx.tol):
                raise ValueError("formal color sum mixes degrees")
        return degs[0]


def kirby_color(ctx: ScalarContext, g: Degree) -> FormalColorSum:
    """Kirby color of index g: sum over Z/Z_+ classes and the index set of
    dim sigma(k) d(V_i) * (V_i tensored into the class representative)."""
    if g.is_critical(ctx.tol):
        raise CriticalDegree(f"degree {g.g} is critical")
    reps = index_set(ctx, g)
    ks = [0] if z_mod_zplus(ctx) == 1 else [0, ctx.rbar]
    terms = []
    for k in ks:
        dk = sigma_dim(ctx, k)
        for a in reps:
            terms.append((dk * modified_dimension(ctx, a), shift_color(Typical(a), k)))
    return FormalColorSum(tuple(terms))


@dataclass(frozen=True)
class InvariantConstants:
    delta_minus: Scalar
    delta_plus: Scalar
    D: Scalar
    eta: Scalar
    delta: Scalar
    zeta: Scalar
    z_mod_zplus: int


@lru_cache(maxsize=None)
def constants(ctx: ScalarContext, probe_g: Degree | None = None,
              probe_alpha: complex | None = None) -> InvariantConstants:
    """Global constants from meridian evaluations.

    Delta_-/Delta_+ are the scalars of the Kirby-colored -1/+1 framed
    meridian around a typical probe strand; zeta is extracted from the
    double-strand projector figure; D is the principal square root of
    Delta_- Delta_+, eta = |Z/Z_+|/D and delta = Delta_+/D.  Values are
    memoized per context and probe.
    """
    from . import fixtures  # local import; fixtures builds on diagrams/rt_eval

    if probe_g is None:
        probe_g = Degree(0.5 + 0.0j)
    if probe_alpha is None:
        probe_alpha = complex(probe_g.reduced())
    dm = fixtures.stabilization_coefficient(ctx, probe_alpha, framing=-1)
    dp = fixtures.stabilization_coefficient(ctx, probe_alpha, framing=+1)
    zeta = fixtures.relative_modularity_scalar(ctx, probe_g)
    nz = z_mod_zplus(ctx)
    D = _principal_sqrt(ctx, dm * dp)
    return InvariantConstants(
        delta_minus=dm,
        delta_plus=dp,
        D=D,
        eta=nz / D,
        delta=dp / D,
        zeta=zeta,
        z_mod_zplus=nz,
    )


def _principal_sqrt(ctx: ScalarContext, z: Scalar) -> Scalar:
    if ctx.high_precision:
        return ctx._mp.sqrt(z)
    return cmath.sqrt(z)
