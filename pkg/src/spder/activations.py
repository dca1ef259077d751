"""Nonlinearities, their exact derivatives, and diagnostic probes.

The core activation is the semiperiodic family sin(u) * delta(u) with
u = w0 * x, for a sublinear damping function delta.  delta = 1 reduces to
a pure sine network; Identity and Square dampings are superlinear and
exist only for ablation runs.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_OMEGA0 = 30.0
DEFAULT_CLAMP_EPS = 1e-30


class DampingKind(Enum):
    CONST1 = "const1"
    SQRT_ABS = "sqrtabs"
    LOG_ABS = "logabs"
    ARCTAN = "arctan"
    SQRT_RELU = "sqrtrelu"
    IDENTITY = "identity"  # diagnostic only
    SQUARE = "square"      # diagnostic only


DIAGNOSTIC_ONLY = frozenset({DampingKind.IDENTITY, DampingKind.SQUARE})

# dampings whose value/derivative need the input magnitude floored away
# from zero
_CLAMPED = frozenset({DampingKind.SQRT_ABS, DampingKind.LOG_ABS})


@dataclass(frozen=True)
class ActivationSpec:
    """Which nonlinearity a layer applies.

    kind "relu" ignores omega0; kind "semiperiodic" computes
    sin(u) * delta(u) at u = omega0 * x with delta chosen by `damping`.
    """

    kind: str = "semiperiodic"
    damping: DampingKind = DampingKind.SQRT_ABS
    omega0: float = DEFAULT_OMEGA0
    clamp_eps: float = DEFAULT_CLAMP_EPS

    def __post_init__(self):
        if self.kind not in ("relu", "semiperiodic"):
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if self.clamp_eps < 0:
            raise ValueError("clamp_eps must be non-negative")


def relu_spec() -> ActivationSpec:
    return ActivationSpec(kind="relu")


def _clamped(x, eps):
    # magnitude floor with sign preservation keeps the function odd
    sign = np.where(x < 0, -1.0, 1.0)
    return sign * np.maximum(np.abs(x), eps)


def damping_value(kind: DampingKind, x, clamp_eps=DEFAULT_CLAMP_EPS):
    x = np.asarray(x, dtype=np.float64)
    if kind in _CLAMPED:
        x = _clamped(x, clamp_eps)
    if kind is DampingKind.CONST1:
        return np.ones_like(x)
    if kind is DampingKind.SQRT_ABS:
        return np.sqrt(np.abs(x))
    if kind is DampingKind.LOG_ABS:
        return np.log(np.abs(x))
    if kind is DampingKind.ARCTAN:
        return np.arctan(x)
    if kind is DampingKind.SQRT_RELU:
        return np.sqrt(np.maximum(x, 0.0))
    if kind is DampingKind.IDENTITY:
        return x.copy()
    if kind is DampingKind.SQUARE:
        return x * x
    raise ValueError(f"unknown damping {kind}")


def damping_derivative(kind: DampingKind, x, clamp_eps=DEFAULT_CLAMP_EPS):
    x = np.asarray(x, dtype=np.float64)
    if kind in _CLAMPED:
        x = _clamped(x, clamp_eps)
    if kind is DampingKind.CONST1:
        return np.zeros_like(x)
    if kind is DampingKind.SQRT_ABS:
        ax = np.abs(x)
        safe = np.maximum(ax, np.finfo(np.float64).tiny)
        return np.sign(x) * 0.5 / np.sqrt(safe)
    if kind is DampingKind.LOG_ABS:
        return 1.0 / x
    if kind is DampingKind.ARCTAN:
        return 1.0 / (1.0 + x * x)
    if kind is DampingKind.SQRT_RELU:
        safe = np.maximum(x, np.finfo(np.float64).tiny)
        return np.where(x > 0, 0.5 / np.sqrt(safe), 0.0)
    if kind is DampingKind.IDENTITY:
        return np.ones_like(x)
    if kind is DampingKind.SQUARE:
        return 2.0 * x
    raise ValueError(f"unknown damping {kind}")


def act_forward(spec: ActivationSpec, x):
    """Apply the activation elementwise; works on scalars and arrays.

    The semiperiodic family evaluates sin(u) * delta(u) at the frequency-
    scaled argument u = omega0 * x: the whole nonlinearity sees the scaled
    input, which is what makes trained activation values cluster at the
    stationary points of sin(u)*delta(u) itself.
    """
    x = np.asarray(x, dtype=np.float64)
    if spec.kind == "relu":
        return np.maximum(x, 0.0)
    u = spec.omega0 * x
    return np.sin(u) * damping_value(spec.damping, u, spec.clamp_eps)


def act_forward_full(spec: ActivationSpec, x):
    """act_forward plus the intermediates the backward pass reuses.

    Returns (activation, extras) where extras is None for relu and
    (u, sin_u, delta_u) for the semiperiodic family.
    """
    x = np.asarray(x, dtype=np.float64)
    if spec.kind == "relu":
        return np.maximum(x, 0.0), None
    u = spec.omega0 * x
    s = np.sin(u)
    d = damping_value(spec.damping, u, spec.clamp_eps)
    return s * d, (u, s, d)


def act_derivative_from(spec: ActivationSpec, x, extras):
    """act_derivative, reusing extras captured by act_forward_full."""
    if extras is None:
        x = np.asarray(x, dtype=np.float64)
        return np.where(x > 0, 1.0, 0.0)
    u, s, d = extras
    dd = damping_derivative(spec.damping, u, spec.clamp_eps)
    return spec.omega0 * (np.cos(u) * d + s * dd)


def act_derivative(spec: ActivationSpec, x):
    """Exact analytic derivative of act_forward.

    For the semiperiodic family, with u = omega0 * x:
        omega0 * (cos(u)*delta(u) + sin(u)*delta'(u))
    using the clamped argument consistently in both delta terms.
    """
    x = np.asarray(x, dtype=np.float64)
    if spec.kind == "relu":
        return np.where(x > 0, 1.0, 0.0)
    u = spec.omega0 * x
    d = damping_value(spec.damping, u, spec.clamp_eps)
    dd = damping_derivative(spec.damping, u, spec.clamp_eps)
    return spec.omega0 * (np.cos(u) * d + np.sin(u) * dd)


def stationary_values(damping: DampingKind, omega0: float, search_interval,
                      clamp_eps=DEFAULT_CLAMP_EPS):
    """Roots of d/dx [sin(w0*x)*delta(w0*x)] inside the interval.

    Scans at period/200 resolution of the underlying sine and refines
    each sign-change bracket with 80 bisection steps.  Returns a list of
    (x_star, y_star) with y_star the activation value at the root;
    interval endpoints are excluded.
    """
    lo, hi = float(search_interval[0]), float(search_interval[1])
    if not (hi > lo):
        return []
    spec = ActivationSpec(kind="semiperiodic", damping=damping,
                          omega0=omega0, clamp_eps=clamp_eps)
    step = (2.0 * np.pi / omega0) / 200.0
    n = max(int(np.ceil((hi - lo) / step)), 2)
    xs = np.linspace(lo, hi, n + 1)
    ds = act_derivative(spec, xs)
    roots = []
    for i in range(n):
        a, b = xs[i], xs[i + 1]
        fa, fb = ds[i], ds[i + 1]
        if fa == 0.0 and a != lo:
            roots.append(a)
            continue
        if fa * fb < 0:
            for _ in range(80):
                m = 0.5 * (a + b)
                fm = float(act_derivative(spec, m))
                if fa * fm <= 0:
                    b, fb = m, fm
                else:
                    a, fa = m, fm
            roots.append(0.5 * (a + b))
    return [(float(x), float(act_forward(spec, x))) for x in roots
            if lo < x < hi]


def empirical_lipschitz(damping: DampingKind, a: float, radius: float,
                        samples: int) -> float:
    """Max |derivative| of sin(x)*delta(x) sampled on [a-radius, a+radius]."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    spec = ActivationSpec(kind="semiperiodic", damping=damping, omega0=1.0)
    xs = np.linspace(a - radius, a + radius, samples)
    return float(np.max(np.abs(act_derivative(spec, xs))))
