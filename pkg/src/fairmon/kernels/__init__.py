"""Kernel backend selection.

The compiled extension is used when present; set ``FAIRMON_KERNEL=python``
to force the pure-Python fallback (or ``compiled`` to insist on the
extension).  Both backends implement identical arithmetic, so monitors
produce the same numbers either way.
"""

import os

from . import _pure

try:
    from . import _ext
except ImportError:
    _ext = None

_BACKENDS = {"python": _pure}
if _ext is not None:
    _BACKENDS["compiled"] = _ext


def available_backends():
    return sorted(_BACKENDS)


def _select(name):
    if name == "auto":
        name = "compiled" if _ext is not None else "python"
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} not available "
                         f"(have: {', '.join(available_backends())})")
    return name


_active_name = _select(os.environ.get("FAIRMON_KERNEL", "auto"))
_active = _BACKENDS[_active_name]


def backend_name():
    return _active_name


def set_backend(name):
    """Switch the active backend (used by the benchmark comparison)."""
    global _active_name, _active
    _active_name = _select(name)
    _active = _BACKENDS[_active_name]


def azuma_epsilon(t, delta, sigma_sq, nu):
    return _active.azuma_epsilon(t, delta, sigma_sq, nu)


def estimator_step(t, e1_hat, d, d_comp, x, shift, delta, sigma_sq, nu):
    return _active.estimator_step(t, e1_hat, d, d_comp, x, shift,
                                  delta, sigma_sq, nu)


def eta(y, lam):
    return _active.eta(y, lam)
