"""Pi-pulse schedules and their filter functions.

A sequence is stored as normalized pulse times (fractions of the total
evolution time) in (0, 1).  The generic filter function

    F(x) = 1/2 | sum_{k=0}^{n} (-1)^k (e^{i x s_{k+1}} - e^{i x s_k}) |^2,
    s_0 = 0, s_{n+1} = 1,  x = omega * t,

is the single source of truth used by the decoherence integrator; the
textbook closed forms for the catalog families live here only as
cross-checks for tests and the ``filter-dump`` CLI.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import filter_grid

FAMILIES = ("fid", "se", "cpmg", "pdd", "cdd", "udd", "custom")


class SequenceError(ValueError):
    """Invalid pulse-sequence construction."""


class FilterDomainError(ValueError):
    """Closed-form filter evaluated too close to a singular point."""


@dataclass(frozen=True)
class PulseSequence:
    """Ordered normalized pulse times plus provenance."""

    family: str
    fractions: tuple[float, ...]
    cdd_level: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SequenceError(f"unknown sequence family {self.family!r}")
        fr = self.fractions
        if any(not (0.0 < s < 1.0) for s in fr):
            raise SequenceError(f"pulse fractions must lie strictly inside (0, 1): {fr}")
        if any(b <= a for a, b in zip(fr[:-1], fr[1:])):
            raise SequenceError(f"pulse fractions must be strictly increasing: {fr}")
        if (self.family == "fid") != (len(fr) == 0):
            raise SequenceError("fid must have no pulses; pulsed families need >= 1")

    @property
    def n_pulses(self) -> int:
        return len(self.fractions)

    @property
    def sequence_id(self) -> str:
        if self.family == "cdd":
            return f"cdd(l={self.cdd_level},n={self.n_pulses})"
        if self.family in ("fid", "se"):
            return self.family
        if self.family == "custom":
            return "custom(" + ",".join(repr(s) for s in self.fractions) + ")"
        return f"{self.family}(n={self.n_pulses})"

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "n": self.n_pulses,
                           "fractions": list(self.fractions),
                           **({"cdd_level": self.cdd_level} if self.cdd_level else {})})


FID = PulseSequence("fid", ())


def se() -> PulseSequence:
    """Hahn spin echo: one pulse at half time."""
    return PulseSequence("se", (0.5,))


def cpmg(n: int) -> PulseSequence:
    """n pulses at (k - 1/2)/n."""
    _check_n(n)
    return PulseSequence("cpmg", tuple((k - 0.5) / n for k in range(1, n + 1)))


def pdd(n: int) -> PulseSequence:
    """n pulses equally spaced at k/(n+1)."""
    _check_n(n)
    return PulseSequence("pdd", tuple(k / (n + 1) for k in range(1, n + 1)))


def udd(n: int) -> PulseSequence:
    """n pulses at sin^2(pi k / (2n + 2))."""
    _check_n(n)
    return PulseSequence("udd", tuple(math.sin(math.pi * k / (2 * n + 2)) ** 2
                                      for k in range(1, n + 1)))


def cdd(level: int) -> PulseSequence:
    """Concatenation-level-l sequence from the recursion
    CDD_l = CDD_{l-1}(t/2) -> [pi for odd l] -> CDD_{l-1}(t/2), CDD_0 = free evolution.
    """
    if not isinstance(level, (int, np.integer)) or level < 1:
        raise SequenceError(f"cdd level must be an integer >= 1, got {level!r}")
    out: list[float] = []

    def rec(l: int, a: float, b: float) -> None:
        if l == 0:
            return
        mid = 0.5 * (a + b)
        rec(l - 1, a, mid)
        if l % 2 == 1:
            out.append(mid)
        rec(l - 1, mid, b)

    rec(int(level), 0.0, 1.0)
    return PulseSequence("cdd", tuple(out), cdd_level=int(level))


def custom_sequence(fractions) -> PulseSequence:
    """Arbitrary schedule; an empty list degrades to FID."""
    fr = tuple(float(s) for s in fractions)
    if not fr:
        return FID
    return PulseSequence("custom", fr)


def _check_n(n) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise SequenceError(f"pulse count must be an integer >= 1 (use fid for 0), got {n!r}")


def pulse_times(family: str, n: int | None = None, level: int | None = None) -> PulseSequence:
    """Catalog dispatch: ('cpmg', n=50), ('cdd', level=3), ('fid'), ..."""
    family = family.lower()
    if family == "fid":
        return FID
    if family == "se":
        return se()
    if family == "cdd":
        if level is None:
            raise SequenceError("cdd requires a concatenation level")
        return cdd(level)
    if family in ("cpmg", "pdd", "udd"):
        if n is None:
            raise SequenceError(f"{family} requires a pulse count")
        return {"cpmg": cpmg, "pdd": pdd, "udd": udd}[family](n)
    raise SequenceError(f"unknown sequence family {family!r}")


def filter_generic(seq: PulseSequence, x) -> np.ndarray:
    """Generic filter function F(x) >= 0 at x = omega * t (scalar or array).

    F(0) = 0 exactly and F <= 2 (n + 2)^2 (triangle inequality on the
    2n + 2 unit terms of the defining sum).
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0):
        raise ValueError("filter argument must be finite and >= 0")
    return filter_grid(np.asarray(seq.fractions, dtype=float), x)


def filter_closed_form(family: str, x, n: int = 1, level: int | None = None) -> np.ndarray:
    """Textbook closed forms, for cross-checking ``filter_generic``.

    The printed catalog forms are used with two repairs, both verified
    against the generic sum: the parity factor for CPMG/PDD takes argument
    x/2 (sin^2(x/2) for even-n CPMG, cos^2 for odd, and the reverse for
    PDD), and the UDD exponent is imaginary.  CPMG/PDD have removable
    singularities where cos(x/2n) resp. cos(x/(2n+2)) vanish; within
    1e-6 of those points this raises FilterDomainError rather than
    returning a large cancellation-noise value.
    """
    x = np.asarray(x, dtype=float)
    family = family.lower()
    if family == "fid":
        return 2.0 * np.sin(x / 2.0) ** 2
    if family == "se":
        return 8.0 * np.sin(x / 4.0) ** 4
    if family == "cpmg":
        _check_n(n)
        c = np.cos(x / (2.0 * n))
        if np.any(np.abs(c) < 1e-6):
            raise FilterDomainError("cpmg closed form too close to cos(x/2n) = 0")
        parity = np.sin(x / 2.0) ** 2 if n % 2 == 0 else np.cos(x / 2.0) ** 2
        return 8.0 * np.sin(x / (4.0 * n)) ** 4 * parity / c**2
    if family == "pdd":
        _check_n(n)
        c = np.cos(x / (2.0 * n + 2.0))
        if np.any(np.abs(c) < 1e-6):
            raise FilterDomainError("pdd closed form too close to cos(x/(2n+2)) = 0")
        parity = np.cos(x / 2.0) ** 2 if n % 2 == 0 else np.sin(x / 2.0) ** 2
        return 2.0 * np.tan(x / (2.0 * n + 2.0)) ** 2 * parity
    if family == "cdd":
        lvl = int(level if level is not None else n)
        if lvl < 1:
            raise SequenceError(f"cdd level must be >= 1, got {lvl}")
        out = 2.0 ** (2 * lvl + 1) * np.sin(x / 2.0 ** (lvl + 1)) ** 2
        for k in range(1, lvl + 1):
            out = out * np.sin(x / 2.0 ** (k + 1)) ** 2
        return out
    if family == "udd":
        _check_n(n)
        acc = np.zeros(np.shape(x), dtype=complex)
        for k in range(-n - 1, n + 1):
            acc += (-1.0) ** k * np.exp(0.5j * math.cos(math.pi * k / (n + 1)) * x)
        return 0.5 * np.abs(acc) ** 2
    raise SequenceError(f"no closed form for family {family!r}")


def parse_sequence_spec(spec: str) -> PulseSequence:
    """Parse CLI-style specs: 'fid', 'se', 'cpmg:50', 'cdd:l=3', 'custom:0.1,0.5,0.9'."""
    spec = spec.strip().lower()
    name, _, arg = spec.partition(":")
    if name in ("fid", "se"):
        if arg:
            raise SequenceError(f"{name} takes no argument, got {spec!r}")
        return pulse_times(name)
    if name in ("cpmg", "pdd", "udd"):
        try:
            return pulse_times(name, n=int(arg))
        except ValueError as exc:
            raise SequenceError(f"bad pulse count in {spec!r}") from exc
    if name == "cdd":
        arg = arg.removeprefix("l=")
        try:
            return cdd(int(arg))
        except ValueError as exc:
            raise SequenceError(f"bad cdd level in {spec!r}") from exc
    if name == "custom":
        try:
            fracs = [float(v) for v in arg.split(",") if v.strip()]
        except ValueError as exc:
            raise SequenceError(f"bad custom fractions in {spec!r}") from exc
        return custom_sequence(fracs)
    raise SequenceError(f"unknown sequence spec {spec!r}")
