"""Family specifications, variable roles and configuration enumeration.

A family is a finite joint space over named discrete variables, together with
a dense table of sufficient statistics ``T`` and log base measure ``log_h``
laid out in enumeration order: lexicographic in variable declaration order,
then symbol index (C order over the variable cardinalities).
"""

from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyDatasetError, RowSchemaError, SpecError

Configuration = dict[str, int]

LABEL_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


class Role(enum.Enum):
    COND = "cond"
    OBS = "obs"
    HID = "hid"


class Variant(enum.Enum):
    PLAIN = "plain"
    CONDITIONAL = "conditional"
    HIDDEN = "hidden"
    CONDITIONAL_HIDDEN = "conditional_hidden"

    @property
    def has_cond(self) -> bool:
        return self in (Variant.CONDITIONAL, Variant.CONDITIONAL_HIDDEN)

    @property
    def has_hidden(self) -> bool:
        return self in (Variant.HIDDEN, Variant.CONDITIONAL_HIDDEN)


def variant_for_roles(roles: Iterable[Role]) -> Variant:
    roles = set(roles)
    cond, hid = Role.COND in roles, Role.HID in roles
    if cond and hid:
        return Variant.CONDITIONAL_HIDDEN
    if cond:
        return Variant.CONDITIONAL
    if hid:
        return Variant.HIDDEN
    return Variant.PLAIN


@dataclass(frozen=True)
class VariableSpec:
    name: str
    role: Role
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not isinstance(self.role, Role):
            raise SpecError(f"variable {self.name!r}: role must be a Role, got {self.role!r}")
        if not self.name:
            raise SpecError("variable name must be non-empty")
        if len(self.symbols) < 1:
            raise SpecError(f"variable {self.name!r}: needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise SpecError(f"variable {self.name!r}: duplicate symbol labels")

    @property
    def cardinality(self) -> int:
        return len(self.symbols)

    def index_of(self, label: str) -> int:
        try:
            return self.symbols.index(label)
        except ValueError:
            raise SpecError(f"variable {self.name!r} has no symbol {label!r}") from None


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """Discrete exponential family over the joint space of ``variables``.

    ``T`` has shape ``(num_configs, stat_dim)`` and ``log_h`` shape
    ``(num_configs,)``, both indexed by enumeration order.  ``log_h = -inf``
    marks a forbidden configuration.
    """

    variables: tuple[VariableSpec, ...]
    stat_dim: int
    T: np.ndarray
    log_h: np.ndarray
    name: str | None = None
    grid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if not variables:
            raise SpecError("family needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise SpecError("duplicate variable names")
        if not any(v.role is Role.OBS for v in variables):
            raise SpecError("family needs at least one observed variable")
        if int(self.stat_dim) != self.stat_dim or self.stat_dim < 1:
            raise SpecError(f"stat_dim must be a positive integer, got {self.stat_dim!r}")
        object.__setattr__(self, "stat_dim", int(self.stat_dim))

        shape = tuple(v.cardinality for v in variables)
        n = math.prod(shape)
        T = _readonly(self.T)
        log_h = _readonly(self.log_h)
        if T.shape != (n, self.stat_dim):
            raise SpecError(f"T must have shape {(n, self.stat_dim)}, got {T.shape}")
        if log_h.shape != (n,):
            raise SpecError(f"log_h must have shape {(n,)}, got {log_h.shape}")
        if not np.all(np.isfinite(T)):
            raise SpecError("T entries must be finite")
        if np.any(np.isnan(log_h)) or np.any(log_h == np.inf):
            raise SpecError("log_h entries must be finite or -inf")
        if not np.any(np.isfinite(log_h)):
            raise SpecError("every configuration is forbidden (log_h = -inf everywhere)")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "log_h", log_h)

        grid = np.array(list(itertools.product(*(range(c) for c in shape))), dtype=np.intp)
        grid = grid.reshape(n, len(variables))
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_functions(
        cls,
        variables: Sequence[VariableSpec],
        stat_dim: int,
        stats: Callable[[Configuration], Sequence[float]],
        log_h: Callable[[Configuration], float] | None = None,
        name: str | None = None,
    ) -> "FamilySpec":
        """Tabulate ``stats`` (and optionally ``log_h``) over every configuration."""
        variables = tuple(variables)
        names = [v.name for v in variables]
        configs = [
            dict(zip(names, idx))
            for idx in itertools.product(*(range(v.cardinality) for v in variables))
        ]
        T = np.array([list(stats(c)) for c in configs], dtype=float).reshape(len(configs), stat_dim)
        lh = np.zeros(len(configs)) if log_h is None else np.array([log_h(c) for c in configs], dtype=float)
        return cls(variables, stat_dim, T, lh, name=name)

    # -- structure -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    @property
    def num_configs(self) -> int:
        return self.grid.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> VariableSpec:
        for v in self.variables:
            if v.name == name:
                return v
        raise SpecError(f"unknown variable {name!r}")

    def names_with_role(self, *roles: Role) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.role in roles)

    def variant(self) -> Variant:
        return variant_for_roles(v.role for v in self.variables)

    # -- configurations ------------------------------------------------

    def check_clamp(self, clamp: Mapping[str, int]) -> None:
        for name, idx in clamp.items():
            var = self.variable(name)
            if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
                raise SpecError(f"clamp {name}={idx!r}: index must be an integer")
            if not 0 <= idx < var.cardinality:
                raise SpecError(
                    f"clamp {name}={idx}: index out of range for cardinality {var.cardinality}"
                )

    def clamp_mask(self, clamp: Mapping[str, int]) -> np.ndarray:
        """Boolean mask over enumeration order selecting configurations that agree with ``clamp``."""
        self.check_clamp(clamp)
        mask = np.ones(self.num_configs, dtype=bool)
        for name, idx in clamp.items():
            mask &= self.grid[:, self.names.index(name)] == idx
        return mask

    def clamp_indices(self, clamp: Mapping[str, int]) -> np.ndarray:
        return np.flatnonzero(self.clamp_mask(clamp))

    def configuration(self, flat_index: int) -> Configuration:
        return dict(zip(self.names, (int(i) for i in self.grid[flat_index])))

    def flat_index(self, config: Mapping[str, int]) -> int:
        if set(config) != set(self.names):
            raise SpecError(f"not a full configuration: {dict(config)}")
        self.check_clamp(config)
        return int(np.ravel_multi_index(tuple(config[n] for n in self.names), self.shape))

    def enumerate(self, clamp: Mapping[str, int] | None = None) -> list[Configuration]:
        """Full configurations agreeing with ``clamp``, in enumeration order."""
        return [self.configuration(i) for i in self.clamp_indices(clamp or {})]

    def labels(self, config: Mapping[str, int]) -> dict[str, str]:
        return {n: self.variable(n).symbols[i] for n, i in config.items()}

    # -- data rows -----------------------------------------------------

    def check_row(self, row: Mapping[str, int]) -> None:
        """Raise RowSchemaError unless ``row`` assigns exactly the COND and OBS variables."""
        hidden = [n for n in row if n in self.names_with_role(Role.HID)]
        if hidden:
            raise RowSchemaError(f"row assigns hidden variable(s) {hidden}")
        expected = set(self.names_with_role(Role.COND, Role.OBS))
        missing = expected - set(row)
        if missing:
            raise RowSchemaError(f"row is missing variable(s) {sorted(missing)}")
        unknown = set(row) - set(self.names)
        if unknown:
            raise RowSchemaError(f"row assigns unknown variable(s) {sorted(unknown)}")
        try:
            self.check_clamp(row)
        except SpecError as e:
            raise RowSchemaError(str(e)) from None

    def cond_part(self, row: Mapping[str, int]) -> Configuration:
        cond = self.names_with_role(Role.COND)
        return {n: row[n] for n in cond}


@dataclass(frozen=True)
class ParamVector:
    theta: np.ndarray

    def __post_init__(self):
        theta = _readonly(np.atleast_1d(self.theta))
        if theta.ndim != 1:
            raise SpecError("theta must be a vector")
        if not np.all(np.isfinite(theta)):
            raise SpecError("theta entries must be finite")
        object.__setattr__(self, "theta", theta)

    def __len__(self):
        return self.theta.shape[0]


def as_theta(spec: FamilySpec, theta) -> np.ndarray:
    """Validate a parameter vector against ``spec`` and return it as a float array."""
    if isinstance(theta, ParamVector):
        theta = theta.theta
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.stat_dim,):
        raise SpecError(f"theta must have length {spec.stat_dim}, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise SpecError("theta entries must be finite")
    return theta


@dataclass(frozen=True)
class Dataset:
    """Rows assigning symbol indices to every COND and OBS variable."""

    rows: tuple[Configuration, ...]

    def __post_init__(self):
        rows = tuple(dict(r) for r in self.rows)
        if not rows:
            raise EmptyDatasetError("dataset must contain at least one row")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def validate(self, spec: FamilySpec) -> None:
        for i, row in enumerate(self.rows):
            try:
                spec.check_row(row)
            except RowSchemaError as e:
                raise RowSchemaError(f"row {i}: {e}") from None

    @classmethod
    def from_labels(cls, spec: FamilySpec, rows: Iterable[Mapping[str, str]]) -> "Dataset":
        return cls(tuple({n: spec.variable(n).index_of(lbl) for n, lbl in r.items()} for r in rows))
