"""Small named families and seeded random generators for tests and scripts."""

from __future__ import annotations

import numpy as np

from .core import Dataset, FamilySpec, Role, VariableSpec, Variant

BINARY = ("0", "1")


def bernoulli() -> FamilySpec:
    """One observed binary x, T(x) = [x]."""
    return FamilySpec.from_functions(
        [VariableSpec("x", Role.OBS, BINARY)], 1, lambda c: [c["x"]], name="bernoulli"
    )


def logistic() -> FamilySpec:
    """Binary input x (conditioned on), binary label y, T(x, y) = [x*y, y]."""
    return FamilySpec.from_functions(
        [VariableSpec("x", Role.COND, BINARY), VariableSpec("y", Role.OBS, BINARY)],
        2,
        lambda c: [c["x"] * c["y"], c["y"]],
        name="logistic",
    )


def mixture() -> FamilySpec:
    """Observed x with binary hidden u, T(x, u) = [u, x*u, x*(1-u)]."""
    return FamilySpec.from_functions(
        [VariableSpec("x", Role.OBS, BINARY), VariableSpec("u", Role.HID, BINARY)],
        3,
        lambda c: [c["u"], c["x"] * c["u"], c["x"] * (1 - c["u"])],
        name="mixture",
    )


def cond_mixture() -> FamilySpec:
    """Conditional mixture: x conditioned on, y observed, u hidden."""
    return FamilySpec.from_functions(
        [
            VariableSpec("x", Role.COND, BINARY),
            VariableSpec("y", Role.OBS, BINARY),
            VariableSpec("u", Role.HID, BINARY),
        ],
        4,
        lambda c: [c["u"], c["u"] * c["y"], (1 - c["u"]) * c["y"], c["x"] * c["u"]],
        name="cond_mixture",
    )


def rows(spec: FamilySpec, *values) -> Dataset:
    """Dataset from index tuples given in COND-then-OBS declaration order."""
    names = spec.names_with_role(Role.COND, Role.OBS)
    out = []
    for v in values:
        v = v if isinstance(v, tuple) else (v,)
        out.append(dict(zip(names, v)))
    return Dataset(tuple(out))


_ROLES = {
    Variant.PLAIN: (),
    Variant.CONDITIONAL: (Role.COND,),
    Variant.HIDDEN: (Role.HID,),
    Variant.CONDITIONAL_HIDDEN: (Role.COND, Role.HID),
}


def random_family(
    rng: np.random.Generator,
    variant: Variant,
    max_card: int = 4,
    max_dim: int = 6,
    max_obs: int = 2,
) -> FamilySpec:
    """Random family of the given variant: T uniform in [-1, 1], log_h = 0.

    COND and HID roles get one variable each; OBS gets 1..max_obs.  Every
    cardinality is drawn from 2..max_card.
    """
    roles = [Role.COND] if Role.COND in _ROLES[variant] else []
    roles += [Role.OBS] * int(rng.integers(1, max_obs + 1))
    if Role.HID in _ROLES[variant]:
        roles.append(Role.HID)
    variables = []
    for k, role in enumerate(roles):
        card = int(rng.integers(2, max_card + 1))
        variables.append(VariableSpec(f"{role.value}{k}", role, tuple(f"s{j}" for j in range(card))))
    d = int(rng.integers(1, max_dim + 1))
    n = int(np.prod([v.cardinality for v in variables]))
    T = rng.uniform(-1.0, 1.0, size=(n, d))
    return FamilySpec(tuple(variables), d, T, np.zeros(n), name=f"random_{variant.value}")


def random_dataset(rng: np.random.Generator, spec: FamilySpec, n: int = 32) -> Dataset:
    """Rows with COND and OBS symbols drawn uniformly."""
    names = spec.names_with_role(Role.COND, Role.OBS)
    cards = [spec.variable(nm).cardinality for nm in names]
    return Dataset(tuple(
        {nm: int(rng.integers(c)) for nm, c in zip(names, cards)} for _ in range(n)
    ))
