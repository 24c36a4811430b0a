"""Closed-form dimension and counting formulas."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .dataset import AsymptoticDataSet, counts


@dataclass(frozen=True)
class IndexReport:
    i_hat: int
    deg_n: int
    euler: int
    genus: int
    k_c: Optional[int] = None
    theta_budget: Optional[int] = None
    crit_bound: Optional[int] = None
    wp_bound: Optional[int] = None
    wp_star_bound: Optional[int] = None

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def formal_dimension(ds: AsymptoticDataSet, genus: int = 0) -> int:
    """N+ + 2(N- + N^ + c + genus - 1)."""
    c = counts(ds)
    return c.n_plus + 2 * (c.n_minus + c.n_hat + c.c_hat + genus - 1)


def degree_normal(ds: AsymptoticDataSet, genus: int = 0) -> int:
    c = counts(ds)
    return c.n_plus + c.n_minus + c.n_hat + c.c_hat + 2 * genus - 2


def euler_characteristic(ds: AsymptoticDataSet, genus: int = 0) -> int:
    """Euler characteristic of a genus-g surface with one puncture per end."""
    return 2 - 2 * genus - len(ds.ends)


def identity_holds(ds: AsymptoticDataSet, genus: int = 0) -> bool:
    """-chi + I^ == 2 Deg(N) + N- + N^."""
    c = counts(ds)
    lhs = -euler_characteristic(ds, genus) + formal_dimension(ds, genus)
    return lhs == 2 * degree_normal(ds, genus) + c.n_minus + c.n_hat


def critical_budget(ds: AsymptoticDataSet, genus: int, k_c: int) -> dict:
    c = counts(ds)
    if not 0 <= k_c <= c.c_hat:
        raise ValueError(f"k_c must lie in [0, {c.c_hat}], got {k_c}")
    return {
        "theta_budget": c.n_plus + c.n_minus + c.n_hat + k_c + 2 * genus - 2,
        "crit_bound": c.n_minus + c.n_hat + k_c + 2 * genus - 2,
        "wp_star_bound": c.c_hat - k_c,
        "wp_bound": c.n_minus + c.n_hat + c.c_hat + 2 * genus - 2,
    }


def index_report(ds: AsymptoticDataSet, genus: int = 0, k_c: Optional[int] = None) -> IndexReport:
    extra = critical_budget(ds, genus, k_c) if k_c is not None else {}
    return IndexReport(formal_dimension(ds, genus), degree_normal(ds, genus),
                       euler_characteristic(ds, genus), genus, k_c, **extra)
