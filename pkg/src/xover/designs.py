"""Crossover design representation and combinatorial structure.

A design assigns one of t treatments to each (period, subject) cell.
The layout is stored periods-by-subjects, matching the usual printed
arrays.  This module validates the uniform-balance property, slices the
layout into period incidence matrices, builds the coincidence matrices
between tail periods, counts all treatment/subject/period/carryover
incidences (optionally under subject dropout), and classifies designs
by the cycle structure of their tail permutations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import cycle_type

TEXT_FORMAT_HEADER = "# xover-design v1"


@dataclass(frozen=True)
class CrossoverDesign:
    """A p-period, s-subject crossover design on t treatments.

    layout is a p x s integer matrix with entries in {0, ..., t-1};
    rows are periods, columns are subjects.  g is the replication
    number s // t when s is a multiple of t, else None.  grouping, when
    present, partitions the subjects into blocks of exactly t; the
    constructors attach the square-by-square grouping they build from.
    """

    t: int
    p: int
    s: int
    layout: np.ndarray
    grouping: tuple[tuple[int, ...], ...] | None = None
    g: int | None = field(default=None)

    def __post_init__(self) -> None:
        layout = np.asarray(self.layout, dtype=int)
        if layout.shape != (self.p, self.s):
            raise ValueError(
                f"layout shape {layout.shape} does not match p={self.p}, s={self.s}"
            )
        if self.p < 1 or self.s < 1 or self.t < 1:
            raise ValueError("t, p, s must all be positive")
        if layout.size and (layout.min() < 0 or layout.max() >= self.t):
            raise ValueError(f"layout entries must lie in 0..{self.t - 1}")
        layout = layout.copy()
        layout.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        g = self.s // self.t if self.s % self.t == 0 else None
        object.__setattr__(self, "g", g)
        if self.grouping is not None:
            blocks = tuple(tuple(int(i) for i in b) for b in self.grouping)
            flat = sorted(i for b in blocks for i in b)
            if flat != list(range(self.s)):
                raise ValueError("grouping must partition the subjects exactly once")
            if any(len(b) != self.t for b in blocks):
                raise ValueError(f"grouping blocks must each hold t={self.t} subjects")
            object.__setattr__(self, "grouping", blocks)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """The grouping, defaulting to contiguous runs of t subjects."""
        if self.grouping is not None:
            return self.grouping
        if self.s % self.t != 0:
            raise ValueError(
                f"no grouping given and s={self.s} is not a multiple of t={self.t}"
            )
        return tuple(
            tuple(range(b * self.t, (b + 1) * self.t)) for b in range(self.s // self.t)
        )


@dataclass(frozen=True)
class DropoutPattern:
    """Completion periods: subject i is observed in periods 1..completion[i]."""

    completion: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "completion", tuple(int(k) for k in self.completion)
        )
        if any(k < 1 for k in self.completion):
            raise ValueError("every subject must complete at least period 1")

    def check_against(self, design: CrossoverDesign) -> None:
        if len(self.completion) != design.s:
            raise ValueError(
                f"pattern length {len(self.completion)} does not match s={design.s}"
            )
        if any(k > design.p for k in self.completion):
            raise ValueError(f"completion period exceeds p={design.p}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[str, ...]


@dataclass(frozen=True)
class IncidenceSet:
    """Incidence counts over the observed cells of a design.

    n_ds / n_cs count direct and carryover occurrences per treatment and
    subject (t x s); n_dp / n_cp the same per period (t x p, carryover
    column 1 all zero since period 1 has no preceding treatment); n_dc
    counts cells by (direct, carryover) treatment pair; r_d and r_c are
    the treatment replication totals.
    """

    n_ds: np.ndarray
    n_cs: np.ndarray
    n_dp: np.ndarray
    n_cp: np.ndarray
    n_dc: np.ndarray
    r_d: np.ndarray
    r_c: np.ndarray


@dataclass(frozen=True)
class TypeWReport:
    ok: bool
    failures: tuple[str, ...]
    # cycle lengths per (group, j, k), recorded for diagnostics
    cycles: tuple[tuple[int, int, int, tuple[int, ...]], ...]


def validate_ubrmd(design: CrossoverDesign) -> ValidationReport:
    """Check uniform balance: p = t, every treatment once per subject,
    g times per period, and every ordered treatment pair in consecutive
    periods realized exactly g times with no self-precedence.
    """
    t, p, s = design.t, design.p, design.s
    failures: list[str] = []
    if p != t:
        failures.append(f"period count p={p} differs from treatment count t={t}")
    if s % t != 0:
        failures.append(f"subject count s={s} is not a multiple of t={t}")
        return ValidationReport(False, tuple(failures))
    g = s // t
    layout = design.layout
    for i in range(s):
        counts = np.bincount(layout[:, i], minlength=t)
        if p == t and not (counts == 1).all():
            failures.append(f"non-uniform column {i}: treatment counts {counts.tolist()}")
    for j in range(p):
        counts = np.bincount(layout[j, :], minlength=t)
        if not (counts == g).all():
            failures.append(f"non-uniform row {j + 1}: treatment counts {counts.tolist()}")
    prec = np.zeros((t, t), dtype=int)
    for j in range(1, p):
        np.add.at(prec, (layout[j, :], layout[j - 1, :]), 1)
    for a in range(t):
        if prec[a, a] != 0:
            failures.append(f"self-precedence for treatment {a}: count {prec[a, a]}")
        for b in range(t):
            if a != b and prec[a, b] != g:
                failures.append(
                    f"precedence count != g for pair ({a} after {b}): {prec[a, b]}"
                )
    return ValidationReport(not failures, tuple(failures))


def period_slice(design: CrossoverDesign, j: int) -> np.ndarray:
    """The t x s indicator matrix of period j (1-based): entry (h, i) is
    1 iff subject i receives treatment h in period j.
    """
    if not 1 <= j <= design.p:
        raise ValueError(f"period {j} out of range 1..{design.p}")
    m = np.zeros((design.t, design.s), dtype=int)
    m[design.layout[j - 1, :], np.arange(design.s)] = 1
    return m


def coincidence(design: CrossoverDesign, j: int, k: int) -> np.ndarray:
    """The t x t coincidence matrix between tail periods p-j and p-k.

    Entry (a, b) counts subjects treated with a in period p-j and b in
    period p-k.  Both periods must be uniform (every treatment g times),
    which makes all row and column sums g; for j = k the result is g
    times the identity.
    """
    for idx in (j, k):
        if not 0 <= idx <= design.p - 1:
            raise ValueError(f"tail index {idx} out of range 0..{design.p - 1}")
    if design.g is None:
        raise ValueError(f"s={design.s} is not a multiple of t={design.t}")
    pj = period_slice(design, design.p - j)
    pk = period_slice(design, design.p - k)
    for idx, mat in ((j, pj), (k, pk)):
        if not (mat.sum(axis=1) == design.g).all():
            raise ValueError(
                f"period {design.p - idx} is not uniform: row sums "
                f"{mat.sum(axis=1).tolist()}"
            )
    return pj @ pk.T


def incidences(
    design: CrossoverDesign, pattern: DropoutPattern | None = None
) -> IncidenceSet:
    """Incidence counts over the observed cells.

    Subject i contributes direct effects for periods 1..k_i and
    carryover effects for periods 2..k_i, where k_i is its completion
    period (p for everyone when no pattern is given).  Carryover pairs
    are counted only for consecutive observed periods of one subject.
    """
    t, p, s = design.t, design.p, design.s
    if pattern is None:
        completion = [p] * s
    else:
        pattern.check_against(design)
        completion = list(pattern.completion)
    n_ds = np.zeros((t, s), dtype=int)
    n_cs = np.zeros((t, s), dtype=int)
    n_dp = np.zeros((t, p), dtype=int)
    n_cp = np.zeros((t, p), dtype=int)
    n_dc = np.zeros((t, t), dtype=int)
    layout = design.layout
    for i in range(s):
        for j in range(completion[i]):
            d = layout[j, i]
            n_ds[d, i] += 1
            n_dp[d, j] += 1
            if j >= 1:
                c = layout[j - 1, i]
                n_cs[c, i] += 1
                n_cp[c, j] += 1
                n_dc[d, c] += 1
    return IncidenceSet(
        n_ds=n_ds,
        n_cs=n_cs,
        n_dp=n_dp,
        n_cp=n_cp,
        n_dc=n_dc,
        r_d=n_ds.sum(axis=1),
        r_c=n_cs.sum(axis=1),
    )


def truncate(design: CrossoverDesign, m: int) -> CrossoverDesign:
    """The minimal design: drop the last m periods, keeping rows 1..p-m."""
    if not 1 <= m < design.p - 1:
        raise ValueError(f"m={m} out of range 1..{design.p - 2}")
    return CrossoverDesign(
        t=design.t,
        p=design.p - m,
        s=design.s,
        layout=design.layout[: design.p - m, :],
        grouping=design.grouping,
    )


def _tail_permutation(
    design: CrossoverDesign, block: tuple[int, ...], j: int, k: int
) -> np.ndarray:
    """Restriction of the coincidence matrix between periods p-j and p-k
    to one block of subjects."""
    sub = design.layout[:, list(block)]
    t = design.t
    pj = np.zeros((t, t), dtype=int)
    pk = np.zeros((t, t), dtype=int)
    cols = np.arange(len(block))
    pj[sub[design.p - 1 - j, :], cols] = 1
    pk[sub[design.p - 1 - k, :], cols] = 1
    return pj @ pk.T


def check_type_wm(design: CrossoverDesign, m: int) -> TypeWReport:
    """Test whether the grouped design has single-cycle tail permutations.

    Requires a uniform-balanced design whose grouping (supplied, or the
    contiguous default) puts every treatment exactly once per block in
    each of the last m+1 periods.  The design passes when, for every
    block and every ordered pair of distinct tail indices j, k in 0..m,
    the block's period (t-j) to period (t-k) treatment map is a single
    cycle of length t.
    """
    if not 1 <= m <= design.p - 2:
        raise ValueError(f"m={m} out of range 1..{design.p - 2}")
    report = validate_ubrmd(design)
    if not report.ok:
        raise ValueError("design is not uniform-balanced: " + "; ".join(report.failures))
    blocks = design.blocks()
    t = design.t
    failures: list[str] = []
    cycles: list[tuple[int, int, int, tuple[int, ...]]] = []
    for l, block in enumerate(blocks):
        sub = design.layout[:, list(block)]
        for j in range(m + 1):
            counts = np.bincount(sub[design.p - 1 - j, :], minlength=t)
            if not (counts == 1).all():
                failures.append(
                    f"block {l} is not uniform in period {design.p - j}: "
                    f"treatment counts {counts.tolist()}"
                )
    if failures:
        return TypeWReport(False, tuple(failures), ())
    for l, block in enumerate(blocks):
        for j in range(m + 1):
            for k in range(m + 1):
                if j == k:
                    continue
                ct = tuple(cycle_type(_tail_permutation(design, block, j, k)))
                cycles.append((l, j, k, ct))
                if ct != (t,):
                    failures.append(
                        f"block {l}, periods {design.p - j}->{design.p - k}: "
                        f"cycle type {list(ct)} is not a single {t}-cycle"
                    )
    return TypeWReport(not failures, tuple(failures), tuple(cycles))


def _is_latin_square_block(design: CrossoverDesign, block: tuple[int, ...]) -> bool:
    sub = design.layout[:, list(block)]
    t = design.t
    if sub.shape != (t, t):
        return False
    for j in range(t):
        if not (np.bincount(sub[j, :], minlength=t) == 1).all():
            return False
    for i in range(t):
        if not (np.bincount(sub[:, i], minlength=t) == 1).all():
            return False
    return True


def _as_standalone(design: CrossoverDesign, cols: tuple[int, ...]) -> CrossoverDesign:
    return CrossoverDesign(
        t=design.t, p=design.p, s=len(cols), layout=design.layout[:, list(cols)]
    )


def classify(design: CrossoverDesign) -> str:
    """Classify a design by its replication and tail-cycle structure.

    Returns one of "not-UBRMD", "UBRMD", "type-W<m>" (largest m whose
    tail permutations are all single cycles), "ClassA-W1" (g identical
    copies of one balanced square with a single-cycle tail map), or
    "ClassB-W1" (identical copies of a two-square array whose tail maps
    are mutually transposed single cycles).  The result is unchanged by
    relabeling the treatments.
    """
    if not validate_ubrmd(design).ok:
        return "not-UBRMD"
    t = design.t
    blocks = design.blocks()
    g = len(blocks)

    sub0 = design.layout[:, list(blocks[0])]
    all_identical = all(
        np.array_equal(design.layout[:, list(b)], sub0) for b in blocks
    )
    if all_identical and _is_latin_square_block(design, blocks[0]):
        square = _as_standalone(design, blocks[0])
        if validate_ubrmd(square).ok:
            pi = _tail_permutation(design, blocks[0], 0, 1)
            if cycle_type(pi) == [t]:
                return "ClassA-W1"

    if g % 2 == 0:
        pair_cols = tuple(blocks[0]) + tuple(blocks[1])
        pair0 = design.layout[:, list(pair_cols)]
        copies_identical = all(
            np.array_equal(
                design.layout[:, list(tuple(blocks[2 * i]) + tuple(blocks[2 * i + 1]))],
                pair0,
            )
            for i in range(g // 2)
        )
        if (
            copies_identical
            and _is_latin_square_block(design, blocks[0])
            and _is_latin_square_block(design, blocks[1])
            and validate_ubrmd(_as_standalone(design, pair_cols)).ok
        ):
            pi1 = _tail_permutation(design, blocks[0], 0, 1)
            pi2 = _tail_permutation(design, blocks[1], 0, 1)
            if (
                cycle_type(pi1) == [t]
                and cycle_type(pi2) == [t]
                and np.array_equal(pi2, pi1.T)
            ):
                return "ClassB-W1"

    best = 0
    for m in range(1, design.p - 1):
        try:
            if check_type_wm(design, m).ok:
                best = m
            else:
                break
        except ValueError:
            break
    if best >= 1:
        return f"type-W{best}"
    return "UBRMD"


# ---------------------------------------------------------------------------
# text format


def write_design(design: CrossoverDesign) -> str:
    """Serialize to the versioned text format: a header comment, a
    dimension line, then one line of subject entries per period."""
    lines = [
        TEXT_FORMAT_HEADER,
        f"t={design.t} p={design.p} s={design.s}",
    ]
    for j in range(design.p):
        lines.append(" ".join(str(int(v)) for v in design.layout[j, :]))
    return "\n".join(lines) + "\n"


def parse_design(text: str) -> CrossoverDesign:
    """Parse the versioned text format, naming line and column on errors."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != TEXT_FORMAT_HEADER:
        raise ValueError(f'line 1: expected header "{TEXT_FORMAT_HEADER}"')
    if len(lines) < 2:
        raise ValueError("line 2: missing dimension line")
    dims: dict[str, int] = {}
    for col, tok in enumerate(lines[1].split()):
        if "=" not in tok:
            raise ValueError(f"line 2, token {col + 1}: expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        if key not in ("t", "p", "s"):
            raise ValueError(f"line 2, token {col + 1}: unknown key {key!r}")
        try:
            dims[key] = int(val)
        except ValueError:
            raise ValueError(
                f"line 2, token {col + 1}: {key}={val!r} is not an integer"
            ) from None
    missing = [k for k in ("t", "p", "s") if k not in dims]
    if missing:
        raise ValueError(f"line 2: missing {', '.join(missing)}")
    t, p, s = dims["t"], dims["p"], dims["s"]
    body = [ln for ln in lines[2:] if ln.strip() != ""]
    if len(body) != p:
        raise ValueError(f"expected {p} layout lines, found {len(body)}")
    layout = np.zeros((p, s), dtype=int)
    for j, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != s:
            raise ValueError(f"line {j + 3}: expected {s} entries, found {len(toks)}")
        for i, tok in enumerate(toks):
            try:
                v = int(tok)
            except ValueError:
                raise ValueError(
                    f"line {j + 3}, column {i + 1}: {tok!r} is not an integer"
                ) from None
            if not 0 <= v < t:
                raise ValueError(
                    f"line {j + 3}, column {i + 1}: treatment {v} out of range 0..{t - 1}"
                )
            layout[j, i] = v
    return CrossoverDesign(t=t, p=p, s=s, layout=layout)


def parse_pattern(text: str) -> DropoutPattern:
    """Parse a dropout pattern file: one line of completion periods."""
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if len(lines) != 1:
        raise ValueError(f"expected one line of completion periods, found {len(lines)}")
    ks: list[int] = []
    for i, tok in enumerate(lines[0].split()):
        try:
            ks.append(int(tok))
        except ValueError:
            raise ValueError(
                f"line 1, column {i + 1}: {tok!r} is not an integer"
            ) from None
    return DropoutPattern(tuple(ks))
