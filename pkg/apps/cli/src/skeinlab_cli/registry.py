"""
Check registry: every verification a run can execute, grouped by suite.

A registry entry is a task. Built-in tasks call a verifier of
`skeinlab_core` and declare the check ids it reports, so `skeinlab list` can
answer without running anything. Manifest tasks wrap one manifest check each.

Core Features:
- **Static listing**: `list_checks` returns `(check_id, anchor)` pairs sorted by
  check id from the declarations alone.
- **Collision detection**: a manifest check may not reuse a built-in id.
- **Manifest discovery**: the packaged manifests, or every `*.json` file in
  `SKEINLAB_MANIFEST_DIR` when it is set.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from skeinlab_core.calculus import verify_expression_formulas, verify_matrix_calculus
from skeinlab_core.character import (
    ANCHOR as A_ANCHOR,
    verify_amat,
    verify_b_sequences,
    verify_character_n,
    verify_degree_separation,
)
from skeinlab_core.errors import ConfigError, ManifestParseError
from skeinlab_core.families import B_ANCHOR, S51_ANCHOR, verify_family_identities
from skeinlab_core.hashing import manifest_hash
from skeinlab_core.manifest import Manifest, load_manifests, manifest_paths
from skeinlab_core.reduction import (
    CASES,
    L1_ANCHOR,
    S53_ANCHOR,
    S54_ANCHOR,
    Trace,
    verify_case_derivations,
    verify_equivalences,
    verify_L1_closure,
    verify_quantum_relations,
    verify_quotient_basis,
    verify_specialization,
    verify_swap_equivariance,
)
from skeinlab_core.results import CheckResult

from .models import SUITES, RunConfig

G2_ANCHOR = "Lemma G2"


@dataclass
class TaskContext:
    config: RunConfig
    trace: Trace | None = None


@dataclass(frozen=True)
class CheckTask:
    """One unit of parallel work and the checks it reports."""

    name: str
    suite: str
    checks: tuple[tuple[str, str], ...]
    run: Callable[[TaskContext], list[CheckResult]] = field(compare=False)


def _family_checks() -> tuple[tuple[str, str], ...]:
    b = [
        "relation-eta-1",
        "relation-eta-2",
        "c-anchor",
        "c-times-r",
        "relation-c",
        "relation-lambda",
        "coincide",
        "eta-closed-form",
        "eta-leading-term",
        "c-small-values",
        "gamma-closed-form",
    ]
    return (
        *((f"appB.{name}", B_ANCHOR) for name in b),
        ("appB.dickson-bridge", A_ANCHOR),
        ("sec51.lambda-1", S51_ANCHOR),
        ("sec51.lambda-2", S51_ANCHOR),
        ("sec51.phi-leading", "Lemma L1 (2)"),
        ("g2.final-2-aux", G2_ANCHOR),
    )


def _character_n_checks(n: int) -> tuple[tuple[str, str], ...]:
    names = ["rep-condition", "traces", "det", "mode-agreement"]
    if n == 1:
        names.append("phi-identities")
    return tuple((f"appA.{name}.n{n}", A_ANCHOR) for name in names)


def builtin_tasks(config: RunConfig) -> list[CheckTask]:
    """Built-in tasks for the suites selected in `config`."""
    tasks = [
        CheckTask(
            "family-identities",
            "families",
            _family_checks(),
            lambda ctx: verify_family_identities(ctx.config.kmax, ctx.config.nmax),
        ),
        CheckTask(
            "matrix-calculus",
            "matrix",
            (
                ("appB.sigma-power", B_ANCHOR),
                ("appB.right-action", B_ANCHOR),
                ("appB.right-action-det", B_ANCHOR),
            ),
            lambda ctx: verify_matrix_calculus(ctx.config.kmax, ctx.config.nmax),
        ),
        CheckTask(
            "expression-formulas",
            "matrix",
            (("appB.expression", B_ANCHOR), ("appB.action", B_ANCHOR)),
            lambda ctx: verify_expression_formulas(ctx.config.kmax, ctx.config.nmax),
        ),
        CheckTask(
            "g2-equivalences",
            "appendixC",
            (("g2.equiv-1", G2_ANCHOR), ("g2.equiv-2", G2_ANCHOR)),
            lambda ctx: verify_equivalences(),
        ),
        CheckTask(
            "l1-closure",
            "appendixC",
            (
                *(
                    (f"sec51.l1-item3.case-{m}-{n}", L1_ANCHOR)
                    for m in range(2)
                    for n in range(2)
                ),
                ("sec51.l1-product-ordering", L1_ANCHOR),
            ),
            lambda ctx: verify_L1_closure(),
        ),
        CheckTask(
            "case-derivations",
            "reduction",
            tuple(
                (f"sec53.case.{m}.{n}", f"{S53_ANCHOR} Case {case}")
                for case, (m, n) in CASES.items()
            ),
            lambda ctx: verify_case_derivations(),
        ),
        CheckTask(
            "quantum-relations",
            "reduction",
            (
                ("sec53.quantum-effects", S53_ANCHOR),
                ("sec53.rho1-r-free", S53_ANCHOR),
                ("sec53.bracket-span", S53_ANCHOR),
            ),
            lambda ctx: verify_quantum_relations(ctx.trace),
        ),
        CheckTask(
            "specialization",
            "reduction",
            (("sec53.specialization", S53_ANCHOR),),
            lambda ctx: [verify_specialization()],
        ),
        CheckTask(
            "swap-equivariance",
            "reduction",
            (("sec53.swap-equivariance", S53_ANCHOR),),
            lambda ctx: [verify_swap_equivariance()],
        ),
        CheckTask(
            "quotient-basis",
            "quotient",
            (("sec54.quotient-basis", S54_ANCHOR),),
            lambda ctx: [verify_quotient_basis()],
        ),
        CheckTask(
            "character-common",
            "character",
            (
                ("appA.amat", A_ANCHOR),
                ("appA.b-sequence", A_ANCHOR),
                *(
                    (f"appA.degree-separation.{name}", A_ANCHOR)
                    for name in ("zero", "sigma1", "constant", "evaluation", "random")
                ),
            ),
            lambda ctx: [
                verify_amat(mode=ctx.config.mode),
                verify_b_sequences(ctx.config.n_values),
                *verify_degree_separation(),
            ],
        ),
    ]
    for n in config.n_values:
        tasks.append(
            CheckTask(
                f"character-n{n}",
                "character",
                _character_n_checks(n),
                lambda ctx, n=n: verify_character_n(n, ctx.config.mode, ctx.config.precision),
            )
        )
    return [t for t in tasks if t.suite in config.suites]


def default_manifest_dir() -> Path:
    return Path(str(resources.files("skeinlab_cli") / "manifests"))


def load_registered_manifests(config: RunConfig) -> list[Manifest]:
    """
    Loads every manifest of the configured directory.

    Raises:
        ManifestParseError: on any malformed manifest, a duplicate check id or
            a manifest naming an unknown suite.
    """
    directory = config.manifest_dir or default_manifest_dir()
    manifests = load_manifests(manifest_paths(directory))
    for m in manifests:
        if m.suite not in SUITES:
            raise ManifestParseError(f"unknown suite {m.suite!r}", m.source)
    return manifests


def _manifest_tasks(manifests: Sequence[Manifest], suites: Sequence[str]) -> list[CheckTask]:
    tasks = []
    for m in manifests:
        if m.suite not in suites:
            continue
        for check in m.checks:
            tasks.append(
                CheckTask(
                    check.check_id,
                    m.suite,
                    ((check.check_id, check.anchor),),
                    lambda ctx, check=check: [check.run()],
                )
            )
    return tasks


@dataclass
class Registry:
    tasks: list[CheckTask]
    manifests: list[Manifest]

    @property
    def manifest_hash(self) -> str:
        return manifest_hash((Path(m.source).name, m.document) for m in self.manifests)

    def check_ids(self) -> list[str]:
        return [cid for cid, _ in self.list_checks()]

    def list_checks(self) -> list[tuple[str, str]]:
        """Every registered `(check_id, anchor)`, sorted by check id."""
        return sorted(pair for task in self.tasks for pair in task.checks)


def build_registry(config: RunConfig) -> Registry:
    """
    Builds the registry for `config`.

    Raises:
        ManifestParseError: see `load_registered_manifests`.
        ConfigError: if a manifest check reuses a built-in check id.
    """
    manifests = load_registered_manifests(config)
    builtin = builtin_tasks(config.model_copy(update={"suites": SUITES}))
    owned = {cid for task in builtin for cid, _ in task.checks}
    for m in manifests:
        for check in m.checks:
            if check.check_id in owned:
                raise ConfigError(
                    f"manifest check {check.check_id!r} collides with a built-in check",
                    source=m.source,
                )
    tasks = [t for t in builtin if t.suite in config.suites]
    tasks.extend(_manifest_tasks(manifests, config.suites))
    return Registry(tasks, manifests)
