"""
Manifest files: declarative identity checks over formal elements.

A manifest is a JSON document listing checks. Each check declares its basis
symbols with degrees, a set of named axioms with provenance tags and a claim;
polynomial payloads use the expression syntax of `skeinlab_core.expr`. Loading
validates the document against pydantic models and parses every expression for
every parameter instance, so a malformed manifest fails before any check runs.

Core Features:
- **Located errors**: JSON syntax errors, schema violations and expression
  errors all surface as `ManifestParseError` with a line and column in the
  source file.
- **Parameter grids**: `params` maps a name to a list of integers; the check is
  instantiated once per point of the product grid and every instance must hold.
- **Routing**: a check with `eliminate` runs through `eliminate_and_verify`;
  every other check runs through `check_identity_modulo`.
- **Relabeled axioms**: `relabel` adds an axiom obtained from another by an
  index permutation of the t_S generators.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .calculus import (
    Axiom,
    AxiomSet,
    Basis,
    BasisSymbol,
    Claim,
    ClaimMode,
    FormalElement,
    Provenance,
    check_identity_modulo,
    eliminate_and_verify,
    relabel,
)
from .errors import ExpressionSyntaxError, ManifestParseError, SkeinlabError
from .expr import parse_expr
from .results import CheckResult, CheckStatus, elapsed_ms

logger = logging.getLogger(__name__)


class SymbolSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(pattern=r"^[A-Za-z_][A-Za-z_0-9]*$")
    degree: int = Field(ge=0)
    central: bool = False
    alternatives: list[int] = Field(default_factory=list)


class AxiomSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    lhs: str
    rhs: str = "0"
    provenance: Provenance
    multipliers: dict[str, int] = Field(default_factory=dict)
    left: list[str] = Field(default_factory=list)
    right: list[str] = Field(default_factory=list)

    @field_validator("provenance")
    @classmethod
    def validate_provenance(cls, v: Provenance) -> Provenance:
        if v is Provenance.DERIVED:
            raise ValueError("manifest axioms must cite the figure or text they come from")
        return v

    @field_validator("multipliers")
    @classmethod
    def validate_multipliers(cls, v: dict[str, int]) -> dict[str, int]:
        for name, exp in v.items():
            if exp < 0:
                raise ValueError(f"multiplier exponent for {name} must be >= 0")
        return v


class RelabelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    axiom: str
    permutation: dict[int, int]

    @field_validator("permutation")
    @classmethod
    def validate_permutation(cls, v: dict[int, int]) -> dict[int, int]:
        if sorted(v) != sorted(v.values()):
            raise ValueError("relabeling must permute its indices")
        return v


class ClaimSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lhs: str
    rhs: str = "0"
    mode: ClaimMode = ClaimMode.EQUIV


class CheckSpec(BaseModel):
    """One manifest entry; see the module docstring for the routing rules."""

    model_config = ConfigDict(extra="forbid")

    check_id: str = Field(min_length=1)
    anchor: str = ""
    description: str = ""
    basis: list[SymbolSpec] = Field(default_factory=list)
    axioms: list[AxiomSpec] = Field(default_factory=list)
    relabel: list[RelabelSpec] = Field(default_factory=list)
    claim: ClaimSpec
    lower_degree_bound: int = 0
    params: dict[str, list[int]] = Field(default_factory=dict)
    eliminate: list[str] = Field(default_factory=list)
    unique: bool = False
    open_question: bool = False
    expect: Literal["pass", "flagged"] = "pass"


class ManifestSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    manifest: str
    suite: str
    checks: list[CheckSpec]


# --- building ---


@dataclass(frozen=True)
class CheckInstance:
    params: dict[str, int]
    axioms: AxiomSet
    claim: Claim


@dataclass
class ManifestCheck:
    """A validated manifest check with all parameter instances built."""

    spec: CheckSpec
    source: str
    suite: str
    instances: list[CheckInstance]

    @property
    def check_id(self) -> str:
        return self.spec.check_id

    @property
    def anchor(self) -> str:
        return self.spec.anchor

    def run(self) -> CheckResult:
        return run_manifest_check(self)


@dataclass
class Manifest:
    name: str
    suite: str
    source: str
    document: Any
    checks: list[ManifestCheck]


def _locate(text: str, needle: str) -> tuple[int, int]:
    """1-based line and column of the first occurrence of `needle`, or (0, 0)."""
    index = text.find(needle)
    if index < 0:
        return 0, 0
    line = text.count("\n", 0, index) + 1
    column = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, column


def _json_fragment(value: str) -> str:
    return json.dumps(value, ensure_ascii=False)[1:-1]


def _grid(params: dict[str, list[int]]) -> Iterator[dict[str, int]]:
    names = sorted(params)
    for point in itertools.product(*(params[n] for n in names)):
        yield dict(zip(names, point))


def _word(text: str, basis: Basis) -> tuple[str, ...]:
    names = tuple(text.split())
    for name in names:
        if name not in basis:
            raise ValueError(f"undeclared basis symbol {name!r} in word {text!r}")
    return names


class _Builder:
    """Turns one `CheckSpec` into instances, translating failures to located errors."""

    def __init__(self, spec: CheckSpec, source: str, text: str) -> None:
        self.spec = spec
        self.source = source
        self.text = text
        self.basis = Basis(
            BasisSymbol(s.name, s.degree, s.central, tuple(s.alternatives)) for s in spec.basis
        )

    def fail(self, message: str, needle: str) -> ManifestParseError:
        line, column = _locate(self.text, _json_fragment(needle))
        return ManifestParseError(f"{self.spec.check_id}: {message}", self.source, line, column)

    def element(self, text: str, params: dict[str, int]) -> FormalElement:
        try:
            value = parse_expr(text, params, self.basis.words())
        except ExpressionSyntaxError as exc:
            line, column = _locate(self.text, _json_fragment(text))
            raise ManifestParseError(
                f"{self.spec.check_id}: {exc.message}",
                self.source,
                line,
                column + exc.position if line else 0,
            ) from exc
        except SkeinlabError as exc:
            raise self.fail(exc.message, text) from exc
        return FormalElement.coerce(value)

    def axiom(self, spec: AxiomSpec, params: dict[str, int]) -> Axiom:
        try:
            left = tuple(_word(w, self.basis) for w in spec.left)
            right = tuple(_word(w, self.basis) for w in spec.right)
        except ValueError as exc:
            raise self.fail(str(exc), spec.name) from exc
        return Axiom(
            name=spec.name,
            lhs=self.element(spec.lhs, params),
            rhs=self.element(spec.rhs, params),
            provenance=spec.provenance,
            multipliers=dict(spec.multipliers),
            left=left,
            right=right,
        )

    def instance(self, params: dict[str, int]) -> CheckInstance:
        axioms = [self.axiom(a, params) for a in self.spec.axioms]
        by_name = {ax.name: ax for ax in axioms}
        for rl in self.spec.relabel:
            if rl.axiom not in by_name:
                raise self.fail(f"relabel refers to unknown axiom {rl.axiom!r}", rl.name)
            base = by_name[rl.axiom]
            axioms.append(
                Axiom(
                    name=rl.name,
                    lhs=relabel(base.lhs, rl.permutation),
                    rhs=relabel(base.rhs, rl.permutation),
                    provenance=Provenance.TEXT,
                )
            )
        for symbol in self.spec.eliminate:
            if symbol not in self.basis:
                raise self.fail(f"cannot eliminate undeclared symbol {symbol!r}", symbol)
        try:
            axiom_set = AxiomSet(axioms, self.spec.lower_degree_bound, self.basis)
        except ValueError as exc:
            raise self.fail(str(exc), self.spec.check_id) from exc
        claim = Claim(
            self.element(self.spec.claim.lhs, params),
            self.element(self.spec.claim.rhs, params),
            self.spec.claim.mode,
        )
        return CheckInstance(params, axiom_set, claim)

    def build(self) -> list[CheckInstance]:
        return [self.instance(p) for p in _grid(self.spec.params)]


def _schema_error(exc: ValidationError, source: str, text: str) -> ManifestParseError:
    first = exc.errors()[0]
    path = ".".join(str(p) for p in first["loc"])
    needle = next((str(p) for p in reversed(first["loc"]) if isinstance(p, str)), "")
    line, column = _locate(text, f'"{needle}"') if needle else (0, 0)
    return ManifestParseError(f"{path}: {first['msg']}", source, line, column)


def parse_manifest(text: str, source: str = "<manifest>") -> Manifest:
    """
    Parses and builds a manifest from JSON text.

    Raises:
        ManifestParseError: on invalid JSON, a schema violation, an expression
            that does not parse or a duplicate check id.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(exc.msg, source, exc.lineno, exc.colno) from exc
    try:
        spec = ManifestSpec.model_validate(document)
    except ValidationError as exc:
        raise _schema_error(exc, source, text) from exc

    seen: set[str] = set()
    checks = []
    for check in spec.checks:
        if check.check_id in seen:
            line, column = _locate(text, f'"{check.check_id}"')
            raise ManifestParseError(
                f"duplicate check id {check.check_id!r}", source, line, column
            )
        seen.add(check.check_id)
        instances = _Builder(check, source, text).build()
        checks.append(ManifestCheck(check, source, spec.suite, instances))
    logger.debug("parsed manifest %s with %d checks", spec.manifest, len(checks))
    return Manifest(spec.manifest, spec.suite, source, document, checks)


def load_manifest(path: Path) -> Manifest:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestParseError(f"cannot read manifest: {exc}", str(path)) from exc
    return parse_manifest(text, str(path))


def load_manifests(paths: Sequence[Path]) -> list[Manifest]:
    """Loads every path in order; check ids must be unique across all of them."""
    manifests = [load_manifest(p) for p in paths]
    owner: dict[str, str] = {}
    for m in manifests:
        for c in m.checks:
            if c.check_id in owner:
                raise ManifestParseError(
                    f"check id {c.check_id!r} already defined in {owner[c.check_id]}", m.source
                )
            owner[c.check_id] = m.source
    return manifests


def manifest_paths(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise ManifestParseError("manifest directory does not exist", str(directory))
    return sorted(directory.glob("*.json"))


# --- running ---


def _run_instance(check: ManifestCheck, instance: CheckInstance) -> CheckResult:
    spec = check.spec
    if spec.eliminate:
        return eliminate_and_verify(
            instance.axioms,
            spec.eliminate,
            instance.claim,
            check_id=spec.check_id,
            anchor=spec.anchor,
        )
    return check_identity_modulo(
        instance.claim,
        instance.axioms,
        check_id=spec.check_id,
        anchor=spec.anchor,
        unique=spec.unique,
        open_question=spec.open_question,
    )


def run_manifest_check(check: ManifestCheck) -> CheckResult:
    """
    Runs every parameter instance; the worst status wins.

    A single-instance check returns the instance result unchanged. A grid
    check reports per-instance statuses under `instances`.
    """
    started = time.perf_counter()
    results = []
    for instance in check.instances:
        try:
            results.append(_run_instance(check, instance))
        except SkeinlabError as exc:
            results.append(
                CheckResult(
                    check_id=check.check_id,
                    status=CheckStatus.FAIL,
                    paper_anchor=check.anchor,
                    details={**exc.as_details(), "params": instance.params},
                )
            )
    if len(results) == 1:
        return results[0]
    rank = {CheckStatus.PASS: 0, CheckStatus.FLAGGED: 1, CheckStatus.FAIL: 2}
    worst = max((r.status for r in results), key=rank.__getitem__)
    return CheckResult(
        check_id=check.check_id,
        status=worst,
        paper_anchor=check.anchor,
        details={
            "instances": [
                {"params": inst.params, "status": r.status.value, **r.details}
                for inst, r in zip(check.instances, results)
            ]
        },
        runtime_ms=elapsed_ms(started),
    )
