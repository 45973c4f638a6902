"""
Document Formats and Types

JSON documents exchanged through the command line: dual elements, dyadic
group paths, Hölder families and Hölder reports. Each document converts
from and to its core object; coefficients are keyed by basis text and
listed in basis order.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional

from ..core.action import HolderFamily
from ..core.construct import (
    ConstructionSettings,
    DyadicGroupPath,
    HolderReport,
    forest_algebra,
    word_algebra,
)
from ..core.dual import EXACT, FLOAT, DualElement, TruncatedAlgebra, format_scalar, parse_scalar
from ..core.errors import BasisMismatchError, ValidationError
from ..core.forests import parse_tree
from ..core.shuffle import Alphabet


class DocumentType(Enum):
    """Document format tags"""
    DUAL_ELEMENT = "roughforge.dual_element"
    GROUP_PATH = "roughforge.group_path"
    HOLDER_FAMILY = "roughforge.holder_family"
    HOLDER_REPORT = "roughforge.holder_report"


def _letter(text: str) -> Any:
    return parse_tree(text) if text.strip().startswith("[") else int(text)


def algebra_from_description(description: Mapping[str, Any]) -> TruncatedAlgebra:
    """Rebuild the truncated algebra named by a basis description"""
    kind = description["algebra"]
    n = int(description["N"])
    if kind == "bck":
        return forest_algebra(n, tuple(int(d) for d in description["decorations"]))
    letters = tuple(_letter(str(a)) for a in description["letters"])
    weights = tuple(Fraction(str(w)) for w in description["weights"])
    alphabet = Alphabet(letters, weights)
    if kind == "shuffle":
        return word_algebra(alphabet, n)
    if kind == "aniso":
        return word_algebra(alphabet)
    raise ValidationError(f"unknown algebra {kind!r}")


def _basis_fields(data: Mapping[str, Any]) -> Dict[str, Any]:
    keys = ("algebra", "N", "decorations", "letters", "weights")
    return {k: data[k] for k in keys if k in data}


def _value(value: Any, mode: str) -> Any:
    return format_scalar(value) if mode == EXACT else float(value)


@dataclass
class DualElementDocument:
    """
    A functional on a truncated basis.

    Coefficients map basis text to a scalar, or to a list of scalars for a
    time-dependent functional sampled on the dyadic grid.
    """
    basis: Dict[str, Any]
    coefficients: Dict[str, Any]
    scalar_mode: str = EXACT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": DocumentType.DUAL_ELEMENT.value,
            **self.basis,
            "scalar_mode": self.scalar_mode,
            "coefficients": self.coefficients,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DualElementDocument":
        return cls(
            basis=_basis_fields(data),
            coefficients=dict(data["coefficients"]),
            scalar_mode=data.get("scalar_mode", EXACT),
        )

    @classmethod
    def from_element(cls, element: DualElement) -> "DualElementDocument":
        return cls(dict(element.algebra.basis.describe()), element.to_dict(), element.mode)

    def to_element(self, algebra: Optional[TruncatedAlgebra] = None) -> DualElement:
        algebra = algebra or algebra_from_description(self.basis)
        samples = {len(v) for v in self.coefficients.values() if isinstance(v, list)}
        if len(samples) > 1:
            raise ValidationError("time-dependent coefficients must share one sample count")
        if not samples:
            return DualElement.from_mapping(algebra, self.coefficients, self.scalar_mode)
        points = samples.pop()
        coeffs = algebra.zeros(self.scalar_mode, (points,))
        for text, value in self.coefficients.items():
            row = value if isinstance(value, list) else [value] * points
            coeffs[algebra.basis.lookup(text)] = [parse_scalar(v, self.scalar_mode) for v in row]
        return DualElement(algebra, coeffs)


@dataclass
class GroupPathDocument:
    """
    States of a dyadic group path plus everything needed to rebuild it.

    `states` maps basis text to the values at the 2^depth + 1 grid points;
    the unit row is included.
    """
    basis: Dict[str, Any]
    depth: int
    level: int
    gamma: str
    construction: Dict[str, Any]
    states: Dict[str, List[Any]]
    scalar_mode: str = FLOAT
    holder: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "format": DocumentType.GROUP_PATH.value,
            **self.basis,
            "depth": self.depth,
            "level": self.level,
            "gamma": self.gamma,
            "scalar_mode": self.scalar_mode,
            "construction": self.construction,
            "states": self.states,
        }
        if self.holder is not None:
            result["holder"] = self.holder
        return result

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GroupPathDocument":
        return cls(
            basis=_basis_fields(data),
            depth=int(data["depth"]),
            level=int(data["level"]),
            gamma=str(data["gamma"]),
            construction=dict(data["construction"]),
            states={k: list(v) for k, v in data["states"].items()},
            scalar_mode=data.get("scalar_mode", FLOAT),
            holder=data.get("holder"),
        )

    @classmethod
    def from_path(cls, path: DyadicGroupPath, holder: Optional[HolderReport] = None) -> "GroupPathDocument":
        algebra = path.algebra
        states = {
            algebra.basis.key(i): [_value(v, path.mode) for v in path.states[i]]
            for i in range(algebra.size)
        }
        return cls(
            basis=dict(algebra.basis.describe()),
            depth=path.depth,
            level=path.level,
            gamma=str(path.gamma),
            construction=path.settings.to_dict(),
            states=states,
            scalar_mode=path.mode,
            holder=holder.to_dict() if holder is not None else None,
        )

    def to_path(self) -> DyadicGroupPath:
        algebra = algebra_from_description(self.basis)
        points = 2**self.depth + 1
        states = algebra.zeros(self.scalar_mode, (points,))
        for text, row in self.states.items():
            if len(row) != points:
                raise ValidationError(f"state row {text!r} has {len(row)} values, expected {points}")
            try:
                index = algebra.basis.lookup(text)
            except KeyError as e:
                raise BasisMismatchError(f"{text!r} is not a basis element") from e
            states[index] = [parse_scalar(v, self.scalar_mode) for v in row]
        return DyadicGroupPath(
            algebra,
            self.depth,
            states,
            self.level,
            Fraction(self.gamma),
            ConstructionSettings.from_dict(self.construction),
        )


@dataclass
class HolderFamilyDocument:
    """Tree-indexed functions on the dyadic grid"""
    depth: int
    values: Dict[str, List[float]]
    gamma: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"format": DocumentType.HOLDER_FAMILY.value, "depth": self.depth}
        if self.gamma is not None:
            result["gamma"] = self.gamma
        result["values"] = self.values
        return result

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "HolderFamilyDocument":
        return cls(int(data["depth"]), {k: list(v) for k, v in data["values"].items()}, data.get("gamma"))

    @classmethod
    def from_family(cls, family: HolderFamily, gamma: Optional[Fraction] = None) -> "HolderFamilyDocument":
        return cls(family.depth, family.to_dict(), str(gamma) if gamma is not None else None)

    def to_family(self) -> HolderFamily:
        return HolderFamily.from_mapping(self.values, self.depth)


@dataclass
class HolderReportDocument:
    """Hölder constants with the exponents they were measured against"""
    report: HolderReport
    label: str = "holder"
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"format": DocumentType.HOLDER_REPORT.value, "label": self.label, **self.report.to_dict(), **self.extra}

