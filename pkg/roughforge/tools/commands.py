"""
roughforge Commands

The operations behind the command line. Every method validates its input
documents, runs one library operation and returns a dictionary with
"success": True and the result, or the error dictionary of the failure.
"""

import functools
import logging
from dataclasses import asdict
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

from ..config.settings import RunConfig, config
from ..core import action, bch, construct
from ..core.dual import EXACT, FLOAT, DualElement
from ..core.errors import PreconditionError, RoughForgeError
from ..core.forests import enumerate_trees, parse_forest
from ..core.hairer_kelly import format_expansion, pretty_expansion, psi, psi_via_partitions
from ..core.shuffle import Alphabet
from ..core.signature import signature_lift
from ..core.validator import SchemaValidator
from ..protocol.messages import (
    DualElementDocument,
    GroupPathDocument,
    HolderFamilyDocument,
    HolderReportDocument,
)
from ..protocol.transport import read_breakpoints, read_sampled_path

logger = logging.getLogger(__name__)


def _failure(error: Exception) -> Dict[str, Any]:
    if isinstance(error, RoughForgeError):
        return error.to_dict()
    return {
        "success": False,
        "error": str(error),
        "error_type": type(error).__name__,
        "precondition": "unspecified",
    }


def reported(method: Callable[..., Dict[str, Any]]) -> Callable[..., Dict[str, Any]]:
    """Turn exceptions raised by a command into its error dictionary"""

    @functools.wraps(method)
    def wrapper(*args: Any, **kwargs: Any) -> Dict[str, Any]:
        try:
            return method(*args, **kwargs)
        except (RoughForgeError, ValueError, KeyError, OSError) as e:
            logger.debug(f"{method.__name__} failed: {e}")
            return _failure(e)

    return wrapper


def max_abs_difference(a: construct.DyadicGroupPath, b: construct.DyadicGroupPath) -> float:
    """Largest coefficient difference between the states of two paths on one basis"""
    return float(np.max(np.abs(a.states.astype(np.float64) - b.states.astype(np.float64)), initial=0.0))


class RoughForgeTools:
    """
    Command layer of roughforge.

    Provides enumeration, BCH tables, lifts, the Hairer–Kelly expansion, the
    action of Hölder families, the transitivity solver, BCFP translations and
    verification reports.
    """

    def __init__(self) -> None:
        self.schema_validator = SchemaValidator()

    # ------------------------------------------------------------ documents

    def load_path(self, document: Mapping[str, Any]) -> construct.DyadicGroupPath:
        data = self.schema_validator.require(document, "group_path")
        return GroupPathDocument.from_dict(data).to_path()

    def load_family(self, document: Mapping[str, Any]) -> action.HolderFamily:
        data = self.schema_validator.require(document, "holder_family")
        return HolderFamilyDocument.from_dict(data).to_family()

    def load_element(self, document: Mapping[str, Any]) -> DualElement:
        data = self.schema_validator.require(document, "dual_element")
        return DualElementDocument.from_dict(data).to_element()

    def _path_result(self, path: construct.DyadicGroupPath, **extra: Any) -> Dict[str, Any]:
        holder = construct.holder_report(path)
        return {"success": True, "rp": GroupPathDocument.from_path(path, holder).to_dict(), **extra}

    # ------------------------------------------------------------ commands

    @reported
    def trees(self, n: int, d: int, with_zero: bool = False) -> Dict[str, Any]:
        """Enumerate the decorated trees with at most n nodes"""
        decorations = list(range(0 if with_zero else 1, d + 1))
        found = enumerate_trees(n, d, decorations)
        return {
            "success": True,
            "n": n,
            "d": d,
            "count": len(found),
            "trees": [str(t) for t in found],
        }

    @reported
    def bch(
        self,
        k: int,
        alpha: Optional[Mapping[str, Any]] = None,
        beta: Optional[Mapping[str, Any]] = None,
        n: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Descent-number coefficients of order k, and BCH_N(α, β) if both
        functionals are supplied.
        """
        result: Dict[str, Any] = {"success": True, "k": k, "rows": bch.table_rows(k)}
        if (alpha is None) != (beta is None):
            raise PreconditionError("BCH evaluation needs both alpha and beta", "bch_inputs")
        if alpha is not None and beta is not None:
            a = self.load_element(alpha)
            b = self.load_element(beta)
            value = bch.bch(a, b, n)
            result["bch"] = DualElementDocument.from_element(value).to_dict()
        return result

    @reported
    def lift(self, run: RunConfig, signature: bool = False, with_zero: bool = False) -> Dict[str, Any]:
        """Build a group path from a CSV of dyadic samples or of breakpoints"""
        self.schema_validator.require(asdict(run), "run_config")
        run.validate()
        if run.input_path is None:
            raise PreconditionError("lift needs an input CSV", "input")
        mode = EXACT if run.scalar_mode == EXACT else FLOAT
        settings = construct.ConstructionSettings.create(run.split_weight, run.z_init)
        if signature:
            pl = read_breakpoints(run.input_path, exact=mode == EXACT)
            if run.algebra != "bck":
                raise PreconditionError("signature lifts are built on forests", "algebra")
            decorations = ((0,) if with_zero else ()) + tuple(range(1, pl.d + 1))
            algebra = construct.forest_algebra(run.resolved_truncation, decorations)
            path = signature_lift(pl, run.depth, algebra, run.gamma_value, settings)
            return self._path_result(path, channels=pl.d)

        names, sampled = read_sampled_path(run.input_path, exact=mode == EXACT)
        if run.algebra == "aniso":
            gammas = [Fraction(g) for g in (run.gammas or "").split(",") if g.strip()]
            if not gammas:
                gammas = [run.gamma_value] * sampled.channels
            if len(gammas) != sampled.channels:
                raise PreconditionError(
                    f"{len(gammas)} exponents for {sampled.channels} channels", "exponents"
                )
            path = construct.build_anisotropic(
                sampled, settings, mode, Alphabet.integers(sampled.channels, gammas)
            )
        else:
            path = construct.build_isotropic(
                sampled, run.gamma_value, run.truncation, run.algebra, settings, mode, with_zero
            )
        traces = [t.to_dict() for t in path.traces]
        return self._path_result(path, channels=names, traces=traces)

    @reported
    def psi(self, tree: str, method: str = "recursive") -> Dict[str, Any]:
        """Hairer–Kelly expansion of a forest"""
        forest = parse_forest(tree)
        if method == "recursive":
            expansion = psi(forest)
        elif method == "partition":
            expansion = psi_via_partitions(forest)
        else:
            raise PreconditionError(f"unknown psi method {method!r}", "psi_method")
        return {
            "success": True,
            "tree": str(forest),
            "method": method,
            "terms": format_expansion(expansion),
            "pretty": pretty_expansion(expansion),
        }

    @reported
    def act(self, rp: Mapping[str, Any], g: Mapping[str, Any]) -> Dict[str, Any]:
        """Apply a Hölder family to a branched path"""
        path = self.load_path(rp)
        family = self.load_family(g)
        return self._path_result(action.act(family, path))

    @reported
    def solve(self, rp: Mapping[str, Any], rp2: Mapping[str, Any]) -> Dict[str, Any]:
        """The Hölder family taking the first path to the second"""
        path = self.load_path(rp)
        target = self.load_path(rp2)
        family = action.solve_translation(path, target)
        round_trip = max_abs_difference(action.act(family, path), target)
        return {
            "success": True,
            "g": HolderFamilyDocument.from_family(family, path.gamma).to_dict(),
            "round_trip_error": round_trip,
        }

    @reported
    def bcfp(
        self, rp: Mapping[str, Any], v: Mapping[str, Any], check_bound: bool = True
    ) -> Dict[str, Any]:
        """M_vX together with the Hölder family producing it"""
        path = self.load_path(rp)
        character = self.load_element(v)
        translated = action.m_v(path, character, check_bound)
        family = action.bcfp_to_action(path, character, check_bound=False)
        cross_check = action.solve_translation(path, translated)
        difference = max(family.sup_distance(cross_check).values(), default=0.0)
        result = self._path_result(
            translated,
            g=HolderFamilyDocument.from_family(family, path.gamma).to_dict(),
            cross_check_error=difference,
            chen_residual=construct.chen_residual(translated),
        )
        if check_bound:
            result["bound"] = HolderReportDocument(
                action.bcfp_bound_report(path), "bcfp_bound"
            ).to_dict()
        return result

    @reported
    def verify(
        self, rp: Mapping[str, Any], tol: Optional[float] = None, full: bool = False
    ) -> Dict[str, Any]:
        """Chen, character and Hölder checks with pass/fail per invariant"""
        path = self.load_path(rp)
        report = construct.verify_path(path, tol, full)
        return {"success": True, **report.to_dict()}

    def show_config(self) -> Dict[str, Any]:
        return {"success": True, "config": config.to_dict()}

    def get_command_descriptions(self) -> Dict[str, str]:
        return {
            "trees": "Enumerate decorated rooted trees with at most n nodes",
            "bch": "Dump the descent-number table of order k, optionally evaluate BCH",
            "lift": "Build a rough path from a sampled CSV path",
            "psi": "Print the Hairer-Kelly expansion of a tree",
            "act": "Apply a Hölder family to a branched rough path",
            "solve": "Find the Hölder family taking one branched rough path to another",
            "bcfp": "Translate a branched rough path by a constant character",
            "verify": "Check Chen, character and Hölder invariants of a rough path",
            "config": "Show the active configuration",
        }


def describe_rows(rows: List[Dict[str, str]]) -> str:
    """Fixed-width table of string rows"""
    if not rows:
        return ""
    headers = list(rows[0])
    widths = {h: max(len(h), *(len(r[h]) for r in rows)) for h in headers}
    lines = ["  ".join(h.ljust(widths[h]) for h in headers)]
    lines += ["  ".join(r[h].ljust(widths[h]) for h in headers) for r in rows]
    return "\n".join(lines)
