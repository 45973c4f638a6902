"""
Schema Validation for roughforge documents

Every JSON document read by the command layer is checked against one of
the schemas below before any computation starts.
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import jsonschema

from .errors import ValidationError

_SCALAR = {"anyOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?[0-9.eE+\-/]+\s*$"}]}

_BASIS_PROPERTIES: Dict[str, Any] = {
    "algebra": {"type": "string", "enum": ["bck", "shuffle", "aniso"]},
    "N": {"type": "integer", "minimum": 1},
    "decorations": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
    "letters": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    "weights": {"type": "array", "items": {"type": "string"}},
}

_BASIS_RULES: List[Dict[str, Any]] = [
    {
        "if": {"properties": {"algebra": {"const": "bck"}}},
        "then": {"required": ["decorations"]},
        "else": {"required": ["letters", "weights"]},
    }
]

DUAL_ELEMENT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "format": {"const": "roughforge.dual_element"},
        **_BASIS_PROPERTIES,
        "scalar_mode": {"type": "string", "enum": ["exact", "float"]},
        "coefficients": {
            "type": "object",
            "additionalProperties": {
                "anyOf": [_SCALAR, {"type": "array", "items": _SCALAR, "minItems": 1}]
            },
        },
    },
    "required": ["algebra", "N", "coefficients"],
    "allOf": _BASIS_RULES,
    "additionalProperties": True,
}

GROUP_PATH_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "format": {"const": "roughforge.group_path"},
        **_BASIS_PROPERTIES,
        "depth": {"type": "integer", "minimum": 0},
        "level": {"type": "integer", "minimum": 1},
        "gamma": {"type": "string"},
        "scalar_mode": {"type": "string", "enum": ["exact", "float"]},
        "construction": {
            "type": "object",
            "properties": {
                "split_weight": {"type": "string"},
                "z_init": {"type": "object", "additionalProperties": _SCALAR},
            },
            "required": ["split_weight"],
        },
        "states": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": _SCALAR, "minItems": 1},
        },
    },
    "required": ["algebra", "N", "depth", "level", "gamma", "construction", "states"],
    "allOf": _BASIS_RULES,
    "additionalProperties": True,
}

HOLDER_FAMILY_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "format": {"const": "roughforge.holder_family"},
        "depth": {"type": "integer", "minimum": 0},
        "gamma": {"type": "string"},
        "values": {
            "type": "object",
            "propertyNames": {"pattern": r"^\s*\["},
            "additionalProperties": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        },
    },
    "required": ["depth", "values"],
    "additionalProperties": True,
}

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "gamma": {"type": "string", "pattern": r"^\s*[0-9]+\s*(/\s*[0-9]+)?\s*$"},
        "depth": {"type": "integer", "minimum": 0},
        "d": {"type": "integer", "minimum": 1},
        "truncation": {"type": ["integer", "null"], "minimum": 1},
        "algebra": {"type": "string", "enum": ["bck", "shuffle", "aniso"]},
        "gammas": {"type": ["string", "null"]},
        "z_init": {"type": "object", "additionalProperties": _SCALAR},
        "split_weight": {"type": "string"},
        "algebra_tol": {"type": "number", "exclusiveMinimum": 0},
        "delta_tol": {"type": "number", "exclusiveMinimum": 0},
        "input_path": {"type": ["string", "null"]},
        "output_path": {"type": ["string", "null"]},
        "scalar_mode": {"type": "string", "enum": ["float", "exact"]},
        "deterministic": {"const": True},
    },
    "additionalProperties": False,
}

SCHEMAS: Dict[str, Dict[str, Any]] = {
    "dual_element": DUAL_ELEMENT_SCHEMA,
    "group_path": GROUP_PATH_SCHEMA,
    "holder_family": HOLDER_FAMILY_SCHEMA,
    "run_config": RUN_CONFIG_SCHEMA,
}


@dataclass
class ValidationResult:
    """Result of schema validation"""
    is_valid: bool
    errors: Optional[List[str]] = None
    validated_data: Optional[Any] = None


class SchemaValidator:
    """
    JSON Schema validation for roughforge documents.

    Compiled validators are cached per schema.
    """

    def __init__(self) -> None:
        self.schema_cache: Dict[str, jsonschema.Draft7Validator] = {}

    def validate(self, data: Any, schema: Dict[str, Any]) -> ValidationResult:
        """
        Validate data against a JSON Schema.

        Args:
            data: Parsed JSON document
            schema: JSON Schema to validate against

        Returns:
            ValidationResult with validation status and any errors
        """
        try:
            schema_key = json.dumps(schema, sort_keys=True)
            if schema_key not in self.schema_cache:
                jsonschema.Draft7Validator.check_schema(schema)
                self.schema_cache[schema_key] = jsonschema.Draft7Validator(schema)
            validator = self.schema_cache[schema_key]
            errors = sorted(validator.iter_errors(data), key=lambda e: list(e.path))
            if errors:
                messages = [
                    f"{error.message} at {' -> '.join(str(x) for x in error.path) or '<root>'}"
                    for error in errors
                ]
                return ValidationResult(is_valid=False, errors=messages)
            return ValidationResult(is_valid=True, validated_data=data)
        except jsonschema.SchemaError as e:
            return ValidationResult(is_valid=False, errors=[f"Invalid schema: {e.message}"])

    def validate_document(self, data: Any, kind: str) -> ValidationResult:
        """Validate against one of the named document schemas"""
        if kind not in SCHEMAS:
            return ValidationResult(is_valid=False, errors=[f"Unknown document kind: {kind}"])
        return self.validate(data, SCHEMAS[kind])

    def require(self, data: Any, kind: str) -> Any:
        """Return `data` if it is a valid `kind` document, raise ValidationError otherwise"""
        result = self.validate_document(data, kind)
        if not result.is_valid:
            raise ValidationError(f"invalid {kind} document: " + "; ".join(result.errors or []))
        return result.validated_data
