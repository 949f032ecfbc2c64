"""Bloom-filter variants backed by a C++ core."""

import json as _json

from ._core import (
    CapabilityError,
    ConfigError,
    FormatError,
    analytic_fpp,
    capabilities,
    capability_matrix,
    formulas,
    variants,
)
from ._core import Filter as _CoreFilter

__all__ = [
    "CapabilityError",
    "ConfigError",
    "Filter",
    "FormatError",
    "analytic_fpp",
    "capabilities",
    "capability_matrix",
    "formulas",
    "variants",
]


class Filter:
    """A filter of any variant, built from a parameter dict.

    Items may be ``str`` (encoded as UTF-8) or ``bytes``.
    """

    def __init__(self, variant, params=None, seed=0, members=()):
        self._params = dict(params or {})
        self._f = _CoreFilter.build(variant, _json.dumps(self._params), seed, list(members))

    @classmethod
    def from_bytes(cls, data):
        self = cls.__new__(cls)
        self._params = {}
        self._f = _CoreFilter.from_bytes(bytes(data))
        return self

    def to_bytes(self):
        return self._f.to_bytes()

    def insert(self, item):
        """Returns False when the variant refused the item (e.g. a full table)."""
        return self._f.insert(item)

    def update(self, items):
        return sum(self._f.insert(x) for x in items)

    def query(self, item):
        return self._f.query(item)

    def remove(self, item):
        return self._f.remove(item)

    def count(self, item):
        return self._f.count(item)

    def predicted_fpp(self):
        return self._f.predicted_fpp(_json.dumps(self._params))

    def __contains__(self, item):
        return self._f.contains(item)

    def __len__(self):
        return len(self._f)

    @property
    def variant(self):
        return self._f.variant

    @property
    def capabilities(self):
        return self._f.capabilities

    @property
    def memory_bits(self):
        return self._f.memory_bits

    def __repr__(self):
        return f"Filter({self.variant!r}, n={len(self)}, memory_bits={self.memory_bits})"
