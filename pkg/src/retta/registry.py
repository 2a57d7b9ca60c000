"""Service catalog and eligibility logic.

The catalog (services, their data-source needs, and per-source context
schemas) is data, not code: it ships as ``data/catalog.json`` and can be
replaced via the RETTA_CATALOG environment variable or an explicit path.
A service is offered only when the region declares every source kind the
service requires and those sources hold enough documents; "enough" is the
catalog's ``min_documents`` threshold, an explicit stand-in for adequacy.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

from .corpus import SOURCE_KINDS
from .errors import EligibilityError, NotFoundError, ValidationError

FIELD_VALUE_KINDS = ("text", "text_list", "date_range", "geo_area", "positive_int")

CATALOG_ENV_VAR = "RETTA_CATALOG"


@dataclass(frozen=True)
class FieldDescriptor:
    name: str
    value_kind: str
    required: bool


@dataclass(frozen=True)
class RegionSpec:
    """Geographical deployment target plus its declared data availability."""

    name: str
    bounding_box: tuple[float, float, float, float]  # min lat, min lon, max lat, max lon
    declared_available_sources: frozenset[str] = frozenset()

    def validate(self):
        min_lat, min_lon, max_lat, max_lon = self.bounding_box
        if min_lat > max_lat:
            raise ValidationError("bounding box min latitude exceeds max latitude")
        if min_lon > max_lon:
            raise ValidationError("bounding box min longitude exceeds max longitude")
        if not (-90 <= min_lat <= 90 and -90 <= max_lat <= 90):
            raise ValidationError("latitude out of range")
        if not (-180 <= min_lon <= 180 and -180 <= max_lon <= 180):
            raise ValidationError("longitude out of range")
        for kind in self.declared_available_sources:
            if kind not in SOURCE_KINDS:
                raise ValidationError(f"unknown source kind {kind!r}")


@dataclass(frozen=True)
class DataSourceDescriptor:
    kind: str
    display_name: str
    context_fields: tuple[FieldDescriptor, ...]

    def available_in_region(self, region: RegionSpec) -> bool:
        return self.kind in region.declared_available_sources


@dataclass(frozen=True)
class ServiceDescriptor:
    id: str
    display_name: str
    required_source_kinds: frozenset[str]
    optional_source_kinds: frozenset[str]
    min_documents: int
    boost_rule_set: tuple[str, ...] = ()

    @property
    def relevant_source_kinds(self) -> frozenset[str]:
        return self.required_source_kinds | self.optional_source_kinds


@dataclass
class Catalog:
    """Ordered service and source descriptors; immutable after load."""

    services: list[ServiceDescriptor]
    sources: list[DataSourceDescriptor]
    _by_service: dict = field(init=False, repr=False)
    _by_kind: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._by_service = {s.id: s for s in self.services}
        self._by_kind = {s.kind: s for s in self.sources}

    def service(self, service_id: str) -> ServiceDescriptor:
        try:
            return self._by_service[service_id]
        except KeyError:
            raise NotFoundError(f"unknown service {service_id!r}")

    def source(self, kind: str) -> DataSourceDescriptor:
        try:
            return self._by_kind[kind]
        except KeyError:
            raise NotFoundError(f"unknown source kind {kind!r}")


def _parse_field(obj: dict) -> FieldDescriptor:
    fd = FieldDescriptor(
        name=obj["name"], value_kind=obj["value_kind"], required=bool(obj["required"])
    )
    if not fd.name:
        raise ValidationError("field name must be nonempty")
    if fd.value_kind not in FIELD_VALUE_KINDS:
        raise ValidationError(f"unknown field value kind {fd.value_kind!r}")
    return fd


def load_catalog(path=None) -> Catalog:
    """Load the catalog from ``path``, RETTA_CATALOG, or the shipped default."""
    if path is None:
        path = os.environ.get(CATALOG_ENV_VAR)
    if path is None:
        text = resources.files("retta.data").joinpath("catalog.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"catalog is not valid JSON: {exc.msg}")

    sources = []
    for src in obj.get("sources", []):
        fields = tuple(_parse_field(f) for f in src.get("context_fields", []))
        names = [f.name for f in fields]
        if len(names) != len(set(names)):
            raise ValidationError(f"source {src['kind']!r} has duplicate context field names")
        if src["kind"] not in SOURCE_KINDS:
            raise ValidationError(f"unknown source kind {src['kind']!r}")
        sources.append(
            DataSourceDescriptor(
                kind=src["kind"], display_name=src["display_name"], context_fields=fields
            )
        )

    services = []
    for svc in obj.get("services", []):
        required = frozenset(svc["required_source_kinds"])
        optional = frozenset(svc.get("optional_source_kinds", []))
        if not required:
            raise ValidationError(f"service {svc['id']!r} requires no sources")
        if int(svc["min_documents"]) < 1:
            raise ValidationError(f"service {svc['id']!r} min_documents must be >= 1")
        for kind in required | optional:
            if kind not in SOURCE_KINDS:
                raise ValidationError(f"service {svc['id']!r}: unknown source kind {kind!r}")
        services.append(
            ServiceDescriptor(
                id=svc["id"],
                display_name=svc["display_name"],
                required_source_kinds=required,
                optional_source_kinds=optional,
                min_documents=int(svc["min_documents"]),
                boost_rule_set=tuple(svc.get("boost_rule_set", [])),
            )
        )
    return Catalog(services=services, sources=sources)


def eligible_services(
    catalog: Catalog, region: RegionSpec, stats: dict[str, int]
) -> list[ServiceDescriptor]:
    """Services whose required sources are all declared by the region and
    whose summed document count meets the threshold, in catalog order."""
    region.validate()
    out = []
    for svc in catalog.services:
        if not svc.required_source_kinds <= region.declared_available_sources:
            continue
        available_docs = sum(stats.get(kind, 0) for kind in svc.required_source_kinds)
        if available_docs < svc.min_documents:
            continue
        out.append(svc)
    return out


def available_sources(
    catalog: Catalog,
    region: RegionSpec,
    service: ServiceDescriptor,
    stats: dict[str, int] | None = None,
) -> list[DataSourceDescriptor]:
    """Descriptors relevant to the service and declared in the region.

    The service must be eligible for the region (pass the same ``stats``
    used for the eligibility check); otherwise this raises
    :class:`EligibilityError`.
    """
    if stats is not None and service not in eligible_services(catalog, region, stats):
        raise EligibilityError(f"service {service.id!r} is not offered for region {region.name!r}")
    return [
        src
        for src in catalog.sources
        if src.kind in service.relevant_source_kinds and src.available_in_region(region)
    ]


def context_schema(catalog: Catalog, kind: str) -> list[FieldDescriptor]:
    return list(catalog.source(kind).context_fields)
