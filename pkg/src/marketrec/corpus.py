"""Data model, file loading, and derived user profiles for the three-source corpus.

A corpus combines marketplace data (products, purchases), social data
(interactions, group memberships, interest tags), and location data
(favored, shared, and monitored location records). All tables are loaded
from delimited text files with a header row and validated for referential
integrity; the loaded corpus is immutable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

SOCIAL_KINDS = ("love", "comment", "wallpost")
LOCATION_KINDS = ("favored", "shared", "monitored")

ENTITY_KINDS = (
    "purchases",
    "sellers",
    "categories",
    "groups",
    "interests",
    "favored_locations",
    "shared_locations",
    "monitored_locations",
)

MAX_CATEGORY_DEPTH = 4

CORPUS_FILES = {
    "products": "products.csv",
    "purchases": "purchases.csv",
    "social": "social.csv",
    "groups": "groups.csv",
    "interests": "interests.csv",
    "locations": "locations.csv",
}

_HEADERS = {
    "products": ["product_id", "seller_id", "category_path"],
    "purchases": ["buyer_id", "product_id"],
    "social": ["actor_id", "target_id", "kind"],
    "groups": ["user_id", "group_id"],
    "interests": ["user_id", "interest_id"],
    "locations": ["user_id", "location_id", "kind", "event_id"],
}


class CorpusError(Exception):
    """Base class for corpus loading and validation failures."""


class MalformedRowError(CorpusError):
    """A row does not conform to its file's schema."""

    def __init__(self, file: str, line: int, field: str, message: str):
        super().__init__(f"{file}:{line}: field '{field}': {message}")
        self.file = file
        self.line = line
        self.field = field


class DanglingReferenceError(CorpusError):
    """A row references an entity that does not exist."""

    def __init__(self, entity: str, message: str):
        super().__init__(message)
        self.entity = entity


class DuplicateProductError(CorpusError):
    """The same product id appears more than once in the product table."""

    def __init__(self, product_id: str, message: str):
        super().__init__(message)
        self.product_id = product_id


@dataclass(frozen=True)
class Product:
    id: str
    seller: str
    category_path: tuple[str, ...]  # ordered top level -> low level, length <= 4


@dataclass(frozen=True)
class Purchase:
    buyer: str
    product: str


@dataclass(frozen=True)
class SocialInteraction:
    actor: str
    target: str
    kind: str  # love | comment | wallpost


@dataclass(frozen=True)
class Membership:
    user: str
    group: str


@dataclass(frozen=True)
class InterestTag:
    user: str
    interest: str


@dataclass(frozen=True)
class LocationRecord:
    user: str
    location: str
    kind: str  # favored | shared | monitored
    event_key: Optional[str] = None  # set iff kind == "monitored"


@dataclass(frozen=True)
class EntityProfile:
    """The deduplicated set of entities of one kind associated with a user."""

    user: str
    entity_kind: str
    entities: frozenset[str]


@dataclass(frozen=True)
class Corpus:
    """Immutable, validated view over all six source tables.

    ``users`` is the user universe: every user id referenced anywhere.
    Users present in only some sources are legal; profile lookups for them
    yield empty sets for the missing kinds.
    """

    products: Mapping[str, Product]
    purchases: tuple[Purchase, ...]
    social: tuple[SocialInteraction, ...]
    memberships: tuple[Membership, ...]
    interests: tuple[InterestTag, ...]
    locations: tuple[LocationRecord, ...]
    users: frozenset[str]
    _profile_cache: dict = field(
        default_factory=dict, repr=False, compare=False, hash=False
    )

    def entity_profiles(self, kind: str) -> Mapping[str, EntityProfile]:
        """Per-user profiles for one entity kind, cached after first build."""
        if kind not in self._profile_cache:
            self._profile_cache[kind] = build_entity_profiles(self, kind)
        return self._profile_cache[kind]


def top_level_category(product: Product) -> Optional[str]:
    """Highest-level category of a product, or None for uncategorized products."""
    return product.category_path[0] if product.category_path else None


def low_level_category(product: Product) -> Optional[str]:
    """Lowest-level category of a product, or None for uncategorized products."""
    return product.category_path[-1] if product.category_path else None


def load_corpus(data_dir: str | Path) -> Corpus:
    """Load a corpus from a directory using the standard file names."""
    base = Path(data_dir)
    return load_corpus_paths(**{key: base / name for key, name in CORPUS_FILES.items()})


def load_corpus_paths(
    products: str | Path,
    purchases: str | Path,
    social: str | Path,
    groups: str | Path,
    interests: str | Path,
    locations: str | Path,
) -> Corpus:
    """Load and validate a corpus from explicit per-source file paths.

    Raises MalformedRowError, DanglingReferenceError, or DuplicateProductError
    on the first violation found. Loading is deterministic: identical files
    yield an identical corpus.
    """
    product_table = _load_products(products)
    purchase_rows = _load_purchases(purchases, product_table)
    social_rows = _load_social(social)
    membership_rows = _load_pairs(groups, "groups", Membership)
    interest_rows = _load_pairs(interests, "interests", InterestTag)
    location_rows = _load_locations(locations)

    users = set()
    users.update(p.buyer for p in purchase_rows)
    for s in social_rows:
        users.add(s.actor)
        users.add(s.target)
    users.update(m.user for m in membership_rows)
    users.update(t.user for t in interest_rows)
    users.update(r.user for r in location_rows)

    return Corpus(
        products=product_table,
        purchases=tuple(purchase_rows),
        social=tuple(social_rows),
        memberships=tuple(membership_rows),
        interests=tuple(interest_rows),
        locations=tuple(location_rows),
        users=frozenset(users),
    )


def with_purchases(corpus: Corpus, purchases: Iterable[Purchase]) -> Corpus:
    """A corpus sharing every table except the purchase rows.

    The user universe is preserved so that users whose purchases were
    filtered out (for example by a train/test split) remain known.
    """
    return Corpus(
        products=corpus.products,
        purchases=tuple(purchases),
        social=corpus.social,
        memberships=corpus.memberships,
        interests=corpus.interests,
        locations=corpus.locations,
        users=corpus.users,
    )


def entity_sets(corpus: Corpus, kind: str) -> dict[str, frozenset[str]]:
    """Per-user entity sets for one kind, covering every user in the universe.

    For kind "purchases" the set holds product ids bought by the user;
    "sellers" the sellers of those products; "categories" the union of all
    category path entries of purchased products. The remaining kinds come
    straight from their tables. Users without records map to the empty set.
    """
    if kind not in ENTITY_KINDS:
        raise ValueError(f"unknown entity kind: {kind!r}")
    acc: dict[str, set[str]] = {user: set() for user in corpus.users}
    if kind in ("purchases", "sellers", "categories"):
        for purchase in corpus.purchases:
            product = corpus.products[purchase.product]
            if kind == "purchases":
                acc[purchase.buyer].add(product.id)
            elif kind == "sellers":
                acc[purchase.buyer].add(product.seller)
            else:
                acc[purchase.buyer].update(product.category_path)
    elif kind == "groups":
        for membership in corpus.memberships:
            acc[membership.user].add(membership.group)
    elif kind == "interests":
        for tag in corpus.interests:
            acc[tag.user].add(tag.interest)
    else:
        location_kind = {
            "favored_locations": "favored",
            "shared_locations": "shared",
            "monitored_locations": "monitored",
        }[kind]
        for record in corpus.locations:
            if record.kind == location_kind:
                acc[record.user].add(record.location)
    return {user: frozenset(values) for user, values in acc.items()}


def build_entity_profiles(corpus: Corpus, kind: str) -> dict[str, EntityProfile]:
    """EntityProfile per user for one kind; empty profiles for users without data."""
    return {
        user: EntityProfile(user=user, entity_kind=kind, entities=values)
        for user, values in entity_sets(corpus, kind).items()
    }


def serialize_profiles(profiles: Mapping[str, EntityProfile]) -> str:
    """Byte-stable sorted text form of a profile mapping, one user per line."""
    lines = []
    for user in sorted(profiles):
        entities = ",".join(sorted(profiles[user].entities))
        lines.append(f"{user}\t{entities}")
    return "\n".join(lines) + "\n"


def _read_rows(path: str | Path, table: str):
    """Yield (line_number, row) for each data row, after checking the header."""
    expected = _HEADERS[table]
    name = str(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {name}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRowError(name, 1, expected[0], "missing header row")
        if header != expected:
            raise MalformedRowError(
                name, 1, expected[0], f"header must be {','.join(expected)}"
            )
        for line, row in enumerate(reader, start=2):
            if not row:
                continue  # blank line
            if len(row) != len(expected):
                raise MalformedRowError(
                    name, line, expected[0], f"expected {len(expected)} fields, got {len(row)}"
                )
            yield name, line, row


def _require(value: str, file: str, line: int, field_name: str) -> str:
    if not value:
        raise MalformedRowError(file, line, field_name, "must be non-empty")
    return value


def _load_products(path) -> dict[str, Product]:
    table: dict[str, Product] = {}
    for name, line, (product_id, seller_id, raw_path) in _read_rows(path, "products"):
        _require(product_id, name, line, "product_id")
        _require(seller_id, name, line, "seller_id")
        if product_id in table:
            raise DuplicateProductError(
                product_id, f"{name}:{line}: duplicate product id {product_id!r}"
            )
        segments = tuple(raw_path.split("|")) if raw_path else ()
        if any(not segment for segment in segments):
            raise MalformedRowError(name, line, "category_path", "empty path segment")
        if len(segments) > MAX_CATEGORY_DEPTH:
            raise MalformedRowError(
                name, line, "category_path",
                f"at most {MAX_CATEGORY_DEPTH} levels allowed, got {len(segments)}",
            )
        if len(set(segments)) != len(segments):
            raise MalformedRowError(
                name, line, "category_path", "path entries must be distinct"
            )
        table[product_id] = Product(id=product_id, seller=seller_id, category_path=segments)
    return table


def _load_purchases(path, products: Mapping[str, Product]) -> list[Purchase]:
    rows = []
    for name, line, (buyer_id, product_id) in _read_rows(path, "purchases"):
        _require(buyer_id, name, line, "buyer_id")
        _require(product_id, name, line, "product_id")
        if product_id not in products:
            raise DanglingReferenceError(
                product_id,
                f"{name}:{line}: purchase references unknown product {product_id!r}",
            )
        rows.append(Purchase(buyer=buyer_id, product=product_id))
    return rows


def _load_social(path) -> list[SocialInteraction]:
    rows = []
    for name, line, (actor_id, target_id, kind) in _read_rows(path, "social"):
        _require(actor_id, name, line, "actor_id")
        _require(target_id, name, line, "target_id")
        if kind not in SOCIAL_KINDS:
            raise MalformedRowError(
                name, line, "kind", f"must be one of {', '.join(SOCIAL_KINDS)}"
            )
        if actor_id == target_id:
            raise MalformedRowError(name, line, "target_id", "actor and target must differ")
        rows.append(SocialInteraction(actor=actor_id, target=target_id, kind=kind))
    return rows


def _load_pairs(path, table: str, row_type):
    # (user, entity) pairs are deduplicated on load, keeping first occurrence order.
    rows = []
    seen = set()
    fields = _HEADERS[table]
    for name, line, (user_id, entity_id) in _read_rows(path, table):
        _require(user_id, name, line, fields[0])
        _require(entity_id, name, line, fields[1])
        if (user_id, entity_id) in seen:
            continue
        seen.add((user_id, entity_id))
        rows.append(row_type(user_id, entity_id))
    return rows


def _load_locations(path) -> list[LocationRecord]:
    rows = []
    for name, line, (user_id, location_id, kind, event_id) in _read_rows(path, "locations"):
        _require(user_id, name, line, "user_id")
        _require(location_id, name, line, "location_id")
        if kind not in LOCATION_KINDS:
            raise MalformedRowError(
                name, line, "kind", f"must be one of {', '.join(LOCATION_KINDS)}"
            )
        if kind == "monitored":
            _require(event_id, name, line, "event_id")
        elif event_id:
            raise MalformedRowError(
                name, line, "event_id", f"must be empty for kind {kind!r}"
            )
        rows.append(
            LocationRecord(
                user=user_id,
                location=location_id,
                kind=kind,
                event_key=event_id if kind == "monitored" else None,
            )
        )
    return rows
