"""Sensor-record ingestion, outlier filtering and stratified splitting."""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .errors import DatasetError, ValidationError

BEHAVIORS = ("lying", "standing", "sitting", "walking")
ACTIVITIES = ("sleeping", "changing clothes", "relaxing", "moving around", "cooking",
              "eating", "emergency", "working", "defecating")
EMERGENCY = "emergency"
EMERGENCY_CLASSES = ("Non-Emergency", "Emergency")
NUMERIC_FEATURES = ("accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z")

_ACTIVITY_ALIASES = {"changing cloth": "changing clothes", "changing cloths": "changing clothes"}
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class SensorRecord:
    zone: str
    accel: tuple
    gyro: tuple
    behavior: Optional[str] = None
    activity: Optional[str] = None
    timestamp: object = None

    def __post_init__(self):
        accel = tuple(float(v) for v in self.accel)
        gyro = tuple(float(v) for v in self.gyro)
        if len(accel) != 3 or len(gyro) != 3:
            raise ValidationError("accel and gyro must be triples")
        if not all(math.isfinite(v) for v in accel + gyro):
            raise ValidationError("accel/gyro components must be finite")
        if self.behavior is not None and self.behavior not in BEHAVIORS:
            raise ValidationError(f"unknown behavior label {self.behavior!r}")
        if self.activity is not None and self.activity not in ACTIVITIES:
            raise ValidationError(f"unknown activity label {self.activity!r}")
        object.__setattr__(self, "accel", accel)
        object.__setattr__(self, "gyro", gyro)

    @property
    def numeric(self):
        return self.accel + self.gyro

    @property
    def is_emergency(self):
        return self.activity == EMERGENCY

    @property
    def emergency_label(self):
        return EMERGENCY_CLASSES[1] if self.is_emergency else EMERGENCY_CLASSES[0]


@dataclass(frozen=True)
class ColumnMapping:
    """CSV header names for each record field. Empty string = column absent."""

    zone: str = "zone"
    accel_x: str = "accel_x"
    accel_y: str = "accel_y"
    accel_z: str = "accel_z"
    gyro_x: str = "gyro_x"
    gyro_y: str = "gyro_y"
    gyro_z: str = "gyro_z"
    behavior: str = "behavior"
    activity: str = "activity"
    timestamp: str = "timestamp"

    REQUIRED = ("zone",) + NUMERIC_FEATURES

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown column-mapping keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class SplitDataset:
    train: tuple
    test: tuple
    seed: int
    train_fraction: float


def normalize_label(value):
    v = " ".join(value.strip().lower().replace("_", " ").replace("-", " ").split())
    return _ACTIVITY_ALIASES.get(v, v)


def _parse_label(raw, allowed, what, row):
    if raw is None or raw.strip() == "":
        return None
    label = normalize_label(raw)
    if label not in allowed:
        raise DatasetError(f"unknown {what} label {raw!r}", row)
    return label


def load_csv(path, mapping: ColumnMapping = ColumnMapping()) -> list:
    """Read sensor records from a comma-separated file with a header row."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if not header:
            return []
        for key in ColumnMapping.REQUIRED:
            col = getattr(mapping, key)
            if col not in header:
                raise DatasetError(f"missing required column {col!r} (for {key})")
        optional = {k: getattr(mapping, k) for k in ("behavior", "activity", "timestamp")}
        optional = {k: c for k, c in optional.items() if c and c in header}

        records = []
        for i, row in enumerate(reader, start=1):
            try:
                values = [float(row[getattr(mapping, k)]) for k in NUMERIC_FEATURES]
            except (TypeError, ValueError):
                raise DatasetError("unparseable numeric value", i) from None
            if not all(math.isfinite(v) for v in values):
                raise DatasetError("non-finite numeric value", i)
            zone = (row[mapping.zone] or "").strip().lower()
            if not zone:
                raise DatasetError("empty zone label", i)
            ts = None
            if "timestamp" in optional:
                raw_ts = (row[optional["timestamp"]] or "").strip()
                ts = int(raw_ts) if _INT_RE.match(raw_ts) else (raw_ts or None)
            records.append(SensorRecord(
                zone=zone, accel=values[:3], gyro=values[3:],
                behavior=_parse_label(row.get(optional.get("behavior", "")), BEHAVIORS, "behavior", i),
                activity=_parse_label(row.get(optional.get("activity", "")), ACTIVITIES, "activity", i),
                timestamp=ts,
            ))
    return records


def save_csv(records, path, mapping: ColumnMapping = ColumnMapping()):
    cols = ["timestamp", "zone", *NUMERIC_FEATURES, "behavior", "activity"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([getattr(mapping, c) for c in cols])
        for r in records:
            writer.writerow([
                "" if r.timestamp is None else r.timestamp, r.zone,
                *(repr(v) for v in r.numeric),
                r.behavior or "", r.activity or "",
            ])


def _outlier_mask(matrix, z_threshold):
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    z = np.abs(matrix - mean) / safe
    z[:, std == 0] = 0.0
    return (z <= z_threshold).all(axis=1)


def remove_outliers(records, z_threshold: float = 3.0) -> list:
    """Drop records whose |z-score| on any numeric feature exceeds the threshold.

    Filtering repeats until no record is removed, so the result is a fixed
    point (idempotent).  A pass that would remove every remaining record is
    not applied.
    """
    if not z_threshold > 0:
        raise ValidationError("z_threshold must be > 0")
    kept = list(records)
    while len(kept) > 1:
        mask = _outlier_mask(np.array([r.numeric for r in kept]), z_threshold)
        if mask.all() or not mask.any():
            break
        kept = [r for r, keep in zip(kept, mask) if keep]
    return kept


def train_size(n, train_fraction):
    """ceil(train_fraction * n), guarded against float noise (0.75*295 -> 222)."""
    return min(n, math.ceil(train_fraction * n - 1e-9))


def _allocate(class_sizes, n_train, train_fraction):
    # largest-remainder allocation; ties go to the earlier class
    quotas = [train_fraction * n for n in class_sizes]
    alloc = [min(n, math.floor(q + 1e-9)) for q, n in zip(quotas, class_sizes)]
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    remaining = n_train - sum(alloc)
    for i in order:
        if remaining <= 0:
            break
        if alloc[i] < class_sizes[i]:
            alloc[i] += 1
            remaining -= 1
    return alloc


def split(records, train_fraction: float = 0.75, seed: int = 0,
          stratify: Optional[Sequence] = None) -> SplitDataset:
    """Seeded, optionally label-stratified train/test partition.

    ``stratify`` is a sequence of labels aligned with ``records``; ``None``
    treats the data as a single stratum.  The train set has
    ``ceil(train_fraction * N)`` records and each stratum's train share is
    within one record of ``train_fraction`` times its size.
    """
    if not 0 < train_fraction < 1:
        raise ValidationError("train_fraction must be in (0, 1)")
    records = list(records)
    n = len(records)
    labels = list(stratify) if stratify is not None else [None] * n
    if len(labels) != n:
        raise ValidationError("stratify labels must align with records")
    rng = np.random.default_rng(seed)

    strata = {}
    for i, lab in enumerate(labels):
        strata.setdefault(lab, []).append(i)
    keys = sorted(strata, key=lambda k: (k is None, str(k)))
    groups = [strata[k] for k in keys]
    alloc = _allocate([len(g) for g in groups], train_size(n, train_fraction), train_fraction)

    train_idx, test_idx = [], []
    for group, n_tr in zip(groups, alloc):
        perm = rng.permutation(len(group))
        chosen = [group[j] for j in perm]
        train_idx.extend(chosen[:n_tr])
        test_idx.extend(chosen[n_tr:])
    train_idx = [train_idx[j] for j in rng.permutation(len(train_idx))]
    test_idx = [test_idx[j] for j in rng.permutation(len(test_idx))]
    return SplitDataset(
        train=tuple(records[i] for i in train_idx),
        test=tuple(records[i] for i in test_idx),
        seed=seed, train_fraction=train_fraction)


def save_split(split_ds: SplitDataset, train_path, test_path):
    save_csv(split_ds.train, train_path)
    save_csv(split_ds.test, test_path)


# activity observed for each (zone, behaviour) in the synthetic home
_SYNTH_ACTIVITY = {
    "bedroom": {"lying": "sleeping", "standing": "changing clothes",
                "sitting": "relaxing", "walking": "moving around"},
    "kitchen": {"lying": "emergency", "standing": "cooking",
                "sitting": "eating", "walking": "moving around"},
    "office": {"lying": "emergency", "standing": "moving around",
               "sitting": "working", "walking": "moving around"},
    "toilet": {"lying": "emergency", "standing": "moving around",
               "sitting": "defecating", "walking": "moving around"},
}


def make_synthetic_records(n_per_class: int = 60, seed: int = 0, separation: float = 10.0,
                           noise: float = 1.0, zones=tuple(_SYNTH_ACTIVITY)) -> list:
    """Gaussian behaviour clusters for demos and pipeline tests.

    Each behaviour gets an accelerometer and gyroscope centre
    ``separation * noise`` away from the others along its own axis.  Activity
    labels follow the zone: lying outside the bedroom is an emergency.
    """
    rng = np.random.default_rng(seed)
    out = []
    for b_idx, behavior in enumerate(BEHAVIORS):
        centre = np.zeros(6)
        centre[b_idx % 3] = separation * noise * (1 + b_idx // 3)
        centre[3 + b_idx % 3] = separation * noise * (1 + b_idx // 3)
        if b_idx == 3:
            centre[:] = -separation * noise
        for i in range(n_per_class):
            zone = zones[i % len(zones)]
            v = centre + rng.normal(0.0, noise, 6)
            out.append(SensorRecord(
                zone=zone, accel=tuple(v[:3]), gyro=tuple(v[3:]), behavior=behavior,
                activity=_SYNTH_ACTIVITY.get(zone, _SYNTH_ACTIVITY["kitchen"])[behavior],
                timestamp=len(out)))
    return out
