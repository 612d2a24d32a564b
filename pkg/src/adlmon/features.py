"""Turn sensor records into numeric feature matrices."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dataset import BEHAVIORS, NUMERIC_FEATURES
from .errors import ValidationError

BEHAVIOR_FEATURES = ("accel_x", "accel_y", "accel_z")
EMERGENCY_FEATURES = NUMERIC_FEATURES + ("zone", "behavior")
FEATURE_NAMES = NUMERIC_FEATURES + ("zone", "behavior")


def parse_feature_list(spec):
    """'accel_x,accel_y' -> ('accel_x', 'accel_y'); also accepts 'accel'/'gyro' groups."""
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    out = []
    for name in spec:
        if name in ("accel", "gyro"):
            out.extend(f"{name}_{ax}" for ax in "xyz")
        elif name in FEATURE_NAMES:
            out.append(name)
        else:
            raise ValidationError(f"unknown feature {name!r}; choose from {', '.join(FEATURE_NAMES)}")
    if not out:
        raise ValidationError("feature list is empty")
    return tuple(out)


class RecordFeaturizer(TransformerMixin, BaseEstimator):
    """Select record fields as columns of a float matrix.

    ``zone`` is encoded as the index of the zone in the sorted vocabulary seen
    during ``fit`` (unseen zones get -1); ``behavior`` as its index in
    ``BEHAVIORS``.  Records carrying no behaviour label cannot use the
    ``behavior`` column.
    """

    def __init__(self, features=BEHAVIOR_FEATURES):
        self.features = features

    def fit(self, records, y=None):
        self.features_ = parse_feature_list(self.features)
        self.zones_ = tuple(sorted({r.zone for r in records}))
        self.n_features_out_ = len(self.features_)
        return self

    def transform(self, records):
        check_is_fitted(self, "features_")
        zone_idx = {z: i for i, z in enumerate(self.zones_)}
        beh_idx = {b: i for i, b in enumerate(BEHAVIORS)}
        rows = []
        for r in records:
            row = []
            for name in self.features_:
                if name == "zone":
                    row.append(zone_idx.get(r.zone, -1))
                elif name == "behavior":
                    if r.behavior is None:
                        raise ValidationError("behavior feature requested for unlabeled record")
                    row.append(beh_idx[r.behavior])
                else:
                    row.append(r.numeric[NUMERIC_FEATURES.index(name)])
            rows.append(row)
        return np.asarray(rows, dtype=float).reshape(len(rows), len(self.features_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "features_")
        return np.asarray(self.features_, dtype=object)
