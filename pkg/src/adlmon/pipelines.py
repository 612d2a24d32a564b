"""End-to-end evaluation runs: behaviour recognition and emergency detection."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .dataset import BEHAVIORS, EMERGENCY_CLASSES, remove_outliers, split
from .errors import ValidationError
from .evaluation import ConfusionMatrix, MetricsReport, confusion, metrics_report, prediction_table
from .features import BEHAVIOR_FEATURES, EMERGENCY_FEATURES, RecordFeaturizer, parse_feature_list
from .knn import KNNClassifier


@dataclass
class EvalResult:
    classes: tuple
    matrix: ConfusionMatrix
    report: MetricsReport
    table: list
    model: dict
    n_input: int
    n_clean: int
    n_train: int
    n_test: int
    label_name: str


def _fit_knn(records, labels, features, k, vote, scale, classes):
    feat = RecordFeaturizer(features).fit(records)
    model = KNNClassifier(k=k, vote=vote, scale=scale, classes=classes)
    model.fit(feat.transform(records), labels)
    return feat, model


def eval_behavior(records, *, k=11, vote="inverse", train_fraction=0.75, seed=0,
                  outlier_z=3.0, features=BEHAVIOR_FEATURES, scale=False,
                  test_on_train=False) -> EvalResult:
    """Outliers -> stratified split -> k-NN on behaviour labels -> confusion matrix."""
    records = list(records)
    if any(r.behavior is None for r in records):
        raise ValidationError("behaviour evaluation needs a behavior label on every record")
    clean = remove_outliers(records, outlier_z) if outlier_z else records
    parts = split(clean, train_fraction, seed, stratify=[r.behavior for r in clean])
    train = list(parts.train)
    test = train if test_on_train else list(parts.test)

    feat, model = _fit_knn(train, [r.behavior for r in train], features, k, vote, scale, BEHAVIORS)
    preds = model.predictions(feat.transform(test)) if test else []
    truth = [r.behavior for r in test]
    cm = confusion(truth, [p.label for p in preds], BEHAVIORS)
    return EvalResult(
        classes=BEHAVIORS, matrix=cm, report=metrics_report(cm) if test else None,
        table=prediction_table(truth, preds, BEHAVIORS, "Activity"),
        model=model.summary(), n_input=len(records), n_clean=len(clean),
        n_train=len(train), n_test=len(test), label_name="Activity")


def eval_emergency(records, *, k=5, vote="inverse", train_fraction=0.75, seed=0,
                   outlier_z=3.0, features=EMERGENCY_FEATURES, scale=False,
                   behavior_k=11, test_on_train=False) -> EvalResult:
    """Binary emergency / non-emergency k-NN.

    When the feature set includes ``behavior``, a behaviour model (``behavior_k``
    neighbours, accelerometer features) is trained on the training split and
    its predictions replace the behaviour label of every record, so the
    emergency model never sees ground-truth behaviour at test time.
    """
    records = list(records)
    if any(r.activity is None for r in records):
        raise ValidationError("emergency evaluation needs an activity label on every record")
    clean = remove_outliers(records, outlier_z) if outlier_z else records
    parts = split(clean, train_fraction, seed, stratify=[r.emergency_label for r in clean])
    train = list(parts.train)
    test = train if test_on_train else list(parts.test)

    if "behavior" in parse_feature_list(features):
        if any(r.behavior is None for r in train):
            raise ValidationError("behavior feature needs behaviour labels on training records")
        bk = min(behavior_k, len(train))
        bfeat, bmodel = _fit_knn(train, [r.behavior for r in train], BEHAVIOR_FEATURES,
                                 bk, vote, scale, BEHAVIORS)

        def relabel(rs):
            if not rs:
                return []
            labels = bmodel.predict(bfeat.transform(rs))
            return [dataclasses.replace(r, behavior=str(b)) for r, b in zip(rs, labels)]

        train_x, test_x = relabel(train), relabel(test)
    else:
        train_x, test_x = train, test

    feat, model = _fit_knn(train_x, [r.emergency_label for r in train], features, k, vote,
                           scale, EMERGENCY_CLASSES)
    preds = model.predictions(feat.transform(test_x)) if test_x else []
    truth = [r.emergency_label for r in test]
    cm = confusion(truth, [p.label for p in preds], EMERGENCY_CLASSES)
    return EvalResult(
        classes=EMERGENCY_CLASSES, matrix=cm, report=metrics_report(cm) if test else None,
        table=prediction_table(truth, preds, EMERGENCY_CLASSES, "Complex Activity"),
        model=model.summary(), n_input=len(records), n_clean=len(clean),
        n_train=len(train), n_test=len(test), label_name="Complex Activity")
