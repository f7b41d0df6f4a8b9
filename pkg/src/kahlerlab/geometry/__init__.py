from .chart import ChartPoint, Domain, as_point
from .metric import (MetricField, MetricJet, check_kahler, evaluate_jet, kahler_defect,
                     normal_coordinates, transform_jet)
from .models import ModelMetric, build_model, get_model, model_catalog, random_points

__all__ = [
    "ChartPoint", "Domain", "as_point", "MetricField", "MetricJet", "check_kahler",
    "evaluate_jet", "kahler_defect", "normal_coordinates", "transform_jet", "ModelMetric",
    "build_model", "get_model", "model_catalog", "random_points",
]
