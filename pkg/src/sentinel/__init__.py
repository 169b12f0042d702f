"""Insider-threat simulation and layered SIEM correlation toolkit."""

__version__ = "0.1.0"

from .events import (ActionKind, Alert, Event, Evidence, EvidenceKind,
                     GroundTruth, Role, Scenario)
from .siem import DetectorConfig, SiemEngine, Variant, VariantConfig, variant_config
from .simkit import SimConfig, default_config, run_simulation

__all__ = [
    "ActionKind", "Alert", "Event", "Evidence", "EvidenceKind", "GroundTruth",
    "Role", "Scenario", "DetectorConfig", "SiemEngine", "Variant",
    "VariantConfig", "variant_config", "SimConfig", "default_config",
    "run_simulation", "__version__",
]
