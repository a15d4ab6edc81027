"""Thermodynamic characteristics of the singular potential family
2*log|sin(pi(x-c))| over the doubling map: pressure functions, extremal
Birkhoff averages, Birkhoff and L^q spectra, and the Riesz-product
equilibrium measures, with parameter scans over the singularity position."""

from .config import Config, load_config
from .errors import (BudgetExceeded, DegenerateGraph, DomainError,
                     InsufficientCurve, MassFloorViolation, SingularCylinder,
                     ThermoscopeError)
from .symbolic import (CylinderWord, SftGraph, TorusPoint, build_sft,
                       cylinder_interval, forbidden_words, shared_sft)
from .potential import (WeightBracket, birkhoff_sum, cylinder_weight_bracket,
                        g, psi, psi_bracket_arrays, psi_truncated)
from .transfer import (PressureCurve, PressureEstimate, pressure,
                       pressure_curve, pressure_sft, pressure_truncated)
from .ergodic import (EdgeGraph, EndpointEstimate, MeanCycle, endpoints,
                      howard_max_mean, karp_max_mean, max_mean_cycle,
                      maxplus_max_mean, min_mean_cycle, sft_edge_graph)
from .riesz import (AutocorrelationReport, LqFit, MeasureTable,
                    autocorrelation_check, cylinder_masses, lq_direct,
                    partial_density, partition_sum, tm_sequence)
from .spectra import (LqValue, SpectrumCurve, birkhoff_spectrum, legendre,
                      lq_via_pressure)
from .scan import (ScanTable, SemicontinuityReport, make_grid, scan_endpoints,
                   scan_pressure, semicontinuity_report)

__version__ = "0.1.0"

__all__ = [
    "Config", "load_config",
    "ThermoscopeError", "DegenerateGraph", "SingularCylinder",
    "MassFloorViolation", "BudgetExceeded", "DomainError", "InsufficientCurve",
    "TorusPoint", "CylinderWord", "SftGraph", "cylinder_interval",
    "forbidden_words", "build_sft", "shared_sft",
    "psi", "psi_truncated", "g", "birkhoff_sum", "WeightBracket",
    "cylinder_weight_bracket", "psi_bracket_arrays",
    "PressureEstimate", "PressureCurve", "pressure_sft", "pressure_truncated",
    "pressure", "pressure_curve",
    "EdgeGraph", "MeanCycle", "EndpointEstimate", "karp_max_mean",
    "howard_max_mean", "maxplus_max_mean", "max_mean_cycle", "min_mean_cycle",
    "sft_edge_graph", "endpoints",
    "MeasureTable", "LqFit", "AutocorrelationReport", "partial_density",
    "cylinder_masses", "partition_sum", "lq_direct", "tm_sequence",
    "autocorrelation_check",
    "SpectrumCurve", "LqValue", "legendre", "birkhoff_spectrum",
    "lq_via_pressure",
    "ScanTable", "SemicontinuityReport", "make_grid", "scan_pressure",
    "scan_endpoints", "semicontinuity_report",
]
