"""Standard quantum-mechanical reference for the classical double-slit fields."""

from .compare import FieldComparison, compare_fields
from .packets import bohm_velocity, packet, packet_dx, quantum_current, superposition_density

__all__ = ["FieldComparison", "bohm_velocity", "compare_fields", "packet", "packet_dx",
           "quantum_current", "superposition_density"]
