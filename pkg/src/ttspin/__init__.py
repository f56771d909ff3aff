"""Spin density matrices, entanglement criteria and dilepton tomography
for top-antitop pair production at a hadron collider."""

__version__ = "0.1.0"

from .errors import TTSpinError
from .kinematics import PhasePoint, PhysicsConfig, beta_of_mass, mass_of_beta
from .parton import Channel
from .states import TwoQubitState, concurrence_wootters, is_entangled_ppt

__all__ = [
    "__version__",
    "TTSpinError",
    "PhasePoint",
    "PhysicsConfig",
    "beta_of_mass",
    "mass_of_beta",
    "Channel",
    "TwoQubitState",
    "concurrence_wootters",
    "is_entangled_ppt",
]
