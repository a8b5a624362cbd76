from .encoder import ApproxTag, CnfEncoder, EncodeError, initial_precision
from .gates import Gates

__all__ = ["ApproxTag", "CnfEncoder", "EncodeError", "Gates", "initial_precision"]
