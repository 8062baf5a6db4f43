"""Big Ramsey degree types of finite structures over the coding tree T_max."""

from .classes import ClassSpec, membership
from .structures import RelStruct, Signature

__all__ = ["ClassSpec", "RelStruct", "Signature", "membership"]
