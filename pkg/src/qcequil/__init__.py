"""Quasi-cyclic LDPC constructions and their charge-equilibrium reading.

Exponent matrices, lifting and code families live in :mod:`qcequil.codes`;
Tanner-graph analysis in :mod:`qcequil.tanner`; Boltzmann and syndrome
energies in :mod:`qcequil.boltzmann`; Coulomb equilibria in
:mod:`qcequil.equilibrium`; the charge-to-circulant mapping in
:mod:`qcequil.chargemap`; permanents and normalizers in
:mod:`qcequil.partition`; spherical gauge checks in :mod:`qcequil.gauge`.
"""

from .circulant import ZERO_BLOCK, ExponentMatrix, MetExponentMatrix, cpm_from_shift
from .codes import lift, lift_met
from .exceptions import DomainError, FormatError, ResourceError

__version__ = "0.1.0"
