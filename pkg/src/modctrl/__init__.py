"""Controllability of modular qubit arrays.

Exact dynamical-Lie-algebra closure on Pauli words, constructive
commutator derivations, compositional certificates and device layouts.
"""

from .certify import (Certificate, CertificateError, CompositeCertificate, DirectCertificate,
                      EntanglingCoupling, assemble, certify_direct, certify_layout, compose,
                      dumps_certificate, loads_certificate, resource_count, verify)
from .closure import ClosureCaps, ClosureGuardError, ClosureReport, LieBasis, is_controllable, lie_closure
from .constructive import (DerivationPath, IndexMove, f_cyc, f_gen, f_rem, isolate_coupling_term,
                           plan_derivation, sample_basis_audit)
from .layout import (DeviceLayout, LayoutError, build_template, bundled_layout, emit_layout,
                     generate_composite, layout_to_system, parse_layout)
from .pauli import PauliWord, SkewOperator, commutator
from .report import TOOL_VERSION as __version__
from .system import ControlSystem, instantiate_parameters

__all__ = [
    "Certificate", "CertificateError", "CompositeCertificate", "DirectCertificate",
    "EntanglingCoupling", "assemble", "certify_direct", "certify_layout", "compose",
    "dumps_certificate", "loads_certificate", "resource_count", "verify",
    "ClosureCaps", "ClosureGuardError", "ClosureReport", "LieBasis", "is_controllable", "lie_closure",
    "DerivationPath", "IndexMove", "f_cyc", "f_gen", "f_rem", "isolate_coupling_term",
    "plan_derivation", "sample_basis_audit",
    "DeviceLayout", "LayoutError", "build_template", "bundled_layout", "emit_layout",
    "generate_composite", "layout_to_system", "parse_layout",
    "PauliWord", "SkewOperator", "commutator", "ControlSystem", "instantiate_parameters",
    "__version__",
]
