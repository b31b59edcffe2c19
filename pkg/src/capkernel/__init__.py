"""Exact capitulation kernels and the five-term sequence of Galois coverings."""

from .capitulation import (CoveringDatum, SequenceReport, capitulation_kernel,
                           h1_units_and_comparison, psi_group, rescores_check, term1,
                           verify_sequence)
from .classunits import (ClassGroupData, SUnitLattice, class_dlog, is_nth_power,
                         principal_generator, recover_exponents, validate_class_group)
from .cohom import (FiniteGroup, GModule, cech_complex_split, cohomology,
                    induced_cohomology_map)
from .fgab import FGAbGroup, FGAbHom, check_exact, hermite_normal_form, smith_normal_form
from .fixtures import BuildOptions, parse_and_validate, parse_file, serialize
from .nfield import (FieldAutomorphism, FieldElement, FieldEmbedding, IdealHNF,
                     NumberField, PrimeIdeal, factor_rational_prime)
from .report import TOOL_VERSION as __version__
from .report import emit_report

__all__ = [
    "BuildOptions", "ClassGroupData", "CoveringDatum", "FGAbGroup", "FGAbHom",
    "FieldAutomorphism", "FieldElement", "FieldEmbedding", "FiniteGroup", "GModule",
    "IdealHNF", "NumberField", "PrimeIdeal", "SUnitLattice", "SequenceReport",
    "capitulation_kernel", "cech_complex_split", "check_exact", "class_dlog", "cohomology",
    "emit_report", "factor_rational_prime", "h1_units_and_comparison",
    "hermite_normal_form", "induced_cohomology_map", "is_nth_power", "parse_and_validate",
    "parse_file", "principal_generator", "psi_group", "recover_exponents", "rescores_check",
    "serialize", "smith_normal_form", "term1", "validate_class_group", "verify_sequence",
]
