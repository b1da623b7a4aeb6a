from grid.assembly import LocalSystem, assemble_global, assemble_subdomain, element_stiffness, load_vector
from grid.coefficients import CoefficientField, generate_coefficient, read_coefficient_file, write_coefficient_file
from grid.mesh import StructuredMesh, build_mesh

__all__ = [
    "CoefficientField",
    "LocalSystem",
    "StructuredMesh",
    "assemble_global",
    "assemble_subdomain",
    "build_mesh",
    "element_stiffness",
    "generate_coefficient",
    "load_vector",
    "read_coefficient_file",
    "write_coefficient_file",
]
