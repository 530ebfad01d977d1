"""Exception hierarchy shared by all modules.

Every error carries a machine-readable ``code`` used by the CLI to build
defect reports.
"""


class DDGError(Exception):
    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


# mesh construction
class NonManifold(DDGError):
    code = "non_manifold"


class InconsistentOrientation(DDGError):
    code = "inconsistent_orientation"


class Disconnected(DDGError):
    code = "disconnected"


class NotSimplyConnected(DDGError):
    code = "not_simply_connected"


# geometry
class DegenerateFace(DDGError):
    code = "degenerate_face"


class MeshMismatch(DDGError):
    code = "mesh_mismatch"


class CoincidentVertices(DDGError):
    code = "coincident_vertices"


class VertexAtInfinity(DDGError):
    code = "vertex_at_infinity"


# solver / analysis
class SingularSystem(DDGError):
    code = "singular_system"


class MissingBoundaryData(DDGError):
    code = "missing_boundary_data"


class NotHarmonic(DDGError):
    code = "not_harmonic"


class IncompatibleRates(DDGError):
    code = "incompatible_rates"


class IntegrationDefect(DDGError):
    code = "integration_defect"


class ClosureDefect(DDGError):
    code = "closure_defect"


class NotRealizable(DDGError):
    code = "not_realizable"


class NotHolomorphic(DDGError):
    code = "not_holomorphic"


class NotMinimal(DDGError):
    code = "not_minimal"
