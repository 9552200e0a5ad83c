from src.shared.errors import OutOfRange
from src.features.rep_algebra.irrep_sum import IrrepSum


def exterior_power_decomposition(g: int, q: int) -> IrrepSum:
    """Wedge^q of the standard system V_1 of Sp(2g).

    V_{1^q} + V_{1^(q-2)} + ... down to Q or V_1; above q = g by duality.
    """
    if q < 0 or q > 2 * g:
        raise OutOfRange(f"exterior power {q} outside 0..{2 * g} for genus {g}")
    if q > g:
        q = 2 * g - q
    return IrrepSum.from_counts({((1,) * rows, None): 1 for rows in range(q, -1, -2)})
