"""Chern-Simons field on the abelian surface and a closed deformation.

Builds Q_CS for sl2 on the reduced current algebra, checks Q^2 = 0, then
deforms it by the Hodge field of an exactly closed chain.
"""
from __future__ import annotations

from hodgecor import dg_scheme as dg
from hodgecor.free_lie import delta_op
from hodgecor.pd_algebra import abelian_surface


def main() -> None:
    A = abelian_surface()
    g = dg.sl2()
    Q = dg.chern_simons_field(g, A, reduced=True)
    print("coordinates", len(Q.coords), "Q^2 = 0:", dg.square(Q).is_zero())

    F = dg.synthetic_closed_chain(A)
    print("chain terms", len(F.terms), "delta F = 0:", delta_op(A, F).is_zero())
    V = dg.hodge_field(F, g, A)
    print("[Q, V] = 0:", dg.commutator(Q, V).is_zero())
    print("(Q + eps V)^2 = 0:", dg.deformation_square(Q, V).is_zero())


if __name__ == "__main__":
    main()
