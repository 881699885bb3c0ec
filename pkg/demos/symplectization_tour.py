"""A tour of the homogeneous extension of a multicontact chart.

Run with ``python3 demos/symplectization_tour.py``.

A multicontact structure (chart, theta) extends to a chart with one
extra nonvanishing fiber coordinate carrying the homogeneous form
``upsilon = z * theta`` and the closed form ``omega = -d(upsilon)``.
Conformal pairs downstairs lift to genuinely Hamiltonian pairs
upstairs, and the graded bracket downstairs matches the classical
bracket upstairs on the nose.
"""

from gjb import (
    Chart,
    Coefficient,
    DiffForm,
    MultiVector,
    NFormStructure,
    build,
    check_correspondence,
    exterior_derivative,
    interior_product,
    jacobi_bracket,
    lie_derivative,
    lift_conformal,
    make_conformal_data,
    nondegeneracy_check,
    poisson_bracket,
    psi_map,
)


def headline(text):
    print()
    print(text)
    print("-" * len(text))


# ---------------------------------------------------------------------------
headline("Extending a contact chart")

chart = Chart(("q", "p", "z"))
p = Coefficient.coordinate(chart, "p")
eta = DiffForm.differential(chart, "z") - DiffForm.differential(chart, "q").scale(p)
S = NFormStructure(chart, eta)

sym = build(S)
print(f"downstairs chart: {', '.join(chart.coordinates)}")
print(f"fiber coordinate: {sym.fiber}  (auto-renamed to avoid the existing z)")
print(f"upsilon = {sym.upsilon}")
print(f"omega   = {sym.omega}")
print(f"scaling field = {sym.liouville}")

report = nondegeneracy_check(sym)
print(f"omega nondegenerate: {report.ok}")

assert lie_derivative(sym.liouville, sym.omega) == sym.omega
print("checked: omega is homogeneous of weight one under the scaling field")


# ---------------------------------------------------------------------------
headline("Lifting conformal data")

def data_of(f):
    fq, fp, fz = (f.partial(name) for name in "qpz")
    X = (
        MultiVector.basis_vector(chart, "q").scale(fp)
        - MultiVector.basis_vector(chart, "p").scale(fq + p * fz)
        + MultiVector.basis_vector(chart, "z").scale(p * fp - f)
    )
    return make_conformal_data(S, DiffForm.from_scalar(f), X, -fz)


f = Coefficient.coordinate(chart, "q") ** 2
g = p * Coefficient.coordinate(chart, "z")
a, b = data_of(f), data_of(g)

lifted = lift_conformal(sym, a.x_field, a.v_field)
print(f"X_f = {a.x_field}")
print(f"lift of (X_f, V_f) = {lifted}")

# The carried-over form is Hamiltonian upstairs: its witness field
# contracts into omega to give exactly the differential of the form.
psi_f, witness = psi_map(sym, a)
print(f"psi(f) = {psi_f}")
assert witness == -lifted
assert interior_product(witness, sym.omega) == exterior_derivative(psi_f)
print("checked: i_W omega = d(psi(f)) with W the negated lift")


# ---------------------------------------------------------------------------
headline("Brackets upstairs and downstairs agree")

pa, pb = psi_map(sym, a), psi_map(sym, b)
upstairs = poisson_bracket(sym, pa, pb)
downstairs = jacobi_bracket(a, b)
print(f"{{f, g}} downstairs       = {downstairs.alpha}")
print(f"classical bracket upstairs = {upstairs}")

residual = check_correspondence(sym, a, b)
assert residual.is_zero()
print("checked: the homogenized downstairs bracket equals the upstairs bracket")
