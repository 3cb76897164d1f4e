"""Certified winding numbers of z^k and sphere-map degrees."""
from stabtopo.degree import mapping_degree, winding_number
from stabtopo.fields import VectorFieldSpec, circle_loop, complex_power_field, icosphere

for k in range(-3, 4):
    d = winding_number(complex_power_field(k), circle_loop(n=64))
    print(f"z^{k:<3} winding {d.degree:>3}  {d.status:10} min|F| >= {d.min_norm:.3g}  cells {d.resolution}")
for name, comps in (("identity", ["x1", "x2", "x3"]), ("antipodal", ["-x1", "-x2", "-x3"]),
                    ("suspended z^2", ["x1^2 - x2^2", "2*x1*x2", "x3"])):
    d = mapping_degree(VectorFieldSpec(comps), icosphere(2))
    print(f"{name:14} degree {d.degree:>3}  {d.status}")
