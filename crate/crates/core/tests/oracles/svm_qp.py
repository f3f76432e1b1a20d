"""Reference optimum for the 20x10 soft-margin instance used by svm_oracle.rs.

Solves min 0.5|w|^2 + C sum max(0, 1 - y_i (w.x_i + b)) as a QP with cvxpy and
writes the instance and optimum as Rust constants to svm_qp_instance.rs.
Run: python3 svm_qp.py > svm_qp_instance.rs
"""
import cvxpy as cp
import numpy as np

rng = np.random.default_rng(20210510)
n, d, C = 20, 10, 1.0
X = np.round(rng.normal(size=(n, d)), 6)
w_true = rng.normal(size=d)
y = np.where(X @ w_true + 0.8 * rng.normal(size=n) > 0, 1.0, -1.0)

w = cp.Variable(d)
b = cp.Variable()
xi = cp.Variable(n)
prob = cp.Problem(
    cp.Minimize(0.5 * cp.sum_squares(w) + C * cp.sum(xi)),
    [xi >= 0, cp.multiply(y, X @ w + b) >= 1 - xi],
)
prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
hinge = np.maximum(0.0, 1 - y * (X @ w.value + b.value)).sum()
obj = 0.5 * float(w.value @ w.value) + C * hinge

print("// Generated by svm_qp.py; do not edit.")
print(f"pub const N: usize = {n};")
print(f"pub const D: usize = {d};")
print(f"pub const C: f64 = {C!r};")
print("pub const X: [[f64; D]; N] = [")
for row in X:
    print("    [" + ", ".join(repr(float(v)) for v in row) + "],")
print("];")
print("pub const Y: [bool; N] = [" + ", ".join("true" if v > 0 else "false" for v in y) + "];")
print(f"pub const OPTIMUM: f64 = {float(obj)!r};")
