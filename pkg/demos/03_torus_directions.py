"""
Directions on the circle of characters of the torus
===================================================

For the torus every nonzero character is in the invariant.  Certificates
are open: one built for a direction keeps working for nearby directions.
"""

from sigmakit import Character, builtin, certificate_shift, sphere_scan, verify_certificate

C = builtin("torus")
report = sphere_scan(C, 2)
for xi in sorted({v.xi.coefficients for v in report.verdicts}):
    print(xi, "highest level with Yes:", report.highest_yes(Character(xi)))

cert = next(v.certificate for v in report.verdicts if v.k == 2 and v.certificate is not None)
print("certificate for", cert.xi, "claims shift", cert.epsilon)

a, b = cert.xi.coefficients
for nearby in ([10 * a + 1, 10 * b], [10 * a, 10 * b - 1], [10 * a - 1, 10 * b + 1]):
    eta = Character(nearby)
    shift, _ = certificate_shift(cert, eta)
    print(f"  at {eta}: shift {shift}, accepted {verify_certificate(cert, eta, shift).accepted}")
