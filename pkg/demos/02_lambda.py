"""The weight-to-length parameter lambda of a recursive systematic code.

lambda is the smallest ratio of output weight to trellis length over error
events.  It bounds how cheaply a constituent code can stay away from the zero
state, which is what the distance argument for turbo codes needs.
"""

from fractions import Fraction

from qcturbo.rsc import RscCode, error_events, events_best_ratio, feedback_period, lambda_parameter

codes = ["7,5", "13,15", "17,15", "37,21", "23,35"]
print(f"{'code':8s} {'states':>6s} {'period':>6s} {'lambda':>7s}  best short event")
for text in codes:
    code = RscCode.from_octal(text)
    lam = lambda_parameter(code)
    short = events_best_ratio(code, 40)
    print(f"{'(' + text + ')':8s} {code.num_states:6d} {feedback_period(code):6d} {str(lam):>7s}  {short[0]} in {short[1]} steps")

# (17,15) has feedback 1 + D + D^2 + D^3 = (1 + D)^3: the minimum is approached
# by ever longer events that loop through a cycle avoiding state 0, so no finite
# event attains it.
code = RscCode(0o17, 0o15)
print("(17,15):", [str(events_best_ratio(code, k)[0]) for k in (8, 16, 32, 64)], "->", lambda_parameter(code))

# Error events of one input, with the ratio checked against lambda.
import numpy as np  # noqa: E402

code = RscCode(0o13, 0o15)
bits = np.zeros(40, np.uint8)
bits[[3, 10, 20, 27]] = 1  # feedback period 7: each pair closes
for ev in error_events(code, bits):
    print(ev, "ratio", Fraction(ev.output_weight, ev.length))
