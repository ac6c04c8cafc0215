#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# irscomp - IRS-aided joint-processing CoMP beamforming and phase design
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""External conic solver for irscomp: reads a problem JSON, writes a solution JSON.

usage: conic_cvxpy.py problem.json solution.json
"""

import json
import sys
import warnings

import cvxpy as cp
import numpy as np


def solve_socp(prob):
    n = prob["num_vars"]
    x = cp.Variable(n)
    cons = []
    for c in prob["cones"]:
        a = np.array(c["a"], dtype=float).reshape(-1, n)
        b = np.array(c["b"], dtype=float)
        s = np.array(c["c"], dtype=float) @ x + c["d"]
        u = a @ x + b
        if c["type"] == "standard":
            cons.append(cp.SOC(s, u) if a.shape[0] else s >= 0)
        else:
            cons.append(cp.sum_squares(u) <= s if a.shape[0] else s >= 0)
    pr = cp.Problem(cp.Maximize(x[prob["objective_index"]]), cons)
    pr.solve(solver=cp.CLARABEL)
    return pr, {"x": None if x.value is None else x.value.tolist()}


def solve_sdp(prob):
    n = prob["size"]
    psi = [np.array(m["re"]) + 1j * np.array(m["im"]) for m in prob["psi"]]
    const = prob["constants"]
    theta = cp.Variable((n, n), hermitian=True)
    r = cp.Variable()
    cons = [theta >> 0, cp.real(cp.diag(theta)) == 1]
    for p, c in zip(psi, const):
        cons.append(cp.real(cp.trace(p @ theta)) + r <= c)
    pr = cp.Problem(cp.Maximize(r), cons)
    # Clarabel sometimes stops at "inaccurate" here; CVXOPT is the second choice.
    for solver in (cp.CLARABEL, cp.CVXOPT):
        try:
            pr.solve(solver=solver)
        except cp.error.SolverError:
            continue
        if pr.status == cp.OPTIMAL:
            break
    out = {"x": []}
    if theta.value is not None:
        out["theta"] = {"re": np.real(theta.value).tolist(), "im": np.imag(theta.value).tolist()}
    return pr, out


def main():
    warnings.filterwarnings("ignore")
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(sys.argv[1]) as f:
        prob = json.load(f)
    if prob.get("kind") == "socp":
        pr, out = solve_socp(prob)
    elif prob.get("kind") == "sdp":
        pr, out = solve_sdp(prob)
    else:
        print("unknown problem kind", file=sys.stderr)
        return 2
    if pr.status == cp.OPTIMAL:
        status = "optimal"
    elif pr.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        status = "infeasible"
    else:
        status = "max-iterations"
        print("conic_cvxpy: solver status %s" % pr.status, file=sys.stderr)
    out["status"] = status
    out["objective"] = float(pr.value) if pr.value is not None and np.isfinite(pr.value) else 0.0
    if out.get("x") is None:
        out["x"] = []
    with open(sys.argv[2], "w") as f:
        json.dump(out, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
