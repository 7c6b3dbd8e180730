"""Convergence check of the variational stepper against the classical solver."""
import logging
from dataclasses import dataclass, field

import numpy as np

from vqcfd_api import lbm
from vqcfd_api.engine import ConvergenceTrace, initial_field, vqcfd_step
from vqcfd_api.models.app import VerifyConfig
from vqcfd_api.models.quantum import StepMode

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("step", "variable", "iteration", "cost", "exact_min")

# decoded algebraic fields must match the classical trajectory to this absolute level
ALGEBRAIC_TOLERANCE = 1e-10


@dataclass
class VerificationReport:
    run: VerifyConfig
    traces: list[ConvergenceTrace] = field(default_factory=list)
    # max |decoded - classical| after each step
    deviations: list[float] = field(default_factory=list)
    parameter_count: int = 0

    @property
    def mode(self) -> StepMode:
        return self.run.engine.mode

    @property
    def gaps(self) -> list[float]:
        return [trace.gap for trace in self.traces]

    @property
    def passed(self) -> bool:
        if self.mode == StepMode.algebraic:
            return max(self.deviations, default=0.0) <= ALGEBRAIC_TOLERANCE
        return all(gap <= self.run.tolerance for gap in self.gaps)

    def rows(self):
        """Iteration 0 carries the starting cost; SPSA iterations follow from 1."""
        for trace in self.traces:
            yield (trace.step, trace.variable, 0, trace.initial_cost, trace.exact_min)
            for iteration, value in enumerate(trace.costs, start=1):
                yield (trace.step, trace.variable, iteration, value, trace.exact_min)

    def summary(self) -> dict:
        per_variable = {}
        for v in range(lbm.N_V):
            gaps = [t.gap for t in self.traces if t.variable == v]
            per_variable[str(v)] = {
                "gaps": gaps,
                "max_gap": max(gaps, default=0.0),
                "evaluations": sum(t.evaluations for t in self.traces if t.variable == v),
            }
        sim = self.run.simulation
        return {
            "mode": self.mode.value,
            "grid": [sim.nx, sim.ny],
            "steps": sim.steps,
            "n_shots": self.run.engine.n_shots,
            "init": self.run.engine.init.value,
            "traces": len(self.traces),
            "gap_tolerance": self.run.tolerance,
            "max_gap": max(self.gaps, default=0.0),
            "max_deviation": max(self.deviations, default=0.0),
            "deviations": self.deviations,
            "classical_parameters_per_step": self.parameter_count,
            "per_variable": per_variable,
            "passed": self.passed,
        }


def verify_convergence(run: VerifyConfig) -> VerificationReport:
    sim, engine = run.simulation, run.engine
    field_ = initial_field(sim, engine)
    reference = lbm.initial_state(sim)
    report = VerificationReport(run=run, parameter_count=field_.parameter_count)
    logger.info(
        f"Verifying {engine.mode.value} stepping on {sim.nx}x{sim.ny} for {sim.steps} steps "
        f"(n_q={field_.ansatz.n_q}, layers={engine.layers}, shots={engine.n_shots})"
    )

    for n in range(1, sim.steps + 1):
        field_, traces = vqcfd_step(field_, sim, engine, step=n)
        reference = lbm.step(reference, sim.boundary, sim.u_wall)
        deviation = float(np.abs(field_.decode() - reference.f).max())
        report.traces.extend(traces)
        report.deviations.append(deviation)
        logger.debug(f"step {n}: max deviation from classical {deviation:.3e}")

    logger.info(f"Verification {'passed' if report.passed else 'failed'}: max gap {max(report.gaps, default=0.0):.4f}")
    return report
