from vqcfd_api.commands.options import add_lattice_arguments, lattice_overrides
from vqcfd_api.commands.registry import register_command
from vqcfd_api.models.app import VerifyConfig, validate_section
from vqcfd_api.models.quantum import InitMode, StepMode
from vqcfd_api.reports import write_run_manifest, write_verification
from vqcfd_api.verification import verify_convergence


def configure(parser):
    add_lattice_arguments(parser)
    parser.add_argument("--mode", choices=[m.value for m in StepMode], help="algebraic or variational stepping")
    parser.add_argument("--init", choices=[m.value for m in InitMode], help="warm or cold start per step")
    parser.add_argument("--shots", type=int, help="shot budget per multi-product (default: exact)")
    parser.add_argument("--iters", type=int, help="SPSA iterations per variable and step")
    parser.add_argument("--layers", type=int, help="ansatz layers")


@register_command("vqcfd verify", help="check variational convergence against the classical solver", configure=configure)
def vqcfd_verify(args, app):
    engine = {"seed": app.seed}
    for flag, key in (("mode", "mode"), ("init", "init"), ("shots", "n_shots"), ("iters", "max_iters"), ("layers", "layers")):
        value = getattr(args, flag)
        if value is not None:
            engine[key] = value
    base = app.vqcfd
    run = validate_section(
        VerifyConfig,
        {
            "simulation": {**base.simulation.model_dump(), **lattice_overrides(args)},
            "engine": {**base.engine.model_dump(), **engine},
            "gap_tolerance": base.gap_tolerance,
        },
        "vqcfd",
    )
    report = verify_convergence(run)
    outputs = write_verification(app.output_dir, report)
    write_run_manifest(app.model_copy(update={"vqcfd": run}), "vqcfd verify", outputs)

    summary = report.summary()
    return {key: summary[key] for key in ("mode", "grid", "steps", "traces", "max_gap", "max_deviation", "passed")}
