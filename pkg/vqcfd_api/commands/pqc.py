from vqcfd_api.commands.registry import register_command
from vqcfd_api.models.app import PqcOptimizer, PqcRun, validate_section
from vqcfd_api.models.quantum import SpsaConfig, TrainBudget
from vqcfd_api.quantum import EncodedVector, encode_vector, smooth_target
from vqcfd_api.reports import write_run_manifest, write_vector


def configure(parser):
    parser.add_argument("--size", type=int, help="target length (power of two)")
    parser.add_argument("--layers", type=int, help="ansatz layers")
    parser.add_argument("--optimizer", choices=[o.value for o in PqcOptimizer], help="training optimizer")


def train(run: PqcRun, seed: int) -> EncodedVector:
    target = run.target if run.target is not None else smooth_target(run.size)
    if run.optimizer == PqcOptimizer.spsa:
        opt = SpsaConfig(max_iters=run.maxiter, seed=seed)
    else:
        opt = TrainBudget(maxiter=run.maxiter, restarts=run.restarts, seed=seed)
    return encode_vector(target, run.layers, opt)


@register_command("pqc train", help="encode a vector in the ansatz and read it back", configure=configure)
def pqc_train(args, app):
    updates = {key: getattr(args, key) for key in ("size", "layers", "optimizer") if getattr(args, key) is not None}
    run = validate_section(PqcRun, {**app.pqc.model_dump(), **updates}, "pqc")
    encoded = train(run, app.seed)

    out = app.output_dir / "pqc"
    outputs = [
        write_vector(out / "target.csv", encoded.target),
        write_vector(out / "theta.csv", encoded.theta),
        write_vector(out / "recovered.csv", encoded.recovered),
    ]
    write_run_manifest(app.model_copy(update={"pqc": run}), "pqc train", outputs)
    return {"fidelity": encoded.fidelity, "linf": encoded.linf, "evaluations": encoded.evaluations}
