import uvicorn

from vqcfd_api.commands.registry import register_command


def configure(parser):
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--reload", action="store_true")


@register_command("serve", help="start the HTTP report service", configure=configure)
def serve(args, app):
    uvicorn.run("vqcfd_api.main:app", host=args.host, port=args.port, reload=args.reload)
    return {"served": f"{args.host}:{args.port}"}
