import logging
import os
from concurrent.futures import ThreadPoolExecutor

import click
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

TOOL_NAME = "harmonic-zeros"
TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1

# Worker pool (created on first use)
executor = None

# Configure defaults
config = {
    "threads": int(os.getenv("HZ_THREADS", 0)),
    "grid_density": int(os.getenv("HZ_GRID_DENSITY", 24)),
    "samples_per_loop": int(os.getenv("HZ_SAMPLES_PER_LOOP", 1024)),
    "epsilon": float(os.getenv("HZ_EPSILON", 0.01)),
    "output_dir": os.getenv("HZ_OUTPUT_DIR", "out"),
    "svg_size": int(os.getenv("HZ_SVG_SIZE", 640)),
}


def worker_count():
    """Number of workers; HZ_THREADS=0 means one per CPU"""
    threads = config["threads"]
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def get_executor():
    """Get the shared worker pool"""
    global executor
    if executor is None:
        executor = ThreadPoolExecutor(
            max_workers=worker_count(), thread_name_prefix="hz-worker"
        )
    return executor


def create_cli():
    @click.group(name=TOOL_NAME)
    @click.version_option(TOOL_VERSION, prog_name=TOOL_NAME)
    @click.option("--verbose", is_flag=True, help="Enable debug logging.")
    def cli(verbose):
        """Find, count, certify and localize zeros of harmonic trinomials."""
        logging.basicConfig(
            level=logging.DEBUG if verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )

    # --- Register Commands ---
    from harmonic_zeros.commands.zeros import zeros_cmd
    from harmonic_zeros.commands.curve import curve_cmd
    from harmonic_zeros.commands.verify import verify_cmd
    from harmonic_zeros.commands.sweep import sweep_cmd

    cli.add_command(zeros_cmd, name="zeros")
    cli.add_command(curve_cmd, name="curve")
    cli.add_command(verify_cmd, name="verify")
    cli.add_command(sweep_cmd, name="sweep")

    return cli
