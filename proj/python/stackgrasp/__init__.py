"""Brick-stack scene generation, graspability labels and grasp candidate selection."""

from ._core import (
    Error,
    add_s,
    default_config,
    generate_scene,
    generate_stack,
    gravity_height,
    is_graspable,
    label_stack,
    mssd,
    run_cli,
    solve_assignment,
    visibility_ratio,
)

__all__ = [
    "Error",
    "add_s",
    "default_config",
    "generate_scene",
    "generate_stack",
    "gravity_height",
    "is_graspable",
    "label_stack",
    "mssd",
    "run_cli",
    "solve_assignment",
    "visibility_ratio",
]
