"""Prompt templates and instantiation.

Templates live as text fixtures under ``templates/`` with a uniform
``{{placeholder}}`` syntax; instantiation is purely textual so emitted
prompts are byte-stable.  The ``{{image sequence}}`` placeholder marks
where frames attach on the wire and is removed from the text itself.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources

from .errors import TemplatingError
from .physics import Domain, LaunchPosition, StimulusSpec, bounce_schedule

STEP_CHOICES = (0.2, 0.4, 0.8)

FLUID_SCENE = "a glass mug being filled with water, at a constant rate"
BOUNCE_FALLING_SCENE = "a bouncy ball falling towards the ground"
BOUNCE_UPWARD_SCENE = "a bouncy ball bouncing upward after hitting the ground"


class PromptFamily(str, enum.Enum):
    MOTION_2D = "motion2d"
    GRAVITY_2D = "gravity2d"
    SCENE_CONTENT = "scene"


class PromptRole(str, enum.Enum):
    INSTRUCTION = "instruction"
    FOLLOW_UP = "followup"


@dataclass(frozen=True)
class PromptTemplate:
    family: PromptFamily
    role: PromptRole
    text: str


_PLACEHOLDER_RE = re.compile(r"\{\{([^{}]+)\}\}")


def load_template(family: PromptFamily, role: PromptRole) -> PromptTemplate:
    name = f"{family.value}_{role.value}.txt"
    text = resources.files("chaintime.templates").joinpath(name).read_text()
    return PromptTemplate(family, role, text.rstrip("\n"))


def family_for_domain(domain: Domain) -> PromptFamily:
    if domain == Domain.MOTION_2D:
        return PromptFamily.MOTION_2D
    if domain == Domain.GRAVITY_2D:
        return PromptFamily.GRAVITY_2D
    return PromptFamily.SCENE_CONTENT


def direction_for(position: LaunchPosition) -> str:
    return position.value


def scene_content_for(spec: StimulusSpec) -> str | None:
    """Scene description parameter; None for the 2D template families."""
    if spec.domain == Domain.FLUIDS:
        return FLUID_SCENE
    if spec.domain == Domain.BOUNCING:
        sched = bounce_schedule(spec, spec.input_frame_times[-1] + 10.0)
        contact_end = sched.first_contact() + sched.dwell
        if spec.input_frame_times[-1] > contact_end:
            return BOUNCE_UPWARD_SCENE
        return BOUNCE_FALLING_SCENE
    return None


def fill_prompt(template: PromptTemplate, seconds_forward: float,
                direction: str | None = None,
                scene_content: str | None = None) -> str:
    """Instantiate a template; every placeholder must be covered."""
    if seconds_forward not in STEP_CHOICES:
        raise TemplatingError(
            f"seconds_forward must be one of {STEP_CHOICES}, got {seconds_forward}")
    values = {
        "number of seconds forward": f"{seconds_forward:.1f}",
        "direction": direction,
        "scene content": scene_content,
        "image sequence": "",  # frames attach separately on the wire
    }

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in values:
            raise TemplatingError(f"unknown placeholder {{{{{name}}}}}")
        if values[name] is None:
            raise TemplatingError(f"missing parameter for placeholder {{{{{name}}}}}")
        return values[name]

    out = _PLACEHOLDER_RE.sub(substitute, template.text)
    if "{{" in out or "}}" in out:
        raise TemplatingError("unresolved placeholder tokens remain")
    return out.rstrip()


def prompt_params_for(spec: StimulusSpec) -> dict:
    """direction / scene-content arguments for one stimulus."""
    params: dict = {}
    if spec.domain == Domain.GRAVITY_2D:
        params["direction"] = direction_for(spec.params.launch_position)
    content = scene_content_for(spec)
    if content is not None:
        params["scene_content"] = content
    return params
