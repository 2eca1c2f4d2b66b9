"""Prompt instantiation: byte-equality with committed fixtures."""

from pathlib import Path

import pytest

from chaintime.errors import TemplatingError
from chaintime.physics import Domain, enumerate_stimuli
from chaintime.prompts import (
    BOUNCE_FALLING_SCENE,
    BOUNCE_UPWARD_SCENE,
    FLUID_SCENE,
    PromptFamily,
    PromptRole,
    PromptTemplate,
    family_for_domain,
    fill_prompt,
    load_template,
    prompt_params_for,
    scene_content_for,
)

FIXTURES = Path(__file__).parent / "fixtures" / "prompts"

SCENE_TAGS = {"fluid": FLUID_SCENE, "fall": BOUNCE_FALLING_SCENE, "up": BOUNCE_UPWARD_SCENE}


def fixture(name):
    return (FIXTURES / name).read_text()


class TestFixtureEquality:
    @pytest.mark.parametrize("seconds", [0.2, 0.4, 0.8])
    def test_motion_instruction(self, seconds):
        t = load_template(PromptFamily.MOTION_2D, PromptRole.INSTRUCTION)
        assert fill_prompt(t, seconds) == fixture(f"motion2d_instruction_{seconds}.txt")

    @pytest.mark.parametrize("seconds", [0.2, 0.4])
    def test_motion_followup(self, seconds):
        t = load_template(PromptFamily.MOTION_2D, PromptRole.FOLLOW_UP)
        assert fill_prompt(t, seconds) == fixture(f"motion2d_followup_{seconds}.txt")

    @pytest.mark.parametrize("seconds", [0.2, 0.4, 0.8])
    @pytest.mark.parametrize("direction",
                             ["leftbottom", "leftmiddle", "rightbottom", "rightmiddle"])
    def test_gravity_instruction(self, seconds, direction):
        t = load_template(PromptFamily.GRAVITY_2D, PromptRole.INSTRUCTION)
        got = fill_prompt(t, seconds, direction=direction)
        assert got == fixture(f"gravity2d_instruction_{seconds}_{direction}.txt")

    @pytest.mark.parametrize("seconds", [0.2, 0.4])
    def test_gravity_followup(self, seconds):
        t = load_template(PromptFamily.GRAVITY_2D, PromptRole.FOLLOW_UP)
        assert fill_prompt(t, seconds) == fixture(f"gravity2d_followup_{seconds}.txt")

    @pytest.mark.parametrize("seconds", [0.2, 0.4, 0.8])
    @pytest.mark.parametrize("tag", list(SCENE_TAGS))
    def test_scene_instruction(self, seconds, tag):
        t = load_template(PromptFamily.SCENE_CONTENT, PromptRole.INSTRUCTION)
        got = fill_prompt(t, seconds, scene_content=SCENE_TAGS[tag])
        assert got == fixture(f"scene_instruction_{seconds}_{tag}.txt")

    @pytest.mark.parametrize("seconds", [0.2, 0.4])
    def test_scene_followup(self, seconds):
        t = load_template(PromptFamily.SCENE_CONTENT, PromptRole.FOLLOW_UP)
        assert fill_prompt(t, seconds) == fixture(f"scene_followup_{seconds}.txt")


class TestAnchors:
    def test_motion_phrase(self):
        t = load_template(PromptFamily.MOTION_2D, PromptRole.INSTRUCTION)
        out = fill_prompt(t, 0.2)
        assert "simulates what this scene would look like 0.2 Seconds into the future" in out

    def test_gravity_followup_phrase(self):
        t = load_template(PromptFamily.GRAVITY_2D, PromptRole.FOLLOW_UP)
        out = fill_prompt(t, 0.4)
        assert "0.4 seconds forward into the future after the last frame that you generated" in out

    def test_no_placeholder_tokens_remain(self):
        for fam in PromptFamily:
            for role in PromptRole:
                t = load_template(fam, role)
                kw = {}
                if fam == PromptFamily.GRAVITY_2D:
                    kw["direction"] = "leftbottom"
                if fam == PromptFamily.SCENE_CONTENT:
                    kw["scene_content"] = FLUID_SCENE
                out = fill_prompt(t, 0.2, **kw)
                assert "{{" not in out and "}}" not in out


class TestErrors:
    def test_missing_parameter_named(self):
        t = load_template(PromptFamily.GRAVITY_2D, PromptRole.INSTRUCTION)
        with pytest.raises(TemplatingError, match="direction"):
            fill_prompt(t, 0.2)

    def test_unknown_placeholder_rejected(self):
        t = PromptTemplate(PromptFamily.MOTION_2D, PromptRole.INSTRUCTION,
                           "advance {{bogus thing}} now")
        with pytest.raises(TemplatingError, match="bogus thing"):
            fill_prompt(t, 0.2)

    def test_invalid_step_rejected(self):
        t = load_template(PromptFamily.MOTION_2D, PromptRole.FOLLOW_UP)
        with pytest.raises(TemplatingError):
            fill_prompt(t, 0.3)


class TestStimulusParams:
    def test_family_routing(self):
        assert family_for_domain(Domain.MOTION_2D) == PromptFamily.MOTION_2D
        assert family_for_domain(Domain.GRAVITY_2D) == PromptFamily.GRAVITY_2D
        assert family_for_domain(Domain.FLUIDS) == PromptFamily.SCENE_CONTENT
        assert family_for_domain(Domain.BOUNCING) == PromptFamily.SCENE_CONTENT

    def test_bounce_scene_content_by_partition(self):
        for spec in enumerate_stimuli(Domain.BOUNCING):
            content = scene_content_for(spec)
            part = spec.stimulus_id.rsplit("-", 1)[1]
            if part == "after":
                assert content == BOUNCE_UPWARD_SCENE
            else:
                assert content == BOUNCE_FALLING_SCENE

    def test_gravity_params(self):
        spec = enumerate_stimuli(Domain.GRAVITY_2D)[0]
        params = prompt_params_for(spec)
        assert params["direction"] in ("leftbottom", "leftmiddle",
                                       "rightbottom", "rightmiddle")
