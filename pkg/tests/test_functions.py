import json

import pytest

from cutroom.errors import (
    CorpusTooLarge,
    EmptyGallery,
    EmptyIndex,
    EmptyTimelineInput,
    MalformedStructuredOutput,
    PermutationViolation,
)
from cutroom.functions import (
    ActionExecutor,
    ClipTrim,
    GalleryReorder,
    TimelineReorder,
    brainstorm,
    brainstorm_prompt,
    extract_structured_object,
    overview,
    overview_prompt,
    retrieve_and_present,
    storyboard,
    storyboard_prompt,
    trim_clip,
    trim_prompt,
)
from cutroom.providers import FunctionCall, ProviderScript, ScriptedProvider
from cutroom.vectorstore import VectorStore, indexed_text_for
from conftest import golden, make_asset, make_project, rule


def provider_with(rules, fallback=None, **kwargs):
    return ScriptedProvider(
        completion_script=ProviderScript(rules=rules, fallback=fallback), **kwargs
    )


class TestPromptFidelity:
    def test_overview_prompt_starts_with_preamble(self):
        prompt = overview_prompt([make_asset(0)])
        assert prompt.startswith(golden("overview_preamble.txt"))

    def test_brainstorm_prompt_starts_with_preamble(self):
        prompt = brainstorm_prompt([make_asset(0)], "general")
        assert prompt.startswith(golden("brainstorm_preamble.txt"))

    def test_storyboard_prompt_starts_with_preamble(self):
        prompt = storyboard_prompt([make_asset(0)], None)
        assert prompt.startswith(golden("storyboard_preamble.txt"))

    def test_trim_prompt_starts_with_preamble(self):
        prompt = trim_prompt(make_asset(0), "keep the sunset")
        assert prompt.startswith(golden("trim_preamble.txt"))


class TestOverview:
    def test_chat_text_is_completion_with_no_ui_change(self):
        provider = provider_with([], fallback="Themes:\n- Outdoors: Video 0, Video 1")
        outcome = overview(provider, [make_asset(0), make_asset(1)])
        assert outcome.chat_text == "Themes:\n- Outdoors: Video 0, Video 1"
        assert outcome.ui_effect is None

    def test_empty_gallery(self):
        with pytest.raises(EmptyGallery):
            overview(provider_with([], fallback="x"), [])

    def test_prompt_contains_every_title_exactly_once(self):
        seen = {}

        class Spy(ScriptedProvider):
            def complete(self, req):
                seen["prompt"] = req.prompt
                return "ok"

        assets = [make_asset(i, title=f"Unique Title {i:02d}") for i in range(15)]
        overview(Spy(), assets)
        for asset in assets:
            assert seen["prompt"].count(asset.narration.title) == 1

    def test_corpus_too_large(self):
        assets = [make_asset(i, summary="s " * 50) for i in range(10)]
        with pytest.raises(CorpusTooLarge):
            overview(provider_with([], fallback="x"), assets, prompt_budget=50)


class TestBrainstorm:
    def test_default_guidance_is_general(self):
        seen = {}

        class Spy(ScriptedProvider):
            def complete(self, req):
                seen["prompt"] = req.prompt
                return "ideas"

        brainstorm(Spy(), [make_asset(0)])
        assert "Creative guidance: general" in seen["prompt"]

    def test_guidance_passthrough_verbatim(self):
        seen = {}

        class Spy(ScriptedProvider):
            def complete(self, req):
                seen["prompt"] = req.prompt
                seen["temperature"] = req.temperature
                return "ideas"

        brainstorm(Spy(), [make_asset(0)], "pet-themed shorts")
        assert "Creative guidance: pet-themed shorts" in seen["prompt"]
        assert seen["temperature"] == pytest.approx(0.7)

    def test_ideas_rendered_unmodified(self):
        ideas = "Idea 1: use ID=0 and ID=2 for a morning montage."
        outcome = brainstorm(provider_with([], fallback=ideas), [make_asset(0)])
        assert outcome.chat_text == ideas
        assert outcome.ui_effect is None


class TestStructuredExtraction:
    def test_last_object_wins(self):
        text = 'first {"a": 1} then the real one {"b": [1, 2]}'
        assert extract_structured_object(text) == {"b": [1, 2]}

    def test_nested_objects_parse(self):
        text = 'Answer: {"storyboard": "x", "meta": {"n": 1}}'
        assert extract_structured_object(text)["meta"] == {"n": 1}

    def test_no_object_returns_none(self):
        assert extract_structured_object("no json here") is None


def storyboard_json(ids, text="Scene 1: Video (ID=0), opening."):
    return json.dumps({"storyboard": text, "video_ids": ids})


class TestStoryboard:
    def test_valid_permutation_returns_reorder_effect(self):
        assets = [make_asset(i) for i in range(3)]
        provider = provider_with([], fallback=storyboard_json([2, 0, 1]))
        result, outcome = storyboard(provider, assets)
        assert result.video_ids == (2, 0, 1)
        assert outcome.ui_effect == TimelineReorder(ids=(2, 0, 1))
        assert outcome.chat_text == "Scene 1: Video (ID=0), opening."

    def test_single_clip_only_permutation(self):
        provider = provider_with([], fallback=storyboard_json([5], "Scene 1: solo"))
        result, _ = storyboard(provider, [make_asset(5)])
        assert result.video_ids == (5,)

    def test_duplicate_ids_violate_after_one_reask(self):
        provider = provider_with([], fallback=storyboard_json([0, 0, 1]))
        with pytest.raises(PermutationViolation):
            storyboard(provider, [make_asset(i) for i in range(3)])
        assert len(provider.log) == 2

    def test_reask_prompt_names_the_violation(self):
        provider = provider_with(
            [rule("previous reply was invalid", storyboard_json([1, 0], "fixed"))],
            fallback=storyboard_json([0, 0]),
        )
        result, _ = storyboard(provider, [make_asset(0), make_asset(1)])
        assert result.video_ids == (1, 0)

    def test_malformed_json_reask_then_fail(self):
        provider = provider_with([], fallback="no json at all")
        with pytest.raises(MalformedStructuredOutput):
            storyboard(provider, [make_asset(0)])
        assert len(provider.log) == 2

    def test_guidance_appears_in_prompt(self):
        prompt = storyboard_prompt([make_asset(0)], "from indoor to outdoor")
        assert "Narrative guidance: from indoor to outdoor" in prompt

    def test_missing_guidance_asks_model_to_invent_storyline(self):
        prompt = storyboard_prompt([make_asset(0)], None)
        assert "Invent a storyline" in prompt

    def test_empty_timeline(self):
        with pytest.raises(EmptyTimelineInput):
            storyboard(provider_with([], fallback="x"), [])

    def test_string_ids_are_coerced(self):
        provider = provider_with([], fallback=storyboard_json(["1", "0"]))
        result, _ = storyboard(provider, [make_asset(0), make_asset(1)])
        assert result.video_ids == (1, 0)


def trim_answer(segment):
    return f"Final Answer: {json.dumps({'segment': segment})}"


class TestTrim:
    def test_last_five_seconds_of_twenty(self):
        asset = make_asset(0, duration_s=20)
        provider = provider_with(
            [rule("Give me the last 5 seconds", trim_answer([15, 20, "the final stretch"]))]
        )
        result = trim_clip(provider, asset, (0, 20), "Give me the last 5 seconds")
        assert (result.start_s, result.end_s) == (20 - 5, 20)
        assert result.matched
        assert result.rationale == "the final stretch"

    def test_empty_segment_means_no_match(self):
        provider = provider_with([], fallback=trim_answer([]))
        result = trim_clip(provider, make_asset(0), (0, 10), "find a unicorn")
        assert not result.matched

    def test_out_of_range_clamped(self):
        asset = make_asset(0, duration_s=20)
        provider = provider_with([], fallback=trim_answer([-2, 25, "wide"]))
        result = trim_clip(provider, asset, (0, 20), "everything")
        assert (result.start_s, result.end_s) == (0, 20)

    def test_prose_wrapped_final_answer(self):
        provider = provider_with(
            [], fallback='Sure! Final Answer: {"segment": [3, 8, "the action part"]} Hope that helps.'
        )
        result = trim_clip(provider, make_asset(0), (0, 10), "the action")
        assert (result.start_s, result.end_s) == (3, 8)

    def test_non_integer_bounds_reask_then_fail(self):
        provider = provider_with([], fallback=trim_answer([2.5, 8.1, "floats"]))
        with pytest.raises(MalformedStructuredOutput):
            trim_clip(provider, make_asset(0), (0, 10), "x")
        assert len(provider.log) == 2

    def test_reversed_segment_is_malformed(self):
        provider = provider_with([], fallback=trim_answer([8, 3, "backwards"]))
        with pytest.raises(MalformedStructuredOutput):
            trim_clip(provider, make_asset(0), (0, 10), "x")

    def test_string_integer_bounds_are_coerced(self):
        provider = provider_with([], fallback=trim_answer(["2", "6", "quoted"]))
        result = trim_clip(provider, make_asset(0), (0, 10), "x")
        assert (result.start_s, result.end_s) == (2, 6)

    def test_reask_reminder_can_recover(self):
        provider = provider_with(
            [rule("could not be parsed", trim_answer([1, 4, "fixed"]))],
            fallback="gibberish",
        )
        result = trim_clip(provider, make_asset(0), (0, 10), "x")
        assert (result.start_s, result.end_s) == (1, 4)

    def test_prompt_covers_full_clip_not_current_window(self):
        asset = make_asset(0, duration_s=6)
        prompt = trim_prompt(asset, "anything")
        for t in range(6):
            assert f"{t}: second {t} of video 0" in prompt


class TestRetrieveAndPresent:
    def setup_store(self):
        provider = ScriptedProvider(embedding_dim=16)
        store = VectorStore(provider)
        assets = {
            i: make_asset(i, title=f"Title {i}", summary=f"About topic {i}.") for i in range(5)
        }
        for asset in assets.values():
            store.upsert(asset)
        return store, assets

    def test_self_match_ranks_first(self):
        store, assets = self.setup_store()
        outcome = retrieve_and_present(store, assets, indexed_text_for(assets[3]))
        assert isinstance(outcome.ui_effect, GalleryReorder)
        assert outcome.ui_effect.ranking.ids[0] == 3

    def test_ranking_length_equals_gallery_size(self):
        store, assets = self.setup_store()
        outcome = retrieve_and_present(store, assets, "any query")
        assert sorted(outcome.ui_effect.ranking.ids) == sorted(assets)

    def test_chat_lists_top_three_titles_in_rank_order(self):
        store, assets = self.setup_store()
        outcome = retrieve_and_present(store, assets, "some query")
        assert outcome.chat_text.startswith("Sorted the gallery by relevance. Top matches:\n")
        listed = [line.split(". ", 1)[1] for line in outcome.chat_text.splitlines()[1:]]
        expected = [assets[i].narration.title for i in outcome.ui_effect.ranking.ids[:3]]
        assert listed == expected

    def test_empty_index_propagates(self):
        provider = ScriptedProvider(embedding_dim=16)
        with pytest.raises(EmptyIndex):
            retrieve_and_present(VectorStore(provider), {}, "query")


class TestActionExecutor:
    def build(self, tmp_path, completion_rules=None, fallback=None, n=3):
        provider = ScriptedProvider(
            completion_script=ProviderScript(rules=completion_rules or [], fallback=fallback),
            embedding_dim=16,
        )
        project = make_project(tmp_path, n_assets=n)
        store = VectorStore(provider)
        for asset in project.gallery.assets.values():
            store.upsert(asset)
        return ActionExecutor(provider, store, project), project

    def test_storyboard_call_reorders_timeline(self, tmp_path):
        executor, project = self.build(tmp_path, fallback=storyboard_json([2, 0, 1]))
        project.add_to_timeline([0, 1, 2])
        executor.execute_call(FunctionCall(name="Storyboard"))
        assert project.timeline_ids() == [2, 0, 1]

    def test_storyboard_violation_leaves_timeline_bit_identical(self, tmp_path):
        executor, project = self.build(tmp_path, fallback=storyboard_json([0, 0, 1]))
        project.add_to_timeline([0, 1, 2])
        before = json.dumps(project.timeline_state(), sort_keys=True)
        with pytest.raises(PermutationViolation):
            executor.execute_call(FunctionCall(name="Storyboard"))
        assert json.dumps(project.timeline_state(), sort_keys=True) == before

    def test_retrieve_call_reorders_gallery(self, tmp_path):
        executor, project = self.build(tmp_path, fallback="unused")
        outcome = executor.execute_call(FunctionCall(name="Retrieve", args={"query": "topic"}))
        assert project.gallery.display_order == outcome.ui_effect.ranking.ids

    def test_trim_command_applies_window_and_rationale(self, tmp_path):
        executor, project = self.build(
            tmp_path,
            completion_rules=[rule("Trimming command:", trim_answer([2, 7, "the best part"]))],
        )
        project.add_to_timeline([0])
        result = executor.trim_command(0, "keep the best part")
        clip = project.timeline_clip(0)
        assert (clip.start_s, clip.end_s) == (2, 7)
        assert clip.trim_rationale == "the best part"
        assert result.matched

    def test_trim_no_match_leaves_window_unchanged(self, tmp_path):
        executor, project = self.build(
            tmp_path, completion_rules=[rule("Trimming command:", trim_answer([]))]
        )
        project.add_to_timeline([0])
        executor.trim_command(0, "something absent")
        clip = project.timeline_clip(0)
        assert (clip.start_s, clip.end_s) == (0, 10)
        assert clip.trim_rationale is None
