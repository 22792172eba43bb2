from pathlib import Path

import pytest

from cutroom.errors import CaptioningFailed, MalformedNarration, UndecodableMedia, UnreadableFrame
from cutroom.media import StubEngine
from cutroom.narration import Ingestor, NarrationCache, VideoAsset, _parse_narration
from cutroom.providers import CompletionRequest, ProviderScript, ScriptRule, ScriptedProvider
from conftest import make_asset, narration_response


def write_media(directory: Path, name: str, duration: float, durations: dict) -> Path:
    path = directory / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(f"media {name}".encode())
    durations[str(path)] = duration
    return path


@pytest.fixture
def narrating_provider():
    return ScriptedProvider(
        completion_script=ProviderScript(fallback=narration_response("A Clip", "Things happen."))
    )


class TestIngestion:
    def test_twelve_second_clip_gets_twelve_captions(self, tmp_path, paths, narrating_provider):
        durations = {}
        media = write_media(tmp_path, "walk.mp4", 12.7, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        asset = ingestor.ingest_file(media)
        assert asset.duration_s == 12
        assert [t for t, _ in asset.frame_captions] == list(range(12))
        assert [c for _, c in asset.frame_captions] == [f"frame {t} caption" for t in range(12)]

    def test_ids_are_sequential_from_zero(self, tmp_path, paths, narrating_provider):
        durations = {}
        first = write_media(tmp_path, "a.mp4", 3, durations)
        second = write_media(tmp_path, "b.mp4", 4, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        assert ingestor.ingest_file(first).id == 0
        assert ingestor.ingest_file(second).id == 1

    def test_dense_ids_after_directory_ingest(self, tmp_path, paths, narrating_provider):
        durations = {}
        for i in range(5):
            write_media(tmp_path / "footage", f"clip_{i}.mp4", 2, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        report = ingestor.ingest_directory(tmp_path / "footage")
        assert [a.id for a in report.assets] == list(range(5))

    def test_corrupt_file_in_batch_reported_not_fatal(self, tmp_path, paths, narrating_provider):
        durations = {}
        footage = tmp_path / "footage"
        write_media(footage, "a.mp4", 2, durations)
        write_media(footage, "b.mp4", 2, durations)
        corrupt = footage / "c.mp4"
        corrupt.write_bytes(b"broken")  # no duration known -> undecodable in the stub
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        report = ingestor.ingest_directory(footage)
        assert len(report.assets) == 2
        assert len(report.errors) == 1
        assert isinstance(report.errors[0][1], UndecodableMedia)

    def test_warm_cache_reingest_makes_zero_provider_calls(self, tmp_path, paths, narrating_provider):
        durations = {}
        media = write_media(tmp_path, "walk.mp4", 5, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        first = ingestor.ingest_file(media)
        calls_after_first = len(narrating_provider.log)
        second = ingestor.ingest_file(media)
        assert len(narrating_provider.log) == calls_after_first
        assert second.id == first.id
        assert second.frame_captions == first.frame_captions

    def test_sub_second_media_rounds_up_to_one_caption(self, tmp_path, paths, narrating_provider):
        durations = {}
        media = write_media(tmp_path, "blip.mp4", 0.6, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        asset = ingestor.ingest_file(media)
        assert asset.duration_s == 1
        assert len(asset.frame_captions) == 1

    def test_captioning_failure_rolls_back_the_reservation(self, tmp_path, paths):
        class FailingCaptioner(ScriptedProvider):
            def caption_frame(self, frame):
                raise UnreadableFrame("simulated captioner outage")

        durations = {}
        media = write_media(tmp_path, "walk.mp4", 3, durations)
        engine = StubEngine(durations=durations)
        with pytest.raises(CaptioningFailed):
            Ingestor(FailingCaptioner(), engine, paths).ingest_file(media)

        # the cache is not poisoned: a later ingest succeeds with the same id
        healthy = Ingestor(
            ScriptedProvider(
                completion_script=ProviderScript(fallback=narration_response("Ok", "Fine."))
            ),
            engine,
            paths,
        )
        asset = healthy.ingest_file(media)
        assert asset.id == 0
        assert NarrationCache(paths).id_for_hash(asset.media_hash) == 0

    def test_frames_extracted_per_second(self, tmp_path, paths, narrating_provider):
        durations = {}
        media = write_media(tmp_path, "walk.mp4", 4, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        asset = ingestor.ingest_file(media)
        for t in range(4):
            assert paths.frame_image(asset.id, t).exists()


class TestNarrationGeneration:
    def test_golden_parse(self, paths):
        provider = ScriptedProvider(
            completion_script=ProviderScript(
                fallback="TITLE: Beach Walk\nSUMMARY: A stroll along the shore at sunset."
            )
        )
        ingestor = Ingestor(provider, StubEngine(default_duration_s=3), paths)
        narration = ingestor.generate_narration([(0, "sand"), (1, "waves")])
        assert narration.title == "Beach Walk"
        assert narration.summary == "A stroll along the shore at sunset."

    def test_summary_only_retries_once_then_fails(self, paths):
        provider = ScriptedProvider(
            completion_script=ProviderScript(fallback="SUMMARY: all summary, no title")
        )
        ingestor = Ingestor(provider, StubEngine(default_duration_s=3), paths)
        with pytest.raises(MalformedNarration):
            ingestor.generate_narration([(0, "sand")])
        assert len(provider.log) == 2

    def test_retry_reminder_can_recover(self, paths):
        provider = ScriptedProvider(
            completion_script=ProviderScript(
                rules=[ScriptRule.substring("did not follow the format", narration_response("Fixed", "Now labeled."))],
                fallback="no labels here",
            )
        )
        ingestor = Ingestor(provider, StubEngine(default_duration_s=3), paths)
        narration = ingestor.generate_narration([(0, "sand")])
        assert narration.title == "Fixed"

    def test_prompt_contains_captions_in_timestamp_order(self, paths):
        seen = {}

        class Spy(ScriptedProvider):
            def complete(self, req: CompletionRequest) -> str:
                seen["prompt"] = req.prompt
                return narration_response("T", "S")

        ingestor = Ingestor(Spy(), StubEngine(default_duration_s=3), paths)
        captions = [(0, "first thing"), (1, "second thing"), (2, "third thing")]
        ingestor.generate_narration(captions)
        prompt = seen["prompt"]
        assert prompt.index("0: first thing") < prompt.index("1: second thing") < prompt.index("2: third thing")

    def test_single_caption_prompt_contains_exactly_that_caption(self, paths):
        seen = {}

        class Spy(ScriptedProvider):
            def complete(self, req: CompletionRequest) -> str:
                seen["prompt"] = req.prompt
                return narration_response("T", "S")

        ingestor = Ingestor(Spy(), StubEngine(default_duration_s=1), paths)
        ingestor.generate_narration([(0, "a lone dog on a beach")])
        assert seen["prompt"].count("a lone dog on a beach") == 1

    def test_title_capped_at_80_chars(self):
        narration = _parse_narration(narration_response("x" * 200, "s"))
        assert narration is not None
        assert len(narration.title) == 80

    def test_multiline_summary_joined(self):
        narration = _parse_narration("TITLE: T\nSUMMARY: first part\nsecond part")
        assert narration.summary == "first part second part"


class TestCache:
    def test_roundtrip_through_records(self, tmp_path, paths, narrating_provider):
        durations = {}
        media = write_media(tmp_path, "walk.mp4", 3, durations)
        ingestor = Ingestor(narrating_provider, StubEngine(durations=durations), paths)
        asset = ingestor.ingest_file(media)
        loaded = NarrationCache(paths).load_asset(asset.id)
        assert loaded.frame_captions == asset.frame_captions
        assert loaded.narration == asset.narration
        assert loaded.media_hash == asset.media_hash


class TestVideoAssetInvariants:
    def test_caption_timestamps_must_be_dense(self):
        with pytest.raises(ValueError):
            VideoAsset(
                id=0,
                media_path=Path("/m.mp4"),
                duration_s=3,
                frame_captions=[(0, "a"), (2, "c")],
                narration=make_asset(0).narration,
                media_hash="h",
            )

    def test_make_asset_helper_is_valid(self):
        asset = make_asset(3, duration_s=5)
        assert len(asset.frame_captions) == 5
