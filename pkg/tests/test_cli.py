import json

import yaml
from click.testing import CliRunner

from cutroom.service.cli import main
from cutroom.storage import ProjectPaths, read_json
from test_media import make_clip

MOCK_PROVIDER = {
    "provider": {
        "embedding_dim": 8,
        "completion": {
            "rules": [
                {
                    "match": "see what I have",
                    "response": "GOAL: get an overview\nACTIONS:\n1. Overview:",
                },
                {"match": "Summarize the common topics", "response": "Two clips about colors."},
            ],
            "fallback": "TITLE: A Color Clip\nSUMMARY: Frames of a single color.",
        },
    }
}


def write_mock_script(path):
    path.write_text(yaml.safe_dump(MOCK_PROVIDER), encoding="utf-8")
    return path


def ingest_fixture(tmp_path, n=2):
    footage = tmp_path / "footage"
    for i in range(n):
        make_clip(footage / f"clip_{i}.avi", seconds=3.0, tint=i * 40)
    script = write_mock_script(tmp_path / "mock.yaml")
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "ingest",
            str(footage),
            "--project",
            str(tmp_path / "proj"),
            "--mock-script",
            str(script),
        ],
    )
    return runner, result, tmp_path / "proj", script


class TestIngestCommand:
    def test_ingest_creates_cache_vectors_and_document(self, tmp_path):
        _, result, project_root, _ = ingest_fixture(tmp_path)
        assert result.exit_code == 0, result.output
        assert "2 asset(s) ready, 0 error(s)" in result.output
        paths = ProjectPaths(root=project_root)
        assert paths.document.exists()
        manifest = read_json(paths.manifest)
        assert [a["id"] for a in manifest["assets"]] == [0, 1]
        assert paths.vector_record(0).exists()
        document = read_json(paths.document)
        assert len(document["gallery"]["assets"]) == 2
        assert document["gallery"]["assets"][0]["title"] == "A Color Clip"

    def test_corrupt_file_reported_and_exit_nonzero(self, tmp_path):
        footage = tmp_path / "footage"
        make_clip(footage / "good.avi", seconds=2.0)
        (footage / "bad.mp4").write_bytes(b"not a video")
        script = write_mock_script(tmp_path / "mock.yaml")
        result = CliRunner().invoke(
            main,
            ["ingest", str(footage), "--project", str(tmp_path / "proj"),
             "--mock-script", str(script)],
        )
        assert result.exit_code == 1
        assert "1 asset(s) ready, 1 error(s)" in result.output
        assert "bad.mp4" in result.output


class TestIngestIntoExistingProject:
    def test_second_ingest_keeps_timeline_and_grows_gallery(self, tmp_path):
        _, result, project_root, script = ingest_fixture(tmp_path)
        assert result.exit_code == 0
        document = read_json(ProjectPaths(root=project_root).document)
        document["timeline"]["clips"] = [
            {"asset_id": 0, "position": 0, "start_s": 1, "end_s": 2, "rationale": None}
        ]
        ProjectPaths(root=project_root).document.write_text(
            json.dumps(document), encoding="utf-8"
        )
        more = tmp_path / "more"
        make_clip(more / "clip_9.avi", seconds=2.0, tint=200)
        rerun = CliRunner().invoke(
            main,
            ["ingest", str(more), "--project", str(project_root), "--mock-script", str(script)],
        )
        assert rerun.exit_code == 0, rerun.output
        merged = read_json(ProjectPaths(root=project_root).document)
        assert len(merged["gallery"]["assets"]) == 3
        assert merged["timeline"]["clips"][0]["start_s"] == 1


class TestReindexCommand:
    def test_reindex_reembeds_cache(self, tmp_path):
        _, result, project_root, script = ingest_fixture(tmp_path)
        assert result.exit_code == 0
        reindexed = CliRunner().invoke(
            main, ["reindex", "--project", str(project_root), "--mock-script", str(script)]
        )
        assert reindexed.exit_code == 0, reindexed.output
        assert "indexed 2 narration(s)" in reindexed.output


class TestReplayCommand:
    def test_replay_runs_conversation_and_dumps_state(self, tmp_path):
        _, result, project_root, _ = ingest_fixture(tmp_path)
        assert result.exit_code == 0
        replay_script = {
            "project": str(project_root),
            **MOCK_PROVIDER,
            "conversation": ["I want to see what I have", ""],
        }
        script_path = tmp_path / "replay.yaml"
        script_path.write_text(yaml.safe_dump(replay_script), encoding="utf-8")
        replayed = CliRunner().invoke(main, ["replay", str(script_path)])
        assert replayed.exit_code == 0, replayed.output
        state = json.loads(replayed.output)
        chat = state["view"]["chat"]
        assert chat[0]["content"] == "I want to see what I have"
        assert "Two clips about colors." in chat[-1]["content"]
        assert state["view"]["plan"]["actions"][0]["status"] == "executed"
        assert any(e["kind"] == "plan_status" for e in state["events"])

    def test_replay_writes_out_file(self, tmp_path):
        _, result, project_root, _ = ingest_fixture(tmp_path)
        replay_script = {
            "project": str(project_root),
            **MOCK_PROVIDER,
            "conversation": [],
        }
        script_path = tmp_path / "replay.yaml"
        script_path.write_text(yaml.safe_dump(replay_script), encoding="utf-8")
        out = tmp_path / "state.json"
        replayed = CliRunner().invoke(main, ["replay", str(script_path), "--out", str(out)])
        assert replayed.exit_code == 0, replayed.output
        assert json.loads(out.read_text())["view"]["timeline"] == []
