from pathlib import Path

import numpy as np
import pytest

from cutroom.errors import UndecodableMedia
from cutroom.media import FfmpegEngine, OpenCvEngine, StubEngine, default_engine


def make_clip(path: Path, seconds: float, fps: float = 10.0, size=(64, 48), tint: int = 0) -> Path:
    """Tiny real video; every frame carries its index (plus a per-clip tint,
    so distinct fixtures have distinct content hashes) as a gray level."""
    import cv2

    path.parent.mkdir(parents=True, exist_ok=True)
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, size)
    assert writer.isOpened()
    for i in range(int(round(seconds * fps))):
        frame = np.full((size[1], size[0], 3), (i * 7 + tint) % 256, np.uint8)
        writer.write(frame)
    writer.release()
    return path


@pytest.fixture
def engine():
    return OpenCvEngine()


class TestOpenCvEngine:
    def test_probe_duration(self, tmp_path, engine):
        clip = make_clip(tmp_path / "c.avi", seconds=4.0)
        info = engine.probe(clip)
        assert info.duration_s == pytest.approx(4.0, abs=0.101)
        assert info.fps == pytest.approx(10.0)

    def test_probe_missing_file(self, tmp_path, engine):
        with pytest.raises(UndecodableMedia):
            engine.probe(tmp_path / "missing.avi")

    def test_probe_non_video(self, tmp_path, engine):
        junk = tmp_path / "junk.avi"
        junk.write_bytes(b"this is not a video")
        with pytest.raises(UndecodableMedia):
            engine.probe(junk)

    def test_cut_duration_within_one_frame(self, tmp_path, engine):
        clip = make_clip(tmp_path / "c.avi", seconds=10.0)
        out = tmp_path / "cut.avi"
        engine.cut(clip, 2, 7, out)
        info = engine.probe(out)
        assert abs(info.duration_s - 5.0) <= 1.0 / info.fps

    def test_concat_durations_add_up(self, tmp_path, engine):
        parts = []
        for i, seconds in enumerate([2.0, 3.0]):
            parts.append(make_clip(tmp_path / f"p{i}.avi", seconds=seconds))
        out = tmp_path / "joined.avi"
        engine.concat(parts, out)
        assert engine.probe(out).duration_s == pytest.approx(5.0, abs=0.21)

    def test_extract_frame_writes_image(self, tmp_path, engine):
        clip = make_clip(tmp_path / "c.avi", seconds=3.0)
        out = tmp_path / "frames" / "t1.jpg"
        engine.extract_frame(clip, 1, out)
        assert out.exists() and out.stat().st_size > 0


class TestStubEngine:
    def test_probe_uses_duration_map(self, tmp_path):
        media = tmp_path / "a.mp4"
        media.write_bytes(b"x")
        engine = StubEngine(durations={str(media): 12.0})
        assert engine.probe(media).duration_s == 12.0

    def test_probe_uses_sidecar(self, tmp_path):
        media = tmp_path / "b.mp4"
        media.write_bytes(b"x")
        (tmp_path / "b.mp4.meta.json").write_text('{"duration_s": 7}')
        assert StubEngine().probe(media).duration_s == 7.0

    def test_unknown_duration_is_undecodable(self, tmp_path):
        media = tmp_path / "c.mp4"
        media.write_bytes(b"x")
        with pytest.raises(UndecodableMedia):
            StubEngine().probe(media)

    def test_cut_and_concat_record_calls(self, tmp_path):
        media = tmp_path / "d.mp4"
        media.write_bytes(b"x")
        engine = StubEngine(durations={str(media): 10.0})
        cut = tmp_path / "cut.avi"
        out = tmp_path / "out.avi"
        engine.cut(media, 2, 5, cut)
        engine.concat([cut], out)
        assert [c.op for c in engine.calls] == ["cut", "concat"]
        assert engine.probe(out).duration_s == 3.0


@pytest.mark.skipif(not FfmpegEngine.available(), reason="ffmpeg binary not installed")
class TestFfmpegEngine:
    def test_cut_duration(self, tmp_path):
        engine = FfmpegEngine()
        clip = make_clip(tmp_path / "c.avi", seconds=6.0)
        out = tmp_path / "cut.mp4"
        engine.cut(clip, 1, 4, out)
        info = engine.probe(out)
        assert info.duration_s == pytest.approx(3.0, abs=0.2)


def test_default_engine_picks_something():
    engine = default_engine()
    assert isinstance(engine, (FfmpegEngine, OpenCvEngine))
