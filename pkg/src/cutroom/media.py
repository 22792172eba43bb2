"""Media engine adapters.

The engine contract is process-agnostic: probe a file, extract the frame at a
given second, cut a clip to a window, concatenate cuts. Three adapters:

- ``FfmpegEngine`` shells out to ffmpeg/ffprobe when the binaries exist.
- ``OpenCvEngine`` does frame-exact cuts and concats in-process via OpenCV.
- ``StubEngine`` touches no real media; it records calls and fakes durations,
  which is what fast tests and headless replays run on.
"""

from __future__ import annotations

import json
import shutil
import subprocess
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from .errors import MediaEngineFailure, UndecodableMedia


@dataclass(frozen=True)
class MediaInfo:
    duration_s: float
    fps: float
    frame_count: int
    width: int
    height: int


class MediaEngine(ABC):
    @abstractmethod
    def probe(self, path: Path) -> MediaInfo:
        """Read stream metadata. Raises UndecodableMedia for unreadable files."""

    @abstractmethod
    def extract_frame(self, path: Path, second: int, out_path: Path) -> None:
        """Write the frame at ``second`` as an image file."""

    @abstractmethod
    def cut(self, path: Path, start_s: int, end_s: int, out_path: Path) -> None:
        """Write the [start_s, end_s) window of ``path`` to ``out_path``."""

    @abstractmethod
    def concat(self, paths: list[Path], out_path: Path) -> None:
        """Concatenate cuts in order into ``out_path``."""

    @property
    def output_suffix(self) -> str:
        return ".avi"


class OpenCvEngine(MediaEngine):
    """In-process engine. Cuts are frame-exact: [start*fps, end*fps)."""

    def _capture(self, path: Path):
        import cv2

        if not path.exists():
            raise UndecodableMedia(f"no such media file: {path}")
        cap = cv2.VideoCapture(str(path))
        if not cap.isOpened():
            raise UndecodableMedia(f"cannot decode: {path}")
        return cap

    def probe(self, path: Path) -> MediaInfo:
        import cv2

        cap = self._capture(path)
        try:
            fps = cap.get(cv2.CAP_PROP_FPS) or 0.0
            frames = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
            width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
            height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))
        finally:
            cap.release()
        if fps <= 0 or frames <= 0:
            raise UndecodableMedia(f"no decodable video stream in {path}")
        return MediaInfo(duration_s=frames / fps, fps=fps, frame_count=frames, width=width, height=height)

    def extract_frame(self, path: Path, second: int, out_path: Path) -> None:
        import cv2

        info = self.probe(path)
        index = min(int(round(second * info.fps)), info.frame_count - 1)
        cap = self._capture(path)
        try:
            cap.set(cv2.CAP_PROP_POS_FRAMES, index)
            ok, frame = cap.read()
        finally:
            cap.release()
        if not ok:
            raise MediaEngineFailure(f"failed to read frame at {second}s from {path}")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        if not cv2.imwrite(str(out_path), frame):
            raise MediaEngineFailure(f"failed to write frame image {out_path}")

    def cut(self, path: Path, start_s: int, end_s: int, out_path: Path) -> None:
        import cv2

        info = self.probe(path)
        first = int(round(start_s * info.fps))
        last = min(int(round(end_s * info.fps)), info.frame_count)
        cap = self._capture(path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        writer = cv2.VideoWriter(
            str(out_path), cv2.VideoWriter_fourcc(*"MJPG"), info.fps, (info.width, info.height)
        )
        try:
            if not writer.isOpened():
                raise MediaEngineFailure(f"cannot open writer for {out_path}")
            cap.set(cv2.CAP_PROP_POS_FRAMES, first)
            for _ in range(first, last):
                ok, frame = cap.read()
                if not ok:
                    break
                writer.write(frame)
        finally:
            cap.release()
            writer.release()

    def concat(self, paths: list[Path], out_path: Path) -> None:
        import cv2

        if not paths:
            raise MediaEngineFailure("nothing to concatenate")
        head = self.probe(paths[0])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        writer = cv2.VideoWriter(
            str(out_path), cv2.VideoWriter_fourcc(*"MJPG"), head.fps, (head.width, head.height)
        )
        try:
            if not writer.isOpened():
                raise MediaEngineFailure(f"cannot open writer for {out_path}")
            for path in paths:
                cap = self._capture(path)
                try:
                    while True:
                        ok, frame = cap.read()
                        if not ok:
                            break
                        if frame.shape[1] != head.width or frame.shape[0] != head.height:
                            frame = cv2.resize(frame, (head.width, head.height))
                        writer.write(frame)
                finally:
                    cap.release()
        finally:
            writer.release()


class FfmpegEngine(MediaEngine):
    """Reference shell-out adapter. Requires ffmpeg and ffprobe on PATH."""

    def __init__(self, ffmpeg: str = "ffmpeg", ffprobe: str = "ffprobe"):
        self.ffmpeg = ffmpeg
        self.ffprobe = ffprobe

    @staticmethod
    def available() -> bool:
        return shutil.which("ffmpeg") is not None and shutil.which("ffprobe") is not None

    @property
    def output_suffix(self) -> str:
        return ".mp4"

    def _run(self, argv: list[str]) -> subprocess.CompletedProcess:
        try:
            proc = subprocess.run(argv, capture_output=True, text=True)
        except OSError as exc:
            raise MediaEngineFailure(f"cannot invoke {argv[0]}: {exc}") from exc
        if proc.returncode != 0:
            raise MediaEngineFailure(f"{argv[0]} exited {proc.returncode}", stderr=proc.stderr)
        return proc

    def probe(self, path: Path) -> MediaInfo:
        if not path.exists():
            raise UndecodableMedia(f"no such media file: {path}")
        argv = [
            self.ffprobe, "-v", "error", "-select_streams", "v:0",
            "-show_entries", "stream=r_frame_rate,nb_frames,width,height,duration",
            "-of", "json", str(path),
        ]
        try:
            proc = self._run(argv)
            stream = json.loads(proc.stdout)["streams"][0]
            num, _, den = stream["r_frame_rate"].partition("/")
            fps = float(num) / float(den or 1)
            duration = float(stream.get("duration") or 0.0)
            frames = int(stream.get("nb_frames") or round(duration * fps))
        except (MediaEngineFailure, KeyError, IndexError, ValueError) as exc:
            raise UndecodableMedia(f"cannot decode: {path} ({exc})") from exc
        if fps <= 0 or (duration <= 0 and frames <= 0):
            raise UndecodableMedia(f"no decodable video stream in {path}")
        if duration <= 0:
            duration = frames / fps
        return MediaInfo(
            duration_s=duration, fps=fps, frame_count=frames,
            width=int(stream.get("width") or 0), height=int(stream.get("height") or 0),
        )

    def extract_frame(self, path: Path, second: int, out_path: Path) -> None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        self._run([
            self.ffmpeg, "-y", "-ss", str(second), "-i", str(path),
            "-frames:v", "1", str(out_path),
        ])

    def cut(self, path: Path, start_s: int, end_s: int, out_path: Path) -> None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        self._run([
            self.ffmpeg, "-y", "-ss", str(start_s), "-to", str(end_s),
            "-i", str(path), "-c", "copy", str(out_path),
        ])

    def concat(self, paths: list[Path], out_path: Path) -> None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        listing = out_path.with_suffix(".concat.txt")
        listing.write_text("".join(f"file '{p.resolve()}'\n" for p in paths), encoding="utf-8")
        try:
            self._run([
                self.ffmpeg, "-y", "-f", "concat", "-safe", "0",
                "-i", str(listing), "-c", "copy", str(out_path),
            ])
        finally:
            listing.unlink(missing_ok=True)


@dataclass
class StubCall:
    op: str
    args: tuple


class StubEngine(MediaEngine):
    """Manifest-only engine for fast tests and headless replays.

    Durations come from the ``durations`` mapping, from a ``<file>.meta.json``
    sidecar with a ``duration_s`` key, or from ``default_duration_s``.
    """

    def __init__(self, durations: dict[str, float] | None = None, default_duration_s: float | None = None, fps: float = 10.0):
        self.durations = dict(durations or {})
        self.default_duration_s = default_duration_s
        self.fps = fps
        self.calls: list[StubCall] = []
        self._cut_windows: dict[str, float] = {}

    def _duration_for(self, path: Path) -> float:
        if str(path) in self.durations:
            return self.durations[str(path)]
        if str(path) in self._cut_windows:
            return self._cut_windows[str(path)]
        sidecar = Path(str(path) + ".meta.json")
        if sidecar.exists():
            return float(json.loads(sidecar.read_text())["duration_s"])
        if self.default_duration_s is not None:
            return self.default_duration_s
        raise UndecodableMedia(f"stub engine has no duration for {path}")

    def probe(self, path: Path) -> MediaInfo:
        if not path.exists():
            raise UndecodableMedia(f"no such media file: {path}")
        duration = self._duration_for(path)
        if duration <= 0:
            raise UndecodableMedia(f"no decodable video stream in {path}")
        return MediaInfo(
            duration_s=duration, fps=self.fps,
            frame_count=int(round(duration * self.fps)), width=64, height=48,
        )

    def extract_frame(self, path: Path, second: int, out_path: Path) -> None:
        self.probe(path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(f"frame {second} of {path.name}\n", encoding="utf-8")
        self.calls.append(StubCall("extract_frame", (str(path), second, str(out_path))))

    def cut(self, path: Path, start_s: int, end_s: int, out_path: Path) -> None:
        self.probe(path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            json.dumps({"source": str(path), "start_s": start_s, "end_s": end_s}) + "\n",
            encoding="utf-8",
        )
        self._cut_windows[str(out_path)] = float(end_s - start_s)
        self.calls.append(StubCall("cut", (str(path), start_s, end_s, str(out_path))))

    def concat(self, paths: list[Path], out_path: Path) -> None:
        total = sum(self._duration_for(p) for p in paths)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            json.dumps({"parts": [str(p) for p in paths], "duration_s": total}) + "\n",
            encoding="utf-8",
        )
        self._cut_windows[str(out_path)] = total
        self.calls.append(StubCall("concat", (tuple(str(p) for p in paths), str(out_path))))


def default_engine() -> MediaEngine:
    """ffmpeg when present, otherwise the in-process OpenCV engine."""
    if FfmpegEngine.available():
        return FfmpegEngine()
    return OpenCvEngine()
