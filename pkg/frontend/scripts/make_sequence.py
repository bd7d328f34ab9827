"""Write a small throwaway sequence for manual runs and the smoke check.

    python3 scripts/make_sequence.py /tmp/smoke-data
    boxlab serve --data-root /tmp/smoke-data --port 8123
"""
import sys
from pathlib import Path

from make_fixtures import ring_camera, write_sequence

N_CAMERAS = 6
N_FRAMES = 12


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(f"usage: {sys.argv[0]} OUTPUT_DIR")
    root = Path(sys.argv[1])
    cameras = [ring_camera(f"cam{i}", i * 1.0471975511965976) for i in range(N_CAMERAS)]
    write_sequence(root, cameras, N_FRAMES)
    print(f"wrote sequence with {N_CAMERAS} cameras x {N_FRAMES} frames to {root}")


if __name__ == "__main__":
    main()
