import argparse

from cli.exceptions import EXIT_OK
from cli.schemas import PresetInfo
from domain.parsers.presets import PRESETS


def presets_command(args: argparse.Namespace) -> int:
    infos = [PresetInfo.from_preset(p) for p in PRESETS.values()]
    if args.json:
        for info in infos:
            print(info.model_dump_json())
        return EXIT_OK

    for info in infos:
        buffers = ", ".join(f"{k:,}" for k in info.buffers)
        print(
            f"{info.name:<4} access {info.access_delay_ns / 1e6:g} ms, "
            f"backbone {info.backbone_delay_ns / 1e6:g} ms, RTT {info.rtt_ns / 1e6:g} ms, "
            f"buffers {buffers} cells, mss {info.mss}, window {info.window:,}, "
            f"duration {info.duration_ns / 1e9:g} s  ({info.description})"
        )
    return EXIT_OK
