"""Builds the N-source topology for a scenario and runs it."""

from typing import Optional

from loguru import logger

from domain.engine import EventQueue, Transmitter
from domain.exceptions import InvariantViolation
from domain.framing import FrameCounter, Reassembler, encapsulate, max_goodput
from domain.metrics import RunResult, TraceRecorder
from domain.models import (
    NS_PER_MS,
    Cell,
    EventKind,
    SourceStats,
    TcpFlavor,
    TcpSegment,
)
from domain.parsers.scenario_parser import ScenarioConfig
from domain.switch import OutputPort, ScriptedLoss
from domain.tcp import RtoEstimator, TcpReceiver, TcpSender


MAX_EFFICIENCY = 1.01


class SourceHost:
    """TCP sender plus its NIC and the AAL5 reassembly of returning ACKs."""

    def __init__(self, vc: int, sender: TcpSender, nic: Transmitter, frames: FrameCounter):
        self.vc = vc
        self.sender = sender
        self.nic = nic
        self.frames = frames
        self.reassembler = Reassembler()
        self.cells_in = 0

    def transmit(self, seg: TcpSegment) -> None:
        burst = encapsulate(seg, self.frames.next_id(self.vc))
        for cell in burst.cells:
            self.nic.send(cell)
        self.cells_in += len(burst)

    def on_cell(self, cell: Cell) -> None:
        result = self.reassembler.push(cell)
        if isinstance(result, TcpSegment):
            self.sender.on_ack(result)


class DestinationHost:
    """AAL5 reassembly and the TCP receiver; ACK cells leave through its NIC."""

    def __init__(self, vc: int, receiver: TcpReceiver, nic: Transmitter, frames: FrameCounter):
        self.vc = vc
        self.receiver = receiver
        self.nic = nic
        self.frames = frames
        self.reassembler = Reassembler()
        receiver.send_ack = self.transmit

    @property
    def frames_lost(self) -> int:
        """Every frame closed short, including one closed by another frame's EOM."""
        return self.reassembler.frames_lost

    def transmit(self, ack: TcpSegment) -> None:
        burst = encapsulate(ack, self.frames.next_id(self.vc), reverse=True)
        for cell in burst.cells:
            self.nic.send(cell)

    def on_cell(self, cell: Cell) -> None:
        result = self.reassembler.push(cell)
        if isinstance(result, TcpSegment):
            self.receiver.receiver_on_segment(result)


class Network:
    """
    N sources -> switch A -> bottleneck -> switch B -> N destinations, and back.

    Each direction crosses three links: access, backbone, access. Both switches
    run the scenario's drop policy on every output port; only the A->B port is
    ever shared by data from all sources.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        trace_period_ns: Optional[int] = None,
        trace_senders: bool = True,
        trace_queue: bool = True,
        record_drops: bool = False,
    ):
        self.config = config
        self.clock = EventQueue()
        rate = config.link_rate
        policy = config.drop_policy
        frames = FrameCounter()
        ack_frames = FrameCounter()

        def port(name: str, delay: int, deliver) -> OutputPort:
            return OutputPort(
                name,
                self.clock,
                config.buffer,
                policy,
                rate,
                delay,
                deliver,
                record_drops=record_drops,
            )

        self.bottleneck = port("A->B", config.backbone_delay_ns, self._to_destination_port)
        self.reverse_bottleneck = port("B->A", config.backbone_delay_ns, self._to_source_port)
        if config.forced_losses:
            self.bottleneck.scripted = ScriptedLoss(0, config.forced_losses, config.mss)

        self.sources: list[SourceHost] = []
        self.destinations: list[DestinationHost] = []
        self.destination_ports: list[OutputPort] = []
        self.source_ports: list[OutputPort] = []

        for vc in range(config.n_sources):
            src_nic = Transmitter(
                f"src{vc}", self.clock, rate, config.access_delay_ns, self.bottleneck.receive
            )
            sender = TcpSender(
                vc=vc,
                flavor=config.flavor,
                mss=config.mss,
                rcvwnd=config.window,
                clock=self.clock,
                transmit=lambda seg: None,
                rto=RtoEstimator(granularity_ns=config.rto_granularity_ns),
                ack_counting=config.ack_counting,
                sack_partial_acks=config.sack_partial_acks,
            )
            source = SourceHost(vc, sender, src_nic, frames)
            sender.transmit = source.transmit

            dst_nic = Transmitter(
                f"dst{vc}",
                self.clock,
                rate,
                config.access_delay_ns,
                self.reverse_bottleneck.receive,
            )
            destination = DestinationHost(
                vc, TcpReceiver(vc, config.flavor), dst_nic, ack_frames
            )

            self.sources.append(source)
            self.destinations.append(destination)
            self.destination_ports.append(
                port(f"B->dst{vc}", config.access_delay_ns, destination.on_cell)
            )
            self.source_ports.append(port(f"A->src{vc}", config.access_delay_ns, source.on_cell))

        self.recorder: Optional[TraceRecorder] = None
        if trace_period_ns is not None:
            self.recorder = TraceRecorder(
                self.clock,
                trace_period_ns,
                [s.sender for s in self.sources],
                self.bottleneck,
                include_senders=trace_senders,
                include_queue=trace_queue,
            )

    def _to_destination_port(self, cell: Cell) -> None:
        self.destination_ports[cell.vc].receive(cell)

    def _to_source_port(self, cell: Cell) -> None:
        self.source_ports[cell.vc].receive(cell)

    @property
    def ports(self) -> list[OutputPort]:
        return [
            self.bottleneck,
            self.reverse_bottleneck,
            *self.destination_ports,
            *self.source_ports,
        ]

    @property
    def senders(self) -> list[TcpSender]:
        return [s.sender for s in self.sources]

    @property
    def receivers(self) -> list[TcpReceiver]:
        return [d.receiver for d in self.destinations]

    def start(self) -> None:
        if self.recorder is not None:
            self.recorder.start()
        for source in self.sources:
            self.clock.schedule(
                self.config.start_offset_ns(source.vc),
                source.sender.start,
                kind=EventKind.SOURCE_START,
                target=f"tcp{source.vc}",
            )

    def run(self) -> RunResult:
        """Run to the configured duration, audit, and collect results."""
        config = self.config
        logger.info(
            f"Running {config.preset.value} n={config.n_sources} K={config.buffer} "
            f"{config.flavor.value}/{config.policy.value} for "
            f"{config.duration_ns / 1e9:g} s (rate_scale {config.rate_scale})"
        )
        self.start()
        fired = self.clock.run_until(config.duration_ns)
        self.audit()
        result = self.collect(fired)
        if result.efficiency > MAX_EFFICIENCY:
            raise InvariantViolation(
                f"Efficiency {result.efficiency:.4f} exceeds the link capacity"
            )
        logger.info(
            f"Finished {config.preset.value} n={config.n_sources} K={config.buffer} "
            f"{config.flavor.value}/{config.policy.value}: efficiency {result.efficiency:.4f}, "
            f"fairness {result.fairness:.4f}, timeouts {result.timeouts}"
        )
        return result

    # ------------------------------------------------------------------ audits

    def forward_cells_in_flight(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for event in self.clock.pending(EventKind.CELL_ARRIVAL):
            cell = event.args[0]
            if isinstance(cell, Cell) and not cell.reverse:
                counts[cell.vc] = counts.get(cell.vc, 0) + 1
        return counts

    def cells_dropped(self, vc: int) -> int:
        return self.bottleneck.drops[vc] + self.destination_ports[vc].drops[vc]

    def audit(self) -> None:
        """Conservation of cells per VC and in-order byte-stream integrity."""
        for p in self.ports:
            p.audit()

        in_flight = self.forward_cells_in_flight()
        for source, destination in zip(self.sources, self.destinations):
            vc = source.vc
            delivered = destination.reassembler.cells_received
            dropped = self.cells_dropped(vc)
            flying = in_flight.get(vc, 0)
            if source.cells_in != delivered + dropped + flying:
                logger.error(f"Conservation audit failed for VC {vc}")
                raise InvariantViolation(
                    f"VC {vc}: cells_in {source.cells_in} != delivered {delivered} "
                    f"+ dropped {dropped} + in flight {flying}"
                )

            sender, receiver = source.sender, destination.receiver
            receiver.audit()
            if not (sender.snd_una <= receiver.rcv_nxt <= sender.snd_max):
                raise InvariantViolation(
                    f"VC {vc}: delivered prefix {receiver.rcv_nxt} outside "
                    f"[{sender.snd_una}, {sender.snd_max}]"
                )
            if receiver.rcv_nxt % sender.mss:
                raise InvariantViolation(
                    f"VC {vc}: delivered prefix {receiver.rcv_nxt} is not segment aligned"
                )
            if self.config.flavor == TcpFlavor.SACK:
                self.audit_sack(sender, receiver)

    @staticmethod
    def audit_sack(sender: TcpSender, receiver: TcpReceiver) -> None:
        """A segment the sender holds as SACKed must really be at the receiver."""
        for record in sender.table:
            if not record.sacked or record.end <= receiver.rcv_nxt:
                continue
            if not receiver.blocks.holds(record.seq, record.end):
                logger.error(f"SACK audit failed for VC {sender.vc}")
                raise InvariantViolation(
                    f"VC {sender.vc}: segment [{record.seq}, {record.end}) marked SACKed "
                    f"but not held by the receiver"
                )

    def collect(self, fired: int) -> RunResult:
        config = self.config
        sources = []
        for source, destination in zip(self.sources, self.destinations):
            vc = source.vc
            sources.append(
                SourceStats(
                    vc=vc,
                    delivered_bytes=destination.receiver.delivered_bytes,
                    counters=source.sender.counters,
                    cells_in=source.cells_in,
                    cells_delivered=destination.reassembler.cells_received,
                    cells_dropped=self.cells_dropped(vc),
                    frames_lost=destination.frames_lost,
                    start_ns=config.start_offset_ns(vc),
                    log=list(source.sender.log),
                    final_cwnd=source.sender.cwnd,
                )
            )

        drops_by_reason: dict[str, int] = {}
        drop_log = []
        for p in [self.bottleneck, *self.destination_ports]:
            for reason, count in p.drops_by_reason.items():
                drops_by_reason[reason.value] = drops_by_reason.get(reason.value, 0) + count
            drop_log.extend(p.drop_log)

        return RunResult(
            preset=config.preset.value,
            n_sources=config.n_sources,
            buffer=config.buffer,
            flavor=config.flavor.value,
            policy=config.policy.value,
            rate_scale=config.rate_scale,
            duration_ns=config.duration_ns,
            max_goodput=max_goodput(config.link_rate, config.mss),
            sources=sources,
            drops_by_reason=drops_by_reason,
            events_fired=fired,
            partial_frames=self.bottleneck.partial_frames,
            max_occupancy=self.bottleneck.max_occupancy,
            traces=list(self.recorder.rows) if self.recorder is not None else [],
            drop_log=sorted(drop_log, key=lambda r: r.time_ns),
        )


def build(
    config: ScenarioConfig,
    trace_period_ms: Optional[int] = None,
    trace_senders: bool = True,
    trace_queue: bool = True,
    record_drops: bool = False,
) -> Network:
    """Construct a ready-to-run simulation instance for `config`."""
    period = trace_period_ms * NS_PER_MS if trace_period_ms is not None else None
    return Network(
        config,
        trace_period_ns=period,
        trace_senders=trace_senders,
        trace_queue=trace_queue,
        record_drops=record_drops,
    )


def run_scenario(config: ScenarioConfig, **kwargs) -> RunResult:
    """Build and run one scenario."""
    return build(config, **kwargs).run()
