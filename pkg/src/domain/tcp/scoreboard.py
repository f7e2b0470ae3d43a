"""SACK bookkeeping for both ends of a connection."""

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional

from domain.models import SackBlock


MAX_SACK_BLOCKS = 3


class RecvBlocks:
    """
    Out-of-order byte ranges held by a receiver above rcv_nxt.

    Ranges are kept disjoint and sorted. Each range remembers when it was last
    extended so that the SACK option can list the freshest ranges first.
    """

    def __init__(self) -> None:
        self._ranges: list[list[int]] = []  # [left, right, stamp]
        self._stamp = 0
        self.most_recent: Optional[tuple[int, int]] = None

    def __len__(self) -> int:
        return len(self._ranges)

    def __bool__(self) -> bool:
        return bool(self._ranges)

    @property
    def ranges(self) -> list[tuple[int, int]]:
        return [(left, right) for left, right, _ in self._ranges]

    def record_arrival(self, left: int, right: int) -> None:
        """Merge [left, right) into the set; overlap with held data is harmless."""
        if left >= right:
            return
        self._stamp += 1
        ranges = self._ranges
        i = bisect_left([r[1] for r in ranges], left)
        new_left, new_right = left, right
        j = i
        while j < len(ranges) and ranges[j][0] <= new_right:
            new_left = min(new_left, ranges[j][0])
            new_right = max(new_right, ranges[j][1])
            j += 1
        ranges[i:j] = [[new_left, new_right, self._stamp]]
        self.most_recent = (new_left, new_right)

    def advance(self, rcv_nxt: int) -> int:
        """Absorb a range that now starts at rcv_nxt; return the new rcv_nxt."""
        ranges = self._ranges
        while ranges and ranges[0][0] <= rcv_nxt:
            left, right, _ = ranges.pop(0)
            rcv_nxt = max(rcv_nxt, right)
            if self.most_recent is not None and self.most_recent[0] == left:
                self.most_recent = None
        return rcv_nxt

    def holds(self, left: int, right: int) -> bool:
        """True if every byte of [left, right) is held."""
        return any(r[0] <= left and right <= r[1] for r in self._ranges)

    def make_sack_option(self) -> tuple[SackBlock, ...]:
        """First the block with the latest arrival, then the most recently updated others."""
        if not self._ranges:
            return ()
        by_recency = sorted(self._ranges, key=lambda r: r[2], reverse=True)
        if self.most_recent is not None:
            first = next(
                (r for r in by_recency if (r[0], r[1]) == self.most_recent), by_recency[0]
            )
        else:
            first = by_recency[0]
        others = [r for r in by_recency if r is not first]
        chosen = [first, *others][:MAX_SACK_BLOCKS]
        return tuple(SackBlock(r[0], r[1]) for r in chosen)


@dataclass(slots=True)
class SegmentRecord:
    seq: int
    end: int
    sacked: bool = False
    retransmitted: bool = False


class SendTable:
    """Sender-side table of segments sent but not yet cumulatively acknowledged."""

    def __init__(self) -> None:
        self._records: list[SegmentRecord] = []
        self._by_seq: dict[int, SegmentRecord] = {}
        self.highest_sacked = 0

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def record_sent(self, seq: int, end: int) -> None:
        if seq in self._by_seq:
            return
        record = SegmentRecord(seq, end)
        if self._records and self._records[-1].seq > seq:
            idx = bisect_left([r.seq for r in self._records], seq)
            self._records.insert(idx, record)
        else:
            self._records.append(record)
        self._by_seq[seq] = record

    def get(self, seq: int) -> Optional[SegmentRecord]:
        return self._by_seq.get(seq)

    def mark_retransmitted(self, seq: int) -> None:
        record = self._by_seq.get(seq)
        if record is not None:
            record.retransmitted = True

    def apply_sack(self, blocks: Iterable[SackBlock], snd_una: int, snd_max: int) -> int:
        """Mark covered segments SACKed; return the number newly marked."""
        newly = 0
        for block in blocks:
            if block.right <= snd_una or block.left >= snd_max:
                continue
            left = max(block.left, snd_una)
            right = min(block.right, snd_max)
            for record in self._records:
                if record.seq >= right:
                    break
                if record.seq >= left and record.end <= right and not record.sacked:
                    record.sacked = True
                    newly += 1
            if right > self.highest_sacked:
                self.highest_sacked = right
        return newly

    def ack_to(self, snd_una: int) -> None:
        """Drop records entirely below the cumulative ACK point."""
        records = self._records
        cut = 0
        while cut < len(records) and records[cut].end <= snd_una:
            del self._by_seq[records[cut].seq]
            cut += 1
        if cut:
            del records[:cut]

    def next_hole(self, snd_una: int, snd_nxt: Optional[int] = None) -> Optional[SegmentRecord]:
        """Lowest unSACKed, un-retransmitted segment below the highest SACKed byte."""
        limit = self.highest_sacked if snd_nxt is None else min(self.highest_sacked, snd_nxt)
        for record in self._records:
            if record.seq >= limit:
                return None
            if record.end <= snd_una:
                continue
            if not record.sacked and not record.retransmitted:
                return record
        return None

    def sacked_bytes(self) -> int:
        return sum(r.end - r.seq for r in self._records if r.sacked)

    def reset(self) -> None:
        """Forget SACK and retransmission marks (timeout); everything unacked is a hole."""
        for record in self._records:
            record.sacked = False
            record.retransmitted = False
        self.highest_sacked = self._records[-1].end if self._records else 0
