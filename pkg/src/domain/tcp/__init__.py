from domain.tcp.receiver import TcpReceiver
from domain.tcp.rto import RtoEstimator
from domain.tcp.scoreboard import MAX_SACK_BLOCKS, RecvBlocks, SegmentRecord, SendTable
from domain.tcp.sender import DUP_ACK_THRESHOLD, TcpSender

__all__ = [
    "DUP_ACK_THRESHOLD",
    "MAX_SACK_BLOCKS",
    "RecvBlocks",
    "RtoEstimator",
    "SegmentRecord",
    "SendTable",
    "TcpReceiver",
    "TcpSender",
]
