from cli.schemas.common import CheckReport, ErrorReport, PresetInfo, RunRecord, SourceRecord

__all__ = ["CheckReport", "ErrorReport", "PresetInfo", "RunRecord", "SourceRecord"]
