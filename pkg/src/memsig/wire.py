"""Length-delimited JSON framing for the coordinator's TCP protocol.

A frame is the ASCII decimal byte-length of the JSON payload, a newline,
then exactly that many bytes of UTF-8 JSON:

    b"17\\n{\\"type\\": \\"ok\\"}"

Group elements travel as their canonical hex encoding, scalars as
fixed-length big-endian hex, byte strings (messages, timestamps) as plain
hex.  Every request carries a ``type``; every error reply is
``{"type": "error", "code": ..., "detail": ...}`` where ``code`` mirrors
the coordinator's exception codes.
"""

import json

MAX_FRAME = 1 << 22


class WireError(Exception):
    pass


def encode_frame(obj) -> bytes:
    payload = json.dumps(obj, separators=(",", ":")).encode()
    return b"%d\n%s" % (len(payload), payload)


def read_frame(reader):
    """Read one frame from a binary file-like; None on clean EOF."""
    line = reader.readline(32)
    if not line:
        return None
    if not line.endswith(b"\n"):
        raise WireError("malformed frame header")
    try:
        length = int(line[:-1])
    except ValueError:
        raise WireError("malformed frame length") from None
    if not 0 <= length <= MAX_FRAME:
        raise WireError(f"frame length {length} out of range")
    payload = reader.read(length)
    if len(payload) != length:
        raise WireError("truncated frame")
    try:
        return json.loads(payload)
    except json.JSONDecodeError as exc:
        raise WireError(f"bad JSON payload: {exc}") from None


def write_frame(writer, obj):
    writer.write(encode_frame(obj))
    writer.flush()


def error_reply(code: str, detail: str = "") -> dict:
    return {"type": "error", "code": code, "detail": detail}
