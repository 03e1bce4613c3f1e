"""Writes the EMB1 golden and malformed fixtures with Python's struct module,
independently of the C++ writer. Re-running must reproduce the committed
bytes exactly."""

import math
import struct
from pathlib import Path

HERE = Path(__file__).parent


def header(n, dim, magic=b"EMB1"):
    return magic + struct.pack("<II", n, dim)


def record(rid, values):
    raw = rid.encode("utf-8") if isinstance(rid, str) else rid
    return struct.pack("<H", len(raw)) + raw + struct.pack("<%df" % len(values), *values)


def write(name, data):
    (HERE / name).write_bytes(data)


GOLDEN = [
    ("violin", [1.0, 0.0, -2.5]),
    ("flute", [0.25, 0.5, 0.125]),
    ("guitarra eléctrica", [3.0, -1.0, 0.001]),
]

write("golden.emb", header(3, 3) + b"".join(record(i, v) for i, v in GOLDEN))
write("single.emb", header(1, 2) + record("violin", [1.0, 0.0]))
write("empty.emb", header(0, 4))

write("bad_magic.emb", header(1, 2, magic=b"XXXX") + record("violin", [1.0, 0.0]))
write("truncated_header.emb", header(1, 2)[:8])
write("truncated_record.emb", (header(2, 2) + record("violin", [1.0, 0.0]) + record("flute", [0.0, 1.0]))[:-3])
write("trailing_bytes.emb", header(1, 2) + record("violin", [1.0, 0.0]) + b"\x00\x00")
write("duplicate_id.emb", header(2, 2) + record("violin", [1.0, 0.0]) + record("violin", [0.0, 1.0]))
write("nan_value.emb", header(1, 2) + record("violin", [math.nan, 1.0]))
write("inf_value.emb", header(1, 2) + record("violin", [1.0, math.inf]))
write("zero_vector.emb", header(2, 2) + record("violin", [1.0, 0.0]) + record("silent_clip", [0.0, 0.0]))
write("empty_id.emb", header(1, 2) + record("", [1.0, 0.0]))
write("zero_dim.emb", header(0, 0))
write("invalid_utf8.emb", header(1, 2) + record(b"\xff\xfe", [1.0, 0.0]))
