#!/usr/bin/env python3
# Copyright 2026 The ab2h Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes fixtures/golden/*.hex, one frame per message type.

Packed with struct from the wire layout alone, so the C++ codec is checked
against an encoder it shares no code with. The message each file holds is
repeated in tests/golden_test.cpp.
"""

import pathlib
import struct

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "golden"

HELLO, BYE, SHARE_UPLOAD, SHARE_ACK = 0x01, 0x02, 0x10, 0x11
CROSS_REQ, CROSS_RESP, TRIPLE_REQ, TRIPLE_RESP = 0x20, 0x21, 0x22, 0x23
EXCHANGE, OUTPUT = 0x30, 0x40


def frame(msg_type, party, f, session, counter, payload):
    head = b"AB20" + struct.pack("<BBBBIII", 1, msg_type, party, f, session,
                                 counter, len(payload))
    return head + payload


def bits(s):
    """'1011' -> packed bytes, bit i of the string at bit i (LSB first)."""
    out = bytearray((len(s) + 7) // 8)
    for i, ch in enumerate(s):
        if ch == "1":
            out[i // 8] |= 1 << (i % 8)
    return bytes(out)


def words(*ws):
    return b"".join(struct.pack("<Q", w) for w in ws)


FRAMES = {
    "hello": frame(HELLO, 0, 13, 0x01020304, 0,
                   struct.pack("<BBBBQ", 1, 1, 13, 0, 0x1122334455667788)),
    "bye": frame(BYE, 1, 13, 7, 9, bytes([0x02])),
    "share_upload": frame(SHARE_UPLOAD, 3, 13, 7, 1,
                          struct.pack("<BBHII", 1, 0, 2, 1, 3) +
                          bytes([0xDE, 0xAD, 0xBE, 0xEF, 0x01])),
    "share_ack": frame(SHARE_ACK, 0, 13, 7, 1, struct.pack("<BBH", 2, 0, 2)),
    "cross_term_req": frame(CROSS_REQ, 1, 13, 7, 42,
                            struct.pack("<BBHHHII", 2, 0, 1, 4, 0, 2, 2) +
                            words(1, 2, 3, 0xFFFFFFFFFFFFFFFF,
                                  0x0123456789ABCDEF, 5)),
    "cross_term_resp": frame(CROSS_RESP, 2, 13, 7, 42,
                             struct.pack("<II", 2, 0) +
                             words(0x8000000000000000, 7)),
    "and_triple_req": frame(TRIPLE_REQ, 0, 13, 7, 3, struct.pack("<Q", 10)),
    "and_triple_resp": frame(TRIPLE_RESP, 2, 13, 7, 3,
                             struct.pack("<Q", 10) + bits("1010110011") +
                             bits("0110000001") + bits("0010000001")),
    "online_exchange": frame(EXCHANGE, 0, 13, 7, 5,
                             struct.pack("<BBHHHI", 1, 0, 0, 1, 0, 2) +
                             words(1, (1 << 63) + 5)),
    "online_exchange_bits": frame(EXCHANGE, 1, 13, 7, 6,
                                  struct.pack("<BBHHHI", 2, 0, 0, 1, 0, 9) +
                                  bits("110000001") + bits("000000011")),
    "output_share": frame(OUTPUT, 0, 13, 7, 0,
                          b"AB2S" + struct.pack("<BBBBII", 1, 2, 0, 13, 3, 1) +
                          bits("000") + bits("101")),
}


def hexdump(data):
    lines = []
    for i in range(0, len(data), 16):
        lines.append(" ".join(f"{b:02x}" for b in data[i:i + 16]))
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in FRAMES.items():
        (OUT / f"{name}.hex").write_text(
            f"# {name}: {len(data)} bytes, little-endian wire format\n" +
            hexdump(data))


if __name__ == "__main__":
    main()
