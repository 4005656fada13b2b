"""Every election is a deterministic function of its config, and the
transcript proves it: run, dump, re-run from the dump, compare.
"""

import tempfile

from votesim.errors import CorruptTranscript
from votesim.simnet import ElectionConfig, replay, run_election, transcript_lines

config = ElectionConfig(protocol="hevs", n=6, k=4, seed=21, p_fail=0.3)
outcome = run_election(config)
print(f"decision={outcome.decision} sample tallies={outcome.sample_tallies}")

lines = transcript_lines(outcome)
print(f"transcript: {len(lines) - 1} message records plus the config header")
print("first records:")
for line in lines[1:4]:
    phase, sender, receiver, payload = line.split("\t")
    print(f"  {phase:16s} {sender:9s} -> {receiver:10s} payload {len(payload) // 2} bytes")

with tempfile.NamedTemporaryFile("w", suffix=".transcript", delete=False) as fh:
    fh.write("\n".join(lines) + "\n")
    path = fh.name

with open(path) as fh:
    again = replay(fh.readlines())
print(f"replay reproduced decision {again.decision}: "
      f"{transcript_lines(again) == lines}")

# tamper with one record and replay again
broken = list(lines)
broken[5] = broken[5][:-2] + "00"
try:
    replay(broken)
except CorruptTranscript as exc:
    print(f"tampered transcript rejected: {exc}")
